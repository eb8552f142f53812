"""The forest manager: routing, tree creation, factoring, splits, rejoin, decay.

An ingested sequence is routed base-first: it starts at the tree whose base
carries its first label, descends matching children and, where a cut point
holds a link to a tree based at the next label, crosses into that tree.  The
sequence is therefore stored as one segment per tree it visits, and every
restructuring step below preserves those routes, so replaying the ledger
through the current forest reproduces every node count.
"""

from __future__ import annotations

import copy
import threading
from collections import defaultdict
from dataclasses import dataclass, field, fields
from pathlib import Path as FsPath
from typing import Iterable, Sequence

from . import tree as ct
from .errors import InvalidEvent, NotLinked, UnknownTree
from .links import EntityKeyset, Link
from .text import SequenceEvent
from .tree import ConceptNode, ConceptTree, Path

DIRECT = 0  # entry source for segments that start at a tree base (link keys start at 1)


@dataclass
class BaseConfig:
    min_share: int = 2
    falsity_ratio: float = 1.0
    decay_half_life: float = 8.0
    strength_floor: float = 0.05
    eager_scans: bool = True
    exclusive_split: bool = True

    def __post_init__(self):
        if self.min_share < 2:
            raise ValueError("min_share must be at least 2")
        if self.falsity_ratio <= 0 or self.decay_half_life <= 0:
            raise ValueError("falsity_ratio and decay_half_life must be positive")

    def items(self) -> list[tuple[str, str]]:
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            out.append((f.name, str(value).lower() if isinstance(value, bool) else repr(value)))
        return out

    @classmethod
    def parse(cls, pairs: Iterable[tuple[str, str]]) -> BaseConfig:
        kinds = {f.name: f.type for f in fields(cls)}
        values = {}
        for key, raw in pairs:
            if key not in kinds:
                raise ValueError(f"unknown config key {key!r}")
            kind = kinds[key]
            if kind == "bool":
                if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(f"{key}: not a boolean: {raw!r}")
                values[key] = raw.lower() in ("true", "1", "yes")
            elif kind == "int":
                values[key] = int(raw)
            else:
                values[key] = float(raw)
        return cls(**values)

    @classmethod
    def from_file(cls, path: str | FsPath) -> BaseConfig:
        pairs = []
        for lineno, line in enumerate(FsPath(path).read_text("utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            pairs.append((key.strip(), value.strip()))
        return cls.parse(pairs)


@dataclass
class RestructureReport:
    created: list[int] = field(default_factory=list)
    pruned: list[tuple[int, Path]] = field(default_factory=list)
    links_added: list[int] = field(default_factory=list)
    links_removed: list[int] = field(default_factory=list)
    splits: list[tuple[int, Path]] = field(default_factory=list)
    rejoins: list[tuple[int, int]] = field(default_factory=list)
    refused: list[tuple[int, int, str]] = field(default_factory=list)

    def merge(self, *others: RestructureReport) -> RestructureReport:
        for other in others:
            for f in fields(self):
                getattr(self, f.name).extend(getattr(other, f.name))
        return self

    def __bool__(self):
        return any(getattr(self, f.name) for f in fields(self))

    def summary(self) -> list[str]:
        def paths(items):
            return ", ".join(f"T{t}:{'/'.join(p)}" for t, p in items)

        return [
            f"created = {', '.join(f'T{t}' for t in self.created)}",
            f"pruned = {paths(self.pruned)}",
            f"links_added = {', '.join(f'L{k}' for k in self.links_added)}",
            f"links_removed = {', '.join(f'L{k}' for k in self.links_removed)}",
            f"splits = {paths(self.splits)}",
            f"rejoins = {', '.join(f'T{a}+T{b}' for a, b in self.rejoins)}",
            f"refused = {', '.join(f'T{a}+T{b} ({why})' for a, b, why in self.refused)}",
        ]


@dataclass
class Segment:
    tree: int | None
    labels: tuple[str, ...]
    via: int | None = None


@dataclass
class Route:
    segments: list[Segment]
    complete: bool = True

    @property
    def links(self) -> list[int]:
        return [s.via for s in self.segments if s.via is not None]


class ConceptBase:
    def __init__(self, config: BaseConfig | None = None):
        self.config = config or BaseConfig()
        self.trees: dict[int, ConceptTree] = {}
        self.links: dict[int, Link] = {}
        self.keysets: dict[str, EntityKeyset] = {}
        self.ledger: list[SequenceEvent] = []
        self.clock = 0
        self.next_tree_id = 1
        self.next_link_key = 1
        self.lock = threading.RLock()
        self._by_base: dict[str, int] = {}
        self._out_index: dict | None = None

    _STATE = ("config", "trees", "links", "keysets", "ledger", "clock",
              "next_tree_id", "next_link_key")

    def __eq__(self, other):
        if not isinstance(other, ConceptBase):
            return NotImplemented
        return all(getattr(self, a) == getattr(other, a) for a in self._STATE)

    # lookups

    def tree_with_base(self, label: str) -> ConceptTree | None:
        tid = self._by_base.get(label)
        return None if tid is None else self.trees[tid]

    def out_links(self, tree_id: int, path: Sequence[str]) -> dict[str, Link]:
        """Links leaving node ``path`` of ``tree_id``, keyed by target base label."""
        if self._out_index is None:
            index: dict = defaultdict(dict)
            for link in self.links.values():
                if link.from_tree is not None:
                    label = self.trees[link.to].base.label
                    index[(link.from_tree, link.from_path)][label] = link
            self._out_index = index
        return self._out_index.get((tree_id, tuple(path)), {})

    def entities_of(self, tree_id: int) -> set[str]:
        inbound = self.trees[tree_id].inbound_links
        return {e for e, ks in self.keysets.items()
                if tree_id in ks.start_trees or ks.link_keys & inbound}

    def next_tick(self) -> int:
        tick = self.clock
        self.clock += 1
        return tick

    # structural primitives

    def add_tree(self, root: ConceptNode) -> ConceptTree:
        if root.label in self._by_base:
            raise ValueError(f"a tree based at {root.label!r} already exists")
        tree = ConceptTree(self.next_tree_id, root)
        self.next_tree_id += 1
        self.trees[tree.id] = tree
        self._by_base[root.label] = tree.id
        return tree

    def add_link(self, tree_id: int, path: Sequence[str], to: int) -> Link:
        link = Link(self.next_link_key, tree_id, tuple(path), to)
        self.next_link_key += 1
        self.links[link.key] = link
        self.trees[to].inbound_links.add(link.key)
        self._out_index = None
        return link

    def drop_link(self, key: int) -> None:
        link = self.links.pop(key)
        if link.to in self.trees:
            self.trees[link.to].inbound_links.discard(key)
        for ks in self.keysets.values():
            ks.link_keys.discard(key)
        self._out_index = None

    def _drop_tree(self, tree_id: int) -> None:
        tree = self.trees.pop(tree_id)
        del self._by_base[tree.base.label]
        for key in sorted(tree.inbound_links):
            if key in self.links:
                self.drop_link(key)
        for ks in self.keysets.values():
            ks.start_trees.discard(tree_id)

    def _move_link(self, link: Link, tree_id: int | None, path: Path) -> None:
        link.from_tree, link.from_path = tree_id, path
        self._out_index = None

    def _merge_link(self, keep: Link, drop: Link) -> None:
        keep.compound = (keep.compound[0] + drop.compound[0] + 1,
                         keep.compound[1] + drop.compound[1])
        keep.strength = max(keep.strength, drop.strength)
        for ks in self.keysets.values():
            if drop.key in ks.link_keys:
                ks.link_keys.add(keep.key)
        self.drop_link(drop.key)

    def reindex(self) -> None:
        """Rebuild derived indexes after direct edits to ``trees``/``links``."""
        self._by_base = {t.base.label: tid for tid, t in self.trees.items()}
        for t in self.trees.values():
            t.inbound_links = set()
        for link in self.links.values():
            if link.to in self.trees:
                self.trees[link.to].inbound_links.add(link.key)
        self._out_index = None

    # routing

    def route(self, concepts: Sequence[str], *, extend: bool = True) -> Route:
        """Split ``concepts`` into per-tree segments along the current forest.

        With ``extend`` the unmatched remainder stays in the last tree (where
        ingestion will grow a new branch); otherwise the route is cut short
        and marked incomplete.
        """
        concepts = tuple(concepts)
        tree = self.tree_with_base(concepts[0])
        if tree is None:
            return Route([Segment(None, concepts)], extend)
        segments = []
        node, path, start, via = tree.base, (concepts[0],), 0, None
        i = 1
        while i < len(concepts):
            label = concepts[i]
            nxt = node.child(label)
            if nxt is not None:
                node, path = nxt, path + (label,)
                i += 1
                continue
            link = self.out_links(tree.id, path).get(label)
            if link is None:
                break
            segments.append(Segment(tree.id, concepts[start:i], via))
            tree = self.trees[link.to]
            node, path, start, via = tree.base, (label,), i, link.key
            i += 1
        if i < len(concepts) and not extend:
            segments.append(Segment(tree.id, concepts[start:i], via))
            return Route(segments, False)
        segments.append(Segment(tree.id, concepts[start:], via))
        return Route(segments, True)

    # ingestion

    def _check_event(self, event: SequenceEvent) -> None:
        if not event.concepts:
            raise InvalidEvent("event has no concepts")
        for label in event.concepts:
            if not isinstance(label, str) or not label or label != label.lower() \
                    or any(ch.isspace() for ch in label):
                raise InvalidEvent(f"bad concept label {label!r}")
        if event.entity is not None and (not event.entity or "\t" in event.entity
                                         or "\n" in event.entity):
            raise InvalidEvent(f"bad entity id {event.entity!r}")
        if self.ledger and event.timestamp < self.ledger[-1].timestamp:
            raise InvalidEvent(f"timestamp {event.timestamp} goes backwards")

    def ingest(self, event: SequenceEvent) -> RestructureReport:
        with self.lock:
            self._check_event(event)
            report = RestructureReport()
            route = self.route(event.concepts)
            first = route.segments[0]
            if first.tree is None:
                start = self.add_tree(ct.chain(event.concepts)).id
                report.created.append(start)
            else:
                start = first.tree
                last = len(route.segments) - 1
                for i, seg in enumerate(route.segments):
                    ct.add_from_base(self.trees[seg.tree], seg.labels, propagate_neg=i == last)
                    if seg.via is not None:
                        self.links[seg.via].strength = 1.0
            self.ledger.append(event)
            self.clock = max(self.clock, event.timestamp + 1)
            if event.entity is not None:
                ks = self.keysets.setdefault(event.entity, EntityKeyset(event.entity))
                ks.start_trees.add(start)
                ks.link_keys.update(route.links)
            if self.config.eager_scans:
                report.merge(self.restructure())
            return report

    def ingest_many(self, events: Iterable[SequenceEvent], *, rejoin: bool = False) -> RestructureReport:
        """Ingest a batch; with eager scans off the scans run once at the end."""
        with self.lock:
            report = RestructureReport()
            for event in events:
                report.merge(self.ingest(event))
            if not self.config.eager_scans:
                report.merge(self.restructure())
            if rejoin:
                report.merge(self.rejoin_all())
            return report

    def restructure(self) -> RestructureReport:
        with self.lock:
            report = RestructureReport()
            while True:
                step = self.factor_scan().merge(self.falsity_scan())
                if not step:
                    return report
                report.merge(step)

    # moving branches between trees

    def _cut(self, tree_id: int, path: Path) -> tuple[ConceptNode, dict[int, list[Link]]]:
        """Detach a branch; its outgoing links are parked by node identity."""
        tree = self.trees[tree_id]
        node = tree.node_at(path)
        by_path = {p: n for p, n in node.walk(path[:-1])}
        pending: dict[int, list[Link]] = defaultdict(list)
        for key in sorted(self.links):
            link = self.links[key]
            if link.from_tree == tree_id and link.from_path[:len(path)] == path:
                pending[id(by_path[link.from_path])].append(link)
                self._move_link(link, None, ())
        branch, _ = ct.detach_branch(tree, path)
        return branch.base, pending

    def _place(self, node: ConceptNode, pending, tree_id: int, path: Path) -> None:
        for p, n in node.walk(path[:-1]):
            for link in pending.pop(id(n), ()):
                self._move_link(link, tree_id, p)

    def _locate(self, node: ConceptNode) -> tuple[int, Path] | None:
        for tid, tree in self.trees.items():
            for path, n in tree.nodes():
                if n is node:
                    return tid, path
        return None

    def _merge(self, src: ConceptNode, pending, target: ConceptTree, touched: set[int]) -> None:
        """Merge a detached branch into ``target``'s base, then settle clashes.

        A node never keeps both a child and a link for the same label.  The
        link wins: the child's counts move on into the linked tree, which
        keeps every stored route intact.  Clashes are queued and resolved
        only once the current merge is finished, so no node is cut out from
        under a merge still in progress.
        """
        clashes: list[tuple[ConceptNode, str]] = []
        self._graft(src, pending, target, target.base, (src.label,), touched, clashes)
        while clashes:
            node, label = clashes.pop(0)
            where = self._locate(node)
            if where is None or node.child(label) is None:
                continue
            tid, path = where
            link = self.out_links(tid, path).get(label)
            if link is None:
                continue
            moved, sub_pending = self._cut(tid, path + (label,))
            dest = self.trees[link.to]
            self._graft(moved, sub_pending, dest, dest.base, (label,), touched, clashes)

    def _graft(self, src: ConceptNode, pending, dst_tree: ConceptTree, dst: ConceptNode,
               dst_path: Path, touched: set[int], clashes: list) -> None:
        """Sum branch ``src`` into node ``dst``; never cuts anything."""
        dst.pos += src.pos
        dst.neg += src.neg
        dst.terminated += src.terminated
        for link in pending.pop(id(src), ()):
            label = self.trees[link.to].base.label
            existing = self.out_links(dst_tree.id, dst_path).get(label)
            if existing is not None:
                self._merge_link(existing, link)
                touched.add(existing.key)
                continue
            self._move_link(link, dst_tree.id, dst_path)
            touched.add(link.key)
            if dst.child(label) is not None:
                clashes.append((dst, label))
        for child in list(src.children):
            here = dst_path + (child.label,)
            mine = dst.child(child.label)
            if mine is not None:
                self._graft(child, pending, dst_tree, mine, here, touched, clashes)
                continue
            link = self.out_links(dst_tree.id, dst_path).get(child.label)
            if link is not None:
                dst.terminated += child.pos
                touched.add(link.key)
                target = self.trees[link.to]
                self._graft(child, pending, target, target.base, (child.label,), touched, clashes)
                continue
            dst.children.append(child)
            self._place(child, pending, dst_tree.id, here)

    def _relocate(self, tree_id: int, path: Path, report: RestructureReport,
                  touched: set[int], *, reset_neg: bool = False) -> None:
        """Cut the branch at ``path`` into the tree based at its label and link to it.

        The cut-point link is installed before any merging so that, should
        the merge reshape the source tree, the link travels with its node.
        """
        node, pending = self._cut(tree_id, path)
        if reset_neg:
            for _, n in node.walk():
                n.neg = 0
        target = self.tree_with_base(node.label)
        fresh = target is None
        if fresh:
            target = self.add_tree(node)
            self._place(node, pending, target.id, (node.label,))
            report.created.append(target.id)
        parent = path[:-1]
        link = self.out_links(tree_id, parent).get(node.label)
        if link is None:
            link = self.add_link(tree_id, parent, target.id)
            report.links_added.append(link.key)
        else:
            link.compound = (link.compound[0] + 1, link.compound[1])
        touched.add(link.key)
        if not fresh:
            self._merge(node, pending, target, touched)

    def _settle(self, report: RestructureReport, touched: set[int]) -> RestructureReport:
        report.links_added = [k for k in report.links_added if k in self.links]
        self._auto_grant(touched)
        return report

    def _auto_grant(self, keys: set[int]) -> None:
        """Grant new/rerouted link keys to entities whose ledger events cross them."""
        keys = {k for k in keys if k in self.links}
        if not keys:
            return
        for event in self.ledger:
            if event.entity is None:
                continue
            crossed = keys.intersection(self.route(event.concepts, extend=False).links)
            if crossed:
                ks = self.keysets.setdefault(event.entity, EntityKeyset(event.entity))
                ks.link_keys.update(crossed)

    # factoring

    def _chains(self, tree: ConceptTree) -> list[tuple[Path, tuple[str, ...]]]:
        """(path, labels) for every non-base node whose branch is a single chain."""
        memo: dict[int, tuple[str, ...] | None] = {}

        def chain_of(node):
            if id(node) not in memo:
                if not node.children:
                    memo[id(node)] = (node.label,)
                elif len(node.children) == 1:
                    rest = chain_of(node.children[0])
                    memo[id(node)] = None if rest is None else (node.label,) + rest
                else:
                    memo[id(node)] = None
            return memo[id(node)]

        return [(path, chain_of(node)) for path, node in tree.nodes()
                if len(path) > 1 and chain_of(node) is not None]

    def _chain_at(self, tree_id: int, path: Path) -> tuple[str, ...] | None:
        tree = self.trees.get(tree_id)
        node = tree.node_at(path) if tree else None
        labels = []
        while node is not None:
            labels.append(node.label)
            if len(node.children) > 1:
                return None
            node = node.children[0] if node.children else None
        return tuple(labels) or None

    def _factor_candidate(self):
        places = defaultdict(list)
        for tid in sorted(self.trees):
            for path, labels in self._chains(self.trees[tid]):
                places[labels].append((tid, path))
        best = None
        for labels, found in places.items():
            target = self.tree_with_base(labels[0])
            if target is not None:
                found = [(t, p) for t, p in found if t != target.id]
            if not found:
                continue
            shared = len({t for t, _ in found}) >= self.config.min_share
            if shared or (target is not None and self.route(labels, extend=False).complete):
                rank = (-len(labels), labels[0], labels)
                if best is None or rank < best[0]:
                    best = (rank, labels, found)
        return best

    def factor_scan(self) -> RestructureReport:
        """Move branches duplicated across trees into one shared, linked tree."""
        with self.lock:
            report = RestructureReport()
            touched: set[int] = set()
            while (found := self._factor_candidate()) is not None:
                _, labels, places = found
                for tid, path in places:
                    # an earlier move in this batch may have reshaped the tree
                    if self._chain_at(tid, path) != labels:
                        continue
                    report.pruned.append((tid, path))
                    self._relocate(tid, path, report, touched)
            return self._settle(report, touched)

    # splitting

    def _neg_candidate(self) -> tuple[int, Path] | None:
        ratio = self.config.falsity_ratio
        for tid in sorted(self.trees):
            for path, node in self.trees[tid].nodes():
                if len(path) > 1 and node.neg > 0 and node.pos > 0 and node.neg >= ratio * node.pos:
                    return tid, path
        return None

    def entry_sources(self) -> dict[tuple[int, Path], set[int]]:
        """For each node, the ways ledger segments entered its tree (DIRECT or a link key)."""
        sources: dict[tuple[int, Path], set[int]] = defaultdict(set)
        for event in self.ledger:
            for seg in self.route(event.concepts, extend=False).segments:
                if seg.tree is None:
                    continue
                source = DIRECT if seg.via is None else seg.via
                for depth in range(1, len(seg.labels) + 1):
                    sources[(seg.tree, seg.labels[:depth])].add(source)
        return sources

    def _exclusive_candidate(self) -> tuple[int, Path] | None:
        # a branch reached only through some of the links its parent is reached by
        sources = self.entry_sources()
        for tid in sorted(self.trees):
            for path, _ in self.trees[tid].nodes():
                if len(path) < 2:
                    continue
                mine = sources.get((tid, path))
                if mine and DIRECT not in mine and mine < sources.get((tid, path[:-1]), set()):
                    return tid, path
        return None

    def falsity_scan(self) -> RestructureReport:
        with self.lock:
            report = RestructureReport()
            touched: set[int] = set()
            while True:
                hit = self._neg_candidate()
                if hit is None and self.config.exclusive_split:
                    hit = self._exclusive_candidate()
                if hit is None:
                    break
                report.splits.append(hit)
                self._relocate(*hit, report, touched, reset_neg=True)
            return self._settle(report, touched)

    # rejoin

    def _snapshot_state(self):
        return copy.deepcopy({a: getattr(self, a) for a in
                              ("trees", "links", "keysets", "next_tree_id", "next_link_key")})

    def _restore_state(self, state) -> None:
        for name, value in state.items():
            setattr(self, name, value)
        self.reindex()

    def _direct_entries(self, tree_id: int) -> bool:
        for event in self.ledger:
            first = self.route(event.concepts, extend=False).segments[0]
            if first.tree == tree_id:
                return True
        return False

    def _join_under(self, link: Link) -> int:
        """Re-attach the whole target tree under the link's cut point."""
        t1, t2 = self.trees[link.from_tree], self.trees[link.to]
        node = t1.node_at(link.from_path)
        parent_path = link.from_path
        self.drop_link(link.key)
        node.terminated -= t2.base.pos
        node.children.append(t2.base)
        for other in self.links.values():
            if other.from_tree == t2.id:
                self._move_link(other, t1.id, parent_path + other.from_path)
        self._drop_tree(t2.id)
        return t1.id

    def try_rejoin(self, t1: int, t2: int) -> RestructureReport:
        """Attempt to merge two trees back into one, following the entity-link rules.

        Linked pair (t1 links to t2): t2 goes back under the cut point when
        t2 has no entity links, or the same ones as t1, and the link is its
        only way in.  If t2 serves extra entities, the join is refused and
        the link's negative compound count records the refusal.

        Unlinked pair where a t1 branch starts with t2's base label: the
        branch moves into t2 when it is already contained in t2 or both
        trees serve the same entities.

        Any join that leaves an invalid tree is rolled back and refused.
        """
        with self.lock:
            for tid in (t1, t2):
                if tid not in self.trees:
                    raise UnknownTree(tid)
            report = RestructureReport()
            label = self.trees[t2].base.label
            links = [l for k, l in sorted(self.links.items())
                     if l.from_tree == t1 and l.to == t2]
            branch = None
            if not links:
                for path, node in self.trees[t1].nodes():
                    if len(path) > 1 and node.label == label:
                        branch = path
                        break
                if branch is None:
                    raise NotLinked(f"T{t1} has no link or branch leading to T{t2}")
            ents1, ents2 = self.entities_of(t1), self.entities_of(t2)
            extra = ents2 - ents1

            if links:
                link = links[0]
                if extra:
                    link.compound = (link.compound[0], link.compound[1] + 1)
                    report.refused.append((t1, t2, "extra entity links"))
                    return report
                if self.trees[t2].inbound_links != {link.key} or self._direct_entries(t2):
                    report.refused.append((t1, t2, "base still referenced"))
                    return report
                if ents2 and ents1 != ents2:
                    report.refused.append((t1, t2, "different entity links"))
                    return report
                saved = self._snapshot_state()
                removed = link.key
                self._join_under(link)
                report.links_removed.append(removed)
                touched: set[int] = set()
            else:
                contained = all(self.trees[t2].node_at(p[len(branch) - 1:]) is not None
                                for p, _ in self.trees[t1].node_at(branch).walk(branch[:-1]))
                if not contained:
                    if extra:
                        report.refused.append((t1, t2, "extra entity links"))
                        return report
                    if ents1 != ents2:
                        report.refused.append((t1, t2, "different entity links"))
                        return report
                saved = self._snapshot_state()
                touched = set()
                self._relocate(t1, branch, report, touched)

            bad = [v for tid in (t1, t2) if tid in self.trees
                   for v in ct.validate(self.trees[tid])]
            if bad:
                self._restore_state(saved)
                return RestructureReport(refused=[(t1, t2, f"rolled back: {bad[0]}")])
            self._auto_grant(touched)
            report.rejoins.append((t1, t2))
            return report

    def rejoin_all(self) -> RestructureReport:
        """End-of-batch pass: try every linked pair once, in link-key order."""
        with self.lock:
            report = RestructureReport()
            for key in sorted(self.links):
                link = self.links.get(key)
                if link is None or link.from_tree == link.to:
                    continue
                report.merge(self.try_rejoin(link.from_tree, link.to))
            return report

    # decay

    def refresh_links(self, keys: Iterable[int]) -> None:
        with self.lock:
            for key in keys:
                if key in self.links:
                    self.links[key].strength = 1.0

    def decay_tick(self) -> RestructureReport:
        with self.lock:
            report = RestructureReport()
            factor = 2.0 ** (-1.0 / self.config.decay_half_life)
            for key in sorted(self.links):
                link = self.links[key]
                link.strength *= factor
                if link.strength < self.config.strength_floor:
                    self.drop_link(key)
                    report.links_removed.append(key)
            self.clock += 1
            return report

    # integrity

    def check(self) -> list[str]:
        """Every invariant violation across the forest, as readable strings."""
        problems = [f"T{tid}: {v}" for tid in sorted(self.trees)
                    for v in ct.validate(self.trees[tid])]
        labels = [t.base.label for t in self.trees.values()]
        if len(labels) != len(set(labels)):
            problems.append("duplicate base labels")
        if self._by_base != {t.base.label: tid for tid, t in self.trees.items()}:
            problems.append("base index out of date")
        seen = set()
        for key, link in sorted(self.links.items()):
            src = self.trees.get(link.from_tree)
            node = src.node_at(link.from_path) if src else None
            if node is None:
                problems.append(f"L{key}: dangling source")
                continue
            if link.to not in self.trees:
                problems.append(f"L{key}: dangling target")
                continue
            label = self.trees[link.to].base.label
            if node.child(label) is not None:
                problems.append(f"L{key}: shadows child {label!r}")
            if (link.from_tree, link.from_path, label) in seen:
                problems.append(f"L{key}: duplicate link")
            seen.add((link.from_tree, link.from_path, label))
            if not 0 < link.strength <= 1:
                problems.append(f"L{key}: strength {link.strength}")
        for tid, tree in self.trees.items():
            expect = {k for k, l in self.links.items() if l.to == tid}
            if tree.inbound_links != expect:
                problems.append(f"T{tid}: inbound links {tree.inbound_links} != {expect}")
        for name, ks in self.keysets.items():
            if not ks.link_keys <= self.links.keys() or not ks.start_trees <= self.trees.keys():
                problems.append(f"keyset {name}: dangling reference")
        return problems
