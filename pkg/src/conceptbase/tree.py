"""Single concept trees and their count discipline.

A node's ``pos`` counts the tree-local sequence segments that pass through
it, ``terminated`` those that end on it, so for every node

    sum(child.pos) + terminated == pos

and counts can only narrow from the base towards the leaves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .errors import BaseMismatch, CannotDetachBase, PathNotFound

Path = tuple[str, ...]


@dataclass
class ConceptNode:
    label: str
    pos: int = 0
    neg: int = 0
    terminated: int = 0
    children: list[ConceptNode] = field(default_factory=list)

    def child(self, label: str) -> ConceptNode | None:
        for c in self.children:
            if c.label == label:
                return c
        return None

    def walk(self, path: Path = ()) -> Iterator[tuple[Path, ConceptNode]]:
        """Pre-order (path, node) pairs, children in insertion order."""
        here = path + (self.label,)
        yield here, self
        for c in self.children:
            yield from c.walk(here)

    def size(self) -> int:
        return sum(1 for _ in self.walk())


@dataclass
class ConceptTree:
    id: int | None
    base: ConceptNode
    inbound_links: set[int] = field(default_factory=set)

    def node_at(self, path: Sequence[str]) -> ConceptNode | None:
        if not path or path[0] != self.base.label:
            return None
        node = self.base
        for label in path[1:]:
            node = node.child(label)
            if node is None:
                return None
        return node

    def nodes(self) -> Iterator[tuple[Path, ConceptNode]]:
        return self.base.walk()


@dataclass
class AddOutcome:
    matched_depth: int
    extended: bool
    terminated_short: bool
    branch_created_at: Path | None = None


@dataclass
class Violation:
    path: Path
    rule: str
    detail: str = ""

    def __str__(self):
        return f"{self.rule} at {' '.join(self.path)}: {self.detail}"


def chain(labels: Sequence[str]) -> ConceptNode:
    """A fresh single-sequence tree: every node pos=1, the last terminated."""
    root = node = ConceptNode(labels[0], pos=1)
    for label in labels[1:]:
        nxt = ConceptNode(label, pos=1)
        node.children.append(nxt)
        node = nxt
    node.terminated = 1
    return root


def match_prefix(tree: ConceptTree, concepts: Sequence[str]) -> tuple[Path, int]:
    if not concepts or concepts[0] != tree.base.label:
        return (), 0
    node = tree.base
    path = [node.label]
    for label in concepts[1:]:
        node = node.child(label)
        if node is None:
            break
        path.append(label)
    return tuple(path), len(path)


def _labels(event) -> tuple[str, ...]:
    return tuple(getattr(event, "concepts", event))


def add_from_base(tree: ConceptTree, event, *, propagate_neg: bool = True) -> AddOutcome:
    """Reinforce ``tree`` with one sequence that starts at its base.

    ``event`` is a SequenceEvent or a plain label sequence.  When the
    sequence stops on a node that has children, every strict descendant of
    that node gets one unit of negative evidence, unless ``propagate_neg``
    is off (the segment carries on through a link rather than stopping).
    """
    concepts = _labels(event)
    if not concepts or concepts[0] != tree.base.label:
        raise BaseMismatch(f"sequence does not start at base {tree.base.label!r}")
    node = tree.base
    node.pos += 1
    depth = 1
    for label in concepts[1:]:
        nxt = node.child(label)
        if nxt is None:
            break
        nxt.pos += 1
        node = nxt
        depth += 1
    rest = concepts[depth:]
    if rest:
        branch_at, _ = match_prefix(tree, concepts[:depth])
        node.children.append(chain(rest))
        return AddOutcome(depth, True, False, branch_at)
    node.terminated += 1
    short = bool(node.children)
    if short and propagate_neg:
        for c in node.children:
            for _, d in c.walk():
                d.neg += 1
    return AddOutcome(depth, False, short)


def detach_branch(tree: ConceptTree, path: Sequence[str]) -> tuple[ConceptTree, int]:
    """Cut the subtree at ``path`` out of ``tree``.

    The parent absorbs the detached root's count as terminations, so every
    ancestor keeps its ``pos`` and both trees stay balanced.  Returns the
    detached subtree (id ``None``) and its former index among the parent's
    children, for :func:`attach_branch`.
    """
    path = tuple(path)
    if len(path) <= 1:
        if tree.node_at(path) is None:
            raise PathNotFound(path)
        raise CannotDetachBase(path)
    parent = tree.node_at(path[:-1])
    node = parent.child(path[-1]) if parent is not None else None
    if node is None:
        raise PathNotFound(path)
    index = parent.children.index(node)
    del parent.children[index]
    parent.terminated += node.pos
    return ConceptTree(None, node), index


def attach_branch(tree: ConceptTree, parent_path: Sequence[str], branch: ConceptTree,
                  index: int | None = None) -> None:
    """Inverse of :func:`detach_branch`."""
    parent = tree.node_at(parent_path)
    if parent is None:
        raise PathNotFound(tuple(parent_path))
    node = branch.base
    if parent.child(node.label) is not None:
        raise ValueError(f"{node.label!r} already a child at {parent_path}")
    parent.terminated -= node.pos
    parent.children.insert(len(parent.children) if index is None else index, node)


def validate(tree: ConceptTree) -> list[Violation]:
    out = []
    for path, node in tree.nodes():
        if node.pos < 1:
            out.append(Violation(path, "PositiveCount", f"pos={node.pos}"))
        if node.neg < 0 or node.terminated < 0:
            out.append(Violation(path, "NegativeCounter",
                                 f"neg={node.neg} terminated={node.terminated}"))
        seen = set()
        for c in node.children:
            if c.label in seen:
                out.append(Violation(path, "DuplicateSibling", c.label))
            seen.add(c.label)
            if c.pos > node.pos:
                out.append(Violation(path + (c.label,), "TriangularViolation",
                                     f"{c.pos} > parent {node.pos}"))
        total = sum(c.pos for c in node.children) + node.terminated
        if total != node.pos:
            out.append(Violation(path, "SumViolation",
                                 f"children+terminated={total} != pos={node.pos}"))
    return out
