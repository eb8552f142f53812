"""Line-oriented snapshot format and Graphviz export.

Snapshot layout (UTF-8, tab-separated fields)::

    conceptbase v1
    config	min_share	2
    clock	4
    next_tree	2
    next_link	1
    tree	1
      black	2	0	0
        cat	2	0	0
    link	1	1	black cat	2	1.0	0	0	-
    keyset	cat	1	1,3
    event	0	cat	black cat sat mat
    end

Node lines are indented two spaces per level (the base at one level) and
carry ``label pos neg terminated``.  Output order is fixed: trees by id,
children in insertion order, links by key, keysets by entity.
"""

from __future__ import annotations

from pathlib import Path
from typing import IO, Iterable

from .base import BaseConfig, ConceptBase
from .errors import CorruptSnapshot, VersionMismatch
from .links import EntityKeyset, Link
from .text import SequenceEvent
from .tree import ConceptNode, ConceptTree

FORMAT_VERSION = 1
HEADER = "conceptbase v"


def _ids(values: Iterable[int]) -> str:
    return ",".join(str(v) for v in sorted(values))


def dumps(base: ConceptBase, *, ledger: bool = True) -> str:
    lines = [f"{HEADER}{FORMAT_VERSION}"]
    lines += [f"config\t{k}\t{v}" for k, v in base.config.items()]
    lines += [f"clock\t{base.clock}", f"next_tree\t{base.next_tree_id}",
              f"next_link\t{base.next_link_key}"]
    for tid in sorted(base.trees):
        lines.append(f"tree\t{tid}")
        for path, node in base.trees[tid].nodes():
            lines.append(f"{'  ' * len(path)}{node.label}\t{node.pos}\t{node.neg}\t{node.terminated}")
    for key in sorted(base.links):
        l = base.links[key]
        gi = "-" if l.group_individual is None else f"{l.group_individual[0]},{l.group_individual[1]}"
        lines.append(f"link\t{key}\t{l.from_tree}\t{' '.join(l.from_path)}\t{l.to}\t"
                     f"{l.strength!r}\t{l.compound[0]}\t{l.compound[1]}\t{gi}")
    for name in sorted(base.keysets):
        ks = base.keysets[name]
        lines.append(f"keyset\t{name}\t{_ids(ks.start_trees)}\t{_ids(ks.link_keys)}")
    if ledger:
        for ev in base.ledger:
            lines.append(f"event\t{ev.timestamp}\t{ev.entity or ''}\t{' '.join(ev.concepts)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def save(base: ConceptBase, sink: str | Path | IO[str] | None = None, *,
         ledger: bool = True) -> str:
    text = dumps(base, ledger=ledger)
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(text, "utf-8")
    elif sink is not None:
        sink.write(text)
    return text


def _int_set(field: str) -> set[int]:
    return {int(v) for v in field.split(",")} if field else set()


def loads(text: str) -> ConceptBase:
    lines = text.split("\n")
    if not lines or not lines[0].startswith(HEADER):
        raise CorruptSnapshot("missing 'conceptbase' header", 1)
    try:
        version = int(lines[0][len(HEADER):])
    except ValueError:
        raise CorruptSnapshot("unreadable format version", 1) from None
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"snapshot format v{version}, this build reads v{FORMAT_VERSION}")

    config_pairs = []
    base = ConceptBase()
    stack: list[ConceptNode] = []
    current: ConceptTree | None = None
    ended = False
    for lineno, line in enumerate(lines[1:], 2):
        if ended:
            if line:
                raise CorruptSnapshot("content after 'end'", lineno)
            continue
        try:
            if line.startswith(" "):
                indent = len(line) - len(line.lstrip(" "))
                depth = indent // 2
                label, pos, neg, term = line[indent:].split("\t")
                node = ConceptNode(label, int(pos), int(neg), int(term))
                if current is None or indent % 2 or depth < 1 or depth > len(stack) + 1:
                    raise ValueError("misplaced node line")
                if depth == 1:
                    if stack:
                        raise ValueError("second base node in one tree")
                    current.base = node
                else:
                    stack[depth - 2].children.append(node)
                del stack[depth - 1:]
                stack.append(node)
                continue
            kind, *rest = line.split("\t")
            if kind != "tree" and current is not None:
                if not stack:
                    raise ValueError("tree without nodes")
                current = None
            if kind == "config":
                key, value = rest
                config_pairs.append((key, value))
            elif kind in ("clock", "next_tree", "next_link"):
                (value,) = rest
                attr = {"clock": "clock", "next_tree": "next_tree_id",
                        "next_link": "next_link_key"}[kind]
                setattr(base, attr, int(value))
            elif kind == "tree":
                if current is not None and not stack:
                    raise ValueError("tree without nodes")
                (tid,) = rest
                current = ConceptTree(int(tid), None)
                if current.id in base.trees:
                    raise ValueError(f"duplicate tree {tid}")
                base.trees[current.id] = current
                stack = []
            elif kind == "link":
                key, src, path, to, strength, cpos, cneg, gi = rest
                link = Link(int(key), int(src), tuple(path.split(" ")), int(to),
                            float(strength), (int(cpos), int(cneg)),
                            None if gi == "-" else tuple(int(v) for v in gi.split(",")))
                base.links[link.key] = link
            elif kind == "keyset":
                name, starts, keys = rest
                base.keysets[name] = EntityKeyset(name, _int_set(keys), _int_set(starts))
            elif kind == "event":
                ts, entity, concepts = rest
                base.ledger.append(SequenceEvent(tuple(concepts.split(" ")), int(ts), entity or None))
            elif kind == "end" and not rest:
                ended = True
            else:
                raise ValueError(f"unknown record {kind!r}")
        except CorruptSnapshot:
            raise
        except (ValueError, TypeError) as exc:
            raise CorruptSnapshot(str(exc) or "malformed line", lineno) from None
    if not ended:
        raise CorruptSnapshot("truncated snapshot (no 'end' record)", len(lines))
    try:
        base.config = BaseConfig.parse(config_pairs)
    except (ValueError, TypeError) as exc:
        raise CorruptSnapshot(f"bad config: {exc}") from None
    base.reindex()
    problems = base.check()
    if problems:
        raise CorruptSnapshot("; ".join(problems[:3]))
    return base


def load(source: str | Path | IO[str]) -> ConceptBase:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text("utf-8")
    else:
        text = source.read()
    return loads(text)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(base: ConceptBase) -> str:
    """Graphviz source: one cluster per tree, dashed edges for links."""
    def node_id(tid, path):
        return _quote(f"T{tid}/" + "/".join(path))

    out = ["digraph conceptbase {", "  compound=true;", "  node [shape=box];"]
    for tid in sorted(base.trees):
        tree = base.trees[tid]
        out.append(f"  subgraph cluster_T{tid} {{")
        out.append(f"    label={_quote(f'T{tid}')};")
        for path, node in tree.nodes():
            # escape only the label; the line-break escape must reach Graphviz intact
            text = _quote(node.label)[:-1] + f"\\n{node.pos}:{node.neg} ({node.terminated})\""
            out.append(f"    {node_id(tid, path)} [label={text}];")
        for path, node in tree.nodes():
            for child in node.children:
                out.append(f"    {node_id(tid, path)} -> {node_id(tid, path + (child.label,))};")
        out.append("  }")
    for key in sorted(base.links):
        link = base.links[key]
        target = base.trees[link.to]
        out.append(f"  {node_id(link.from_tree, link.from_path)} -> "
                   f"{node_id(link.to, (target.base.label,))} "
                   f"[style=dashed, label={_quote(link.name)}];")
    out.append("}")
    return "\n".join(out) + "\n"
