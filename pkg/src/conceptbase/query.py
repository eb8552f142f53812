"""Keyset-gated traversal, conjunctive queries and confidence estimates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .base import ConceptBase
from .errors import EmptyQuery, PathNotFound
from .links import resolve


@dataclass
class QueryResult:
    paths: list[tuple[str, ...]] = field(default_factory=list)
    matched_trees: list[int] = field(default_factory=list)
    confidence: float | None = None
    links_used: set[int] = field(default_factory=set)


def _expand(base: ConceptBase, tree_id: int, keys: frozenset[int], used: set[int]):
    """Maximal label paths from a tree base, as (labels, link keys crossed).

    A key may be crossed at most once along any single path, which also
    stops walks from looping through link cycles.
    """
    out = []

    def visit(tree, node, local, labels, crossed):
        extended = False
        for child in node.children:
            visit(tree, child, local + (child.label,), labels + (child.label,), crossed)
            extended = True
        exits = sorted(base.out_links(tree.id, local).values(), key=lambda l: l.key)
        for link in exits:
            if link.key in keys and link.key not in crossed:
                target = base.trees[link.to]
                used.add(link.key)
                visit(target, target.base, (target.base.label,),
                      labels + (target.base.label,), crossed | {link.key})
                extended = True
        if not extended:
            out.append(labels)

    tree = base.trees[tree_id]
    visit(tree, tree.base, (tree.base.label,), (tree.base.label,), frozenset())
    return out


def _groupings(base: ConceptBase, entity: str):
    """(start tree, paths, link keys crossed) for each of the entity's start trees."""
    starts, keys = resolve(base, entity)
    groups = []
    for tid in sorted(starts):
        used: set[int] = set()
        groups.append((tid, _expand(base, tid, keys, used), used))
    return groups


def traverse(base: ConceptBase, entity: str, *, refresh: bool = False) -> QueryResult:
    """Every maximal path the entity may walk, ordered by start tree then child order.

    With ``refresh`` each link crossed has its strength reset to 1.0.
    """
    with base.lock:
        result = QueryResult()
        for tid, paths, used in _groupings(base, entity):
            result.matched_trees.append(tid)
            result.paths.extend(paths)
            result.links_used |= used
        if refresh:
            base.refresh_links(result.links_used)
        return result


def query_all(base: ConceptBase, entity: str, required: Iterable[str], *,
              refresh: bool = False) -> QueryResult:
    """Start-tree groupings whose reachable labels include every required label."""
    required = set(required)
    if not required:
        raise EmptyQuery("at least one label is required")
    with base.lock:
        result = QueryResult()
        for tid, paths, used in _groupings(base, entity):
            if required <= {label for p in paths for label in p}:
                result.matched_trees.append(tid)
                result.paths.extend(paths)
                result.links_used |= used
        if refresh:
            base.refresh_links(result.links_used)
        return result


def concept_confidence(base: ConceptBase, path: Sequence[str], candidate: str) -> float:
    """Share of the sequences through ``path`` that continue with ``candidate``."""
    if not path:
        raise PathNotFound(())
    with base.lock:
        route = base.route(path, extend=False)
        last = route.segments[-1]
        if not route.complete or last.tree is None:
            raise PathNotFound(tuple(path))
        node = base.trees[last.tree].node_at(last.labels)
        child = node.child(candidate)
        return 0.0 if child is None else child.pos / node.pos
