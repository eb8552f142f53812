"""Structural measurements over trees and forests."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import EmptyList
from .tree import ConceptTree, validate


@dataclass
class ForestStats:
    tree_count: int = 0
    node_count: int = 0
    max_depth: int = 0
    mean_tree_size: float = 0.0
    violation_count: int = 0
    total_links: int = 0
    energy_per_tree: dict[int, int] = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [f"tree_count = {self.tree_count}",
               f"node_count = {self.node_count}",
               f"max_depth = {self.max_depth}",
               f"mean_tree_size = {self.mean_tree_size:g}",
               f"violation_count = {self.violation_count}",
               f"total_links = {self.total_links}",
               f"total_energy = {sum(self.energy_per_tree.values())}"]
        out += [f"energy.T{tid} = {e}" for tid, e in sorted(self.energy_per_tree.items())]
        return out


def energy(values: Sequence[int]) -> int:
    """Cost of stepping through ``values`` in order: sum of consecutive gaps."""
    if len(values) == 0:
        raise EmptyList("energy of an empty ordering")
    return sum(abs(a - b) for a, b in zip(values, values[1:]))


def _leaf_paths(node, counts=()):
    counts = counts + (node.pos,)
    if not node.children:
        yield counts
    for child in node.children:
        yield from _leaf_paths(child, counts)


def tree_energy(tree: ConceptTree) -> int:
    return sum(energy(p) for p in _leaf_paths(tree.base))


def _depth(node) -> int:
    return 1 + max((_depth(c) for c in node.children), default=0)


def stats(base) -> ForestStats:
    with base.lock:
        trees = [base.trees[t] for t in sorted(base.trees)]
        sizes = [t.base.size() for t in trees]
        return ForestStats(
            tree_count=len(trees),
            node_count=sum(sizes),
            max_depth=max((_depth(t.base) for t in trees), default=0),
            mean_tree_size=sum(sizes) / len(trees) if trees else 0.0,
            violation_count=sum(len(validate(t)) for t in trees),
            total_links=len(base.links),
            energy_per_tree={t.id: tree_energy(t) for t in trees},
        )
