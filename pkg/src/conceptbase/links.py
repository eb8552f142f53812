"""Keyed links between trees and the entity keysets that gate traversal."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

from .errors import DanglingEndpoint, LinkConflict, UnknownTree

if TYPE_CHECKING:
    from .base import ConceptBase


@dataclass
class Link:
    """Directed edge from a cut point ``(from_tree, from_path)`` to the base of ``to``.

    ``from_tree`` is ``None`` only transiently, while the owning branch is
    being moved between trees.
    """

    key: int
    from_tree: int | None
    from_path: tuple[str, ...]
    to: int
    strength: float = 1.0
    compound: tuple[int, int] = (0, 0)
    # reserved: group/individual counters, no semantics attached yet
    group_individual: tuple[int, int] | None = None

    @property
    def name(self) -> str:
        return f"L{self.key}"


@dataclass
class EntityKeyset:
    primary: str
    link_keys: set[int] = field(default_factory=set)
    start_trees: set[int] = field(default_factory=set)


def parse_key(text: str | int, prefix: str) -> int:
    """Accept ``3``, ``"3"`` or ``"L3"``/``"T3"`` style identifiers."""
    if isinstance(text, int):
        return text
    s = text.strip()
    if s[:1].upper() == prefix:
        s = s[1:]
    return int(s)


def create_link(base: ConceptBase, source: tuple[int, Sequence[str]], to: int) -> Link:
    tree_id, path = source[0], tuple(source[1])
    with base.lock:
        tree = base.trees.get(tree_id)
        if tree is None or tree.node_at(path) is None:
            raise DanglingEndpoint(f"no node {' '.join(path)!r} in tree {tree_id}")
        target = base.trees.get(to)
        if target is None:
            raise DanglingEndpoint(f"no target tree {to}")
        existing = base.out_links(tree_id, path).get(target.base.label)
        if existing is not None:
            if existing.to != to:
                raise LinkConflict(f"node already links to tree {existing.to}")
            p, n = existing.compound
            existing.compound = (p + 1, n)
            return existing
        if tree.node_at(path).child(target.base.label) is not None:
            raise LinkConflict(f"child {target.base.label!r} already under {' '.join(path)!r}")
        return base.add_link(tree_id, path, to)


def grant(base: ConceptBase, entity: str, *, link: int | None = None,
          tree: int | None = None) -> EntityKeyset:
    with base.lock:
        ks = base.keysets.setdefault(entity, EntityKeyset(entity))
        if link is not None:
            if link not in base.links:
                raise DanglingEndpoint(f"no link L{link}")
            ks.link_keys.add(link)
        if tree is not None:
            if tree not in base.trees:
                raise UnknownTree(tree)
            ks.start_trees.add(tree)
        return ks


def revoke(base: ConceptBase, entity: str, *, link: int | None = None,
           tree: int | None = None) -> EntityKeyset:
    with base.lock:
        ks = base.keysets.get(entity)
        if ks is None:
            return EntityKeyset(entity)
        if link is not None:
            ks.link_keys.discard(link)
        if tree is not None:
            ks.start_trees.discard(tree)
        return ks


def resolve(base: ConceptBase, entity: str) -> tuple[frozenset[int], frozenset[int]]:
    """(start trees, link keys) an entity may use; empty for unknown entities."""
    ks = base.keysets.get(entity)
    if ks is None:
        return frozenset(), frozenset()
    return frozenset(ks.start_trees), frozenset(ks.link_keys)
