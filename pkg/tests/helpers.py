"""Shared fixtures builders and an independent replay oracle."""

from __future__ import annotations

import random
from collections import Counter
from pathlib import Path

from conceptbase import BaseConfig, ConceptBase, SequenceEvent, extract_sequences, load_stopwords

STOP = load_stopwords()
GOLDEN = Path(__file__).parent / "golden"

BLACK_CAT = "The black cat sat on the mat. The black cat drank some milk."
BOY = "The thirsty boy drank some milk."
ELEPHANT = "The thirsty elephant drank some milk."
GRASS = "The thirsty elephant drank milk and ate grass."


def feed(base: ConceptBase, text: str, entity: str | None = None):
    return base.ingest_many(extract_sequences(text, STOP, base.next_tick, entity=entity))


def black_cat(config=None, entity="cat"):
    base = ConceptBase(config)
    feed(base, BLACK_CAT, entity)
    return base


def drinkers(config=None):
    base = black_cat(config)
    feed(base, BOY, "boy")
    feed(base, ELEPHANT, "elephant")
    return base


def grazers(config=None):
    base = drinkers(config)
    for _ in range(3):
        feed(base, GRASS, "elephant")
    return base


def random_stream(rng: random.Random, *, max_events=15, max_len=8, entities=True):
    alpha = "abcdefgh"[: rng.randint(2, 6)]
    names = [None, "e1", "e2", "e3"] if entities else [None]
    return [SequenceEvent(tuple(rng.choice(alpha) for _ in range(rng.randint(1, max_len))),
                          i, rng.choice(names))
            for i in range(rng.randint(1, max_events))]


def random_base(seed: int, **config) -> ConceptBase:
    rng = random.Random(seed)
    base = ConceptBase(BaseConfig(**config))
    base.ingest_many(random_stream(rng))
    return base


def replay_counts(base: ConceptBase):
    """Recount pos/terminated by walking every ledger event through the forest.

    Uses only the public tree and link records, not the base's own routing.
    """
    by_label = {t.base.label: t for t in base.trees.values()}
    exits = {}
    for link in base.links.values():
        exits[(link.from_tree, link.from_path, base.trees[link.to].base.label)] = link
    pos, term = Counter(), Counter()
    for event in base.ledger:
        labels = event.concepts
        tree = by_label[labels[0]]
        node, path = tree.base, (labels[0],)
        pos[tree.id, path] += 1
        for label in labels[1:]:
            nxt = node.child(label)
            if nxt is not None:
                node, path = nxt, path + (label,)
            else:
                link = exits[(tree.id, path, label)]
                term[tree.id, path] += 1
                tree = base.trees[link.to]
                node, path = tree.base, (label,)
            pos[tree.id, path] += 1
        term[tree.id, path] += 1
    return pos, term


def stored_counts(base: ConceptBase):
    pos, term = Counter(), Counter()
    for tid, tree in base.trees.items():
        for path, node in tree.nodes():
            pos[tid, path] = node.pos
            term[tid, path] = node.terminated
    return pos, term


def unigram_mass(base: ConceptBase) -> Counter:
    mass = Counter()
    for tree in base.trees.values():
        for _, node in tree.nodes():
            mass[node.label] += node.pos
    return +mass
