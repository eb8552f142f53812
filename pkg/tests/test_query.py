import pytest
from hypothesis import given, settings, strategies as st

from conceptbase import (
    EmptyQuery,
    PathNotFound,
    concept_confidence,
    grant,
    query_all,
    resolve,
    revoke,
    traverse,
)
from helpers import black_cat, grazers, random_base


def reaches(result, label):
    return any(label in p for p in result.paths)


def test_grass_is_gated():
    base = grazers()
    elephant, cat = traverse(base, "elephant"), traverse(base, "cat")
    assert reaches(elephant, "milk") and reaches(elephant, "grass")
    assert reaches(cat, "milk") and not reaches(cat, "grass")
    assert ("thirsty", "elephant", "drank", "milk", "ate", "grass") in elephant.paths
    assert cat.paths == [("black", "cat", "sat", "mat"), ("black", "cat", "drank", "milk")]


def test_traverse_unknown_entity():
    assert traverse(grazers(), "nobody").paths == []


def test_query_all_conjunction():
    base = grazers()
    thirsty = base.tree_with_base("thirsty").id
    assert query_all(base, "elephant", {"milk", "grass"}).matched_trees == [thirsty]
    assert query_all(base, "cat", {"milk", "grass"}).matched_trees == []
    assert query_all(base, "elephant", {"unknownword"}).matched_trees == []
    with pytest.raises(EmptyQuery):
        query_all(base, "cat", [])


def test_milk_alone_accepts_everyone():
    base = grazers()
    for who in ("cat", "boy", "elephant"):
        assert query_all(base, who, {"milk"}).matched_trees, who


def test_confidence():
    base = black_cat()
    assert concept_confidence(base, ["black", "cat"], "sat") == 0.5
    assert concept_confidence(base, ["black", "cat"], "dog") == 0.0
    assert concept_confidence(base, ["black"], "cat") == 1.0
    with pytest.raises(PathNotFound):
        concept_confidence(base, ["black", "dog"], "x")
    with pytest.raises(PathNotFound):
        concept_confidence(base, ["cat"], "sat")
    with pytest.raises(PathNotFound):
        concept_confidence(base, [], "sat")


def test_confidence_follows_links():
    base = grazers()
    assert concept_confidence(base, ["black", "cat", "drank"], "milk") == 1.0


def test_link_cycles_terminate():
    base = random_base(6277)
    for who in base.keysets:
        for k in base.links:
            grant(base, who, link=k)
        traverse(base, who)


def walkable(base, path, keys):
    """Independent check that ``path`` follows children or granted links only."""
    tree = base.tree_with_base(path[0])
    node, local, used = tree.base, (path[0],), set()
    for label in path[1:]:
        child = node.child(label)
        if child is not None:
            node, local = child, local + (label,)
            continue
        hops = [l for l in base.links.values()
                if l.from_tree == tree.id and l.from_path == local
                and base.trees[l.to].base.label == label]
        if len(hops) != 1 or hops[0].key not in keys or hops[0].key in used:
            return False
        used.add(hops[0].key)
        tree = base.trees[hops[0].to]
        node, local = tree.base, (label,)
    return True


def prefixes(result):
    return {p[:i] for p in result.paths for i in range(1, len(p) + 1)}


seeds = st.integers(0, 10_000)


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from(["e1", "e2", "e3"]))
def test_gating_soundness(seed, who):
    base = random_base(seed)
    starts, keys = resolve(base, who)
    result = traverse(base, who)
    assert result.links_used <= keys
    for path in result.paths:
        assert base.tree_with_base(path[0]).id in starts
        assert walkable(base, path, keys)


@settings(max_examples=60, deadline=None)
@given(seeds, st.sampled_from(["e1", "e2", "e3"]), st.data())
def test_more_keys_never_shrink_results(seed, who, data):
    base = random_base(seed)
    if not base.links:
        return
    labels = sorted({n.label for t in base.trees.values() for _, n in t.nodes()})
    required = data.draw(st.sets(st.sampled_from(labels), min_size=1, max_size=3))
    before = query_all(base, who, required)
    reach_before = prefixes(traverse(base, who))
    extra = data.draw(st.sampled_from(sorted(base.links)))
    grant(base, who, link=extra)
    after = query_all(base, who, required)
    assert set(before.matched_trees) <= set(after.matched_trees)
    revoke(base, who, link=extra)
    revoke(base, who, link=data.draw(st.sampled_from(sorted(base.links))))
    assert prefixes(traverse(base, who)) <= reach_before
