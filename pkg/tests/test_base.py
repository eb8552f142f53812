import math
import random

import pytest

from conceptbase import (
    BaseConfig,
    ConceptBase,
    InvalidEvent,
    NotLinked,
    SequenceEvent,
    UnknownTree,
    grant,
    traverse,
)
from helpers import black_cat, drinkers, grazers, random_base, random_stream, replay_counts, stored_counts


def shape(base, tid):
    return {path: (n.pos, n.terminated) for path, n in base.trees[tid].nodes()}


def ev(*labels, t=0, who=None):
    return SequenceEvent(tuple(labels), t, who)


def test_singleton():
    base = ConceptBase()
    report = base.ingest(ev("z"))
    assert report.created == [1]
    assert shape(base, 1) == {("z",): (1, 1)}


def test_internal_prefix_starts_new_tree():
    base = black_cat()
    base.ingest(ev("cat", "sat", t=5))
    assert sorted(t.base.label for t in base.trees.values()) == ["black", "cat"]
    assert base.trees[1].base.pos == 2


def test_black_cat_single_tree():
    base = black_cat()
    assert list(base.trees) == [1]
    assert base.keysets["cat"].start_trees == {1}


def test_drank_milk_factoring():
    base = drinkers()
    drank = base.tree_with_base("drank")
    assert shape(base, drank.id) == {("drank",): (3, 0), ("drank", "milk"): (3, 3)}
    cat = base.tree_with_base("black")
    assert ("black", "cat", "drank") not in dict(cat.nodes())
    assert sorted(l.from_path for l in base.links.values() if l.to == drank.id) == [
        ("black", "cat"), ("thirsty", "boy"), ("thirsty", "elephant")]
    assert base.check() == []


def test_two_trees_sharing_a_tail():
    base = ConceptBase()
    base.ingest(ev("x", "ate", "grass"))
    report = base.ingest(ev("y", "ate", "grass", t=1))
    ate = base.tree_with_base("ate")
    assert report.created == [2, ate.id]
    assert shape(base, ate.id) == {("ate",): (2, 0), ("ate", "grass"): (2, 2)}
    assert len(report.links_added) == 2
    assert base.factor_scan().links_added == []


def test_unrelated_trees_are_left_alone():
    base = ConceptBase()
    base.ingest(ev("a", "b"))
    report = base.ingest(ev("c", "d", t=1))
    assert report.created == [2] and not report.links_added and not report.pruned
    assert not base.factor_scan()


def test_factor_scan_is_idempotent():
    for seed in range(30):
        base = random_base(seed, eager_scans=False)
        base.factor_scan()
        assert not base.factor_scan(), seed


def test_min_share_three_waits_for_third_copy():
    base = ConceptBase(BaseConfig(min_share=3))
    base.ingest(ev("x", "ate", "grass"))
    base.ingest(ev("y", "ate", "grass", t=1))
    assert base.tree_with_base("ate") is None
    base.ingest(ev("w", "ate", "grass", t=2))
    assert base.tree_with_base("ate").base.pos == 3


def test_branch_contained_in_existing_tree_is_factored():
    base = ConceptBase(BaseConfig(eager_scans=False))
    base.ingest(ev("y", "z", "w"))
    base.ingest(ev("x", "y", "z", t=1))
    report = base.factor_scan()
    assert report.pruned == [(2, ("x", "y"))]
    assert shape(base, 1)[("y", "z")] == (2, 1)
    assert replay_counts(base) == stored_counts(base)


def test_low_negative_share_is_not_falsity():
    base = ConceptBase()
    for t in range(10):
        base.ingest(ev("a", "b", "c", t=t))
    base.ingest(ev("a", "b", t=10))
    assert base.trees[1].node_at(("a", "b", "c")).neg == 1
    assert not base.falsity_scan()


def test_exclusive_entry_split_is_configurable():
    on = grazers()
    off = grazers(BaseConfig(exclusive_split=False))
    assert on.tree_with_base("ate") is not None
    assert off.tree_with_base("ate") is None
    assert off.tree_with_base("drank").node_at(("drank", "milk", "ate", "grass")).pos == 3
    for base in (on, off):
        assert base.check() == []
        assert replay_counts(base) == stored_counts(base)


def test_ingest_grants_start_tree_and_crossed_links():
    base = drinkers()
    boy = base.keysets["boy"]
    assert boy.start_trees == {base.tree_with_base("thirsty").id}
    assert boy.link_keys == {l.key for l in base.links.values() if l.from_path == ("thirsty", "boy")}


@pytest.mark.parametrize("event", [
    ev(),
    ev("Cat"),
    ev("black cat"),
    ev(""),
    SequenceEvent(("a",), 0, "x\ty"),
])
def test_invalid_events(event):
    with pytest.raises(InvalidEvent):
        ConceptBase().ingest(event)


def test_timestamps_may_not_go_backwards():
    base = ConceptBase()
    base.ingest(ev("a", t=3))
    base.ingest(ev("a", t=3))
    with pytest.raises(InvalidEvent):
        base.ingest(ev("a", t=2))


def test_batch_mode_defers_scans():
    base = ConceptBase(BaseConfig(eager_scans=False))
    base.ingest(ev("x", "ate", "grass"))
    base.ingest(ev("y", "ate", "grass", t=1))
    assert len(base.trees) == 2
    base.restructure()
    assert len(base.trees) == 3


def test_batch_mode_conserves_counts():
    for seed in range(40):
        rng = random.Random(seed)
        stream = random_stream(rng)
        lazy = ConceptBase(BaseConfig(eager_scans=False))
        lazy.ingest_many(stream)
        assert lazy.check() == []
        assert replay_counts(lazy) == stored_counts(lazy)


def test_decay_half_life():
    base = drinkers()
    for _ in range(8):
        base.decay_tick()
    assert all(math.isclose(l.strength, 0.5, rel_tol=1e-12) for l in base.links.values())


def test_decay_floor_removes_and_purges():
    base = drinkers()
    weak = base.links[1]
    weak.strength = 0.01
    report = base.decay_tick()
    assert report.links_removed == [1]
    assert 1 not in base.links
    assert all(1 not in ks.link_keys for ks in base.keysets.values())
    assert 1 not in base.tree_with_base("drank").inbound_links


def test_used_link_stays_pinned():
    base = drinkers()
    key = next(iter(base.keysets["cat"].link_keys))
    for _ in range(100):
        traverse(base, "cat", refresh=True)
        base.decay_tick()
        assert math.isclose(base.links[key].strength, 2 ** (-1 / 8))
    assert key in base.links
    assert [k for k in base.links if k != key] == []


def test_decay_leaves_counts_alone():
    base = drinkers()
    before = stored_counts(base)
    for _ in range(40):
        base.decay_tick()
    assert not base.links
    assert stored_counts(base) == before


def test_plain_traversal_does_not_refresh():
    base = drinkers()
    base.decay_tick()
    traverse(base, "cat")
    assert all(l.strength < 1 for l in base.links.values())


def test_rejoin_errors():
    base = black_cat()
    with pytest.raises(UnknownTree):
        base.try_rejoin(1, 9)
    base.ingest(ev("dog", t=9))
    with pytest.raises(NotLinked):
        base.try_rejoin(1, 2)


def test_config_file(tmp_path):
    cfg = tmp_path / "c.conf"
    cfg.write_text("# thresholds\nmin_share = 3\nfalsity_ratio=1.5\neager_scans = false\n")
    got = BaseConfig.from_file(cfg)
    assert (got.min_share, got.falsity_ratio, got.eager_scans) == (3, 1.5, False)
    for bad in ("nope = 1\n", "min_share 3\n", "eager_scans = maybe\n", "min_share = 1\n"):
        cfg.write_text(bad)
        with pytest.raises(ValueError):
            BaseConfig.from_file(cfg)


def test_check_reports_damage():
    base = drinkers()
    base.trees[1].base.pos += 1
    base.links[2].from_path = ("thirsty", "nobody")
    grant(base, "ghost", link=3)
    base.links.pop(3)
    problems = base.check()
    assert any("SumViolation" in p for p in problems)
    assert any(p.startswith("L2: dangling source") for p in problems)
    assert any("keyset ghost" in p for p in problems)


def test_total_base_mass_covers_ledger():
    for seed in range(30):
        base = random_base(seed)
        assert sum(t.base.pos for t in base.trees.values()) >= len(base.ledger)
