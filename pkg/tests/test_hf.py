"""Hereditarily finite universes and ZFC-1 instance checks."""

from __future__ import annotations

import itertools

import pytest

from ogkernel.hf import (
    HFUniverse,
    RankError,
    ackermann,
    check_zfc1_instances,
    hf_rank,
    render_hf,
)


def test_universe_counts():
    assert [len(HFUniverse.build(r).elements) for r in range(4)] == [1, 2, 4, 16]


def test_universe_matches_independent_construction():
    # oracle: iterate powersets from the empty set
    level = {frozenset()}
    for rank in range(4):
        universe = HFUniverse.build(rank)
        assert set(universe.elements) == level
        assert all(hf_rank(s) <= rank for s in universe.elements)
        members = list(level)
        level = {
            frozenset(c)
            for r in range(len(members) + 1)
            for c in itertools.combinations(members, r)
        }


def test_universe_is_canonically_ordered_and_transitive():
    universe = HFUniverse.build(3)
    codes = [ackermann(s) for s in universe.elements]
    assert codes == sorted(codes)
    assert codes == list(range(16))  # rank-3 sets are exactly codes 0..15
    elements = set(universe.elements)
    for s in universe.elements:
        for member in s:
            assert member in elements


def test_membership_table():
    universe = HFUniverse.build(2)
    table = universe.membership_table()
    empty = universe.elements[0]
    single = frozenset({empty})
    i, j = universe.elements.index(empty), universe.elements.index(single)
    assert table[(i, j)] is True
    assert table[(j, i)] is False


def test_rank_bounds():
    with pytest.raises(RankError):
        HFUniverse.build(4)
    with pytest.raises(RankError):
        HFUniverse.build(-1)


def test_rank0_vacuous():
    report = check_zfc1_instances(HFUniverse.build(0))
    assert report.ok
    families = {f.name: f for f in report.families}
    assert families["extensionality"].instances == 0
    assert families["pairing"].instances == 1  # the pair {0,0} = {0}


def test_rank2_all_hold():
    report = check_zfc1_instances(HFUniverse.build(2))
    assert report.ok and report.element_count == 4


def test_rank3_counts_and_zero_failures():
    report = check_zfc1_instances(HFUniverse.build(3))
    assert report.ok
    families = {f.name: f for f in report.families}
    # oracle: unordered pairs with repetition from 16 elements
    assert families["pairing"].instances == 16 * 17 // 2 == 136
    assert families["extensionality"].instances == 16 * 15 // 2
    assert families["union"].instances == 16
    assert families["powerset"].instances == 16
    # oracle: all subsets of every element
    universe = HFUniverse.build(3)
    expected = sum(2 ** len(x) for x in universe.elements)
    assert families["separation"].instances == expected == 81
    assert report.total_failures == 0


def test_render_hf():
    empty = frozenset()
    assert render_hf(empty) == "{}"
    assert render_hf(frozenset({empty})) == "{{}}"
    assert render_hf(frozenset({empty, frozenset({empty})})) == "{{},{{}}}"
