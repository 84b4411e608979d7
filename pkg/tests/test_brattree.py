from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimgroups.brattree import (
    NotMaterialized,
    WeightedTree,
    build_tree_initial_hom,
    export_dot,
    path_denominators,
    pushforward,
    tree_approx_div_check,
    tree_element,
    tree_initial_check,
    tree_positive,
    tree_trace,
)
from dimgroups.initial import DyadicVectorGroup

BIN = WeightedTree.uniform((2, 3))
D2 = DyadicVectorGroup(2)
ONE2 = (Fraction(1), Fraction(1))


def test_tree_shape():
    assert [BIN.level_size(n) for n in range(4)] == [1, 2, 4, 8]
    assert BIN.children((1, 1)) == [((2, 2), 2), ((2, 3), 3)]
    assert len(list(BIN.edges(3))) == 14 and len(list(BIN.paths(3))) == 8
    with pytest.raises(ValueError):
        WeightedTree(levels=[[(2, 3)], [(1,)]])  # level 1 has two vertices
    with pytest.raises(ValueError):
        WeightedTree(period=[(0, 2)])


def test_explicit_tree_not_materialized():
    t = WeightedTree(levels=[[(2, 3)]])
    assert t.materialized(1) and not t.materialized(2)
    with pytest.raises(NotMaterialized):
        t.multiplicity_vector((1, 0))


def test_checks():
    assert tree_initial_check(BIN, 3).is_true
    assert tree_approx_div_check(BIN, 3).is_true
    bad = tree_initial_check(WeightedTree.uniform((2, 4)), 2)
    assert bad.is_false and bad.certificate["gcd"] == 2
    assert tree_approx_div_check(WeightedTree.uniform((1, 1)), 3).is_false
    mixed = WeightedTree(period=[(1, 1), (2, 3)])
    assert tree_approx_div_check(mixed, 4).is_true


def test_trace_along_path():
    t = tree_element(BIN, 1, [1, 0])
    path = [(0, 0), (1, 0), (2, 0)]
    assert tree_trace(path, t) == Fraction(1, 2)
    assert tree_trace(path, pushforward(t)) == Fraction(1, 2)
    assert path_denominators(BIN, path) == [2, 4]
    with pytest.raises(ValueError):
        tree_trace([(0, 0), (1, 0), (2, 3)], t)


@pytest.fixture(scope="module")
def hom():
    return build_tree_initial_hom(BIN, D2, ONE2, 3)


def test_initial_hom_identities(hom):
    assert hom.verify() == []
    internal = [x for n in range(3) for x in BIN.vertices(n)]
    assert len(internal) == 7
    for x in internal:
        kids = BIN.children(x)
        total = tuple(sum(m * hom.table[y][k] for y, m in kids) for k in range(2))
        assert total == hom.table[x]


def test_order_embedding_random(hom):
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(0, 2)
        t = tree_element(BIN, n, [rng.randint(-3, 5) for _ in range(BIN.level_size(n))])
        up = pushforward(t)
        assert tree_positive(t) == tree_positive(up)
        assert hom.apply(t) == hom.apply(up)
        if tree_positive(t) and any(t.values):
            assert D2.is_order_unit(hom.apply(t))
        for path in BIN.paths(n + 1):
            assert tree_trace(path, t) == tree_trace(path, up)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 7), min_size=2, max_size=3).filter(lambda v: len(set(v)) > 1))
def test_hom_for_random_weights(weights):
    tree = WeightedTree.uniform(weights)
    if not tree_initial_check(tree, 2).is_true:
        with pytest.raises(ValueError):
            build_tree_initial_hom(tree, D2, ONE2, 2)
        return
    assert build_tree_initial_hom(tree, D2, ONE2, 2).verify() == []


def test_export_dot():
    dot = export_dot(BIN, 1)
    assert dot.startswith("digraph tree {") and dot.endswith("}\n")
    assert '"0.0" -> "1.1" [label="3"];' in dot
