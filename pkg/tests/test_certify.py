from __future__ import annotations

import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dimgroups.certify import (
    CertReport,
    Classification,
    ConditionResult,
    DiscreteFiniteRank,
    MixedElement,
    ModelKind,
    ProFDFactorization,
    antifd_verdict,
    bifurcate,
    check_content_ae_one,
    check_dagger,
    check_equal_logs,
    check_isolani_free,
    check_projectively_faithful,
    classify,
    condition_profile,
    counterexample_model,
    find_gn,
    gn_coefficients,
    gn_discreteness_witness,
    gn_lattice_is_discrete,
    in_gn,
    positive_cone_miss_check,
    purity_check,
    strictly_positive,
)
from dimgroups.laurent import LaurentPoly, flatten, parse_poly
from dimgroups.limitgroup import PolySequence, make_element, q_product, trace_range_infty, trace_range_zero

FLAG = PolySequence(period=["2x+3"])


# ---------------------------------------------------------------- sequence conditions


@pytest.mark.parametrize(
    "period, expected",
    [(["2x+3"], (True, True)), (["1+x"], (False, False)), (["1+2x", "2+x"], (True, True))],
)
def test_dagger_examples(period, expected):
    low, high = check_dagger(PolySequence(period=period))
    assert (low.holds, high.holds) == expected


def test_content_examples():
    assert check_content_ae_one(FLAG).holds
    assert not check_content_ae_one(PolySequence(period=["2+2x"])).holds
    assert check_content_ae_one(PolySequence(["2+2x"], period=["2x+3"])).holds


def test_support_conditions():
    assert check_isolani_free(FLAG).holds and check_equal_logs(FLAG).holds
    assert check_projectively_faithful(parse_poly("2x+3"))
    assert not check_projectively_faithful(parse_poly("1 + x^3"))
    assert check_isolani_free(PolySequence(period=["3 + x + 2x^2"])).holds
    # 1 + x^2 + x^3: the constant term is an isolani
    assert not check_isolani_free(PolySequence(period=["1 + x^2 + x^3"])).holds


def test_conditions_depend_only_on_log_sets():
    for text in ["3 + x + 2x^2", "2 + 5x^2 + x^3", "1 + x^2 + x^3", "2x+3"]:
        seq = PolySequence(period=[text])
        flat = PolySequence(period=[flatten(parse_poly(text))])
        assert check_isolani_free(seq).holds == check_isolani_free(flat).holds
        assert check_equal_logs(seq).holds == check_equal_logs(flat).holds


# ---------------------------------------------------------------- bifurcation and verdict


def test_bifurcation_examples():
    b = bifurcate(PolySequence(period=["4x+6"]))
    assert isinstance(b, ProFDFactorization)
    assert set(b.contents) == {2} and b.reduced[1] == parse_poly("2x+3")
    assert isinstance(bifurcate(FLAG), DiscreteFiniteRank)
    assert isinstance(bifurcate(PolySequence(["4x+6"], period=["2x+3"])), DiscreteFiniteRank)


def test_verdict_examples():
    r = antifd_verdict(FLAG)
    assert r.classification is Classification.ANTI_FD and r.exit_code == 0
    assert all(c.holds for c in r.conditions[:3]) and (r.condition("(a)").holds or r.condition("(b)").holds)
    r = antifd_verdict(PolySequence(period=["1+x"]))
    assert r.classification is Classification.INCONCLUSIVE and r.exit_code == 2
    assert any("GICAR" in n for n in r.notes)
    r = antifd_verdict(PolySequence(period=["2+2x"]))
    assert r.classification is Classification.PRO_FD and r.exit_code == 1


def test_report_round_trip():
    r = antifd_verdict(PolySequence(["1+x", "2+x"]))
    assert r.prefix_relative
    again = CertReport.from_dict(r.to_dict())
    assert again.classification is r.classification and again.conditions == r.conditions


bools = st.sampled_from([True, False, None])


@given(bools, bools, bools, bools, bools)
def test_classification_is_pure(i, ii, iii, a, b):
    conds = [ConditionResult(n, h) for n, h in zip(["(i)", "(ii)", "(iii)", "(a)", "(b)"], [i, ii, iii, a, b])]
    c = classify(conds)
    assert c is classify(list(reversed(conds)))
    if c is Classification.ANTI_FD:
        assert i and ii and iii and (a or b)
    if iii is False:
        assert c is Classification.PRO_FD


periods = st.lists(
    st.dictionaries(st.integers(0, 3), st.integers(1, 6), min_size=2, max_size=4).map(LaurentPoly), min_size=1, max_size=3
)


@settings(max_examples=30, deadline=None)
@given(periods)
def test_antifd_implies_discrete_branch(period):
    seq = PolySequence(period=period)
    if antifd_verdict(seq).classification is Classification.ANTI_FD:
        assert isinstance(bifurcate(seq), DiscreteFiniteRank)


def test_flagship_cross_module_consistency():
    assert trace_range_zero(FLAG, 6).dense and trace_range_infty(FLAG, 6).dense
    assert antifd_verdict(FLAG).classification is Classification.ANTI_FD


# ---------------------------------------------------------------- G_n steps


def test_gn_examples():
    x1 = make_element(FLAG, "x", 1)
    assert in_gn(x1, 1)
    assert purity_check(make_element(FLAG, "2x", 1), 2, 1)
    assert find_gn([make_element(FLAG, "1", 0), make_element(FLAG, "x", 2)]) == 2
    w = gn_discreteness_witness(FLAG, 1)
    assert w.exponents == (0, 1) and w.independent and w.discrete
    assert gn_discreteness_witness(FLAG, 0).exponents == (0,)
    assert gn_discreteness_witness(PolySequence(period=["1+x^2"]), 1).exponents == (0, 2)


def test_gn_rejects_content():
    with pytest.raises(ValueError):
        purity_check(make_element(PolySequence(period=["2+2x"]), "x", 1), 2, 1)


def _random_elements(rng: random.Random, seq: PolySequence) -> list:
    out = []
    for _ in range(rng.randint(1, 4)):
        n = rng.randint(0, 4)
        logs = sorted(e for e, _ in q_product(seq, n).terms)
        out.append(make_element(seq, LaurentPoly({e: rng.randint(-9, 9) for e in logs}), n))
    return out


def test_random_subgroups_land_in_gn_and_are_discrete():
    rng = random.Random(7)
    for _ in range(20):
        gens = _random_elements(rng, FLAG)
        n, discrete = gn_lattice_is_discrete(gens)
        assert discrete and all(in_gn(g, n) for g in gens)
        # independent oracle: rebuild each element from its G_n coordinates
        qn = q_product(FLAG, n)
        exps = sorted(e for e, _ in qn.terms)
        for g in gens:
            coeffs = gn_coefficients(g, n)
            rebuilt = make_element(FLAG, LaurentPoly(dict(zip(exps, coeffs))), n)
            assert rebuilt == g
        rows = [gn_coefficients(g, n) for g in gens]
        assert sympy.Matrix(rows).rank() <= len(exps)


# ---------------------------------------------------------------- counterexample models


def test_mixed_element_examples():
    m = counterexample_model("Q")
    assert m is ModelKind.Q
    e = MixedElement(LaurentPoly(), 1, 0, m)
    assert e.value(Fraction(1, 2)) == (0, 0) and not strictly_positive(e)
    assert strictly_positive(MixedElement(LaurentPoly.constant(1), model=m))
    with pytest.raises(ValueError):
        MixedElement(LaurentPoly(), 0, 1, ModelKind.Q)
    with pytest.raises(ValueError):
        MixedElement(LaurentPoly(), Fraction(1, 2), 0, ModelKind.SQRT2Z)


@settings(max_examples=80, deadline=None)
@given(
    st.lists(st.integers(-4, 4), min_size=1, max_size=4),
    st.fractions(min_value=-3, max_value=3, max_denominator=5),
    st.integers(-3, 3),
)
def test_strict_positivity_matches_sympy(coeffs, q, r):
    e = MixedElement(LaurentPoly.from_dense(coeffs), q, r, ModelKind.QSQRT2)
    x = sympy.Symbol("x")
    expr = sum(c * x**i for i, c in enumerate(coeffs)) + (sympy.Rational(q.numerator, q.denominator) + r * sympy.sqrt(2)) * (1 - 2 * x)
    lo, hi = sympy.Rational(1, 3), sympy.Rational(2, 3)
    crit = [lo, hi] + [s for s in sympy.solve(sympy.diff(expr, x), x) if s.is_real and lo <= s <= hi]
    if expr.free_symbols:
        crit += [s for s in sympy.solve(expr, x) if s.is_real and lo <= s <= hi]
    oracle = all(sympy.simplify(expr.subs(x, s)) > 0 for s in crit) if expr != 0 else False
    assert strictly_positive(e) == oracle


@pytest.mark.parametrize("model", list(ModelKind))
def test_positive_cone_miss(model):
    rep = positive_cone_miss_check(model, samples=50)
    assert rep.all_not_positive and rep.vanish_at_half and rep.unit_positive


def test_condition_profiles():
    assert (condition_profile(ModelKind.Q)["a"], condition_profile(ModelKind.Q)["b"]) == (False, True)
    assert (condition_profile(ModelKind.SQRT2Z)["a"], condition_profile(ModelKind.SQRT2Z)["b"]) == (True, False)
    assert (condition_profile(ModelKind.QSQRT2)["a"], condition_profile(ModelKind.QSQRT2)["b"]) == (False, False)
