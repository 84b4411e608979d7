from __future__ import annotations

import random
from fractions import Fraction
from math import gcd

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dimgroups.initial import (
    ApproximationFailure,
    BinomialSequence,
    DyadicVectorGroup,
    InitialHomomorphism,
    build_initial_hom,
    build_initial_hom_noninteractive,
    chain_apply,
    chain_matrix,
    decompose_gcd,
    dense_range_verdict_noninteractive,
    hom_apply,
    integerize_chain,
    noninteractive_check,
    nullspace_vector,
    phi_norm_bound_check,
    small_coset_rep,
    small_order_unit_decomposition,
    solve_chain_bounded,
    solve_chain_rational,
    split_unit,
    sum_combo,
    verify_split,
)
from dimgroups.laurent import LaurentPoly
from dimgroups.limitgroup import PolySequence

D1, D2, D3 = DyadicVectorGroup(1), DyadicVectorGroup(2), DyadicVectorGroup(3)
ONE1, ONE2, ONE3 = (Fraction(1),), (Fraction(1),) * 2, (Fraction(1),) * 3
THM_SEQ = BinomialSequence([(5, 2), (17, 2), (257, 2)])

dyadic = st.builds(lambda n, k: Fraction(n, 2**k), st.integers(-64, 64), st.integers(0, 6))


# ---------------------------------------------------------------- target group


def test_dyadic_group_basics():
    assert D2.contains((Fraction(3, 8), Fraction(-1)))
    assert not D2.contains((Fraction(1, 3), Fraction(0)))
    assert D2.is_order_unit(ONE2) and not D2.is_order_unit((Fraction(1), Fraction(0)))
    assert str(D2) == "Z[1/2]^2"
    with pytest.raises(ValueError):
        DyadicVectorGroup(1, base=4)


@given(st.fractions(min_value=-5, max_value=5, max_denominator=50), st.integers(1, 12))
def test_approximate_is_close_and_in_group(t, k):
    eps = Fraction(1, 2**k)
    a = D1.approximate((t,), eps)
    assert D1.contains(a) and abs(a[0] - t) < eps


# ---------------------------------------------------------------- splitting


def test_split_example():
    v, w = split_unit(D1, ONE1, 2, 3, Fraction(1, 2), Fraction(1, 10))
    assert 2 * v[0] + 3 * w[0] == 1
    assert abs(v[0] - Fraction(1, 4)) < Fraction(1, 20) and abs(w[0] - Fraction(1, 6)) < Fraction(1, 30)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 40),
    st.integers(1, 40),
    st.fractions(min_value=Fraction(1, 10), max_value=1, max_denominator=10),
    st.tuples(dyadic, dyadic).filter(lambda u: u[0] > 0 and u[1] > 0),
)
def test_split_property(p, q, r, u):
    if gcd(p, q) != 1:
        return
    eps = Fraction(1, 20)
    v, w = split_unit(D2, u, p, q, r, eps)
    assert verify_split(D2, u, p, q, r, eps, v, w)
    # independent recheck of the identity and positivity
    assert all(p * vi + q * wi == ui and vi > 0 and wi > 0 for vi, wi, ui in zip(v, w, u))


def test_split_rejects_bad_input():
    with pytest.raises(ValueError):
        split_unit(D1, ONE1, 4, 6)
    with pytest.raises(ValueError):
        split_unit(D1, (Fraction(-1),), 2, 3)


def test_decompose_gcd_example():
    vs = decompose_gcd(D3, ONE3, [6, 10, 15])
    assert sum_combo([6, 10, 15], vs) == ONE3 and all(D3.is_order_unit(v) for v in vs)
    with pytest.raises(ValueError):
        decompose_gcd(D3, ONE3, [6, 10, 14])


def test_decompose_random_triples():
    rng = random.Random(3)
    done = 0
    while done < 10:
        ps = [rng.randint(2, 60) for _ in range(3)]
        if gcd(gcd(ps[0], ps[1]), ps[2]) != 1:
            continue
        vs = decompose_gcd(D3, ONE3, ps)
        assert sum(p * v[0] for p, v in zip(ps, vs)) == 1
        assert all(v[i] > 0 for v in vs for i in range(3))
        done += 1


def test_small_coset_rep():
    h = small_coset_rep(D1, ONE1, 3, Fraction(1, 10))
    assert abs(h[0]) < Fraction(1, 10)
    z = (ONE1[0] - h[0]) / 3
    assert D1.contains((z,))


def test_small_order_unit_decomposition():
    g = (Fraction(3), Fraction(2))
    parts = small_order_unit_decomposition(D2, g, 10)
    assert sum_combo([c for c, _ in parts], [s for _, s in parts]) == g
    assert all(D2.is_order_unit(s) and max(abs(x) for x in s) < Fraction(1, 10) for _, s in parts)
    assert small_order_unit_decomposition(D2, (Fraction(1, 64),) * 2, 10) == [(1, (Fraction(1, 64),) * 2)]


# ---------------------------------------------------------------- chain systems


def test_chain_matrix_shape():
    assert chain_matrix(2, 3, 2) == [[3, 2, 0], [0, 3, 2]]
    w = nullspace_vector(2, 3, 4)
    assert chain_apply(2, 3, w) == [0] * 4


def _sympy_parametric(a, b, U):
    A = sympy.Matrix(chain_matrix(a, b, len(U)))
    rhs = sympy.Matrix([sympy.Rational(u.numerator, u.denominator) for u in U])
    sol, params = A.gauss_jordan_solve(rhs)
    return sol.subs({p: 0 for p in params})


@settings(max_examples=50, deadline=None)
@given(
    st.sampled_from([(2, 3), (3, 5)]),
    st.lists(st.fractions(min_value=-10, max_value=10, max_denominator=12), min_size=1, max_size=5),
    st.fractions(min_value=-3, max_value=3, max_denominator=7),
)
def test_chain_solution_matches_gauss_jordan(ab, U, x0):
    a, b = ab
    X = solve_chain_rational(a, b, U, x0)
    assert chain_apply(a, b, X) == U
    particular = _sympy_parametric(a, b, U)
    diff = [X[i] - Fraction(int(particular[i].p), int(particular[i].q)) for i in range(len(X))]
    w = nullspace_vector(a, b, len(U))
    lam = diff[0] / w[0]
    assert diff == [lam * wi for wi in w]


def test_chain_vectors():
    U = [(Fraction(1), Fraction(2)), (Fraction(0), Fraction(-1))]
    X = solve_chain_rational(2, 3, U, (Fraction(0), Fraction(1)))
    assert chain_apply(2, 3, X) == U


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-6, 6).map(lambda k: Fraction(k, 64)), min_size=1, max_size=6))
def test_bounded_window(offsets):
    U = [(1 + o,) for o in offsets]
    sol = solve_chain_bounded(2, 3, U, 1, Fraction(1, 10))
    assert sol.center == Fraction(1, 5) and sol.radius == Fraction(1, 10)
    assert all(abs(x[0] - Fraction(1, 5)) < Fraction(1, 10) for x in sol.X)
    assert chain_apply(2, 3, sol.X) == U


def test_bounded_window_precondition():
    with pytest.raises(ValueError):
        solve_chain_bounded(2, 3, [(Fraction(2),)], 1, Fraction(1, 10))


@settings(max_examples=30, deadline=None)
@given(
    st.sampled_from([(2, 3), (3, 2), (3, 5), (5, 2)]),
    st.lists(st.integers(-6, 6), min_size=1, max_size=4),
)
def test_integerize_chain(ab, offs):
    a, b = ab
    U = [(1 + Fraction(o, 64), 1 - Fraction(o, 128)) for o in offs]
    sol = solve_chain_bounded(a, b, U, 1, Fraction(1, 5), unit=ONE2)
    slack = sol.radius - sol.max_error
    V = integerize_chain(D2, a, b, U, sol.X, slack, ONE2)
    assert chain_apply(a, b, V) == U and all(D2.contains(v) for v in V)
    assert all(max(abs(vi - xi) for vi, xi in zip(v, x)) < slack for v, x in zip(V, sol.X))


# ---------------------------------------------------------------- the homomorphism table


def test_binomial_sequence_validation():
    with pytest.raises(ValueError):
        BinomialSequence([(4, 6)])
    with pytest.raises(ValueError):
        BinomialSequence([(1, 2)])
    assert THM_SEQ.d_value() == Fraction(3, 7) * Fraction(15, 19) * Fraction(255, 259)


@pytest.fixture(scope="module")
def thm_hom():
    return build_initial_hom(THM_SEQ, D2, ONE2, 3)


def test_initial_hom_table(thm_hom):
    H = thm_hom
    assert H.verify() == []
    assert sum(len(row) for row in H.table) == 10
    for n in range(1, 4):
        a, b = THM_SEQ.pair(n)
        for i in range(n):
            assert tuple(a * x + b * y for x, y in zip(H.table[n][i], H.table[n][i + 1])) == H.table[n - 1][i]
    c, r = H.stage_bound(3)
    assert c == Fraction(1, 7 * 19 * 259)
    assert r == H.d / (3 * 15 * 255)
    assert all(abs(x - c) < r for v in H.table[3] for x in v)


def test_hom_apply_well_defined(thm_hom):
    rng = random.Random(11)
    pseq = THM_SEQ.poly_sequence()
    for _ in range(20):
        n = rng.randint(0, 2)
        f = LaurentPoly({j: rng.randint(-5, 5) for j in range(n + 1)})
        lifted = f * pseq.entry(n + 1)
        assert hom_apply(thm_hom, (f, n)) == hom_apply(thm_hom, (lifted, n + 1))
    assert hom_apply(thm_hom, (LaurentPoly.constant(1), 0)) == ONE2


def test_phi_norm_bound(thm_hom):
    rep = phi_norm_bound_check(thm_hom)
    assert rep.holds and len(rep.checks) == 20


def test_estimator_facade():
    est = InitialHomomorphism(D1, n_stages=2).fit(BinomialSequence([(2, 3), (3, 2)]))
    assert est.get_params()["n_stages"] == 2
    assert est.transform([(LaurentPoly.constant(1), 0)]) == [ONE1]


# ---------------------------------------------------------------- non-interactive sequences


def test_noninteractive_examples():
    good = PolySequence(rule="2 + 3x^(2^i)")
    assert noninteractive_check(good, 5).is_true
    assert dense_range_verdict_noninteractive(good).is_true
    bad = noninteractive_check(PolySequence(period=["1+x"]), 3)
    assert bad.is_false and bad.certificate["n"] == 1
    assert dense_range_verdict_noninteractive(PolySequence(rule="1 + 3x^(2^i)")).is_false
    with pytest.raises(ValueError):
        dense_range_verdict_noninteractive(PolySequence(["2+3x"]))


def test_noninteractive_hom():
    H = build_initial_hom_noninteractive(PolySequence(rule="2 + 3x^(2^i)"), D1, ONE1, 3)
    assert H.verify() == []
    assert sorted(H.table[3]) == sorted({a + b + c for a in (0, 2) for b in (0, 4) for c in (0, 8)})
    with pytest.raises(ValueError):
        build_initial_hom_noninteractive(PolySequence(period=["1+x"]), D1, ONE1, 3)


def test_approximation_failure_surfaces():
    G = DyadicVectorGroup(1, max_exponent=2)
    with pytest.raises(ApproximationFailure):
        G.approximate((Fraction(1, 3),), Fraction(1, 1000))
