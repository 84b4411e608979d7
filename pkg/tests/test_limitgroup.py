from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dimgroups.laurent import LaurentPoly, parse_poly
from dimgroups.limitgroup import (
    MatrixSystem,
    MembershipError,
    PolySequence,
    divisible_rescale,
    elem_equal,
    infinitesimal_test,
    is_order_unit,
    is_positive,
    make_element,
    matrix_order_unit,
    matrix_positive,
    one,
    q_product,
    simplified_positive,
    trace_infty,
    trace_point,
    trace_range_infty,
    trace_range_zero,
    trace_zero,
    verify_order_unit_certificate,
    verify_positive_certificate,
    zero,
)

SEQ = PolySequence(period=["2x+3"])


def test_q_product_examples():
    assert q_product(SEQ, 2) == parse_poly("4x^2 + 12x + 9")
    assert q_product(SEQ, 0) == LaurentPoly.constant(1)
    seq = PolySequence(["1+x^2", "1+x^4"])
    assert q_product(seq, 2) == parse_poly("1 + x^2 + x^4 + x^6")


def test_sequence_validation():
    with pytest.raises(ValueError):
        PolySequence(["3"])  # one term
    with pytest.raises(ValueError):
        PolySequence(["1 - x"])  # negative coefficient
    with pytest.raises(ValueError):
        PolySequence()


def test_sequence_tails():
    seq = PolySequence(["1+x"], period=["2+x", "1+3x"])
    assert seq.tail_kind == "periodic"
    assert [str(seq[i]) for i in (1, 2, 3, 4)] == ["1 + x", "2 + x", "1 + 3*x", "2 + x"]
    assert list(seq.window_indices()) == [2, 3]
    rule = PolySequence(rule="2 + 3x^(2^i)")
    assert rule.tail_kind == "rule" and rule[3] == parse_poly("2 + 3x^8")
    fin = PolySequence(["1+x", "2+x"])
    assert fin.prefix_relative and not fin.available(3)
    with pytest.raises(IndexError):
        fin[3]


def test_make_element_examples():
    assert repr(make_element(SEQ, "x", 1)) == "[x, 1]"
    with pytest.raises(MembershipError):
        make_element(SEQ, "x^2", 1)
    e = make_element(SEQ, "2x+3", 1)
    assert e.stage == 0 and e.f == LaurentPoly.constant(1)


def test_equality_examples():
    assert elem_equal(one(SEQ), make_element(SEQ, "2x+3", 1))
    assert not elem_equal(make_element(SEQ, "x", 1), make_element(SEQ, "1", 1))


def random_element(seq: PolySequence, data, max_stage: int = 3):
    n = data.draw(st.integers(0, max_stage))
    logs = sorted(e for e, _ in q_product(seq, n).terms)
    coeffs = data.draw(st.lists(st.integers(-9, 9), min_size=len(logs), max_size=len(logs)))
    return make_element(seq, LaurentPoly(dict(zip(logs, coeffs))), n)


@given(st.data())
def test_representative_independence(data):
    e = random_element(SEQ, data)
    lifted = e.at_stage(e.stage + 1)
    other = make_element(SEQ, lifted, e.stage + 1)
    assert elem_equal(e, other)
    t = Fraction(2, 3)
    assert trace_point(e, t) == trace_point(other, t)
    assert trace_zero(e) == trace_zero(other) and trace_infty(e) == trace_infty(other)


@given(st.data())
def test_group_laws(data):
    a, b = random_element(SEQ, data), random_element(SEQ, data)
    assert elem_equal(a + b, b + a)
    assert elem_equal((a + b) - b, a)
    assert elem_equal(a - a, zero(SEQ))
    assert trace_point(3 * a, Fraction(1, 2)) == 3 * trace_point(a, Fraction(1, 2))


def test_trace_examples():
    x1 = make_element(SEQ, "x", 1)
    assert trace_point(one(SEQ), Fraction(7)) == 1
    assert trace_point(x1, 1) == Fraction(1, 5)
    assert (trace_zero(one(SEQ)), trace_infty(one(SEQ))) == (1, 1)
    assert (trace_zero(x1), trace_infty(x1)) == (0, Fraction(1, 2))


def test_trace_ranges():
    tr0, trinf = trace_range_zero(SEQ, 3), trace_range_infty(SEQ, 3)
    assert tr0.multipliers == (3, 3, 3) and trinf.multipliers == (2, 2, 2)
    assert tr0.dense and trinf.dense and tr0.denominators() == [3, 9, 27]
    gicar = PolySequence(period=["1+x"])
    assert trace_range_zero(gicar, 4).multipliers == (1, 1, 1, 1)
    assert not trace_range_zero(gicar, 4).dense
    alt = PolySequence(period=["1+x", "2+2x"])
    assert trace_range_zero(alt, 4).multipliers == (1, 2, 1, 2) and trace_range_zero(alt, 4).dense


def test_infinitesimal_test():
    assert infinitesimal_test(make_element(SEQ, "0", 2))
    assert not infinitesimal_test(make_element(SEQ, "x", 1))
    e = make_element(SEQ, "x", 1)
    assert infinitesimal_test(e - e)


# ---------------------------------------------------------------- positivity


def test_positive_examples():
    v = is_positive(make_element(SEQ, "x", 1))
    assert v.is_true and v.certificate["stage"] == 1
    v = is_positive(make_element(SEQ, "3 - 2x", 1))
    assert v.is_false and v.certificate["trace"] == "infinity" and v.certificate["value"] == -1


def test_positive_needs_products():
    # 1 - x + x^2 is positive on (0, inf) but has a negative coefficient
    seq = PolySequence(period=["1+x"])
    e = make_element(seq, "1 - x + x^2", 2)
    v = is_positive(e)
    assert v.is_true and v.certificate["stage"] > 2
    assert verify_positive_certificate(e, v)
    assert all(e.f(Fraction(k, 10)) > 0 for k in range(1, 100))


def test_positive_unknown_at_cap():
    # (1 - x)^2 vanishes at 1, so no product ever has nonnegative coefficients
    seq = PolySequence(period=["1+x"])
    v = is_positive(make_element(seq, "1 - 2x + x^2", 2), cap=12)
    assert v.is_unknown


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_positive_certificates_recheck(data):
    e = random_element(SEQ, data, max_stage=2)
    v = is_positive(e, cap=20)
    assert verify_positive_certificate(e, v)
    if v.is_true:
        assert all(trace_point(e, Fraction(k, 4)) >= 0 for k in range(1, 13))


def test_order_unit_examples():
    v = is_order_unit(one(SEQ))
    assert v.is_true and v.certificate["multiplier"] == 1
    x1 = make_element(SEQ, "x", 1)
    v = is_order_unit(x1)
    # tau_0 vanishes on x/(2x+3), so it is not an order unit
    assert v.is_false and v.certificate["trace"] == "zero"
    assert verify_order_unit_certificate(x1, v)
    e = make_element(SEQ, "1 + x", 1)
    v = is_order_unit(e)
    assert v.is_true and verify_order_unit_certificate(e, v)


def test_order_unit_vanishing_point_trace():
    seq = PolySequence(period=["1+x"])
    e = make_element(seq, "1 - 2x + x^2", 2)
    v = is_order_unit(e)
    assert v.is_false and verify_order_unit_certificate(e, v)


# ---------------------------------------------------------------- matrix systems


def test_matrix_examples():
    sys = MatrixSystem(([[1, 1], [1, 2]],), cyclic=True)
    assert matrix_order_unit(sys, [1, 1]).is_true
    v = matrix_positive(sys, [1, -1])
    assert v.is_false and v.certificate["vector"] == [0, -1]
    assert matrix_positive(sys, [0, 0]).is_true
    assert matrix_order_unit(sys, [0, 0]).is_false


def test_matrix_shapes_checked():
    with pytest.raises(ValueError):
        MatrixSystem(([[1, -1]],))
    with pytest.raises(ValueError):
        MatrixSystem(([[1, 1], [1, 1]], [[1, 1, 1]]))


def test_simplified_and_rescale():
    sys = MatrixSystem(([[1, 1], [1, 2]],), cyclic=True)
    assert simplified_positive(sys, [0, 0]).is_true
    assert simplified_positive(sys, [2, 1]).is_true
    assert not simplified_positive(sys, [1, -1]).is_true
    r = divisible_rescale(divisible_rescale(sys, 2), 3)
    assert r.denominator == 6 and r.strict_ordering
    with pytest.raises(ValueError):
        divisible_rescale(sys, 1)
