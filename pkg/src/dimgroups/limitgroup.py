"""Direct-limit ordered groups.

The main object is R(p_i): elements f/Q_n with Q_n = p_1 ... p_n and
Log f contained in Log Q_n, ordered by eventual coefficientwise
nonnegativity. Positivity is semi-decided up to a stage cap; negative
verdicts always carry an exact trace witness. Matrix-presented limits
Z^k(n) -> Z^k(n+1) are handled by :class:`MatrixSystem`.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Callable, Optional, Sequence, Union

from .laurent import (
    LaurentPoly,
    check_nonpositive_witness,
    log_set,
    negative_point,
    nonpositive_witness,
    normalize_min_zero,
    parse_poly,
)
from .verdict import Verdict

DEFAULT_STAGE_CAP = 64
DEFAULT_MULT_CAP = 2**16

PolyLike = Union[LaurentPoly, str]


class MembershipError(ValueError):
    """Raised when Log f is not contained in Log Q_n."""


def _as_poly(p: PolyLike) -> LaurentPoly:
    return p if isinstance(p, LaurentPoly) else parse_poly(p)


@dataclass(frozen=True)
class PolyRule:
    """Sequence entry given by a formula in the index ``i``, e.g. ``"2 + 3x^(2^i)"``."""

    text: str
    shift: int = 0

    def __call__(self, i: int) -> LaurentPoly:
        return parse_poly(self.text, {"i": i}).shift(self.shift)


class PolySequence:
    """The data (p_i), i = 1, 2, ..., as a finite prefix followed by a tail.

    The tail is one of
      * ``period``: a list repeated forever;
      * ``rule``: a formula in i whose coefficient data (not necessarily its
        support) is declared periodic with ``rule_period``;
      * nothing: the data is finite and tail conditions become prefix-relative.
    """

    def __init__(
        self,
        prefix: Sequence[PolyLike] = (),
        period: Optional[Sequence[PolyLike]] = None,
        rule: Optional[Union[str, PolyRule, Callable[[int], LaurentPoly]]] = None,
        rule_period: int = 1,
        validate: bool = True,
    ):
        if period is not None and rule is not None:
            raise ValueError("give either a periodic tail or a rule, not both")
        self.prefix: tuple[LaurentPoly, ...] = tuple(_as_poly(p) for p in prefix)
        self.period: Optional[tuple[LaurentPoly, ...]] = (
            tuple(_as_poly(p) for p in period) if period is not None else None
        )
        if self.period is not None and not self.period:
            raise ValueError("periodic tail must be nonempty")
        self.rule = PolyRule(rule) if isinstance(rule, str) else rule
        if rule_period < 1:
            raise ValueError("rule_period must be positive")
        self.rule_period = rule_period
        if self.period is None and self.rule is None and not self.prefix:
            raise ValueError("empty sequence")
        self._q_cache: dict[int, LaurentPoly] = {0: LaurentPoly.constant(1)}
        self._lock = threading.Lock()
        self._validate = validate
        if validate:
            for i in self.window_indices() if self.is_finite else range(1, self.first_tail_index + self.tail_length):
                self._check_entry(i, self.entry(i))

    # structure
    @property
    def tail_kind(self) -> str:
        if self.period is not None:
            return "periodic"
        if self.rule is not None:
            return "rule"
        return "finite"

    @property
    def is_finite(self) -> bool:
        return self.tail_kind == "finite"

    @property
    def prefix_relative(self) -> bool:
        return self.is_finite

    @property
    def first_tail_index(self) -> int:
        return len(self.prefix) + 1

    @property
    def tail_length(self) -> int:
        if self.period is not None:
            return len(self.period)
        if self.rule is not None:
            return self.rule_period
        return 0

    def __len__(self) -> int:
        if not self.is_finite:
            raise TypeError("infinite sequence has no length")
        return len(self.prefix)

    def available(self, n: int) -> bool:
        return not self.is_finite or n <= len(self.prefix)

    def window_indices(self) -> range:
        """Indices whose entries decide "infinitely often" / "almost all" conditions.

        For a periodic or rule tail this is one period of the tail. For finite
        data the whole sequence is treated as one cycle (prefix-relative).
        """
        if self.is_finite:
            return range(1, len(self.prefix) + 1)
        return range(self.first_tail_index, self.first_tail_index + self.tail_length)

    def entry(self, i: int) -> LaurentPoly:
        if i < 1:
            raise IndexError("sequence entries are indexed from 1")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        k = i - len(self.prefix) - 1
        if self.period is not None:
            return self.period[k % len(self.period)]
        if self.rule is not None:
            p = self.rule(i)
            if self._validate:
                self._check_entry(i, p)
            return p
        raise IndexError(f"entry {i} lies beyond the finite data (length {len(self.prefix)})")

    __getitem__ = entry

    @staticmethod
    def _check_entry(i: int, p: LaurentPoly) -> None:
        if p.is_zero():
            raise ValueError(f"p_{i} is zero")
        if not p.is_nonnegative():
            raise ValueError(f"p_{i} = {p} has a negative coefficient")
        if len(p.terms) < 2:
            raise ValueError(f"p_{i} = {p} needs at least two terms")

    def normalized(self) -> "PolySequence":
        """Copy with every entry shifted so that min Log p_i = 0."""
        norm = lambda p: normalize_min_zero(p)[0]  # noqa: E731
        rule = None
        if self.rule is not None:
            base = self.rule
            rule = lambda i: norm(base(i))  # noqa: E731
        return PolySequence(
            [norm(p) for p in self.prefix],
            period=[norm(p) for p in self.period] if self.period is not None else None,
            rule=rule,
            rule_period=self.rule_period,
            validate=self._validate,
        )

    def is_normalized(self, upto: Optional[int] = None) -> bool:
        idx = range(1, (upto or self.first_tail_index + self.tail_length - 1) + 1)
        return all(self.entry(i).min_exp() == 0 for i in idx if self.available(i))

    def map_entries(self, fn: Callable[[LaurentPoly], LaurentPoly]) -> "PolySequence":
        rule = None
        if self.rule is not None:
            base = self.rule
            rule = lambda i: fn(base(i))  # noqa: E731
        return PolySequence(
            [fn(p) for p in self.prefix],
            period=[fn(p) for p in self.period] if self.period is not None else None,
            rule=rule,
            rule_period=self.rule_period,
            validate=False,
        )

    def q_product(self, n: int) -> LaurentPoly:
        if n < 0:
            raise ValueError("stage must be nonnegative")
        cached = self._q_cache.get(n)
        if cached is not None:
            return cached
        top = max(k for k in self._q_cache if k <= n)
        q = self._q_cache[top]
        for k in range(top + 1, n + 1):
            q = q * self.entry(k)
            with self._lock:
                self._q_cache.setdefault(k, q)
        return q

    def describe(self) -> dict:
        d: dict = {"prefix": [str(p) for p in self.prefix]}
        if self.period is not None:
            d["period"] = [str(p) for p in self.period]
        if isinstance(self.rule, PolyRule):
            d["rule"] = self.rule.text
            d["rule_period"] = self.rule_period
        return d

    def __repr__(self) -> str:
        return f"PolySequence({self.describe()})"


def q_product(seq: PolySequence, n: int) -> LaurentPoly:
    return seq.q_product(n)


# ---------------------------------------------------------------- elements


@dataclass(frozen=True, eq=False)
class RElement:
    """The element f/Q_n of R(p_i), kept in canonical (minimal-stage) form."""

    seq: PolySequence
    f: LaurentPoly
    stage: int

    def at_stage(self, m: int) -> LaurentPoly:
        """Numerator of the representative at stage m >= stage."""
        if m < self.stage:
            raise ValueError("cannot move an element to an earlier stage")
        f = self.f
        for k in range(self.stage + 1, m + 1):
            f = f * self.seq.entry(k)
        return f

    def _align(self, other: "RElement") -> tuple[LaurentPoly, LaurentPoly, int]:
        if other.seq is not self.seq:
            raise ValueError("elements belong to different sequences")
        m = max(self.stage, other.stage)
        return self.at_stage(m), other.at_stage(m), m

    def __add__(self, other: "RElement") -> "RElement":
        a, b, m = self._align(other)
        return make_element(self.seq, a + b, m)

    def __sub__(self, other: "RElement") -> "RElement":
        a, b, m = self._align(other)
        return make_element(self.seq, a - b, m)

    def __neg__(self) -> "RElement":
        return RElement(self.seq, -self.f, self.stage)

    def __mul__(self, k: int) -> "RElement":
        if not isinstance(k, int):
            return NotImplemented
        return make_element(self.seq, self.f.scale(k), self.stage)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RElement):
            return NotImplemented
        return elem_equal(self, other)

    def __hash__(self) -> int:
        return hash((id(self.seq), self.f, self.stage))

    def __repr__(self) -> str:
        return f"[{self.f}, {self.stage}]"


def _canonical(seq: PolySequence, f: LaurentPoly, n: int) -> tuple[LaurentPoly, int]:
    if f.is_zero():
        return f, 0
    while n > 0:
        q = f.exact_divide(seq.entry(n))
        if q is None or not log_set(q) <= log_set(seq.q_product(n - 1)):
            break
        f, n = q, n - 1
    return f, n


def make_element(seq: PolySequence, f: PolyLike, n: int) -> RElement:
    f = _as_poly(f)
    if n < 0:
        raise ValueError("stage must be nonnegative")
    if not log_set(f) <= log_set(seq.q_product(n)):
        raise MembershipError(f"Log({f}) is not contained in Log Q_{n}")
    f, n = _canonical(seq, f, n)
    return RElement(seq, f, n)


def one(seq: PolySequence) -> RElement:
    return RElement(seq, LaurentPoly.constant(1), 0)


def zero(seq: PolySequence) -> RElement:
    return RElement(seq, LaurentPoly(), 0)


def elem_equal(e1: RElement, e2: RElement) -> bool:
    a, b, _ = e1._align(e2)
    return a == b


# ---------------------------------------------------------------- traces


def trace_point(e: RElement, t) -> Fraction:
    t = Fraction(t)
    if t <= 0:
        raise ValueError("point traces need t > 0")
    return e.f.evaluate(t) / e.seq.q_product(e.stage).evaluate(t)


def trace_zero(e: RElement) -> Fraction:
    """Limit of the point traces as t -> 0: ratio of lowest-degree coefficients of Q_n."""
    q = e.seq.q_product(e.stage)
    lo = q.min_exp()
    return Fraction(e.f.coeff(lo), q.coeff(lo))


def trace_infty(e: RElement) -> Fraction:
    """Limit of the point traces as t -> infinity: ratio of leading coefficients of Q_n."""
    q = e.seq.q_product(e.stage)
    hi = q.max_exp()
    return Fraction(e.f.coeff(hi), q.coeff(hi))


@dataclass(frozen=True)
class TraceRange:
    """Multipliers of the rank-one limit Z -> Z -> ... that carries an endpoint trace."""

    multipliers: tuple[int, ...]
    dense: bool
    prefix_relative: bool

    def denominators(self) -> list[int]:
        out, acc = [], 1
        for m in self.multipliers:
            acc *= m
            out.append(acc)
        return out


def _trace_range(seq: PolySequence, n: int, pick: Callable[[LaurentPoly], int]) -> TraceRange:
    if n < 0:
        raise ValueError("N must be nonnegative")
    mults = tuple(pick(seq.entry(i)) for i in range(1, n + 1) if seq.available(i))
    dense = any(pick(seq.entry(i)) > 1 for i in seq.window_indices())
    return TraceRange(mults, dense, seq.prefix_relative)


def trace_range_zero(seq: PolySequence, n: int) -> TraceRange:
    return _trace_range(seq, n, lambda p: p.coeff(p.min_exp()))


def trace_range_infty(seq: PolySequence, n: int) -> TraceRange:
    return _trace_range(seq, n, lambda p: p.coeff(p.max_exp()))


def infinitesimal_test(e: RElement) -> bool:
    """True iff every trace vanishes on e, which happens only for e = 0."""
    return e.f.is_zero()


# ---------------------------------------------------------------- ordering


def _trace_failure(e: RElement, strict: bool) -> Optional[dict]:
    """Exact witness of a negative (or, if strict, nonpositive) trace value."""
    t0, tinf = trace_zero(e), trace_infty(e)
    bad = (lambda v: v <= 0) if strict else (lambda v: v < 0)
    if bad(t0):
        return {"trace": "zero", "value": t0}
    if bad(tinf):
        return {"trace": "infinity", "value": tinf}
    if strict:
        w = nonpositive_witness(e.f)
        if w is not None:
            w = dict(w)
            return {"trace": "point", **w}
        return None
    t = negative_point(e.f)
    if t is not None:
        return {"trace": "point", "kind": "point", "t": t, "value": trace_point(e, t)}
    return None


def is_positive(e: RElement, cap: int = DEFAULT_STAGE_CAP) -> Verdict:
    """Semi-decide e >= 0 in R(p_i).

    True carries the smallest stage k at which the representative has
    nonnegative coefficients, together with that numerator. False carries a
    trace with a negative value. Otherwise Unknown at the cap.
    """
    bad = _trace_failure(e, strict=False)
    if bad is not None:
        return Verdict.false(**bad)
    f = e.f
    k = e.stage
    while True:
        if f.is_nonnegative():
            return Verdict.true(stage=k, product=f)
        if k >= cap or not e.seq.available(k + 1):
            break
        k += 1
        f = f * e.seq.entry(k)
    return Verdict.unknown(cap=cap, reached_stage=k, prefix_relative=not e.seq.available(k + 1))


def is_order_unit(
    e: RElement, mult_cap: int = DEFAULT_MULT_CAP, stage_cap: int = DEFAULT_STAGE_CAP
) -> Verdict:
    """Semi-decide whether [1, 0] <= m e for some positive integer m."""
    bad = _trace_failure(e, strict=True)
    if bad is not None:
        return Verdict.false(**bad)
    unit = one(e.seq)
    m = 1
    while m <= mult_cap:
        v = is_positive(m * e - unit, stage_cap)
        if v.is_true:
            return Verdict.true(multiplier=m, stage=v.certificate["stage"], product=v.certificate["product"])
        m *= 2
    return Verdict.unknown(mult_cap=mult_cap, stage_cap=stage_cap)


def verify_positive_certificate(e: RElement, verdict: Verdict) -> bool:
    """Re-check a True or False verdict of :func:`is_positive` exactly."""
    c = verdict.certificate
    if verdict.is_true:
        return c["product"] == e.at_stage(c["stage"]) and c["product"].is_nonnegative()
    if verdict.is_false:
        return _check_trace_witness(e, c, strict=False)
    return True


def verify_order_unit_certificate(e: RElement, verdict: Verdict) -> bool:
    c = verdict.certificate
    if verdict.is_true:
        diff = c["multiplier"] * e - one(e.seq)
        if c["stage"] < diff.stage:
            return False
        product = diff.at_stage(c["stage"])
        return product == c["product"] and product.is_nonnegative()
    if verdict.is_false:
        return _check_trace_witness(e, c, strict=True)
    return True


def _check_trace_witness(e: RElement, c: dict, strict: bool) -> bool:
    bad = (lambda v: v <= 0) if strict else (lambda v: v < 0)
    if c["trace"] == "zero":
        return trace_zero(e) == c["value"] and bad(c["value"])
    if c["trace"] == "infinity":
        return trace_infty(e) == c["value"] and bad(c["value"])
    if strict:
        return check_nonpositive_witness(e.f, c)
    return c["kind"] == "point" and trace_point(e, c["t"]) < 0


# ---------------------------------------------------------------- matrix systems

Matrix = tuple[tuple[int, ...], ...]


def _radical(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            out *= p
            while n % p == 0:
                n //= p
        p += 1
    return out * (n if n > 1 else 1)


@dataclass(frozen=True)
class MatrixSystem:
    """G = lim A_n : Z^k(n) -> Z^k(n+1), with A_n of shape k(n+1) x k(n).

    ``matrices[n]`` maps stage n to stage n+1. With ``cyclic`` the list
    repeats forever; otherwise the data is finite and verdicts beyond it are
    prefix-relative. ``denominator`` p > 1 tags the coordinate module Z[1/p].
    """

    matrices: tuple[Matrix, ...]
    cyclic: bool = False
    strict_ordering: bool = False
    denominator: int = 1

    def __post_init__(self):
        mats = tuple(tuple(tuple(int(x) for x in row) for row in m) for m in self.matrices)
        object.__setattr__(self, "matrices", mats)
        if not mats:
            raise ValueError("need at least one matrix")
        for i, m in enumerate(mats):
            if not m or any(len(r) != len(m[0]) for r in m):
                raise ValueError(f"matrix {i} is ragged or empty")
            if any(x < 0 for r in m for x in r):
                raise ValueError(f"matrix {i} has a negative entry")
        n = len(mats)
        pairs = list(zip(mats, mats[1:] + (mats[:1] if self.cyclic else ())))
        for i, (a, b) in enumerate(pairs):
            if len(b[0]) != len(a):
                raise ValueError(f"matrix {(i + 1) % n} does not accept the output of matrix {i}")

    def matrix(self, n: int) -> Optional[Matrix]:
        if self.cyclic:
            return self.matrices[n % len(self.matrices)]
        return self.matrices[n] if n < len(self.matrices) else None

    def size(self, n: int) -> int:
        m = self.matrix(n)
        if m is not None:
            return len(m[0])
        prev = self.matrix(n - 1)
        if prev is None:
            raise IndexError(f"stage {n} is beyond the data")
        return len(prev)

    def has_zero_row(self) -> bool:
        return any(all(x == 0 for x in r) for m in self.matrices for r in m)


def _apply(m: Matrix, v: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sum(a * x for a, x in zip(row, v)) for row in m)


def _no_zero_columns(m: Matrix) -> bool:
    return all(any(row[j] for row in m) for j in range(len(m[0])))


def _stays_negative(sys: MatrixSystem, start: int) -> Optional[bool]:
    """Whether every matrix from ``start`` on has no zero column (None if only prefix data)."""
    if sys.cyclic:
        return all(_no_zero_columns(m) for m in sys.matrices)
    rest = sys.matrices[start:]
    return all(_no_zero_columns(m) for m in rest)


def _check_vector(sys: MatrixSystem, g: Sequence[int], n: int) -> tuple[int, ...]:
    v = tuple(int(x) for x in g)
    if len(v) != sys.size(n):
        raise ValueError(f"vector has length {len(v)}, stage {n} has rank {sys.size(n)}")
    return v


def matrix_positive(sys: MatrixSystem, g: Sequence[int], n: int = 0, cap: int = DEFAULT_STAGE_CAP) -> Verdict:
    """Semi-decide g >= 0 at stage n of the limit (coordinatewise ordering)."""
    if sys.strict_ordering:
        return simplified_positive(sys, g, n, cap)
    v = _check_vector(sys, g, n)
    k = n
    while True:
        if all(x >= 0 for x in v):
            return Verdict.true(stage=k, vector=list(v))
        if all(x <= 0 for x in v) and _stays_negative(sys, k):
            return Verdict.false(stage=k, vector=list(v), prefix_relative=not sys.cyclic)
        m = sys.matrix(k)
        if k - n >= cap or m is None:
            return Verdict.unknown(cap=cap, reached_stage=k, prefix_relative=m is None)
        v = _apply(m, v)
        k += 1


def matrix_order_unit(sys: MatrixSystem, g: Sequence[int], n: int = 0, cap: int = DEFAULT_STAGE_CAP) -> Verdict:
    """Semi-decide whether g is an order unit: some pushforward is entrywise > 0."""
    if sys.has_zero_row():
        raise ValueError("order-unit transport needs matrices without zero rows")
    v = _check_vector(sys, g, n)
    if not any(v):
        return Verdict.false(stage=n, vector=list(v), reason="zero vector")
    k = n
    while True:
        if not any(v):
            return Verdict.false(stage=k, vector=list(v), reason="vanishes in the limit")
        if all(x > 0 for x in v):
            return Verdict.true(stage=k, vector=list(v))
        if all(x <= 0 for x in v) and _stays_negative(sys, k):
            return Verdict.false(stage=k, vector=list(v), prefix_relative=not sys.cyclic)
        m = sys.matrix(k)
        if k - n >= cap or m is None:
            return Verdict.unknown(cap=cap, reached_stage=k, prefix_relative=m is None)
        v = _apply(m, v)
        k += 1


def simplified_positive(sys: MatrixSystem, g: Sequence[int], n: int = 0, cap: int = DEFAULT_STAGE_CAP) -> Verdict:
    """Positivity in the simplification: g = 0 or g an order unit."""
    v = _check_vector(sys, g, n)
    if not any(v):
        return Verdict.true(stage=n, vector=list(v), reason="zero")
    return matrix_order_unit(sys, v, n, cap)


def divisible_rescale(sys: MatrixSystem, p: int) -> MatrixSystem:
    """Same matrices over Z[1/p] with the strict ordering."""
    if p <= 1:
        raise ValueError("rescaling needs an integer p > 1")
    return MatrixSystem(
        sys.matrices,
        cyclic=sys.cyclic,
        strict_ordering=True,
        denominator=_radical(sys.denominator * p),
    )
