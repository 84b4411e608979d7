"""Laurent polynomials with integer coefficients, Z[x, x^-1].

Values are immutable and hashable. Besides ring arithmetic the module
provides the support (Log) set, content, isolani detection, and exact sign
questions on positive rational points and intervals via Sturm sequences.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Mapping, Optional, Union

from . import _sturm

Number = Union[int, Fraction]


class LaurentPoly:
    """A finitely supported map exponent -> nonzero integer coefficient."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, coeffs: Union[Mapping[int, int], Iterable[tuple[int, int]], None] = None):
        acc: dict[int, int] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else (coeffs or ())
        for e, c in items:
            if isinstance(c, bool) or not isinstance(c, int):
                if isinstance(c, Fraction) and c.denominator == 1:
                    c = c.numerator
                else:
                    raise TypeError(f"coefficients must be integers, got {c!r}")
            acc[int(e)] = acc.get(int(e), 0) + c
        self._terms: tuple[tuple[int, int], ...] = tuple(sorted((e, c) for e, c in acc.items() if c != 0))
        self._hash: Optional[int] = None

    # construction helpers
    @classmethod
    def monomial(cls, exp: int, coef: int = 1) -> "LaurentPoly":
        return cls({exp: coef})

    @classmethod
    def constant(cls, c: int) -> "LaurentPoly":
        return cls({0: c})

    @classmethod
    def from_dense(cls, coeffs: Iterable[int], shift: int = 0) -> "LaurentPoly":
        """Build from coefficients listed lowest exponent first, starting at x^shift."""
        return cls({shift + i: c for i, c in enumerate(coeffs)})

    @classmethod
    def parse(cls, text: str, env: Optional[Mapping[str, int]] = None) -> "LaurentPoly":
        return parse_poly(text, env)

    # accessors
    @property
    def terms(self) -> tuple[tuple[int, int], ...]:
        return self._terms

    def coeff(self, exp: int) -> int:
        for e, c in self._terms:
            if e == exp:
                return c
        return 0

    def is_zero(self) -> bool:
        return not self._terms

    def min_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has empty support")
        return self._terms[0][0]

    def max_exp(self) -> int:
        if not self._terms:
            raise ValueError("zero polynomial has empty support")
        return self._terms[-1][0]

    def coefficients(self) -> list[int]:
        return [c for _, c in self._terms]

    def is_nonnegative(self) -> bool:
        """Coefficientwise nonnegativity (the ordering of A)."""
        return all(c > 0 for _, c in self._terms)

    def dense(self) -> tuple[list[int], int]:
        """Dense coefficient list from min exponent upward, and that min exponent."""
        if not self._terms:
            return [], 0
        lo, hi = self._terms[0][0], self._terms[-1][0]
        out = [0] * (hi - lo + 1)
        for e, c in self._terms:
            out[e - lo] = c
        return out, lo

    # arithmetic
    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        other = _coerce(other)
        return LaurentPoly(list(self._terms) + list(other._terms))

    __radd__ = __add__

    def __neg__(self) -> "LaurentPoly":
        return LaurentPoly([(e, -c) for e, c in self._terms])

    def __sub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other: "LaurentPoly") -> "LaurentPoly":
        return _coerce(other) - self

    def __mul__(self, other: Union["LaurentPoly", int]) -> "LaurentPoly":
        other = _coerce(other)
        acc: dict[int, int] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                acc[e1 + e2] = acc.get(e1 + e2, 0) + c1 * c2
        return LaurentPoly(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            raise ValueError("negative powers are only defined for monomials; use shift")
        out = LaurentPoly.constant(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k: int) -> "LaurentPoly":
        """Multiply by x^k."""
        return LaurentPoly([(e + k, c) for e, c in self._terms])

    def scale(self, m: int) -> "LaurentPoly":
        return LaurentPoly([(e, c * m) for e, c in self._terms])

    def exact_divide(self, other: "LaurentPoly") -> Optional["LaurentPoly"]:
        """Quotient q with q*other == self in Z[x, x^-1], or None when none exists."""
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return LaurentPoly()
        num, nlo = self.dense()
        den, dlo = other.dense()
        if len(num) < len(den):
            return None
        rem = list(num)
        quot = [0] * (len(num) - len(den) + 1)
        lead = den[-1]
        for shift in range(len(quot) - 1, -1, -1):
            top = rem[shift + len(den) - 1]
            if top % lead:
                return None
            f = top // lead
            quot[shift] = f
            if f:
                for i, c in enumerate(den):
                    rem[shift + i] -= f * c
        if any(rem):
            return None
        return LaurentPoly.from_dense(quot, nlo - dlo)

    def evaluate(self, t: Number) -> Fraction:
        t = Fraction(t)
        if t == 0 and self._terms and self._terms[0][0] < 0:
            raise ZeroDivisionError("negative exponent evaluated at 0")
        return sum((c * t**e for e, c in self._terms), Fraction(0))

    __call__ = evaluate

    # comparisons
    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __repr__(self) -> str:
        return f"LaurentPoly({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self._terms:
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                xs = "x" if e == 1 else f"x^{e}"
                body = xs if a == 1 else f"{a}*{xs}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _coerce(value) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return LaurentPoly.constant(value)
    raise TypeError(f"cannot use {value!r} as a Laurent polynomial")


# ---------------------------------------------------------------- parsing

_SAFE_BINOPS = {
    ast.Add: lambda a, b: a + b,
    ast.Sub: lambda a, b: a - b,
    ast.Mult: lambda a, b: a * b,
    ast.Pow: lambda a, b: a**b,
    ast.FloorDiv: lambda a, b: a // b,
    ast.Mod: lambda a, b: a % b,
}


def eval_int_expr(text: str, env: Optional[Mapping[str, int]] = None) -> int:
    """Evaluate a small integer expression such as ``2^i + 1`` (``^`` is power)."""
    env = env or {}
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def walk(node) -> int:
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
            return node.value
        if isinstance(node, ast.Name):
            if node.id not in env:
                raise ValueError(f"unknown name {node.id!r} in {text!r}")
            return int(env[node.id])
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _SAFE_BINOPS:
            left, right = walk(node.left), walk(node.right)
            if isinstance(node.op, ast.Pow) and (right < 0 or right > 4096):
                raise ValueError(f"exponent out of range in {text!r}")
            return _SAFE_BINOPS[type(node.op)](left, right)
        raise ValueError(f"unsupported expression {text!r}")

    return walk(tree)


class _Parser:
    def __init__(self, text: str, env: Optional[Mapping[str, int]]):
        self.s = re.sub(r"\s+", "", text)
        self.i = 0
        self.env = env

    def peek(self) -> str:
        return self.s[self.i] if self.i < len(self.s) else ""

    def take(self, ch: str) -> bool:
        if self.peek() == ch:
            self.i += 1
            return True
        return False

    def fail(self, msg: str):
        raise ValueError(f"cannot parse polynomial {self.s!r} at position {self.i}: {msg}")

    def group(self) -> int:
        open_ch = self.s[self.i]
        close_ch = ")" if open_ch == "(" else "}"
        depth, j = 0, self.i
        while j < len(self.s):
            if self.s[j] in "({":
                depth += 1
            elif self.s[j] in ")}":
                depth -= 1
                if depth == 0:
                    break
            j += 1
        if j >= len(self.s) or self.s[j] != close_ch:
            self.fail("unbalanced bracket")
        inner = self.s[self.i + 1 : j]
        self.i = j + 1
        return eval_int_expr(inner, self.env)

    def integer(self) -> Optional[int]:
        m = re.match(r"\d+", self.s[self.i :])
        if not m:
            return None
        self.i += m.end()
        return int(m.group())

    def exponent(self) -> int:
        if self.peek() in "({":
            return self.group()
        neg = False
        if self.take("-"):
            neg = True
        elif self.take("+"):
            pass
        n = self.integer()
        if n is None:
            self.fail("expected exponent")
        return -n if neg else n

    def term(self) -> tuple[int, int]:
        coef: Optional[int] = None
        if self.peek() in "({":
            coef = self.group()
        else:
            coef = self.integer()
        if self.peek() == "*":
            self.i += 1
            if self.peek() != "x":
                self.fail("expected x after *")
        if self.take("x"):
            exp = 1
            if self.take("^"):
                exp = self.exponent()
            return exp, 1 if coef is None else coef
        if coef is None:
            self.fail("expected a term")
        return 0, coef

    def poly(self) -> LaurentPoly:
        if not self.s:
            self.fail("empty input")
        terms: list[tuple[int, int]] = []
        sign = 1
        if self.take("-"):
            sign = -1
        else:
            self.take("+")
        while True:
            e, c = self.term()
            terms.append((e, sign * c))
            if self.take("+"):
                sign = 1
            elif self.take("-"):
                sign = -1
            elif self.i == len(self.s):
                break
            else:
                self.fail("unexpected character")
        return LaurentPoly(terms)


def parse_poly(text: str, env: Optional[Mapping[str, int]] = None) -> LaurentPoly:
    """Parse e.g. ``"3 + 2x"``, ``"1 + x^3 + x^5"``, ``"x^-1 + 4*x^2"``.

    Parenthesized or braced coefficients and exponents may be integer
    expressions in the names of ``env``, e.g. ``"2 + 3x^(2^i)"`` with ``{"i": 3}``.
    """
    return _Parser(text, env).poly()


# ---------------------------------------------------------------- structure


def log_set(f: LaurentPoly) -> frozenset[int]:
    return frozenset(e for e, _ in f.terms)


def content(f: LaurentPoly) -> int:
    if f.is_zero():
        raise ValueError("content undefined for the zero polynomial")
    g = 0
    for _, c in f.terms:
        g = gcd(g, c)
    return g


def normalize_min_zero(f: LaurentPoly) -> tuple[LaurentPoly, int]:
    """Return (x^shift * f, shift) where shift = -min Log f."""
    if f.is_zero():
        raise ValueError("cannot normalize the zero polynomial")
    shift = -f.min_exp()
    return f.shift(shift), shift


@dataclass(frozen=True)
class Isolani:
    exponents: frozenset[int]
    leading: bool
    terminal: bool


def isolani_exponents(f: LaurentPoly) -> Isolani:
    if f.is_zero():
        raise ValueError("isolani undefined for the zero polynomial")
    logs = log_set(f)
    iso = frozenset(i for i in logs if i - 1 not in logs and i + 1 not in logs)
    return Isolani(iso, f.max_exp() in iso, f.min_exp() in iso)


def flatten(f: LaurentPoly) -> LaurentPoly:
    return LaurentPoly({e: 1 for e in log_set(f)})


def eval_rational(f: LaurentPoly, t: Number) -> Fraction:
    return f.evaluate(t)


def _ordinary(f: LaurentPoly) -> list[Fraction]:
    """Dense Fraction coefficients of x^(-min Log f) f, which has the same sign on (0, inf)."""
    coeffs, _ = f.dense()
    return _sturm.trim(coeffs)


def strictly_positive_on_interval(f: LaurentPoly, a: Number, b: Number) -> bool:
    """Exact decision of f(t) > 0 for every t in the closed interval [a, b], 0 < a < b."""
    a, b = Fraction(a), Fraction(b)
    if not 0 < a < b:
        raise ValueError(f"invalid interval [{a}, {b}]: need 0 < a < b")
    if f.is_zero():
        return False
    if f.evaluate(a) <= 0 or f.evaluate(b) <= 0:
        return False
    p = _ordinary(f)
    if len(p) <= 1:
        return True
    return _sturm.count_roots(p, a, b) == 0


def positive_roots(f: LaurentPoly) -> list[tuple[Fraction, Fraction]]:
    """Isolating intervals (lo, hi] for the distinct roots of f in (0, inf)."""
    if f.is_zero():
        raise ValueError("zero polynomial")
    p = _ordinary(f)
    if len(p) <= 1:
        return []
    lo, hi = _sturm.positive_root_bounds(p)
    return _sturm.isolate_roots(p, lo, hi)


def sample_points(f: LaurentPoly) -> list[Fraction]:
    """One rational point in each maximal root-free open subinterval of (0, inf)."""
    p = _ordinary(f)
    if len(p) <= 1:
        return [Fraction(1)]
    lo_bound, hi_bound = _sturm.positive_root_bounds(p)
    roots = _sturm.isolate_roots(p, lo_bound, hi_bound)
    if not roots:
        return [Fraction(1)]
    # shrink each isolating interval until neighbours are strictly separated
    ivs = [list(r) for r in roots]
    for k in range(len(ivs) - 1):
        while ivs[k][1] >= ivs[k + 1][0] and ivs[k + 1][0] != ivs[k + 1][1]:
            lo, hi = ivs[k + 1]
            ivs[k + 1] = list(_sturm.refine_root(p, lo, hi, (hi - lo) / 2))
    pts = [lo_bound]
    for k in range(len(ivs) - 1):
        pts.append((ivs[k][1] + ivs[k + 1][0]) / 2)
    pts.append(hi_bound)
    return pts


def negative_point(f: LaurentPoly) -> Optional[Fraction]:
    """A rational t > 0 with f(t) < 0, or None if f >= 0 on (0, inf)."""
    if f.is_zero():
        return None
    for t in sample_points(f):
        if f.evaluate(t) < 0:
            return t
    return None


def nonpositive_witness(f: LaurentPoly) -> Optional[dict]:
    """Certificate that f(t) <= 0 for some t > 0, or None if f > 0 on (0, inf).

    The certificate is either ``{"kind": "point", "t": t}`` (f(t) <= 0 exactly)
    or ``{"kind": "root_in_interval", "lo": lo, "hi": hi}`` for an irrational
    root isolated in (lo, hi].
    """
    if f.is_zero():
        return {"kind": "point", "t": Fraction(1)}
    t = negative_point(f)
    if t is not None:
        return {"kind": "point", "t": t}
    roots = positive_roots(f)
    if not roots:
        return None
    lo, hi = roots[0]
    if lo == hi:
        return {"kind": "point", "t": lo}
    return {"kind": "root_in_interval", "lo": lo, "hi": hi}


def check_nonpositive_witness(f: LaurentPoly, cert: Mapping) -> bool:
    """Re-verify a certificate produced by :func:`nonpositive_witness`."""
    if cert["kind"] == "point":
        t = Fraction(cert["t"])
        return t > 0 and f.evaluate(t) <= 0
    if cert["kind"] == "root_in_interval":
        lo, hi = Fraction(cert["lo"]), Fraction(cert["hi"])
        if not 0 <= lo < hi or f.is_zero():
            return False
        return _sturm.count_roots(_ordinary(f), lo, hi) >= 1
    return False
