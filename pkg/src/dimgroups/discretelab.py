"""Discreteness and density of finitely generated subgroups of R^k and C(I).

A generator is a vector whose entries are polynomials with rational
coefficients in declared symbols. In mode ``R`` there are no symbols; in
mode ``T`` the symbols are declared algebraically independent
transcendentals, which makes the dimension of the real span an exact rank
over the rational function field. A subgroup is discrete exactly when its
rank over Z equals the dimension of its real span.

Numeric shadows (float values of the symbols) feed only the searches that
are explicitly marked numeric; they never decide an exact verdict.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Optional, Sequence, Union

import numpy as np
import sympy
from scipy.spatial import cKDTree
from sympy.polys.matrices import DomainMatrix

from . import _linalg

Number = Union[int, Fraction]


# ---------------------------------------------------------------- symbols


@dataclass(frozen=True)
class SymbolBasis:
    """Declared symbols beta_1..beta_s (beta_0 = 1 is implicit).

    ``mode="R"``: no symbols, every entry rational.
    ``mode="T"``: the symbols are algebraically independent transcendentals.
    ``shadows`` are float stand-ins used only by numeric searches.
    """

    mode: str = "R"
    symbols: tuple[str, ...] = ()
    shadows: tuple[float, ...] = ()

    def __post_init__(self):
        if self.mode not in ("R", "T"):
            raise ValueError(f"unknown symbol mode {self.mode!r}; use 'R' or 'T'")
        if self.mode == "R" and self.symbols:
            raise ValueError("mode R declares no symbols")
        if self.shadows and len(self.shadows) != len(self.symbols):
            raise ValueError("one shadow per symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbol names")

    @cached_property
    def sym(self) -> tuple[sympy.Symbol, ...]:
        return tuple(sympy.Symbol(s) for s in self.symbols)

    def parse(self, value) -> sympy.Expr:
        if isinstance(value, Fraction):
            return sympy.Rational(value.numerator, value.denominator)
        if isinstance(value, sympy.Expr):
            expr = value
        elif isinstance(value, int):
            return sympy.Integer(value)
        else:
            text = str(value).replace("^", "**")
            expr = sympy.sympify(text, locals=dict(zip(self.symbols, self.sym)))
        extra = expr.free_symbols - set(self.sym)
        if extra:
            raise ValueError(f"undeclared symbols {sorted(map(str, extra))} in {value!r}")
        if self.sym:
            sympy.Poly(expr, *self.sym, domain="QQ")
        elif not expr.is_Rational:
            raise ValueError(f"{value!r} is not rational; declare symbols in mode T")
        return sympy.nsimplify(expr) if not self.sym else sympy.expand(expr)


@dataclass(frozen=True)
class SymbolicVector:
    entries: tuple[sympy.Expr, ...]
    basis: SymbolBasis

    @classmethod
    def of(cls, basis: SymbolBasis, entries: Sequence) -> "SymbolicVector":
        return cls(tuple(basis.parse(e) for e in entries), basis)

    @property
    def dim(self) -> int:
        return len(self.entries)

    def coordinates(self) -> dict[tuple, Fraction]:
        """Rational coordinates indexed by (axis, monomial exponent tuple)."""
        out: dict[tuple, Fraction] = {}
        for axis, e in enumerate(self.entries):
            if self.basis.sym:
                for monom, c in sympy.Poly(e, *self.basis.sym, domain="QQ").terms():
                    if c != 0:
                        out[(axis, monom)] = Fraction(int(c.p), int(c.q))
            else:
                r = sympy.Rational(e)
                if r != 0:
                    out[(axis, ())] = Fraction(int(r.p), int(r.q))
        return out

    def numeric(self) -> np.ndarray:
        if self.basis.sym and not self.basis.shadows:
            raise ValueError("numeric shadow needs float values for every symbol")
        subs = dict(zip(self.basis.sym, self.basis.shadows))
        return np.array([float(e.subs(subs)) if self.basis.sym else float(e) for e in self.entries])

    def scale(self, k: Number) -> "SymbolicVector":
        return SymbolicVector(tuple(sympy.expand(self.basis.parse(k) * e) for e in self.entries), self.basis)

    def __add__(self, other: "SymbolicVector") -> "SymbolicVector":
        return SymbolicVector(tuple(sympy.expand(a + b) for a, b in zip(self.entries, other.entries)), self.basis)

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.entries) + ")"


def combine(gens: Sequence[SymbolicVector], coeffs: Sequence[int]) -> SymbolicVector:
    _common(gens)
    entries = [sympy.Integer(0)] * gens[0].dim
    for g, c in zip(gens, coeffs):
        if c:
            entries = [a + c * b for a, b in zip(entries, g.entries)]
    return SymbolicVector(tuple(sympy.expand(e) for e in entries), gens[0].basis)


def _common(gens: Sequence[SymbolicVector]) -> tuple[SymbolBasis, int]:
    if not gens:
        raise ValueError("need at least one generator")
    basis, dim = gens[0].basis, gens[0].dim
    for g in gens:
        if g.basis != basis:
            raise ValueError("generators use different symbol declarations")
        if g.dim != dim:
            raise ValueError("generators have different dimensions")
    return basis, dim


def coordinate_matrix(gens: Sequence[SymbolicVector]) -> tuple[list[list[Fraction]], list[tuple]]:
    _common(gens)
    coords = [g.coordinates() for g in gens]
    keys = sorted(set().union(*coords))
    return [[c.get(k, Fraction(0)) for k in keys] for c in coords], keys


# ---------------------------------------------------------------- rank and discreteness


def z_rank(gens: Sequence[SymbolicVector]) -> int:
    if not gens:
        return 0
    rows, keys = coordinate_matrix(gens)
    return _linalg.rank(rows) if keys else 0


def real_span_dim(gens: Sequence[SymbolicVector]) -> int:
    if not gens:
        return 0
    basis, dim = _common(gens)
    if not basis.sym:
        return _linalg.rank([[Fraction(int(sympy.Rational(e).p), int(sympy.Rational(e).q)) for e in g.entries] for g in gens])
    field_ = sympy.QQ.frac_field(*basis.sym)
    rows = [[field_.from_sympy(e) for e in g.entries] for g in gens]
    return DomainMatrix(rows, (len(gens), dim), field_).rank()


def is_discrete(gens: Sequence[SymbolicVector]) -> bool:
    if not gens:
        return True
    _common(gens)
    return z_rank(gens) == real_span_dim(gens)


def coefficient_vectors(fgens: Sequence["FunctionGenerator"]) -> list[SymbolicVector]:
    """Coefficient vectors of polynomial generators, as mode-R vectors."""
    width = max(len(f.coeffs) for f in fgens)
    basis = SymbolBasis("R")
    return [SymbolicVector.of(basis, list(f.coeffs) + [0] * (width - len(f.coeffs))) for f in fgens]


# ---------------------------------------------------------------- trace witness


@dataclass(frozen=True)
class TraceWitness:
    discrete: bool
    c: Optional[sympy.Expr]
    values: tuple[sympy.Expr, ...]
    reason: str

    def c_fraction(self) -> Fraction:
        r = sympy.Rational(self.c)
        return Fraction(int(r.p), int(r.q))


def discrete_trace_witness(gens: Sequence[SymbolicVector], functional: Union[int, Sequence[Number]]) -> TraceWitness:
    """Decide whether a linear functional maps the group onto c*Z for some c."""
    basis, dim = _common(gens)
    if isinstance(functional, int):
        if not 0 <= functional < dim:
            raise ValueError(f"coordinate {functional} out of range")
        weights = [Fraction(int(i == functional)) for i in range(dim)]
    else:
        weights = [Fraction(w) for w in functional]
        if len(weights) != dim:
            raise ValueError("functional has the wrong length")
    values = tuple(
        sympy.expand(sum(sympy.Rational(w.numerator, w.denominator) * e for w, e in zip(weights, g.entries)))
        for g in gens
    )
    line = [SymbolicVector((v,), basis) for v in values]
    nonzero = [v for v in values if v != 0]
    if not nonzero:
        return TraceWitness(True, sympy.Integer(0), values, "functional vanishes on the group")
    if not is_discrete(line):
        return TraceWitness(False, None, values, "values have Z-rank greater than 1")
    # rank one: every value is a rational multiple of the first nonzero one
    base = nonzero[0]
    ratios = [sympy.Rational(sympy.simplify(v / base)) for v in values]
    g = Fraction(0)
    for r in ratios:
        g = Fraction(math.gcd(g.numerator * r.q, int(r.p) * g.denominator), g.denominator * int(r.q))
    c = sympy.expand(sympy.Rational(g.numerator, g.denominator) * base)
    return TraceWitness(True, c, values, "values lie in c*Z")


# ---------------------------------------------------------------- numeric searches


def _numeric_matrix(gens: Sequence[SymbolicVector]) -> np.ndarray:
    return np.array([g.numeric() for g in gens], dtype=float)


def _box_combos(n: int, bound: int) -> np.ndarray:
    rng = np.arange(-bound, bound + 1)
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.meshgrid(*([rng] * n), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)


@dataclass(frozen=True)
class NormWitness:
    coeffs: tuple[int, ...]
    norm: float
    vector: tuple[float, ...]


def short_vectors(
    gens: Sequence[SymbolicVector], bound: int, k: int = 8, norm_cap: float = math.inf
) -> list[NormWitness]:
    """Nonzero integer combinations with |c_i| <= bound and small sup norm (numeric).

    Meet in the middle: the generators are split in two halves and each
    combination of the second half is matched with its nearest negatives
    among combinations of the first half. Combinations that vanish exactly
    are discarded using the exact coordinates.
    """
    basis, _ = _common(gens)
    x = _numeric_matrix(gens)
    n = len(gens)
    exact_rows, _ = coordinate_matrix(gens)
    exact = np.array([[float(v) for v in r] for r in exact_rows]) if exact_rows and exact_rows[0] else np.zeros((n, 1))
    h = n // 2
    ca, cb = _box_combos(h, bound), _box_combos(n - h, bound)
    pa, pb = ca @ x[:h], cb @ x[h:]
    tree = cKDTree(pa)
    kk = min(len(pa), k + 2)
    dist, idx = tree.query(-pb, k=kk, p=np.inf)
    if kk == 1:
        dist, idx = dist[:, None], idx[:, None]
    cand = []
    order = np.argsort(dist, axis=None)
    seen = set()
    for flat in order:
        i, j = divmod(int(flat), kk)
        d = float(dist[i, j])
        if d > norm_cap or len(cand) >= k:
            break
        coeffs = tuple(int(v) for v in np.concatenate([ca[idx[i, j]], cb[i]]))
        if not any(coeffs):
            continue
        key = coeffs if next(c for c in coeffs if c) > 0 else tuple(-c for c in coeffs)
        if key in seen:
            continue
        seen.add(key)
        if d < 1e-9 or np.max(np.abs(np.array(coeffs) @ exact)) < 1e-9:
            if _exactly_zero(exact_rows, coeffs):
                continue
        vec = np.array(coeffs) @ x
        cand.append(NormWitness(key, float(np.max(np.abs(vec))), tuple(float(v) for v in (vec if key == coeffs else -vec))))
    cand.sort(key=lambda w: (w.norm, w.coeffs))
    return cand


def _exactly_zero(rows: list[list[Fraction]], coeffs: Sequence[int]) -> bool:
    if not rows or not rows[0]:
        return True
    return all(sum(c * r[j] for c, r in zip(coeffs, rows)) == 0 for j in range(len(rows[0])))


def min_norm_search(gens: Sequence[SymbolicVector], bound: int) -> Optional[NormWitness]:
    """Smallest sup norm of a nonzero combination with coefficients bounded by ``bound``."""
    found = short_vectors(gens, bound, k=1)
    return found[0] if found else None


@dataclass(frozen=True)
class DensityReport:
    holds: bool
    eps: float
    max_error: float
    max_coefficient: int
    worst_point: tuple[float, ...]
    grid_points: int
    numeric: bool = True


def density_check(
    gens: Sequence[SymbolicVector],
    box: Sequence[tuple[Number, Number]],
    eps: Number,
    word_bound: int,
    search_bound: Optional[int] = None,
) -> DensityReport:
    """Numeric check that every point of an eps/2-grid on ``box`` is within eps
    (sup norm) of an integer combination with coefficients bounded by ``word_bound``.

    Candidates come from direct enumeration of small combinations and from
    rounding in a basis of short vectors found by :func:`short_vectors`.
    """
    basis, dim = _common(gens)
    if len(box) != dim:
        raise ValueError("box dimension does not match the generators")
    eps_f = float(eps)
    x = _numeric_matrix(gens)
    n = len(gens)
    axes = []
    for lo, hi in box:
        lo, hi = float(lo), float(hi)
        steps = max(1, math.ceil((hi - lo) / (eps_f / 2)))
        axes.append(np.linspace(lo, hi, steps + 1))
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)

    direct_bound = min(word_bound, max(1, int((2e5) ** (1 / n) - 1) // 2))
    combos = _box_combos(n, direct_bound)
    pts = combos @ x
    dist, idx = cKDTree(pts).query(grid, k=1, p=np.inf)
    best_err = dist.copy()
    best_coef = np.max(np.abs(combos[idx]), axis=1)

    sb = search_bound if search_bound is not None else min(word_bound, 20 if n <= 6 else 3)
    shorts = short_vectors(gens, sb, k=32)
    chosen: list[NormWitness] = []
    for w in shorts:
        trial = np.array([c.vector for c in chosen + [w]])
        if np.linalg.matrix_rank(trial, tol=1e-12) == len(chosen) + 1:
            chosen.append(w)
        if len(chosen) == dim:
            break
    if len(chosen) == dim:
        vb = np.array([c.vector for c in chosen])
        cb = np.array([c.coeffs for c in chosen], dtype=np.int64)
        s = np.linalg.solve(vb.T, grid.T).T
        r = np.round(s).astype(np.int64)
        words = r @ cb
        err = np.max(np.abs(words @ x - grid), axis=1)
        coef = np.max(np.abs(words), axis=1)
        better = (err < best_err) & (coef <= word_bound) | ((best_err >= eps_f) & (err < eps_f) & (coef <= word_bound))
        best_err = np.where(better, err, best_err)
        best_coef = np.where(better, coef, best_coef)
    ok = (best_err < eps_f) & (best_coef <= word_bound)
    worst = int(np.argmax(np.where(ok, best_err, np.inf)))
    return DensityReport(
        holds=bool(ok.all()),
        eps=eps_f,
        max_error=float(np.max(best_err)),
        max_coefficient=int(np.max(best_coef)),
        worst_point=tuple(float(v) for v in grid[worst]),
        grid_points=len(grid),
    )


# ---------------------------------------------------------------- split verification


@dataclass(frozen=True)
class SplitReport:
    valid: bool
    checks: dict
    errors: tuple[str, ...]
    numeric: dict


def verify_split(
    h_gens: Sequence[SymbolicVector],
    k_gens: Sequence[SymbolicVector],
    f_gens: Sequence[SymbolicVector],
    eps: float = 0.05,
    word_bound: int = 10**6,
) -> SplitReport:
    """Check a proposed decomposition H = K + F with F discrete and K, F meeting in 0."""
    _common(list(h_gens) + list(k_gens) + list(f_gens))
    errors: list[str] = []
    checks: dict = {}
    checks["f_discrete"] = is_discrete(f_gens) if f_gens else True
    if not checks["f_discrete"]:
        errors.append("F is not discrete")
    rk, rf = z_rank(k_gens), z_rank(f_gens)
    checks["k_meets_f_trivially"] = z_rank(list(k_gens) + list(f_gens)) == rk + rf
    if not checks["k_meets_f_trivially"]:
        errors.append("K and F intersect nontrivially")
    all_rows, keys = coordinate_matrix(list(h_gens) + list(k_gens) + list(f_gens))
    nh = len(h_gens)
    checks["generates_h"] = _linalg.same_lattice(all_rows[:nh], all_rows[nh:])
    if not checks["generates_h"]:
        errors.append("K + F does not generate H")
    numeric: dict = {}
    if k_gens:
        x = _numeric_matrix(k_gens)
        _, sv, vt = np.linalg.svd(x, full_matrices=False)
        r = int(np.sum(sv > 1e-9 * max(sv.max(), 1.0)))
        coords = x @ vt[:r].T
        # density inside the span is a numeric statement about the projected points
        dense = _numeric_density(coords, eps, word_bound)
        numeric["k_dense_in_span"] = dense
        numeric["span_dim"] = r
        if not dense:
            errors.append("K does not look dense in its real span (numeric)")
    checks["valid_exact"] = checks["f_discrete"] and checks["k_meets_f_trivially"] and checks["generates_h"]
    return SplitReport(not errors, checks, tuple(errors), numeric)


def _numeric_density(points: np.ndarray, eps: float, word_bound: int, bound: int = 20) -> bool:
    """Numeric density of the Z-span of the rows of ``points`` in R^r, tested on the unit box."""
    n, r = points.shape
    if n == r:
        return False
    h = n // 2
    ca, cb = _box_combos(h, bound if n <= 6 else 3), _box_combos(n - h, bound if n <= 6 else 3)
    pa, pb = ca @ points[:h], cb @ points[h:]
    dist, idx = cKDTree(pa).query(-pb, k=min(len(pa), 6), p=np.inf)
    cands = []
    for i in range(dist.shape[0]):
        for j in range(dist.shape[1]):
            c = np.concatenate([ca[idx[i, j]], cb[i]])
            if any(c) and dist[i, j] > 1e-12:
                cands.append((float(dist[i, j]), c))
    cands.sort(key=lambda t: t[0])
    chosen: list[np.ndarray] = []
    for d, c in cands:
        v = c @ points
        trial = np.array([w @ points for w in chosen] + [v])
        if np.linalg.matrix_rank(trial, tol=1e-12) == len(chosen) + 1:
            chosen.append(c)
        if len(chosen) == r:
            break
    if len(chosen) < r:
        return False
    cover = sum(float(np.max(np.abs(c @ points))) for c in chosen) / 2
    return cover < eps


# ---------------------------------------------------------------- function generators


@dataclass(frozen=True)
class FunctionGenerator:
    """A polynomial with rational coefficients (lowest degree first) on [a, b]."""

    coeffs: tuple[Fraction, ...]
    a: Fraction
    b: Fraction

    def __post_init__(self):
        c = list(Fraction(x) for x in self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c) if c else (Fraction(0),))
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if not self.a < self.b:
            raise ValueError("interval must have nonzero length")

    @classmethod
    def monomial(cls, k: int, a: Number, b: Number) -> "FunctionGenerator":
        return cls(tuple([Fraction(0)] * k + [Fraction(1)]), a, b)

    @classmethod
    def constant(cls, c: Number, a: Number, b: Number) -> "FunctionGenerator":
        return cls((Fraction(c),), a, b)

    def __call__(self, t: Number) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c
        return acc

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        return np.polynomial.polynomial.polyval(ts, [float(c) for c in self.coeffs])

    def sup_bound(self) -> Fraction:
        """Upper bound for the sup norm on [a, b]: sum |c_k| max(|a|,|b|)^k."""
        m = max(abs(self.a), abs(self.b))
        return sum((abs(c) * m**k for k, c in enumerate(self.coeffs)), Fraction(0))

    def lipschitz_bound(self) -> Fraction:
        m = max(abs(self.a), abs(self.b))
        return sum((abs(c) * k * m ** (k - 1) for k, c in enumerate(self.coeffs) if k), Fraction(0))


def _check_same_interval(fs: Sequence[FunctionGenerator]) -> tuple[Fraction, Fraction]:
    a, b = fs[0].a, fs[0].b
    if any((f.a, f.b) != (a, b) for f in fs):
        raise ValueError("generators live on different intervals")
    return a, b


def _coefficient_rank(fs: Sequence[FunctionGenerator]) -> int:
    width = max(len(f.coeffs) for f in fs)
    return _linalg.rank([list(f.coeffs) + [Fraction(0)] * (width - len(f.coeffs)) for f in fs])


def _sphere_points(n: int, resolution: int) -> np.ndarray:
    """Integer vectors k with sum |k_i| = resolution (the scaled l1 sphere)."""
    out = []
    for comp in itertools.combinations(range(resolution + n - 1), n - 1):
        parts, prev = [], -1
        for c in comp:
            parts.append(c - prev - 1)
            prev = c
        parts.append(resolution + n - 2 - prev)
        nz = [i for i, v in enumerate(parts) if v]
        for signs in itertools.product((1, -1), repeat=len(nz)):
            v = list(parts)
            for i, s in zip(nz, signs):
                v[i] *= s
            out.append(v)
    return np.array(out, dtype=np.int64)


def lemma42_constant(f_list: Sequence[FunctionGenerator], grid_resolution: int = 60, t_samples: int = 64) -> Fraction:
    """Certified K > 0 with sup_I |sum l_i f_i| >= K whenever sum |l_i| = 1.

    The l1 sphere is sampled at resolution N (every point is within n/N in
    l1 of a sample), the sup at each sample is bounded below by evaluation
    at rational points of I, and the sampling error is paid with the
    Lipschitz slack (n/N) * max_i sup|f_i|.
    """
    if not f_list:
        raise ValueError("need at least one function")
    a, b = _check_same_interval(f_list)
    n = len(f_list)
    if _coefficient_rank(f_list) < n:
        raise ValueError("functions are linearly dependent; no positive constant exists")
    ts = [a + (b - a) * Fraction(j, t_samples - 1) for j in range(t_samples)]
    vals = [[f(t) for f in f_list] for t in ts]
    fvals = np.array([[float(v) for v in row] for row in vals])
    lam = _sphere_points(n, grid_resolution)
    sups = np.max(np.abs(lam @ fvals.T), axis=1) / grid_resolution
    fmin = float(np.min(sups))
    best: Optional[Fraction] = None
    for i in np.nonzero(sups <= fmin + 1e-9 * max(1.0, fmin))[0]:
        k = lam[i]
        s = max(abs(sum(int(kk) * v for kk, v in zip(k, row))) for row in vals) / grid_resolution
        best = s if best is None or s < best else best
    assert best is not None
    delta = Fraction(n, grid_resolution) if n > 1 else Fraction(0)
    slack = delta * max(f.sup_bound() for f in f_list)
    bound = best - slack
    if bound <= 0:
        raise ValueError(f"grid resolution {grid_resolution} too coarse for a positive bound; increase it")
    return bound


# ---------------------------------------------------------------- example builders


@dataclass(frozen=True)
class GroupModel:
    """A finitely generated subgroup of R^dim given by exact generators."""

    gens: tuple[SymbolicVector, ...]
    name: str = ""

    @property
    def basis(self) -> SymbolBasis:
        return self.gens[0].basis

    @property
    def dim(self) -> int:
        return self.gens[0].dim


def build_example_2_4(n: int, alpha_mode: Union[str, Number] = "T", shadow: float = math.pi) -> list[SymbolicVector]:
    """Generators (alpha^i, 2^-i), i = 0..n-1.

    ``alpha_mode="T"`` takes alpha transcendental (numeric shadow ``shadow``);
    a rational value instead gives the rational instance in mode R.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if alpha_mode == "T":
        basis = SymbolBasis("T", ("alpha",), (float(shadow),))
        return [SymbolicVector.of(basis, [f"alpha**{i}", Fraction(1, 2**i)]) for i in range(n)]
    alpha = Fraction(alpha_mode)
    basis = SymbolBasis("R")
    return [SymbolicVector.of(basis, [alpha**i, Fraction(1, 2**i)]) for i in range(n)]


DEFAULT_THETA = (math.sqrt(2), math.sqrt(3), math.pi, math.e, math.sqrt(5), math.log(2))


def build_critical(m: int, theta_shadows: Optional[Sequence[float]] = None) -> GroupModel:
    """Z^m + theta Z in R^m with theta = (beta_1, ..., beta_m) independent transcendentals."""
    if m < 1:
        raise ValueError("need m >= 1")
    shadows = tuple(theta_shadows) if theta_shadows is not None else DEFAULT_THETA[:m]
    if len(shadows) != m:
        raise ValueError(f"need {m} shadows")
    names = tuple(f"beta{i + 1}" for i in range(m))
    basis = SymbolBasis("T", names, tuple(float(s) for s in shadows))
    gens = [SymbolicVector.of(basis, [int(i == j) for j in range(m)]) for i in range(m)]
    gens.append(SymbolicVector.of(basis, list(names)))
    return GroupModel(tuple(gens), f"critical(m={m})")


@dataclass(frozen=True)
class AntiFDmReport:
    m: int
    refuted: bool
    witness: tuple[tuple[int, ...], ...]
    samples: int
    note: str


def antifd_m_check(model: GroupModel, m: int, sample_budget: int = 200, seed: int = 0, height: int = 3) -> AntiFDmReport:
    """Sampled search for a non-discrete subgroup of rank at most m.

    Each sample is generated by at most m random integer combinations of the
    model's generators. When the model itself has at most m generators the
    whole group is tested first. Finding no counterexample is not a proof.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    gens = list(model.gens)
    n = len(gens)
    if n <= m:
        if not is_discrete(gens):
            ident = tuple(tuple(int(i == j) for j in range(n)) for i in range(n))
            return AntiFDmReport(m, True, ident, 1, "the whole group has rank <= m and is not discrete")
    rng = random.Random(seed)
    for s in range(sample_budget):
        k = rng.randint(1, m)
        combos = [tuple(rng.randint(-height, height) for _ in range(n)) for _ in range(k)]
        sub = [combine(gens, c) for c in combos]
        if z_rank(sub) == 0:
            continue
        if not is_discrete(sub):
            return AntiFDmReport(m, True, tuple(combos), s + 1, "non-discrete sampled subgroup")
    return AntiFDmReport(m, False, (), sample_budget, "no counterexample found in budget")


# ---------------------------------------------------------------- approximation on an interval


class ApproximationError(RuntimeError):
    """Bounded search failed; the message reports the caps that were reached."""


@dataclass(frozen=True)
class Approximation:
    coeffs: tuple[int, ...]
    grid_error: Fraction
    certified_error: Fraction
    certified: bool


Target = Union[Number, FunctionGenerator, Callable[[float], float]]


def approximate_in_span(
    target: Target,
    gens: Sequence[FunctionGenerator],
    eps: Number,
    height_cap: int = 10**6,
    degree_cap: Optional[int] = None,
    grid: int = 400,
    target_lipschitz: Optional[Number] = None,
) -> Approximation:
    """Integer combination of ``gens`` within eps of ``target`` in sup norm on I.

    I must contain no integer. Uses increasing prefixes of ``gens`` (up to
    ``degree_cap`` + 1 of them): LLL-reduce the sampled generator lattice,
    round the least-squares coordinates (Babai), then repair greedily with
    +-1 steps. The error is re-checked exactly on a grid of rational points
    and, for polynomial or Lipschitz targets, certified with a slack term.
    """
    if not gens:
        raise ValueError("need generators")
    a, b = _check_same_interval(gens)
    if math.floor(a) != math.floor(b) or a.denominator == 1 or b.denominator == 1:
        raise ValueError(f"interval [{a}, {b}] contains an integer")
    eps = Fraction(eps)
    if isinstance(target, (int, Fraction)):
        target = FunctionGenerator.constant(target, a, b)
    limit = len(gens) if degree_cap is None else min(len(gens), degree_cap + 1)
    ts_exact = [a + (b - a) * Fraction(j, grid) for j in range(grid + 1)]
    ts = np.array([float(t) for t in ts_exact])
    if isinstance(target, FunctionGenerator):
        y_exact = [target(t) for t in ts_exact]
        y = np.array([float(v) for v in y_exact])
        t_lip: Optional[Fraction] = target.lipschitz_bound()
    else:
        y_exact = None
        y = np.array([float(target(t)) for t in ts])
        t_lip = Fraction(target_lipschitz) if target_lipschitz is not None else None
    last = None
    for k in range(1, limit + 1):
        sub = gens[:k]
        cols = np.array([g.evaluate_many(ts) for g in sub])
        coeffs = _babai(cols, y)
        coeffs = _repair(cols, y, coeffs)
        if max(abs(c) for c in coeffs) > height_cap:
            last = f"height {max(abs(c) for c in coeffs)} exceeds cap {height_cap}"
            continue
        result = _certify_combo(sub, coeffs, ts_exact, y_exact, y, t_lip, (b - a) / grid)
        if result.certified and result.grid_error < eps < result.certified_error and y_exact is not None:
            # refine the grid until the Lipschitz slack fits under eps
            lip = result_lipschitz(sub, coeffs) + t_lip
            fine = min(int(math.ceil((b - a) * lip / (eps - result.grid_error))) + 1, 50000)
            fts = [a + (b - a) * Fraction(j, fine) for j in range(fine + 1)]
            result = _certify_combo(sub, coeffs, fts, [target(t) for t in fts], None, t_lip, (b - a) / fine)
        last = f"error {float(result.certified_error):.3g} with {k} generators"
        if result.certified_error <= eps if result.certified else result.grid_error <= eps:
            return result
    raise ApproximationError(f"no combination within {eps} (degree cap {limit - 1}, height cap {height_cap}); last: {last}")


def _babai(cols: np.ndarray, y: np.ndarray) -> list[int]:
    k = cols.shape[0]
    if k == 1:
        c = float(np.dot(cols[0], y) / np.dot(cols[0], cols[0]))
        return [int(round(c))]
    scale = 2**30 / max(1.0, float(np.max(np.abs(cols))))
    from sympy import ZZ

    rows = [[ZZ(int(round(v * scale))) for v in row] for row in cols]
    m = DomainMatrix(rows, cols.shape, ZZ)
    try:
        red, transform = m.lll_transform()
    except Exception:
        red, transform = m, DomainMatrix.eye(k, ZZ)
    redf = np.array(red.to_Matrix().tolist(), dtype=float) / scale
    tf = np.array(transform.to_Matrix().tolist(), dtype=object)
    c, *_ = np.linalg.lstsq(redf.T, y, rcond=None)
    r = [int(v) for v in np.round(c)]
    return [int(sum(r[i] * int(tf[i][j]) for i in range(k))) for j in range(k)]


def _repair(cols: np.ndarray, y: np.ndarray, coeffs: list[int], rounds: int = 200) -> list[int]:
    c = list(coeffs)
    cur = float(np.max(np.abs(np.array(c, dtype=float) @ cols - y)))
    for _ in range(rounds):
        best = None
        for i in range(len(c)):
            for d in (1, -1):
                c[i] += d
                err = float(np.max(np.abs(np.array(c, dtype=float) @ cols - y)))
                c[i] -= d
                if err < cur - 1e-15 and (best is None or err < best[0]):
                    best = (err, i, d)
        if best is None:
            break
        cur, i, d = best
        c[i] += d
    return c


def result_lipschitz(gens: Sequence[FunctionGenerator], coeffs: Sequence[int]) -> Fraction:
    combo = [Fraction(0)] * max(len(g.coeffs) for g in gens)
    for g, c in zip(gens, coeffs):
        for i, v in enumerate(g.coeffs):
            combo[i] += c * v
    return FunctionGenerator(tuple(combo), gens[0].a, gens[0].b).lipschitz_bound()


def _certify_combo(
    gens: Sequence[FunctionGenerator],
    coeffs: Sequence[int],
    ts_exact: list[Fraction],
    y_exact: Optional[list[Fraction]],
    y: np.ndarray,
    target_lip: Optional[Fraction],
    h: Fraction,
) -> Approximation:
    combo = [Fraction(0)] * max(len(g.coeffs) for g in gens)
    for g, c in zip(gens, coeffs):
        for i, v in enumerate(g.coeffs):
            combo[i] += c * v
    poly = FunctionGenerator(tuple(combo), gens[0].a, gens[0].b)
    if y_exact is not None:
        grid_err = max(abs(poly(t) - v) for t, v in zip(ts_exact, y_exact))
    else:
        grid_err = Fraction(float(max(abs(float(poly(t)) - v) for t, v in zip(ts_exact, y))))
    if target_lip is None:
        return Approximation(tuple(coeffs), grid_err, grid_err, False)
    slack = (poly.lipschitz_bound() + target_lip) * h / 2
    return Approximation(tuple(coeffs), grid_err, grid_err + slack, True)
