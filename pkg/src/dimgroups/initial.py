"""Constructive maps out of initial objects.

Target groups are dense subgroups of an affine function space, modelled
exactly by :class:`DyadicVectorGroup` (Z[1/p0]^k with the strict order).
Elements are tuples of Fractions; the rationalization G (x) Q is the ambient
rational vector space. Every constructed identity is re-verified with exact
arithmetic before it is returned.
"""

from __future__ import annotations

import abc
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor, gcd
from typing import Iterable, Optional, Sequence, Union

from .laurent import LaurentPoly, content, log_set
from .limitgroup import PolySequence, RElement
from .verdict import Verdict

Vec = tuple[Fraction, ...]
Scalar = Union[int, Fraction]
DEFAULT_EPS = Fraction(1, 10)
DEFAULT_RETRIES = 32


class ApproximationFailure(RuntimeError):
    """A precision cap was exhausted; retrying with larger caps may succeed."""


class IdentityError(RuntimeError):
    """A constructed identity failed exact re-verification."""


# ---------------------------------------------------------------- vectors


def vec(values: Iterable) -> Vec:
    return tuple(Fraction(x) for x in values)


def vadd(x: Vec, y: Vec) -> Vec:
    return tuple(a + b for a, b in zip(x, y))


def vsub(x: Vec, y: Vec) -> Vec:
    return tuple(a - b for a, b in zip(x, y))


def vscale(k: Scalar, x: Vec) -> Vec:
    return tuple(k * a for a in x)


def vconst(c: Scalar, unit: Vec) -> Vec:
    return tuple(Fraction(c) * a for a in unit)


def rel_norm(x: Vec, unit: Vec) -> Fraction:
    """Sup norm of x relative to the strictly positive vector ``unit``."""
    return max((abs(a) / b for a, b in zip(x, unit)), default=Fraction(0))


def _dist(x: Vec, y: Vec, unit: Vec) -> Fraction:
    return rel_norm(vsub(x, y), unit)


# ---------------------------------------------------------------- targets


class DenseTargetGroup(abc.ABC):
    """Ordered group with dense image in its affine representation."""

    @abc.abstractmethod
    def contains(self, x: Vec) -> bool: ...

    @abc.abstractmethod
    def unit(self) -> Vec: ...

    @abc.abstractmethod
    def is_order_unit(self, x: Vec) -> bool: ...

    @abc.abstractmethod
    def approximate(self, target, eps: Fraction, unit: Optional[Vec] = None) -> Vec:
        """An element within eps of ``target`` (a constant or a rational vector)."""

    def zero(self) -> Vec:
        return vconst(0, self.unit())

    def norm(self, x: Vec, unit: Optional[Vec] = None) -> Fraction:
        return rel_norm(x, unit or self.unit())

    def divide(self, x: Vec, k: int) -> Optional[Vec]:
        y = vscale(Fraction(1, k), x)
        return y if self.contains(y) else None

    def element(self, values: Iterable) -> Vec:
        x = vec(values)
        if not self.contains(x):
            raise ValueError(f"{x} is not an element of {self}")
        return x


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True)
class DyadicVectorGroup(DenseTargetGroup):
    """Z[1/base]^dim with the strict coordinatewise order and unit (1, ..., 1)."""

    dim: int
    base: int = 2
    max_exponent: int = 4096

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if not _is_prime(self.base):
            raise ValueError("base must be prime")

    def _coord_ok(self, a: Fraction) -> bool:
        d = a.denominator
        while d % self.base == 0:
            d //= self.base
        return d == 1

    def contains(self, x: Vec) -> bool:
        return len(x) == self.dim and all(self._coord_ok(Fraction(a)) for a in x)

    def unit(self) -> Vec:
        return (Fraction(1),) * self.dim

    def is_order_unit(self, x: Vec) -> bool:
        return self.contains(x) and all(a > 0 for a in x)

    def approximate(self, target, eps: Fraction, unit: Optional[Vec] = None) -> Vec:
        eps = Fraction(eps)
        if eps <= 0:
            raise ValueError("eps must be positive")
        unit = unit or self.unit()
        t = vconst(target, self.unit()) if not isinstance(target, tuple) else vec(target)
        out = []
        for ti, ui in zip(t, unit):
            bound = eps * ui
            scale = 1
            for _ in range(self.max_exponent + 1):
                a = Fraction(floor(ti * scale + Fraction(1, 2)), scale)
                if abs(a - ti) < bound:
                    out.append(a)
                    break
                scale *= self.base
            else:
                raise ApproximationFailure(f"no approximation of {ti} within {bound} up to {self.base}^{self.max_exponent}")
        return tuple(out)

    def __str__(self) -> str:
        return f"Z[1/{self.base}]^{self.dim}"


# ---------------------------------------------------------------- order-unit splitting


def _check_unit(G: DenseTargetGroup, u: Vec) -> Vec:
    u = vec(u)
    if not G.is_order_unit(u):
        raise ValueError(f"{u} is not an order unit of {G}")
    return u


def verify_split(G: DenseTargetGroup, u: Vec, p: int, q: int, r: Fraction, eps: Fraction, v: Vec, w: Vec) -> bool:
    r, eps = Fraction(r), Fraction(eps)
    return (
        G.contains(v)
        and G.contains(w)
        and vadd(vscale(p, v), vscale(q, w)) == u
        and G.is_order_unit(v)
        and G.is_order_unit(w)
        and _dist(v, vconst(r / p, u), u) < eps / p
        and _dist(w, vconst((1 - r) / q, u), u) < eps / q
    )


def split_unit(
    G: DenseTargetGroup,
    u: Vec,
    p: int,
    q: int,
    r: Fraction = Fraction(1, 2),
    eps: Fraction = DEFAULT_EPS,
    retries: int = DEFAULT_RETRIES,
) -> tuple[Vec, Vec]:
    """Order units v, w with u = p v + q w, v near r u/p and w near (1-r) u/q."""
    u = _check_unit(G, u)
    r, eps = Fraction(r), Fraction(eps)
    if p < 1 or q < 1 or gcd(p, q) != 1:
        raise ValueError(f"p={p}, q={q} must be coprime positive integers")
    if not 0 < r <= 1 or eps <= 0:
        raise ValueError("need 0 < r <= 1 and eps > 0")
    if r < Fraction(1, 2):
        w, v = split_unit(G, u, q, p, 1 - r, eps, retries)
        return v, w
    k = 1 if q == 1 else pow(p, -1, q)
    t = (p * k - 1) // q
    # v/u must lie in (lo, hi)/p: close to r/p, positive, and below 1/p so w stays positive
    lo, hi = max(r - eps, Fraction(0)), min(r + eps, Fraction(1))
    mid, half = (lo + hi) / 2, (hi - lo) / 2
    target = vconst((k - mid / p) / q, u)
    tol = half / (p * q)
    for _ in range(retries):
        z = G.approximate(target, tol, u)
        v = vsub(vscale(k, u), vscale(q, z))
        w = vsub(vscale(p, z), vscale(t, u))
        if verify_split(G, u, p, q, r, eps, v, w):
            return v, w
        tol /= 2
    raise ApproximationFailure("split_unit: retries exhausted")


def decompose_gcd(G: DenseTargetGroup, U: Vec, p_list: Sequence[int], eps: Fraction = DEFAULT_EPS) -> list[Vec]:
    """Order units v_i with U = sum p_i v_i, for positive p_i with gcd 1."""
    U = _check_unit(G, U)
    ps = [int(p) for p in p_list]
    if not ps or any(p < 1 for p in ps):
        raise ValueError("need a nonempty list of positive integers")
    g = 0
    for p in ps:
        g = gcd(g, p)
    if g != 1:
        raise ValueError(f"gcd of {ps} is {g}, not 1")
    out = _decompose(G, U, ps, Fraction(eps))
    if sum_combo(ps, out) != U or not all(G.is_order_unit(v) for v in out):
        raise IdentityError("decompose_gcd: identity failed re-verification")
    return out


def _decompose(G: DenseTargetGroup, U: Vec, ps: list[int], eps: Fraction) -> list[Vec]:
    if len(ps) == 1:
        return [U]
    q = 0
    for p in ps[1:]:
        q = gcd(q, p)
    v1, w = split_unit(G, U, ps[0], q, Fraction(1, len(ps)), eps)
    return [v1] + _decompose(G, w, [p // q for p in ps[1:]], eps)


def sum_combo(coeffs: Sequence[Scalar], elems: Sequence[Vec]) -> Vec:
    acc = vscale(0, elems[0])
    for c, e in zip(coeffs, elems):
        acc = vadd(acc, vscale(c, e))
    return acc


def small_coset_rep(G: DenseTargetGroup, g: Vec, k: int, eps: Fraction, unit: Optional[Vec] = None) -> Vec:
    """h with h - g in kG and norm(h) < eps."""
    if k < 1:
        raise ValueError("k must be positive")
    unit = unit or G.unit()
    eps = Fraction(eps)
    z = G.approximate(vscale(Fraction(1, k), g), eps / k, unit)
    h = vsub(g, vscale(k, z))
    if not (G.contains(z) and G.norm(h, unit) < eps):
        raise IdentityError("small_coset_rep: re-verification failed")
    return h


# ---------------------------------------------------------------- chain systems


def chain_matrix(a: int, b: int, N: int) -> list[list[int]]:
    """The N x (N+1) band matrix with b on the diagonal and a just above it."""
    return [[b if j == i else a if j == i + 1 else 0 for j in range(N + 1)] for i in range(N)]


def chain_apply(a: int, b: int, X: Sequence) -> list:
    return [_lin(b, X[i], a, X[i + 1]) for i in range(len(X) - 1)]


def nullspace_vector(a: int, b: int, N: int) -> list[Fraction]:
    """w = (1, -b/a, ..., (-b/a)^N); every solution of A Z = 0 is w z_0."""
    return [Fraction(-b, a) ** i for i in range(N + 1)]


def _lin(c1, x, c2, y):
    if isinstance(x, tuple):
        return vadd(vscale(c1, x), vscale(c2, y))
    return c1 * Fraction(x) + c2 * Fraction(y)


def _mul(c, x):
    return vscale(c, x) if isinstance(x, tuple) else c * Fraction(x)


def alternating_sums(a: int, b: int, U: Sequence) -> list:
    """T_j = sum_{i <= j} (-a/b)^i u_i."""
    out, acc = [], None
    for i, u in enumerate(U):
        term = _mul(Fraction(-a, b) ** i, u)
        acc = term if acc is None else _lin(1, acc, 1, term)
        out.append(acc)
    return out


def solve_chain_rational(a: int, b: int, U: Sequence, x0) -> list:
    """The solution of A X = U with first coordinate x0 (closed form, then checked)."""
    if a < 1 or b < 1:
        raise ValueError("need a, b >= 1")
    T = alternating_sums(a, b, U)
    X = [x0 if isinstance(x0, tuple) else Fraction(x0)]
    for i in range(1, len(U) + 1):
        X.append(_mul(Fraction(-b, a) ** i, _lin(1, X[0], Fraction(-1, b), T[i - 1])))
    if chain_apply(a, b, X) != [u if isinstance(u, tuple) else Fraction(u) for u in U]:
        raise IdentityError("solve_chain_rational: A X != U")
    return X


@dataclass(frozen=True)
class ChainSolution:
    X: list
    center: Fraction
    radius: Fraction
    max_error: Fraction
    positivity_guaranteed: bool


def solve_chain_bounded(a: int, b: int, U: Sequence[Vec], c, delta, unit: Optional[Vec] = None) -> ChainSolution:
    """A rational solution with every x_i within delta/|b-a| of c/(a+b) (relative to unit)."""
    if a < 1 or b < 1 or a == b:
        raise ValueError("need distinct a, b >= 1")
    c, delta = Fraction(c), Fraction(delta)
    U = [vec(x) for x in U]
    if unit is None:
        unit = (Fraction(1),) * (len(U[0]) if U else 1)
    unit = vec(unit)
    if any(_dist(x, vconst(c, unit), unit) >= delta for x in U):
        raise ValueError("some u_i is not within delta of c")
    center = c / (a + b)
    N = len(U)
    X: list[Vec] = [vconst(0, unit)] * (N + 1)
    if a < b:
        # back substitution: errors shrink by a/b at each step
        X[N] = vconst(center, unit)
        for i in range(N - 1, -1, -1):
            X[i] = vscale(Fraction(1, b), vsub(U[i], vscale(a, X[i + 1])))
    else:
        X[0] = vconst(center, unit)
        for i in range(N):
            X[i + 1] = vscale(Fraction(1, a), vsub(U[i], vscale(b, X[i])))
    radius = delta / abs(b - a)
    err = max(_dist(x, vconst(center, unit), unit) for x in X)
    if chain_apply(a, b, X) != U or not err < radius:
        raise IdentityError("solve_chain_bounded: re-verification failed")
    return ChainSolution(X, center, radius, err, delta < c * abs(b - a) / (a + b))


def integerize_chain(
    G: DenseTargetGroup,
    a: int,
    b: int,
    U: Sequence[Vec],
    X: Sequence[Vec],
    eps,
    unit: Optional[Vec] = None,
) -> list[Vec]:
    """A solution V in G of A V = U with each v_i within eps of x_i.

    v_0 = y + h with y near x_0 and h = sum a^k h_k, where h_k is a small
    coset representative chosen so that (-b)^i v_0 + t_{i-1} lies in a^i G,
    t_{i-1} = (-b)^{i-1} T_{i-1}. The remaining v_i then follow in G.
    """
    if gcd(a, b) != 1:
        raise ValueError("a and b must be coprime")
    U = [vec(x) for x in U]
    X = [vec(x) for x in X]
    unit = unit or G.unit()
    N = len(U)
    if len(X) != N + 1 or chain_apply(a, b, X) != U:
        raise ValueError("X must solve A X = U")
    if not all(G.contains(x) for x in U):
        raise ValueError("U must lie in G")
    eps = Fraction(eps)
    tol = eps * min(Fraction(1), Fraction(a, b) ** N) / 2
    y = X[0] if G.contains(X[0]) else G.approximate(X[0], tol, unit)
    h = vscale(0, y)
    t_prev = vscale(0, y)
    for k in range(N):
        r = G.divide(vadd(vscale((-b) ** k, vadd(y, h)), t_prev), a**k)
        if r is None:
            raise IdentityError(f"integerize_chain: congruence at step {k} not met")
        beta = pow((-b) ** (k + 1), -1, a) if a > 1 else 0
        g = vscale(-beta, vadd(vscale(-b, r), U[k]))
        hk = small_coset_rep(G, g, a, tol / (N * a**k), unit) if a > 1 else vscale(0, y)
        h = vadd(h, vscale(a**k, hk))
        t_prev = vadd(vscale(-b, t_prev), vscale(a**k, U[k]))
    V = [vadd(y, h)]
    for i in range(N):
        nxt = G.divide(vsub(U[i], vscale(b, V[i])), a)
        if nxt is None:
            raise IdentityError(f"integerize_chain: v_{i + 1} is not in G")
        V.append(nxt)
    if chain_apply(a, b, V) != U or any(_dist(v, x, unit) >= eps for v, x in zip(V, X)):
        raise IdentityError("integerize_chain: re-verification failed")
    return V


# ---------------------------------------------------------------- binomial sequences


class BinomialSequence:
    """Pairs (a_n, b_n), 1 < a_n, b_n coprime; the n-th polynomial is a_n + b_n x."""

    def __init__(self, pairs: Sequence[tuple[int, int]]):
        self.pairs: tuple[tuple[int, int], ...] = tuple((int(a), int(b)) for a, b in pairs)
        for n, (a, b) in enumerate(self.pairs, start=1):
            if a <= 1 or b <= 1:
                raise ValueError(f"stage {n}: need a_n, b_n > 1, got ({a}, {b})")
            if gcd(a, b) != 1:
                raise ValueError(f"stage {n}: gcd({a}, {b}) = {gcd(a, b)} != 1")
        self._polyseq: Optional[PolySequence] = None

    def __len__(self) -> int:
        return len(self.pairs)

    def pair(self, n: int) -> tuple[int, int]:
        return self.pairs[n - 1]

    def orientation(self, n: int) -> str:
        a, b = self.pair(n)
        return "a<b" if a < b else "b<a"

    def polynomial(self, n: int) -> LaurentPoly:
        a, b = self.pair(n)
        return LaurentPoly({0: a, 1: b})

    def d_value(self, N: Optional[int] = None) -> Fraction:
        """prod_{i <= N} |a_i - b_i| / (a_i + b_i)."""
        d = Fraction(1)
        for a, b in self.pairs[: len(self.pairs) if N is None else N]:
            d *= Fraction(abs(a - b), a + b)
        return d

    def poly_sequence(self) -> PolySequence:
        if self._polyseq is None:
            self._polyseq = PolySequence([self.polynomial(n) for n in range(1, len(self) + 1)])
        return self._polyseq

    def __repr__(self) -> str:
        return f"BinomialSequence({list(self.pairs)})"


def _center_radius(seq: BinomialSequence, n: int, d: Fraction) -> tuple[Fraction, Fraction]:
    c, r = Fraction(1), d
    for a, b in seq.pairs[:n]:
        c /= a + b
        r /= abs(a - b)
    return c, r


@dataclass
class HomomorphismData:
    """Table u[n][j] (0 <= j <= n) of images of x^j / Q_n."""

    seq: BinomialSequence
    group: DenseTargetGroup
    unit: Vec
    table: list[list[Vec]]
    d: Fraction

    @property
    def n_stages(self) -> int:
        return len(self.table) - 1

    def vertex(self, n: int, j: int) -> Vec:
        if not 0 <= j <= n:
            raise KeyError(f"x^{j} is not a vertex at stage {n}")
        return self.table[n][j]

    def stage_bound(self, n: int) -> tuple[Fraction, Fraction]:
        """(center, radius) of the stage-n window: |u_j^n - center| < radius."""
        return _center_radius(self.seq, n, self.d)

    def verify(self) -> list[str]:
        """All failed checks (empty when every identity and bound holds exactly)."""
        bad = []
        G, u = self.group, self.unit
        if self.table[0] != [u]:
            bad.append("u[0][0] != u")
        for n in range(1, len(self.table)):
            a, b = self.seq.pair(n)
            for i in range(n):
                if vadd(vscale(a, self.table[n][i]), vscale(b, self.table[n][i + 1])) != self.table[n - 1][i]:
                    bad.append(f"recurrence at stage {n}, index {i}")
        for n, row in enumerate(self.table):
            c, r = self.stage_bound(n)
            for j, x in enumerate(row):
                if not G.is_order_unit(x):
                    bad.append(f"u[{n}][{j}] is not an order unit")
                if n > 0 and not _dist(x, vconst(c, u), u) < r:
                    bad.append(f"stage bound at u[{n}][{j}]")
        return bad

    def to_dict(self) -> dict:
        return {
            "pairs": [list(p) for p in self.seq.pairs],
            "group": str(self.group),
            "unit": list(self.unit),
            "d": self.d,
            "table": [[list(x) for x in row] for row in self.table],
        }


def build_initial_hom(
    seq: BinomialSequence,
    G: DenseTargetGroup,
    u: Vec,
    n_stages: int,
    threshold: Fraction = Fraction(0),
) -> HomomorphismData:
    """Images u_j^n of x^j/Q_n realizing a positive unital map R(p_i) -> G."""
    u = _check_unit(G, u)
    if n_stages < 0 or n_stages > len(seq):
        raise ValueError(f"n_stages must lie in [0, {len(seq)}]")
    d = seq.d_value(n_stages)
    if not d > threshold:
        raise ValueError(f"d = {d} does not exceed the threshold {threshold}")
    table = [[u]]
    c, delta = Fraction(1), d
    for n in range(1, n_stages + 1):
        a_n, b_n = seq.pair(n)
        U = table[-1]
        # u_i^{n-1} = a_n u_i^n + b_n u_{i+1}^n: diagonal a_n, superdiagonal b_n
        sol = solve_chain_bounded(b_n, a_n, U, c, delta, unit=u)
        slack = sol.radius - sol.max_error
        V = integerize_chain(G, b_n, a_n, U, sol.X, slack, unit=u)
        table.append(V)
        c, delta = sol.center, sol.radius
    H = HomomorphismData(seq, G, u, table, d)
    bad = H.verify()
    if bad:
        raise IdentityError("; ".join(bad))
    return H


def _numerator_stage(H, e) -> tuple[LaurentPoly, int]:
    if isinstance(e, RElement):
        return e.f, e.stage
    f, n = e
    return (f if isinstance(f, LaurentPoly) else LaurentPoly.parse(f)), int(n)


def hom_apply(H, e: Union[RElement, tuple]) -> Vec:
    """Image of [f, n]: sum_j (f, x^j) u_j^n."""
    f, n = _numerator_stage(H, e)
    if n > H.n_stages:
        raise ValueError(f"stage {n} exceeds the table depth {H.n_stages}")
    acc = vconst(0, H.unit)
    for j, coef in f.terms:
        acc = vadd(acc, vscale(coef, H.vertex(n, j)))
    return acc


@dataclass(frozen=True)
class PhiNormReport:
    holds: bool
    checks: list = field(default_factory=list)


def norm_upper_bound(seq: PolySequence, f: LaurentPoly, n: int, m: int) -> Fraction:
    """max_j |coef_j(f p_{n+1} ... p_m)| / coef_j(Q_m): an upper bound for the norm of [f, n]."""
    g = f
    for k in range(n + 1, m + 1):
        g = g * seq.entry(k)
    Q = seq.q_product(m)
    return max((Fraction(abs(c), Q.coeff(j)) for j, c in g.terms), default=Fraction(0))


def phi_norm_bound_check(H: HomomorphismData, samples: int = 20, seed: int = 0) -> PhiNormReport:
    """Check norm(phi(g)) <= norm(g) norm(phi(1)) with exact stage upper bounds for norm(g)."""
    rng = random.Random(seed)
    pseq = H.seq.poly_sequence()
    top = len(H.seq)
    phi_one = H.group.norm(hom_apply(H, (LaurentPoly.constant(1), 0)), H.unit)
    cases: list[tuple[LaurentPoly, int]] = [(LaurentPoly.constant(1), 0), (LaurentPoly.constant(3), 0)]
    while len(cases) < samples:
        n = rng.randint(0, H.n_stages)
        coeffs = {j: rng.randint(0, 6) for j in range(n + 1)}
        f = LaurentPoly(coeffs)
        if not f.is_zero():
            cases.append((f, n))
    checks = []
    for f, n in cases:
        lhs = H.group.norm(hom_apply(H, (f, n)), H.unit)
        bound = norm_upper_bound(pseq, f, n, top)
        checks.append({"f": f, "stage": n, "image_norm": lhs, "norm_bound": bound, "ok": lhs <= bound * phi_one})
    return PhiNormReport(all(c["ok"] for c in checks), checks)


def small_order_unit_decomposition(
    G: DenseTargetGroup, g: Vec, n: int, unit: Optional[Vec] = None
) -> list[tuple[int, Vec]]:
    """g = sum c_i s_i with integers c_i and order units s_i of norm < 1/n."""
    g = _check_unit(G, g)
    unit = unit or G.unit()
    if n < 1:
        raise ValueError("n must be positive")
    norm = G.norm(g, unit)
    if norm < Fraction(1, n):
        return [(1, g)]
    p = floor(n * norm) + 1
    q = p + 1
    y, z = split_unit(G, g, p, q)
    out = [(p, y), (q, z)]
    if sum_combo([c for c, _ in out], [s for _, s in out]) != g or not all(
        G.is_order_unit(s) and G.norm(s, unit) < Fraction(1, n) for _, s in out
    ):
        raise IdentityError("small_order_unit_decomposition: re-verification failed")
    return out


# ---------------------------------------------------------------- non-interactive sequences


def _sumset(A: Iterable[int], B: Iterable[int]) -> set[int]:
    return {x + y for x in A for y in B}


def noninteractive_check(seq: PolySequence, depth: int) -> Verdict:
    """Disjointness of j + Log p_{n+1} over j in Log P_n, for all n < depth."""
    logs = {0}
    for n in range(depth):
        if n >= 1:
            if not seq.available(n + 1):
                return Verdict.unknown(reason=f"data ends at stage {n}", checked_to=n)
            step = log_set(seq.entry(n + 1))
            seen: dict[int, int] = {}
            for j in sorted(logs):
                for t in sorted(step):
                    m = j + t
                    if m in seen:
                        return Verdict.false(n=n, j=seen[m], k=j, exponent=m)
                    seen[m] = j
        if not seq.available(n + 1):
            break
        logs = _sumset(logs, log_set(seq.entry(n + 1)))
    return Verdict.true(depth=depth)


def dense_range_verdict_noninteractive(seq: PolySequence) -> Verdict:
    """True iff some entry of the tail window has no coefficient equal to 1."""
    if seq.is_finite:
        raise ValueError("a periodic tail is required")
    for i in seq.window_indices():
        if all(c > 1 for c in seq.entry(i).coefficients()):
            return Verdict.true(index=i, entry=seq.entry(i))
    return Verdict.false(window=list(seq.window_indices()))


@dataclass
class NoninteractiveHom:
    """Table u[n][s], s in Log P_n, with u[n][i] = sum_t (p_{n+1}, x^t) u[n+1][i+t]."""

    seq: PolySequence
    group: DenseTargetGroup
    unit: Vec
    table: list[dict[int, Vec]]

    @property
    def n_stages(self) -> int:
        return len(self.table) - 1

    def vertex(self, n: int, s: int) -> Vec:
        return self.table[n][s]

    def verify(self) -> list[str]:
        bad = []
        if self.table[0] != {0: self.unit}:
            bad.append("root is not u")
        for n in range(self.n_stages):
            p = self.seq.entry(n + 1)
            for i, x in self.table[n].items():
                combo = sum_combo([c for _, c in p.terms], [self.table[n + 1][i + t] for t, _ in p.terms])
                if combo != x:
                    bad.append(f"identity at stage {n}, vertex {i}")
        for n, row in enumerate(self.table):
            for s, x in row.items():
                if not self.group.is_order_unit(x):
                    bad.append(f"u[{n}][{s}] is not an order unit")
        return bad


def build_initial_hom_noninteractive(
    seq: PolySequence, G: DenseTargetGroup, u: Vec, depth: int, eps: Fraction = DEFAULT_EPS
) -> NoninteractiveHom:
    u = _check_unit(G, u)
    verdict = noninteractive_check(seq, depth)
    if not verdict.is_true:
        raise ValueError(f"sequence is not non-interactive to depth {depth}: {verdict.certificate}")
    for n in range(1, depth + 1):
        if content(seq.entry(n)) != 1:
            raise ValueError(f"p_{n} = {seq.entry(n)} has content {content(seq.entry(n))}")
    table: list[dict[int, Vec]] = [{0: u}]
    for n in range(depth):
        p = seq.entry(n + 1)
        coeffs = [c for _, c in p.terms]
        row: dict[int, Vec] = {}
        for i, x in sorted(table[n].items()):
            for (t, _), v in zip(p.terms, decompose_gcd(G, x, coeffs, eps)):
                row[i + t] = v
        table.append(row)
    H = NoninteractiveHom(seq, G, u, table)
    bad = H.verify()
    if bad:
        raise IdentityError("; ".join(bad))
    return H


# ---------------------------------------------------------------- estimator facade


class InitialHomomorphism:
    """Thin fit/transform wrapper around :func:`build_initial_hom`."""

    def __init__(self, group: Optional[DenseTargetGroup] = None, unit: Optional[Sequence] = None, n_stages: int = 3):
        self.group = group
        self.unit = unit
        self.n_stages = n_stages

    def get_params(self) -> dict:
        return {"group": self.group, "unit": self.unit, "n_stages": self.n_stages}

    def fit(self, seq: BinomialSequence) -> "InitialHomomorphism":
        G = self.group or DyadicVectorGroup(1)
        u = vec(self.unit) if self.unit is not None else G.unit()
        self.data_ = build_initial_hom(seq, G, u, self.n_stages)
        return self

    def transform(self, elements: Iterable) -> list[Vec]:
        return [hom_apply(self.data_, e) for e in elements]
