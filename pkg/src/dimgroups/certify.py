"""Certification of R(p_i): endpoint density, content, isolani and Log
conditions, the content bifurcation, the Anti-FD verdict, and the G_n
discreteness steps. Also the three Z[x]-plus-(1-2x) counterexample models on
I = [1/3, 2/3].
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

import sympy
from sympy.polys.matrices import DomainMatrix

from . import _linalg, _sturm
from .discretelab import SymbolBasis, SymbolicVector, is_discrete
from .laurent import LaurentPoly, content, isolani_exponents, log_set, normalize_min_zero
from .limitgroup import PolySequence, RElement
from .verdict import to_plain


class Classification(enum.Enum):
    ANTI_FD = "AntiFD"
    PRO_FD = "ProFD"
    INCONCLUSIVE = "Inconclusive"

    @property
    def exit_code(self) -> int:
        return {"AntiFD": 0, "ProFD": 1, "Inconclusive": 2}[self.value]


@dataclass(frozen=True)
class ConditionResult:
    """One condition: ``holds`` is None when it could not be decided."""

    name: str
    holds: Optional[bool]
    evidence: dict = field(default_factory=dict)
    exact: bool = True
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "holds": self.holds,
            "evidence": to_plain(self.evidence),
            "exact": self.exact,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConditionResult":
        return cls(d["name"], d["holds"], d.get("evidence", {}), d.get("exact", True), d.get("note", ""))


def _window_note(seq: PolySequence) -> str:
    if seq.tail_kind == "finite":
        return "finite data: decided as if the data repeated (prefix-relative)"
    if seq.tail_kind == "rule":
        return f"rule tail: coefficient data declared periodic with period {seq.rule_period}"
    return ""


# ---------------------------------------------------------------- sequence conditions


def check_dagger(seq: PolySequence) -> tuple[ConditionResult, ConditionResult]:
    """Terminal and leading coefficients exceed 1 infinitely often."""
    window = list(seq.window_indices())
    low = [i for i in window if seq[i].coeff(seq[i].min_exp()) > 1]
    high = [i for i in window if seq[i].coeff(seq[i].max_exp()) > 1]
    note = _window_note(seq)
    return (
        ConditionResult("(i) terminal coefficient > 1 infinitely often", bool(low),
                        {"window": window, "indices": low}, True, note),
        ConditionResult("(ii) leading coefficient > 1 infinitely often", bool(high),
                        {"window": window, "indices": high}, True, note),
    )


def check_content_ae_one(seq: PolySequence) -> ConditionResult:
    window = list(seq.window_indices())
    bad = [i for i in window if content(seq[i]) != 1]
    prefix_bad = [i for i in range(1, seq.first_tail_index) if content(seq[i]) != 1] if not seq.is_finite else []
    return ConditionResult(
        "(iii) content 1 for almost all n",
        not bad,
        {"window": window, "content_gt_1_in_tail": bad, "prefix_exceptions": prefix_bad},
        True,
        _window_note(seq),
    )


_RULE_PROBES = 4


def _probe_indices(seq: PolySequence) -> tuple[list[int], bool]:
    """Indices deciding support conditions, and whether the decision is exact."""
    window = list(seq.window_indices())
    if seq.tail_kind != "rule":
        return window, True
    return [i + k * seq.rule_period for k in range(_RULE_PROBES) for i in window], False


def check_isolani_free(seq: PolySequence) -> ConditionResult:
    """Infinitely many entries have neither a leading nor a terminal isolani."""
    idx, exact = _probe_indices(seq)
    good = []
    for i in idx:
        iso = isolani_exponents(seq[i])
        if not iso.leading and not iso.terminal:
            good.append(i)
    note = _window_note(seq)
    if not exact:
        note += "; supports probed over several periods"
    return ConditionResult("(a) no leading or terminal isolani infinitely often", bool(good),
                           {"indices": good, "examined": idx}, exact, note)


def check_equal_logs(seq: PolySequence) -> ConditionResult:
    """Some infinite family of entries shares one (normalized) Log set."""
    idx, exact = _probe_indices(seq)
    groups: dict[frozenset, list[int]] = {}
    for i in idx:
        groups.setdefault(log_set(normalize_min_zero(seq[i])[0]), []).append(i)
    if seq.tail_kind in ("periodic", "finite"):
        logs, members = next(iter(groups.items()))
        return ConditionResult("(b) infinitely many equal Log sets", True,
                               {"log_set": sorted(logs), "indices": members}, True,
                               _window_note(seq) or "every period entry recurs infinitely often")
    repeated = {k: v for k, v in groups.items() if len(v) > 1}
    if repeated:
        logs, members = next(iter(repeated.items()))
        return ConditionResult("(b) infinitely many equal Log sets", True,
                               {"log_set": sorted(logs), "indices": members}, False,
                               "rule tail: a Log set repeats across probed periods")
    return ConditionResult("(b) infinitely many equal Log sets", False, {"examined": idx}, False,
                           "rule tail: no Log set repeats across probed periods")


def check_projectively_faithful(p: LaurentPoly) -> bool:
    """Whether the differences of Log p generate Z."""
    logs = sorted(log_set(p))
    g = 0
    for e in logs[1:]:
        g = gcd(g, e - logs[0])
    return g == 1


# ---------------------------------------------------------------- bifurcation


@dataclass(frozen=True)
class ProFDFactorization:
    """p_i = d_i P_i with d_i = c(p_i); R(p_i) is U (x) R(P_i) with U = lim x d_i."""

    contents: tuple[int, ...]
    reduced: PolySequence
    multipliers: tuple[int, ...]
    telescope_block: int

    def to_dict(self) -> dict:
        return {
            "kind": "ProFDFactorization",
            "contents": list(self.contents),
            "reduced": self.reduced.describe(),
            "multipliers": list(self.multipliers),
            "telescope_block": self.telescope_block,
        }


@dataclass(frozen=True)
class DiscreteFiniteRank:
    """Contents are 1 from ``start`` on; every finite rank subgroup lies in some G_n."""

    start: int
    witness_stage: int
    witness_basis: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "kind": "DiscreteFiniteRank",
            "start": self.start,
            "witness_stage": self.witness_stage,
            "witness_basis": list(self.witness_basis),
        }


def bifurcate(seq: PolySequence, n_multipliers: int = 8):
    window = list(seq.window_indices())
    if any(content(seq[i]) > 1 for i in window):
        reduced = seq.map_entries(lambda p: LaurentPoly([(e, c // content(p)) for e, c in p.terms]))
        n = [i for i in range(1, n_multipliers + 1) if seq.available(i)]
        # telescoping in blocks of one period puts content > 1 into every block
        block = 1 if all(content(seq[i]) > 1 for i in window) else len(window)
        return ProFDFactorization(
            tuple(content(seq[i]) for i in n),
            reduced,
            tuple(content(seq[i]) for i in n),
            block,
        )
    start = seq.first_tail_index if not seq.is_finite else 1
    while start > 1 and content(seq[start - 1]) == 1:
        start -= 1
    w = gn_discreteness_witness(seq, 1)
    return DiscreteFiniteRank(start, w.stage, w.exponents)


# ---------------------------------------------------------------- report


@dataclass(frozen=True)
class CertReport:
    conditions: tuple[ConditionResult, ...]
    classification: Classification
    prefix_relative: bool
    notes: tuple[str, ...] = ()
    sequence: Optional[dict] = None

    @property
    def exit_code(self) -> int:
        return self.classification.exit_code

    def condition(self, prefix: str) -> ConditionResult:
        return next(c for c in self.conditions if c.name.startswith(prefix))

    def to_dict(self) -> dict:
        return {
            "classification": self.classification.value,
            "prefix_relative": self.prefix_relative,
            "conditions": [c.to_dict() for c in self.conditions],
            "notes": list(self.notes),
            "sequence": self.sequence,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CertReport":
        return cls(
            tuple(ConditionResult.from_dict(c) for c in d["conditions"]),
            Classification(d["classification"]),
            d["prefix_relative"],
            tuple(d.get("notes", ())),
            d.get("sequence"),
        )


def classify(conds: Sequence[ConditionResult]) -> Classification:
    """Pure function of the condition verdicts (i), (ii), (iii), (a), (b)."""
    by = {c.name.split(" ")[0]: c.holds for c in conds}
    if by["(iii)"] is False:
        return Classification.PRO_FD
    iv = by["(a)"] is True or by["(b)"] is True
    if by["(i)"] is True and by["(ii)"] is True and by["(iii)"] is True and iv:
        return Classification.ANTI_FD
    return Classification.INCONCLUSIVE


def antifd_verdict(seq: PolySequence) -> CertReport:
    low, high = check_dagger(seq)
    iii = check_content_ae_one(seq)
    a = check_isolani_free(seq)
    b = check_equal_logs(seq)
    conds = (low, high, iii, a, b)
    cls_ = classify(conds)
    notes = []
    if cls_ is Classification.PRO_FD:
        notes.append("contents exceed 1 infinitely often: the group factors through a rank-one limit and lies in the pro-fd class")
    if cls_ is Classification.INCONCLUSIVE:
        notes.append("the conditions are sufficient only; failure does not show the group is not Anti-FD")
        if low.holds is False and high.holds is False:
            notes.append("both endpoint traces have cyclic range, as for the Pascal-triangle (GICAR-like) group")
    if seq.prefix_relative:
        notes.append("verdict is relative to the finite data supplied")
    return CertReport(conds, cls_, seq.prefix_relative, tuple(notes), seq.describe())


# ---------------------------------------------------------------- G_n machinery


def _content_one_upto(seq: PolySequence, n: int) -> None:
    for i in range(1, n + 1):
        if content(seq[i]) != 1:
            raise ValueError(f"G_n steps assume content 1; p_{i} has content {content(seq[i])}")


def in_gn(e: RElement, n: int) -> bool:
    """Whether e = g/Q_n for an integer Laurent polynomial g with Log g in Log Q_n."""
    seq = e.seq
    if e.stage <= n:
        return True
    tail = LaurentPoly.constant(1)
    for k in range(n + 1, e.stage + 1):
        tail = tail * seq[k]
    q = e.f.exact_divide(tail)
    return q is not None and log_set(q) <= log_set(seq.q_product(n))


def find_gn(gens: Sequence[RElement]) -> int:
    """Smallest n with every generator in G_n."""
    if not gens:
        return 0
    n = max(g.stage for g in gens)
    while n > 0 and all(in_gn(g, n - 1) for g in gens):
        n -= 1
    return n


def purity_check(e: RElement, m: int, n: int) -> bool:
    """If m e lies in G_n then so does e (content-1 regime)."""
    if m == 0:
        raise ValueError("m must be nonzero")
    _content_one_upto(e.seq, max(n, e.stage))
    if not in_gn(m * e, n):
        return True
    return in_gn(e, n)


@dataclass(frozen=True)
class GnWitness:
    stage: int
    exponents: tuple[int, ...]
    independent: bool
    discrete: bool


def gn_discreteness_witness(seq: PolySequence, n: int) -> GnWitness:
    """Basis x^i/Q_n (i in Log Q_n) of G_n, independent because the x^i are."""
    exps = tuple(sorted(log_set(seq.q_product(n))))
    basis = SymbolBasis("R")
    vecs = [SymbolicVector.of(basis, [int(i == j) for j in exps]) for i in exps]
    return GnWitness(n, exps, _linalg.rank([[int(i == j) for j in exps] for i in exps]) == len(exps), is_discrete(vecs))


def gn_coefficients(e: RElement, n: int) -> list[int]:
    """Coordinates of e in the basis x^i/Q_n of G_n (requires e in G_n)."""
    if not in_gn(e, n):
        raise ValueError(f"{e} is not in G_{n}")
    seq = e.seq
    if e.stage <= n:
        g = e.at_stage(n)
    else:
        tail = LaurentPoly.constant(1)
        for k in range(n + 1, e.stage + 1):
            tail = tail * seq[k]
        g = e.f.exact_divide(tail)
    exps = sorted(log_set(seq.q_product(n)))
    return [g.coeff(i) for i in exps]


def gn_lattice_is_discrete(gens: Sequence[RElement]) -> tuple[int, bool]:
    """find_gn, then discreteness of the coefficient lattice of the generators in G_n."""
    n = find_gn(gens)
    basis = SymbolBasis("R")
    vecs = [SymbolicVector.of(basis, gn_coefficients(g, n)) for g in gens]
    return n, is_discrete(vecs)


# ---------------------------------------------------------------- counterexample models

INTERVAL = (Fraction(1, 3), Fraction(2, 3))
ONE_MINUS_2X = [Fraction(1), Fraction(-2)]


class ModelKind(enum.Enum):
    Q = "Q"
    SQRT2Z = "Sqrt2Z"
    QSQRT2 = "QSqrt2"


@dataclass(frozen=True)
class MixedElement:
    """g + (q + r sqrt 2)(1 - 2x) in one of the three models."""

    g: LaurentPoly
    q: Fraction = Fraction(0)
    r: Fraction = Fraction(0)
    model: ModelKind = ModelKind.Q

    def __post_init__(self):
        object.__setattr__(self, "q", Fraction(self.q))
        object.__setattr__(self, "r", Fraction(self.r))
        if self.g.terms and self.g.min_exp() < 0:
            raise ValueError("the integer part must be an ordinary polynomial")
        if not self.in_model():
            raise ValueError(f"element not in the {self.model.value} model")

    def in_model(self) -> bool:
        if self.model is ModelKind.Q:
            return self.r == 0
        if self.model is ModelKind.SQRT2Z:
            return self.q == 0 and self.r.denominator == 1
        return True

    def rational_part(self) -> list[Fraction]:
        coeffs, lo = self.g.dense() if self.g.terms else ([], 0)
        coeffs = [0] * lo + list(coeffs)
        a = [Fraction(c) for c in coeffs] + [Fraction(0)] * max(0, 2 - len(coeffs))
        a[0] += self.q
        a[1] -= 2 * self.q
        return _sturm.trim(a)

    def sqrt2_part(self) -> list[Fraction]:
        return _sturm.trim([self.r, -2 * self.r])

    def value(self, t: Fraction) -> tuple[Fraction, Fraction]:
        """Exact value at t as (u, v) meaning u + v sqrt 2."""
        return _sturm.evaluate(self.rational_part(), Fraction(t)), _sturm.evaluate(self.sqrt2_part(), Fraction(t))


def _sign_qsqrt2(u: Fraction, v: Fraction) -> int:
    if u >= 0 and v >= 0:
        return 0 if u == 0 and v == 0 else 1
    if u <= 0 and v <= 0:
        return -1
    # opposite signs: compare u^2 with 2 v^2
    d = u * u - 2 * v * v
    return (1 if u > 0 else -1) * (1 if d > 0 else -1)


def _roots_in(p: list[Fraction], lo: Fraction, hi: Fraction) -> int:
    return _sturm.count_roots(p, lo, hi) if len(p) > 1 else 0


def strictly_positive(e: MixedElement, a: Fraction = INTERVAL[0], b: Fraction = INTERVAL[1]) -> bool:
    """Exact test that g + (q + r sqrt 2)(1 - 2x) > 0 on [a, b]."""
    A, B = e.rational_part(), e.sqrt2_part()
    if not A and not B:
        return False
    if _sign_qsqrt2(*e.value(a)) <= 0 or _sign_qsqrt2(*e.value(b)) <= 0:
        return False
    if not B:
        return _roots_in(A, a, b) == 0
    # any root of A + sqrt2 B is a root of A^2 - 2 B^2; common roots of A, B are roots
    common = _sturm.gcd_poly(A, B)
    if len(common) > 1 and (_roots_in(common, a, b) > 0 or _sturm.evaluate(common, a) == 0):
        return False
    sq = lambda p: [sum((p[i] * p[k - i] for i in range(len(p)) if 0 <= k - i < len(p)), Fraction(0)) for k in range(2 * len(p) - 1)]  # noqa: E731
    a2, b2 = sq(A), sq(B)
    width = max(len(a2), len(b2))
    norm = _sturm.trim([(a2[i] if i < len(a2) else 0) - 2 * (b2[i] if i < len(b2) else 0) for i in range(width)])
    for lo, hi in _sturm.isolate_roots(norm, a, b):
        if lo == hi:
            if _sign_qsqrt2(*e.value(lo)) == 0:
                return False
            continue
        # shrink until A and B have no roots inside, then their signs are constant
        while _roots_in(A, lo, hi) + _roots_in(B, lo, hi) > 0:
            lo, hi = _sturm.refine_root(norm, lo, hi, (hi - lo) / 2)
            if lo == hi:
                break
        mid = (lo + hi) / 2 if lo != hi else lo
        sa = _sturm.evaluate(A, mid)
        sb = _sturm.evaluate(B, mid)
        if lo == hi:
            if _sign_qsqrt2(*e.value(lo)) == 0:
                return False
        elif (sa > 0 and sb < 0) or (sa < 0 and sb > 0):
            return False
    return True


def counterexample_model(which: str) -> ModelKind:
    return ModelKind(which)


@dataclass(frozen=True)
class MissReport:
    model: ModelKind
    samples: int
    all_not_positive: bool
    vanish_at_half: bool
    unit_positive: bool
    profile: dict


def _random_q(model: ModelKind, rng: random.Random) -> tuple[Fraction, Fraction]:
    def nz() -> Fraction:
        while True:
            v = Fraction(rng.randint(-50, 50), rng.randint(1, 30))
            if v:
                return v

    if model is ModelKind.Q:
        return nz(), Fraction(0)
    if model is ModelKind.SQRT2Z:
        return Fraction(0), Fraction(rng.choice([k for k in range(-20, 21) if k]))
    return nz(), (nz() if rng.random() < 0.7 else Fraction(0))


def positive_cone_miss_check(model: ModelKind, samples: int = 50, seed: int = 0) -> MissReport:
    """Sampled nonzero multiples of 1 - 2x are never strictly positive on I."""
    rng = random.Random(seed)
    zero = LaurentPoly()
    misses, vanish = True, True
    for _ in range(samples):
        q, r = _random_q(model, rng)
        e = MixedElement(zero, q, r, model)
        if strictly_positive(e):
            misses = False
        if e.value(Fraction(1, 2)) != (0, 0):
            vanish = False
    unit = MixedElement(LaurentPoly.constant(1), model=model)
    return MissReport(model, samples, misses, vanish, strictly_positive(unit), condition_profile(model))


def condition_profile(model: ModelKind, probe: int = 12, seed: int = 0) -> dict:
    """Structural checks of (a) countable subgroups free and (b) finitely generated subgroups discrete."""
    out: dict = {"model": model.value}
    if model in (ModelKind.Q, ModelKind.QSQRT2):
        # (1 - 2x)/n lies in the model for every n: a nonzero divisible element, so not free
        members = [MixedElement(LaurentPoly(), Fraction(1, n), 0, model).in_model() for n in range(1, probe + 1)]
        out["a"] = False
        out["a_evidence"] = {"divisible_element": "1 - 2x", "divided_by": list(range(1, probe + 1)), "members": all(members)}
    else:
        # the model is free on {x^i} and sqrt2 (1 - 2x): coordinates over Q(sqrt 2) are independent
        rows = [[int(i == j) for j in range(probe)] + [0] for i in range(probe)] + [[0] * probe + [1]]
        out["a"] = _linalg.rank(rows) == probe + 1
        out["a_evidence"] = {"free_basis": [f"x^{i}" for i in range(probe)] + ["sqrt2*(1 - 2x)"]}
    if model is ModelKind.Q:
        rng = random.Random(seed)
        ok = True
        for _ in range(10):
            gens = []
            for _ in range(rng.randint(1, 4)):
                g = LaurentPoly.from_dense([rng.randint(-5, 5) for _ in range(3)])
                gens.append(MixedElement(g, Fraction(rng.randint(-9, 9), rng.randint(1, 9)), 0, model))
            vecs = [SymbolicVector.of(SymbolBasis("R"), _pad(e.rational_part(), 4)) for e in gens]
            ok = ok and is_discrete(vecs)
        out["b"] = ok
        out["b_evidence"] = {"sampled_subgroups": 10, "reason": "each lies in (1/n) Z[x] for a common n"}
    else:
        # <1 - 2x, sqrt2 (1 - 2x)>: rank 2 over Z but one real dimension
        s2 = sympy.sqrt(2)
        K = sympy.QQ.algebraic_field(s2)
        m = DomainMatrix([[K.from_sympy(sympy.Integer(1)), K.from_sympy(sympy.Integer(-2))],
                          [K.from_sympy(s2), K.from_sympy(-2 * s2)]], (2, 2), K)
        span = m.rank()
        zrank = _linalg.rank([[1, -2, 0, 0], [0, 0, 1, -2]])
        out["b"] = zrank == span
        out["b_evidence"] = {"subgroup": ["1 - 2x", "sqrt2*(1 - 2x)"], "z_rank": zrank, "real_span_dim": span}
    return out


def _pad(v: list[Fraction], n: int) -> list[Fraction]:
    return list(v) + [Fraction(0)] * (n - len(v))
