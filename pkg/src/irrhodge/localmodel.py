"""Monomial charts with f = x^(-e) and their torus-graded sheaf complexes.

Coordinates of a chart are ordered x_1..x_l (poles), y_1..y_m (horizontal
divisor) and z_1..z_pz (free).  Forms are written in the uniform logarithmic
basis delta_i = dt_i/t_i for every coordinate t_i, and a term
``c * t^a * delta_J`` has multidegree ``a``.  A free coordinate differential
is dz_k = z_k * delta_k, so a term containing delta_k for a free coordinate is
regular iff its z_k exponent is at least 1.  With this bookkeeping every sheaf
in sight is a direct sum of finite-dimensional multidegree slices.

Differentials act slicewise: d(t^a delta_J) = (sum a_i delta_i) ^ t^a delta_J
keeps the multidegree, while df ^ = -x^(-e) (sum e_i delta_i) ^ shifts it by -e.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import lru_cache
from math import ceil, comb, floor
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .exactalg import QQ, Field, Matrix, Quotient, Subspace, Vector, preimage, rank
from .filtcx import CochainComplex, cohomology_dims

Weight = Tuple[int, ...]

KINDS = ("log", "kont", "rel", "relbar", "log_mod_kont")


class WindowError(ValueError):
    """Raised when a multidegree lies outside the declared window."""


# ---------------------------------------------------------------------------
# Charts and verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChartData:
    """A monomial chart with f = x^(-e).

    Attributes:
        ell: number of pole coordinates.
        m: number of horizontal coordinates.
        pz: number of free coordinates.
        e: pole multiplicities, one per pole coordinate.
    """

    ell: int
    m: int
    pz: int
    e: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "e", tuple(int(x) for x in self.e))
        if min(self.ell, self.m, self.pz) < 0:
            raise ValueError("coordinate counts must be non-negative")
        if len(self.e) != self.ell or any(x < 1 for x in self.e):
            raise ValueError("e must list ell positive multiplicities")

    @property
    def n(self) -> int:
        return self.ell + self.m + self.pz

    def kind(self, i: int) -> str:
        if i < self.ell:
            return "x"
        return "y" if i < self.ell + self.m else "z"

    @property
    def evec(self) -> Weight:
        """Multidegree of g = x^e."""
        return tuple(self.e) + (0,) * (self.m + self.pz)

    @property
    def z_indices(self) -> Tuple[int, ...]:
        return tuple(range(self.ell + self.m, self.n))

    def to_json(self) -> dict:
        return {"ell": self.ell, "m": self.m, "pz": self.pz, "e": list(self.e)}

    @classmethod
    def from_json(cls, d: dict) -> "ChartData":
        return cls(int(d["ell"]), int(d.get("m", 0)), int(d.get("pz", 0)), tuple(d.get("e", [1] * int(d["ell"]))))


def chart_family(max_dim: int = 3, max_e: int = 3, min_ell: int = 1) -> List[ChartData]:
    """All charts with l + m + pz <= max_dim, l >= min_ell and e_i <= max_e."""
    out = []
    for n in range(1, max_dim + 1):
        for ell in range(min_ell, n + 1):
            for m in range(0, n - ell + 1):
                pz = n - ell - m
                for e in itertools.product(range(1, max_e + 1), repeat=ell):
                    out.append(ChartData(ell, m, pz, e))
    return out


@dataclass
class Verdict:
    """Aggregated result of a slicewise verification.

    Attributes:
        name: check name.
        passed: overall verdict.
        checked: number of slices examined.
        failures: failing slices with diagnostic data (capped).
        details: extra dimension tables.
    """

    name: str
    passed: bool = True
    checked: int = 0
    failures: List[dict] = dc_field(default_factory=list)
    details: Dict[str, object] = dc_field(default_factory=dict)
    max_failures: int = 20

    def fail(self, info: dict):
        self.passed = False
        if len(self.failures) < self.max_failures:
            self.failures.append(info)

    def merge(self, other: "Verdict") -> "Verdict":
        self.passed = self.passed and other.passed
        self.checked += other.checked
        for f in other.failures:
            if len(self.failures) < self.max_failures:
                self.failures.append(f)
        return self

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked,
                "failures": self.failures, "details": self.details}


# ---------------------------------------------------------------------------
# Exterior algebra tables
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def combos(n: int, p: int) -> Tuple[Tuple[int, ...], ...]:
    if p < 0 or p > n:
        return ()
    return tuple(itertools.combinations(range(n), p))


@lru_cache(maxsize=None)
def combo_index(n: int, p: int) -> Dict[Tuple[int, ...], int]:
    return {J: i for i, J in enumerate(combos(n, p))}


def wedge_sign(i: int, J: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """delta_i ^ delta_J = sign * delta_(J+i); sign 0 when i in J."""
    if i in J:
        return 0, tuple(J)
    before = sum(1 for j in J if j < i)
    return (-1) ** before, tuple(sorted(tuple(J) + (i,)))


@lru_cache(maxsize=None)
def _wedge_table(n: int, p: int) -> Tuple[Tuple[Tuple[int, int, int], ...], ...]:
    """For each J of size p: (i, index of J+i, sign) over i not in J."""
    idx = combo_index(n, p + 1)
    out = []
    for J in combos(n, p):
        row = []
        for i in range(n):
            s, K = wedge_sign(i, J)
            if s:
                row.append((i, idx[K], s))
        out.append(tuple(row))
    return tuple(out)


def wedge_one_form(n: int, p: int, coeffs: Sequence, vec: Vector) -> Vector:
    """(sum_i coeffs[i] delta_i) ^ vec, for vec a degree-p slice vector."""
    table = _wedge_table(n, p)
    out: Vector = {}
    for j, a in vec.items():
        for i, k, s in table[j]:
            c = coeffs[i]
            if c:
                nv = out.get(k, 0) + (a * c if s > 0 else -(a * c))
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
    return out


# ---------------------------------------------------------------------------
# Monomial log forms
# ---------------------------------------------------------------------------


class MonomialLogForm:
    """Finite sum of c * t^a * delta_J.

    Args:
        field: coefficient field.
        n: number of coordinates.
        terms: mapping (a, J) -> coefficient, J a sorted tuple.
    """

    __slots__ = ("field", "n", "terms")

    def __init__(self, field: Field, n: int, terms: Optional[Dict[Tuple[Weight, Tuple[int, ...]], object]] = None):
        self.field = field
        self.n = n
        clean = {}
        for (a, J), c in (terms or {}).items():
            c = field(c)
            if c:
                clean[(tuple(a), tuple(J))] = c
        self.terms = clean

    @classmethod
    def monomial(cls, field: Field, a: Sequence[int], J: Sequence[int] = (), c=1) -> "MonomialLogForm":
        J = tuple(J)
        if len(set(J)) != len(J):
            return cls(field, len(a))
        sign = 1
        Js = list(J)
        for i in range(len(Js)):  # bubble sort counting transpositions
            for j in range(len(Js) - 1 - i):
                if Js[j] > Js[j + 1]:
                    Js[j], Js[j + 1] = Js[j + 1], Js[j]
                    sign = -sign
        return cls(field, len(a), {(tuple(a), tuple(Js)): field(c) * sign})

    @classmethod
    def from_slice(cls, field: Field, n: int, a: Weight, p: int, vec: Vector) -> "MonomialLogForm":
        Js = combos(n, p)
        return cls(field, n, {(tuple(a), Js[j]): c for j, c in vec.items()})

    def degree_set(self) -> set:
        return {len(J) for (_, J) in self.terms}

    def components(self) -> Dict[Tuple[Weight, int], Vector]:
        """Split into slice vectors keyed by (multidegree, form degree)."""
        out: Dict[Tuple[Weight, int], Vector] = {}
        for (a, J), c in self.terms.items():
            idx = combo_index(self.n, len(J))[J]
            out.setdefault((a, len(J)), {})[idx] = c
        return out

    def __add__(self, o: "MonomialLogForm") -> "MonomialLogForm":
        t = dict(self.terms)
        for k, c in o.terms.items():
            t[k] = t.get(k, 0) + c
        return MonomialLogForm(self.field, self.n, t)

    def __neg__(self):
        return MonomialLogForm(self.field, self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c) -> "MonomialLogForm":
        return MonomialLogForm(self.field, self.n, {k: c * v for k, v in self.terms.items()})

    def shift(self, b: Sequence[int]) -> "MonomialLogForm":
        """Multiply by the monomial t^b."""
        return MonomialLogForm(self.field, self.n, {(tuple(x + y for x, y in zip(a, b)), J): c
                                                   for (a, J), c in self.terms.items()})

    def wedge(self, o: "MonomialLogForm") -> "MonomialLogForm":
        t: Dict = {}
        for (a, J), c in self.terms.items():
            for (b, K), d in o.terms.items():
                if set(J) & set(K):
                    continue
                w = MonomialLogForm.monomial(self.field, tuple(x + y for x, y in zip(a, b)), J + K, c * d)
                for key, v in w.terms.items():
                    t[key] = t.get(key, 0) + v
        return MonomialLogForm(self.field, self.n, t)

    def d(self) -> "MonomialLogForm":
        t: Dict = {}
        for (a, J), c in self.terms.items():
            for i in range(self.n):
                if a[i]:
                    s, K = wedge_sign(i, J)
                    if s:
                        t[(a, K)] = t.get((a, K), 0) + c * a[i] * s
        return MonomialLogForm(self.field, self.n, t)

    def df_wedge(self, chart: ChartData, e_override: Optional[Sequence[int]] = None) -> "MonomialLogForm":
        e = chart.e if e_override is None else tuple(e_override)
        ev = tuple(e) + (0,) * (self.n - len(e))
        t: Dict = {}
        for (a, J), c in self.terms.items():
            b = tuple(x - y for x, y in zip(a, chart.evec))
            for i in range(chart.ell):
                if ev[i]:
                    s, K = wedge_sign(i, J)
                    if s:
                        t[(b, K)] = t.get((b, K), 0) - c * ev[i] * s
        return MonomialLogForm(self.field, self.n, t)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, o):
        return isinstance(o, MonomialLogForm) and self.n == o.n and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def render(self, chart: Optional[ChartData] = None) -> str:
        """Human-readable form; free coordinates are shown with dz_k."""
        if not self.terms:
            return "0"
        names = []
        for i in range(self.n):
            k = chart.kind(i) if chart else "x"
            if chart is None:
                names.append("t%d" % (i + 1))
            elif k == "x":
                names.append("x%d" % (i + 1))
            elif k == "y":
                names.append("y%d" % (i + 1 - chart.ell))
            else:
                names.append("z%d" % (i + 1 - chart.ell - chart.m))
        parts = []
        for (a, J), c in sorted(self.terms.items()):
            a = list(a)
            wed = []
            for j in J:
                if chart is not None and chart.kind(j) == "z":
                    a[j] -= 1
                    wed.append("d" + names[j])
                else:
                    wed.append("d%s/%s" % (names[j], names[j]))
            mono = "*".join("%s^%d" % (names[i], a[i]) if a[i] != 1 else names[i] for i in range(self.n) if a[i])
            body = "*".join(x for x in [mono, " ^ ".join(wed)] if x) or "1"
            parts.append("%s*%s" % (c, body))
        return " + ".join(parts)

    def __repr__(self):
        return "MonomialLogForm(%s)" % self.render()


def nabla(form: MonomialLogForm, chart: ChartData, twist=(1, 1)) -> MonomialLogForm:
    """u*d + v*df^ applied to a form."""
    u, v = (form.field(x) for x in twist)
    out = MonomialLogForm(form.field, form.n)
    if u:
        out = out + form.d().scale(u)
    if v:
        out = out + form.df_wedge(chart).scale(v)
    return out


# ---------------------------------------------------------------------------
# Slice spaces
# ---------------------------------------------------------------------------


def twist_bounds(chart: ChartData, mu, strict: bool = False) -> Tuple[int, ...]:
    """c_i with O([mu P]) = x^(-c) O; strict gives the bound of mu - epsilon."""
    return _twist_bounds(chart, Fraction(mu), strict)


@lru_cache(maxsize=None)
def _twist_bounds(chart: ChartData, mu: Fraction, strict: bool) -> Tuple[int, ...]:
    if strict:
        return tuple(ceil(mu * e) - 1 for e in chart.e)
    return tuple(floor(mu * e) for e in chart.e)


def allowed_J(chart: ChartData, a: Weight, p: int) -> List[int]:
    """Indices of delta_J of size p that are regular at multidegree a on free coordinates."""
    bad = [k for k in chart.z_indices if a[k] < 1]
    if not bad:
        return list(range(len(combos(chart.n, p))))
    return [j for j, J in enumerate(combos(chart.n, p)) if not any(k in J for k in bad)]


def in_range(chart: ChartData, a: Weight, bounds: Sequence[int]) -> bool:
    for i in range(chart.ell):
        if a[i] < -bounds[i]:
            return False
    for i in range(chart.ell, chart.n):
        if a[i] < 0:
            return False
    return True


def log_slice(chart: ChartData, p: int, a: Weight, bounds: Optional[Sequence[int]] = None,
              field: Field = QQ) -> Subspace:
    """Omega^p(log D)(x^-bounds) at multidegree a (bounds default to 0).

    Results are cached and shared, so callers must not modify them.
    """
    if bounds is None:
        bounds = (0,) * chart.ell
    return _log_slice(chart, p, tuple(a), tuple(bounds), field)


@lru_cache(maxsize=1 << 18)
def _log_slice(chart: ChartData, p: int, a: Weight, bounds: Tuple[int, ...], field: Field) -> Subspace:
    n = chart.n
    amb = len(combos(n, p))
    if not 0 <= p <= n or not in_range(chart, a, bounds):
        return Subspace(field, ambient=amb)
    one = field.one
    return Subspace(field, [{j: one} for j in allowed_J(chart, a, p)], ambient=amb)


def kappa(chart: ChartData, field: Field = QQ, e_override: Optional[Sequence[int]] = None) -> Tuple:
    """Coefficients of dg/g = sum e_i delta_i."""
    e = chart.e if e_override is None else tuple(e_override)
    return tuple(field(x) for x in e) + (field.zero,) * (chart.m + chart.pz)


def kont_slice(chart: ChartData, p: int, a: Weight, mu=0, field: Field = QQ) -> Subspace:
    """Omega_f^p([mu P]) at a, from the generators dg/g ^ Omega^(p-1) and g Omega^p."""
    n = chart.n
    c = twist_bounds(chart, mu)
    a0 = tuple(a[i] + (c[i] if i < chart.ell else 0) for i in range(n))  # untwisted multidegree
    amb = len(combos(n, p))
    gens = []
    if p >= 1:
        k = kappa(chart, field)
        for v in log_slice(chart, p - 1, a0, field=field).basis():
            gens.append(wedge_one_form(n, p - 1, k, v))
    below = tuple(x - y for x, y in zip(a0, chart.evec))
    if in_range(chart, below, (0,) * chart.ell):
        gens.extend(log_slice(chart, p, a0, field=field).basis())
    return Subspace(field, gens, ambient=amb)


def kont_slice_kernel(chart: ChartData, p: int, a: Weight, mu=0, field: Field = QQ) -> Subspace:
    """Omega_f^p([mu P]) at a from the kernel definition (df ^ keeps the twist)."""
    n = chart.n
    c = twist_bounds(chart, mu)
    dom = log_slice(chart, p, a, c, field)
    below = tuple(x - y for x, y in zip(a, chart.evec))
    tgt = log_slice(chart, p + 1, below, c, field)
    k = kappa(chart, field)
    return preimage(field, lambda v: wedge_one_form(n, p, k, v), dom, tgt)


def rel_denominator(chart: ChartData, p: int, a: Weight, field: Field = QQ) -> Subspace:
    """dg/g ^ Omega^(p-1)(log D) at a."""
    n = chart.n
    k = kappa(chart, field)
    gens = [wedge_one_form(n, p - 1, k, v) for v in log_slice(chart, p - 1, a, field=field).basis()] if p >= 1 else []
    return Subspace(field, gens, ambient=len(combos(n, p)))


def relbar_denominator(chart: ChartData, p: int, a: Weight, field: Field = QQ) -> Subspace:
    """dg/g ^ Omega^(p-1) + g Omega^p at a (kernel of the projection to the reduced relative forms)."""
    below = _sub(a, chart.evec)
    return rel_denominator(chart, p, a, field) + log_slice(chart, p, below, field=field)


@dataclass(frozen=True)
class GradedSheafSpace:
    """A torus-graded sheaf on a chart, sliced by multidegree.

    Attributes:
        chart: the chart.
        kind: one of KINDS.
        p: form degree.
        mu: rational twist (for "log" and "kont").
        strict: use the bound of mu - epsilon (steps F^{>lambda}).
        zero: the hard zero space of a negative truncated twist.
        window: allowed multidegrees, or None for no restriction.
    """

    chart: ChartData
    kind: str
    p: int
    mu: Fraction = Fraction(0)
    strict: bool = False
    zero: bool = False
    window: Optional[FrozenSet[Weight]] = None
    field: Field = QQ

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError("unknown kind %r" % self.kind)
        object.__setattr__(self, "mu", Fraction(self.mu))

    @property
    def bounds(self) -> Tuple[int, ...]:
        return twist_bounds(self.chart, self.mu, self.strict)

    def numerator(self, a: Weight) -> Subspace:
        ch, f = self.chart, self.field
        if self.zero:
            return Subspace(f, ambient=len(combos(ch.n, self.p)))
        if self.kind == "log":
            return log_slice(ch, self.p, a, self.bounds, f)
        if self.kind == "kont":
            return kont_slice(ch, self.p, a, self.mu, f)
        return log_slice(ch, self.p, a, field=f)

    def denominator(self, a: Weight) -> Subspace:
        ch, f = self.chart, self.field
        amb = len(combos(ch.n, self.p))
        if self.zero or self.kind in ("log", "kont"):
            return Subspace(f, ambient=amb)
        if self.kind == "rel":
            return rel_denominator(ch, self.p, a, f)
        if self.kind == "relbar":
            return relbar_denominator(ch, self.p, a, f)
        return kont_slice(ch, self.p, a, 0, f)

    def slice(self, a: Weight) -> Quotient:
        a = tuple(a)
        if self.window is not None and a not in self.window:
            raise WindowError("multidegree %s outside window" % (a,))
        return Quotient(self.numerator(a), self.denominator(a))

    def contains(self, form: MonomialLogForm) -> bool:
        """Membership of a form in the numerator space (all of its slices)."""
        for (a, p), v in form.components().items():
            if p != self.p or not self.numerator(a).contains(v):
                return False
        return True


def basis_of(space: GradedSheafSpace, a: Sequence[int]) -> List[MonomialLogForm]:
    """Monomial-form basis of a slice (representatives for quotient kinds)."""
    a = tuple(a)
    q = space.slice(a)
    return [MonomialLogForm.from_slice(space.field, space.chart.n, a, space.p, v) for v in q.reps]


def fyu_step(chart: ChartData, lam, k: int, field: Field = QQ) -> GradedSheafSpace:
    """F^lambda in degree k: Omega^k(log D)([(k - lambda) P]) if k - lambda >= 0, else 0."""
    mu = k - Fraction(lam)
    return GradedSheafSpace(chart, "log", k, mu, zero=mu < 0, field=field)


def fyu_strict_step(chart: ChartData, lam, k: int, field: Field = QQ) -> GradedSheafSpace:
    """F^{>lambda} in degree k (union of F^lambda' for lambda' > lambda)."""
    mu = k - Fraction(lam)
    return GradedSheafSpace(chart, "log", k, mu, strict=True, zero=mu <= 0, field=field)


def twisted_space(chart: ChartData, mu, k: int, field: Field = QQ) -> GradedSheafSpace:
    """Omega^k(log D)([mu P]) without the truncation rule."""
    return GradedSheafSpace(chart, "log", k, Fraction(mu), field=field)


# ---------------------------------------------------------------------------
# Windows
# ---------------------------------------------------------------------------


def window_l1(n: int, radius: int) -> List[Weight]:
    """All multidegrees with sum |a_i| <= radius."""
    out = []
    for a in itertools.product(range(-radius, radius + 1), repeat=n):
        if sum(abs(x) for x in a) <= radius:
            out.append(a)
    return out


def window_box(n: int, radius: int) -> List[Weight]:
    return list(itertools.product(range(-radius, radius + 1), repeat=n))


# ---------------------------------------------------------------------------
# Slice complexes
# ---------------------------------------------------------------------------


@dataclass
class SliceComplex:
    """A finite complex of slice quotients along one diagonal.

    Attributes:
        label: multidegree labelling the diagonal.
        degrees: form degrees of the terms.
        weights: multidegree of each term.
        complex: the complex in quotient coordinates.
        leaks: diagnostics for differential components leaving the diagonal.
    """

    label: Weight
    degrees: Tuple[int, ...]
    weights: Tuple[Weight, ...]
    complex: CochainComplex
    leaks: List[str]
    quotients: List[Quotient]

    def cohomology(self) -> Dict[int, int]:
        return cohomology_dims(self.complex)


class _CoordQuotient:
    """Quotient of two coordinate subspaces (spans of unit vectors)."""

    def __init__(self, big: Subspace, small: Subspace):
        self.big, self.small = big, small
        self.field = big.field
        drop = set(small.pivots)
        keys = [k for k in sorted(big.pivots) if k not in drop]
        self.index = {k: i for i, k in enumerate(keys)}
        self.inside = set(big.pivots)
        one = big.field.one
        self.reps = [{k: one} for k in keys]

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coordinates(self, v: Vector) -> Vector:
        out = {}
        for k, a in v.items():
            if k not in self.inside:
                raise ValueError("vector not in the numerator space")
            i = self.index.get(k)
            if i is not None:
                out[i] = a
        return out


def _is_coordinate(s: Subspace) -> bool:
    return all(len(r) == 1 for r in s.basis())


def make_quotient(big: Subspace, small: Subspace):
    """Quotient big/small, using index bookkeeping when both are coordinate subspaces."""
    if _is_coordinate(big) and _is_coordinate(small):
        if not set(small.pivots) <= set(big.pivots):
            raise ValueError("quotient requires small subspace inside big subspace")
        return _CoordQuotient(big, small)
    return Quotient(big, small)


def build_slice_complex(field: Field, label: Weight, degrees: Sequence[int],
                        weight_of: Callable[[int], Weight],
                        num: Callable[[int, Weight], Subspace],
                        den: Callable[[int, Weight], Subspace],
                        op: Callable[[int, Weight, Vector], Dict[Weight, Vector]]) -> SliceComplex:
    """Assemble a complex of quotients num/den along weights weight_of(j).

    Components of op landing at other multidegrees must vanish in the target
    quotient there; otherwise they are reported in ``leaks``.
    """
    degrees = tuple(degrees)
    weights = tuple(weight_of(j) for j in degrees)
    quots = [make_quotient(num(j, w), den(j, w)) for j, w in zip(degrees, weights)]
    mats = []
    leaks = []
    for idx in range(len(degrees) - 1):
        j, w = degrees[idx], weights[idx]
        tgt_w = weights[idx + 1]
        tq = quots[idx + 1]
        cols = []
        for r in quots[idx].reps:
            out = op(j, w, r)
            col: Vector = {}
            for w2, v in out.items():
                if not v:
                    continue
                if w2 == tgt_w:
                    try:
                        col = tq.coordinates(v)
                    except ValueError:
                        leaks.append("degree %d: image leaves the target space at %s" % (j + 1, w2))
                else:
                    n2, d2 = num(j + 1, w2), den(j + 1, w2)
                    if not n2.contains(v):
                        leaks.append("degree %d: image leaves the target space at %s" % (j + 1, w2))
                    elif not d2.contains(v):
                        leaks.append("degree %d: nonzero component off the diagonal at %s" % (j + 1, w2))
            cols.append(col)
        mats.append(Matrix(field, tq.dim, quots[idx].dim, cols))
    cx = CochainComplex(field, degrees[0], tuple(q.dim for q in quots), tuple(mats))
    return SliceComplex(tuple(label), degrees, weights, cx, leaks, quots)


def _sub(a: Weight, b: Weight, k: int = 1) -> Weight:
    return tuple(x - k * y for x, y in zip(a, b))


def twisted_op(chart: ChartData, field: Field, twist=(1, 1), e_override: Optional[Sequence[int]] = None):
    """Slice-level u*d + v*df^ : returns {multidegree: vector} in degree j+1."""
    u, v = field(twist[0]), field(twist[1])
    k = kappa(chart, field, e_override)
    n = chart.n
    ev = chart.evec

    def op(j: int, w: Weight, vec: Vector) -> Dict[Weight, Vector]:
        out = {}
        if u:
            dv = wedge_one_form(n, j, tuple(field(x) * u for x in w), vec)
            if dv:
                out[w] = dv
        if v:
            fv = wedge_one_form(n, j, tuple(-x * v for x in k), vec)
            if fv:
                w2 = _sub(w, ev)
                out[w2] = fv
        return out

    return op


# ---------------------------------------------------------------------------
# F^Yu graded pieces
# ---------------------------------------------------------------------------


@dataclass
class GrComplex:
    """gr^lambda of F^Yu as a direct sum of diagonal slice complexes.

    Degree k of the diagonal labelled c sits at multidegree c - k*e.
    """

    chart: ChartData
    lam: Fraction
    slices: List[SliceComplex]
    enlargement: int

    def direct_sum(self) -> CochainComplex:
        field = self.slices[0].complex.field if self.slices else QQ
        n = self.chart.n
        dims = [0] * (n + 1)
        cols: List[List[Vector]] = [[] for _ in range(n)]
        offsets = [0] * (n + 1)
        for s in self.slices:
            c = s.complex
            for k in range(n):
                for col in c.d(k).columns:
                    cols[k].append({i + offsets[k + 1]: x for i, x in col.items()})
            for k in range(n + 1):
                offsets[k] += c.dim(k)
        dims = offsets
        mats = tuple(Matrix(field, dims[k + 1], dims[k], cols[k]) for k in range(n))
        return CochainComplex(field, 0, tuple(dims), mats)

    def cohomology_by_slice(self) -> Dict[Weight, Dict[int, int]]:
        return {s.label: s.cohomology() for s in self.slices}


def gr_complex(chart: ChartData, lam, window: Iterable[Weight], field: Field = QQ,
               twist=(1, 1), enlarge: bool = True) -> GrComplex:
    """gr^lambda(nabla) on the diagonals through the given degree-0 multidegrees.

    The window is closed under the -e shifts of the differential by adding the
    missing multidegrees; their number is recorded as ``enlargement``.  With
    ``enlarge=False`` a window that is not shift-closed raises WindowError.
    """
    lam = Fraction(lam)
    n = chart.n
    steps = [fyu_step(chart, lam, k, field) for k in range(n + 1)]
    stricts = [fyu_strict_step(chart, lam, k, field) for k in range(n + 1)]
    op = twisted_op(chart, field, twist)
    win = set(tuple(c) for c in window)
    slices = []
    extra = set()
    for c in sorted(win):
        wk = lambda k, c=c: _sub(c, chart.evec, k)
        if all(steps[k].numerator(wk(k)).dim == 0 for k in range(n + 1)):
            continue
        for k in range(1, n + 1):
            if wk(k) not in win and steps[k].numerator(wk(k)).dim:
                extra.add(wk(k))
        s = build_slice_complex(field, c, range(n + 1), wk,
                                lambda k, w: steps[k].numerator(w) if 0 <= k <= n else Subspace(field),
                                lambda k, w: stricts[k].numerator(w) if 0 <= k <= n else Subspace(field),
                                op)
        slices.append(s)
    if extra and not enlarge:
        raise WindowError("window is not closed under the shift by -e: %s" % (sorted(extra)[0],))
    return GrComplex(chart, lam, slices, len(extra))


def verify_gr_acyclic(chart: ChartData, lam, window: Iterable[Weight], field: Field = QQ) -> Verdict:
    """gr^lambda has zero cohomology on every slice of the window."""
    v = Verdict("gr_acyclic")
    g = gr_complex(chart, lam, window, field)
    for s in g.slices:
        v.checked += 1
        h = s.cohomology()
        if any(h.values()) or s.leaks:
            v.fail({"chart": chart.to_json(), "lambda": str(g.lam), "slice": list(s.label),
                    "cohomology": {str(k): d for k, d in h.items() if d}, "leaks": s.leaks[:3]})
    v.details["enlargement"] = g.enlargement
    return v


def verify_gr_support(chart: ChartData, lam, window: Iterable[Weight], field: Field = QQ) -> Verdict:
    """Every term of gr^lambda is killed by g = x^e, so it is supported on P_red."""
    v = Verdict("gr_support")
    lam = Fraction(lam)
    n = chart.n
    g = gr_complex(chart, lam, window, field)
    stricts = [fyu_strict_step(chart, lam, k, field) for k in range(n + 1)]
    for s in g.slices:
        v.checked += 1
        for q, k, w in zip(s.quotients, s.degrees, s.weights):
            up = tuple(x + y for x, y in zip(w, chart.evec))
            den_up = stricts[k].numerator(up)
            if any(not den_up.contains(r) for r in q.reps):
                v.fail({"chart": chart.to_json(), "lambda": str(lam), "slice": list(s.label), "degree": k})
                break
        if s.leaks:
            v.fail({"chart": chart.to_json(), "lambda": str(lam), "slice": list(s.label), "leaks": s.leaks[:3]})
    v.details["enlargement"] = g.enlargement
    return v


# ---------------------------------------------------------------------------
# Kontsevich complex versus twisted log forms
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _row_bounds(chart: ChartData, mu: Fraction, p: int):
    n = chart.n
    bnum = {j: twist_bounds(chart, mu + j - p) for j in range(p, n + 1)}
    bden = {j: twist_bounds(chart, mu + j - p - 1) for j in range(p + 1, n + 1)}
    return bnum, bden


def kont_log_row(chart: ChartData, mu, p: int, c: Weight, field: Field = QQ, twist=(1, 1),
                 e_override: Optional[Sequence[int]] = None) -> Optional[SliceComplex]:
    """The row Omega^p([mu P]) -> Omega^(p+1)([(mu+1)P]) / Omega^(p+1)([mu P]) -> ... on the diagonal c.

    Returns None when every term of the row vanishes.
    """
    n = chart.n
    bnum, bden = _row_bounds(chart, Fraction(mu), p)
    if not any(in_range(chart, _sub(c, chart.evec, j - p), bnum[j]) for j in range(p, n + 1)):
        return None

    def num(j, w):
        if not p <= j <= n:
            return Subspace(field)
        return log_slice(chart, j, w, bnum[j], field)

    def den(j, w):
        if not p < j <= n:
            return Subspace(field, ambient=len(combos(n, j)))
        return log_slice(chart, j, w, bden[j], field)

    op = twisted_op(chart, field, twist, e_override)
    return build_slice_complex(field, c, range(p, n + 1), lambda j: _sub(c, chart.evec, j - p), num, den, op)


def verify_kont_log(chart: ChartData, mu, p: int, window: Iterable[Weight], field: Field = QQ,
                    differentials=("nabla", "df"), e_override: Optional[Sequence[int]] = None) -> Verdict:
    """Zero cohomology in degrees >= p+1 of the twisted row, for nabla and for df^.

    Also checks that the degree-p cohomology is the slice of Omega_f^p([mu P])
    produced by the generator formula.
    """
    v = Verdict("kont_log")
    mu = Fraction(mu)
    twists = {"nabla": (1, 1), "df": (0, 1)}
    win = [tuple(c) for c in window]
    winset = set(win)
    extra = set()
    expected_at: Dict[Weight, int] = {}
    for name in differentials:
        for c in win:
            s = kont_log_row(chart, mu, p, c, field, twists[name], e_override)
            if s is None or not any(s.complex.dims):
                continue
            for w in s.weights[1:]:
                if w not in winset:
                    extra.add(w)
            v.checked += 1
            h = s.cohomology()
            bad = {k: d for k, d in h.items() if k > p and d}
            if c not in expected_at:
                expected_at[c] = kont_slice(chart, p, c, mu, field).dim
            expected = expected_at[c]
            if bad or s.leaks or h.get(p, 0) != expected:
                v.fail({"chart": chart.to_json(), "mu": str(mu), "p": p, "differential": name, "slice": list(c),
                        "cohomology": {str(k): d for k, d in h.items() if d}, "expected_Hp": expected,
                        "leaks": s.leaks[:3]})
    v.details["enlargement"] = len(extra)
    return v


# ---------------------------------------------------------------------------
# Relative log complex and the short exact sequence
# ---------------------------------------------------------------------------


@dataclass
class RelativeLogComplex:
    """Omega^p_{X/S}(log D) with its quotient map from Omega^p(log D)."""

    space: GradedSheafSpace

    def quotient_map(self, a: Weight) -> Matrix:
        """Matrix of the projection Omega^p(log D)_a -> Omega^p_{X/S}(log D)_a."""
        q = self.space.slice(a)
        src = log_slice(self.space.chart, self.space.p, a, field=self.space.field)
        cols = [q.coordinates(v) for v in src.basis()]
        return Matrix(self.space.field, q.dim, len(cols), cols)

    def reduced_basis(self, a: Weight) -> List[Vector]:
        """delta_J with J avoiding the first pole coordinate (uses sum e_i delta_i = 0)."""
        ch = self.space.chart
        J_ok = allowed_J(ch, a, self.space.p)
        if not in_range(ch, a, (0,) * ch.ell):
            return []
        Js = combos(ch.n, self.space.p)
        return [{j: self.space.field.one} for j in J_ok if 0 not in Js[j]]


def relative_log_complex(chart: ChartData, p: int, field: Field = QQ) -> RelativeLogComplex:
    if chart.ell < 1:
        raise ValueError("the relative complex needs at least one pole coordinate")
    return RelativeLogComplex(GradedSheafSpace(chart, "rel", p, field=field))


def verify_C1_sequence(chart: ChartData, window: Iterable[Weight], field: Field = QQ) -> Verdict:
    """Termwise exactness of 0 -> Omega_f -> Omega(log D) -> reduced relative forms -> 0.

    Per multidegree and degree: the kernel of the projection equals Omega_f
    computed from the kernel definition, dimensions add up, d preserves
    Omega_f, (Omega(log D)/g, dg/g ^) is acyclic and the image of dg/g ^ in it
    has the dimension of the reduced relative forms.  Since the filtration is
    the stupid one, termwise exactness gives exactness on every step.
    """
    v = Verdict("C1_sequence")
    n = chart.n
    k = kappa(chart, field)
    for a in window:
        a = tuple(a)
        v.checked += 1
        quotients = []
        for p in range(n + 1):
            mid = log_slice(chart, p, a, field=field)
            sub = kont_slice_kernel(chart, p, a, 0, field)
            ker_rho = relbar_denominator(chart, p, a, field).intersection(mid)
            q = Quotient(mid, ker_rho)
            quotients.append(q)
            if not (sub == ker_rho and sub.dim + q.dim == mid.dim):
                v.fail({"chart": chart.to_json(), "slice": list(a), "degree": p, "what": "exactness",
                        "dims": [sub.dim, mid.dim, q.dim]})
            dsub = Subspace(field, [wedge_one_form(n, p, tuple(field(x) for x in a), b) for b in sub.basis()])
            if p < n and not dsub.is_subspace_of(kont_slice_kernel(chart, p + 1, a, 0, field)):
                v.fail({"chart": chart.to_json(), "slice": list(a), "degree": p, "what": "d preserves Omega_f"})
        # (Omega(log D)/g Omega(log D), dg/g ^) is acyclic, and the image of
        # dg/g ^ into it is the reduced relative quotient
        bars = [Quotient(log_slice(chart, p, a, field=field), log_slice(chart, p, _sub(a, chart.evec), field=field))
                for p in range(n + 1)]
        mats = []
        for p in range(n):
            src, tgt = bars[p], bars[p + 1]
            mats.append(Matrix(field, tgt.dim, src.dim, [tgt.coordinates(wedge_one_form(n, p, k, r)) for r in src.reps]))
        cx = CochainComplex(field, 0, tuple(b.dim for b in bars), tuple(mats))
        h = cohomology_dims(cx)
        if any(h.values()):
            v.fail({"chart": chart.to_json(), "slice": list(a), "what": "acyclicity",
                    "cohomology": {str(kk): d for kk, d in h.items() if d}})
        for p in range(n):
            if rank(mats[p]) != quotients[p].dim:
                v.fail({"chart": chart.to_json(), "slice": list(a), "degree": p, "what": "image of dg/g"})
    v.details["filtration"] = "sigma^{>=p} is termwise, so the sequence restricts to every F^p"
    return v


# ---------------------------------------------------------------------------
# Quotient lemma
# ---------------------------------------------------------------------------


@dataclass
class LemmaReport:
    passed: bool
    p: int
    dimension: int
    expected: int
    by_slice: Dict[Weight, int]
    basis: List[MonomialLogForm]

    def to_json(self) -> dict:
        return {"passed": self.passed, "p": self.p, "dimension": self.dimension, "expected": self.expected,
                "nonzero_slices": [list(a) for a, d in sorted(self.by_slice.items()) if d]}


def quotient_lemma_rhs(chart: ChartData, p: int, field: Field = QQ) -> int:
    """dim of wedge^p<dx/x, dy/y> modulo (sum dx_i/x_i) ^ wedge^(p-1), by rank."""
    N = chart.ell + chart.m
    if p > N:
        return 0
    allp = combos(N, p)
    if p == 0:
        return 1
    s = tuple(field.one if i < chart.ell else field.zero for i in range(N))
    cols = [wedge_one_form(N, p - 1, s, {j: field.one}) for j in range(len(combos(N, p - 1)))]
    return len(allp) - rank(Matrix(field, len(allp), len(cols), cols))


def quotient_cohomology_lemma(chart: ChartData, p: int, window: Iterable[Weight], field: Field = QQ) -> LemmaReport:
    """H^p of Omega(log D)/Omega_h with d, for h = x_1...x_l, against the closed formula."""
    if any(x != 1 for x in chart.e):
        raise ValueError("the quotient lemma needs all e_i = 1")
    n = chart.n
    by_slice = {}
    basis = []
    for a in window:
        a = tuple(a)
        qs = [Quotient(log_slice(chart, j, a, field=field), kont_slice(chart, j, a, 0, field))
              for j in range(n + 1)]
        d = tuple(field(x) for x in a)
        mats = []
        for j in range(n):
            cols = [qs[j + 1].coordinates(wedge_one_form(n, j, d, r)) for r in qs[j].reps]
            mats.append(Matrix(field, qs[j + 1].dim, qs[j].dim, cols))
        cx = CochainComplex(field, 0, tuple(q.dim for q in qs), tuple(mats))
        h = cohomology_dims(cx).get(p, 0)
        by_slice[a] = h
        if h and all(x == 0 for x in a):
            basis = [MonomialLogForm.from_slice(field, n, a, p, r) for r in qs[p].reps]
    total = sum(by_slice.values())
    expected = quotient_lemma_rhs(chart, p, field)
    concentrated = all(d == 0 for a, d in by_slice.items() if any(a))
    return LemmaReport(total == expected and concentrated, p, total, expected, by_slice, basis)
