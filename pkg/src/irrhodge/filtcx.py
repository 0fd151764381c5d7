"""Finite filtered cochain complexes.

Covers cohomology, spectral sequence pages from the explicit subquotient
formula, the injectivity test for E1-degeneration with witness extraction,
the Rees complex over k[h] with its torsion, and the induced filtration on
cohomology.

Filtrations are decreasing and indexed by a finite increasing tuple of
rationals ``levels``.  Position ``p`` refers to ``levels[p]``.  For a real
``lam`` the step F^lam is the step at the smallest level >= lam, the whole
complex below ``levels[0]`` and zero above ``levels[-1]``.  The increasing
convention F_mu = F^{-mu} is offered as a view only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .exactalg import (
    QQ, Basis, Field, Matrix, Poly, PolyMatrix, Quotient, Subspace, Vector, dense_to_vec, field_from_name,
    preimage, smith_normal_form, vec_to_dense,
)


class ComplexError(ValueError):
    """Raised for malformed complexes or filtrations."""


# ---------------------------------------------------------------------------
# Complexes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CochainComplex:
    """A bounded cochain complex of finite-dimensional spaces.

    Attributes:
        field: coefficient field.
        lo: lowest degree.
        dims: dimension of each degree lo, lo+1, ...
        diffs: d(k) for k = lo .. hi-1, as matrices of shape dims[k+1] x dims[k].
    """

    field: Field
    lo: int
    dims: Tuple[int, ...]
    diffs: Tuple[Matrix, ...]

    def __post_init__(self):
        if len(self.diffs) != max(len(self.dims) - 1, 0):
            raise ComplexError("need %d differentials" % (len(self.dims) - 1))
        for i, m in enumerate(self.diffs):
            if (m.nrows, m.ncols) != (self.dims[i + 1], self.dims[i]):
                raise ComplexError("d(%d) has shape %dx%d" % (self.lo + i, m.nrows, m.ncols))
        for i in range(len(self.diffs) - 1):
            if not (self.diffs[i + 1] @ self.diffs[i]).is_zero():
                raise ComplexError("d(%d) o d(%d) != 0" % (self.lo + i + 1, self.lo + i))

    @classmethod
    def from_dense(cls, field: Field, lo: int, dims: Sequence[int], mats: Sequence[Sequence]) -> "CochainComplex":
        ms = [Matrix.from_dense(field, m, dims[i]) if dims[i + 1] else Matrix.zeros(field, 0, dims[i])
              for i, m in enumerate(mats)]
        return cls(field, lo, tuple(dims), tuple(ms))

    @property
    def hi(self) -> int:
        return self.lo + len(self.dims) - 1

    @property
    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def dim(self, k: int) -> int:
        return self.dims[k - self.lo] if self.lo <= k <= self.hi else 0

    def d(self, k: int) -> Matrix:
        if self.lo <= k < self.hi:
            return self.diffs[k - self.lo]
        return Matrix.zeros(self.field, self.dim(k + 1), self.dim(k))

    def full(self, k: int) -> Subspace:
        return Subspace(self.field, [{i: self.field.one} for i in range(self.dim(k))], ambient=self.dim(k))

    def zero(self, k: int) -> Subspace:
        return Subspace(self.field, ambient=self.dim(k))

    def apply_d(self, k: int, v: Vector) -> Vector:
        return self.d(k).apply(v)

    def image(self, k: int, sub: Subspace) -> Subspace:
        """d(k) applied to a subspace of degree k (lands in degree k+1)."""
        m = self.d(k)
        return Subspace(self.field, [m.apply(v) for v in sub.basis()], ambient=self.dim(k + 1))

    def total_dim(self) -> int:
        return sum(self.dims)


def cohomology_dim(c: CochainComplex, k: int) -> int:
    """dim ker d(k) - rank d(k-1)."""
    from .exactalg import rank
    if not c.lo <= k <= c.hi:
        raise ComplexError("degree %d outside [%d, %d]" % (k, c.lo, c.hi))
    return c.dim(k) - rank(c.d(k)) - rank(c.d(k - 1))


def cohomology_dims(c: CochainComplex) -> Dict[int, int]:
    return {k: cohomology_dim(c, k) for k in c.degrees}


def euler_characteristic(c: CochainComplex) -> int:
    return sum((-1) ** k * n for k, n in zip(c.degrees, c.dims))


# ---------------------------------------------------------------------------
# Filtered complexes
# ---------------------------------------------------------------------------


def _frac(x) -> Fraction:
    if isinstance(x, (list, tuple)):
        return Fraction(int(x[0]), int(x[1]))
    return Fraction(x)


@dataclass(frozen=True)
class FilteredCochainComplex:
    """A complex with a finite decreasing filtration by subcomplexes.

    Attributes:
        base: the underlying complex.
        levels: increasing rationals; ``levels[0]`` carries the whole complex.
        steps: ``steps[p][k - lo]`` is F^{levels[p]} in degree k.
    """

    base: CochainComplex
    levels: Tuple[Fraction, ...]
    steps: Tuple[Tuple[Subspace, ...], ...]

    def __post_init__(self):
        c = self.base
        if not self.levels:
            raise ComplexError("filtration needs at least one level")
        if any(a >= b for a, b in zip(self.levels, self.levels[1:])):
            raise ComplexError("levels must be strictly increasing")
        if len(self.steps) != len(self.levels):
            raise ComplexError("one step per level required")
        for k in c.degrees:
            if self.steps[0][k - c.lo].dim != c.dim(k):
                raise ComplexError("F at the lowest level must be the whole complex (degree %d)" % k)
        for p, step in enumerate(self.steps):
            for k in c.degrees:
                s = step[k - c.lo]
                if p + 1 < len(self.steps) and not self.steps[p + 1][k - c.lo].is_subspace_of(s):
                    raise ComplexError("filtration not decreasing at level %s, degree %d" % (self.levels[p + 1], k))
                if k < c.hi and not c.image(k, s).is_subspace_of(step[k + 1 - c.lo]):
                    raise ComplexError("F^%s is not a subcomplex at degree %d" % (self.levels[p], k))

    # constructors -----------------------------------------------------------
    @classmethod
    def from_bases(cls, base: CochainComplex, bases: Dict) -> "FilteredCochainComplex":
        """Build from {lambda: {k: [dense vectors]}}; the lowest level must span everything."""
        f = base.field
        levels = sorted(_frac(l) for l in bases)
        lookup = {_frac(l): v for l, v in bases.items()}
        steps = []
        for lam in levels:
            per = lookup[lam]
            row = []
            for k in base.degrees:
                vecs = per.get(k, per.get(str(k), []))
                row.append(Subspace(f, [dense_to_vec(f, v) for v in vecs], ambient=base.dim(k)))
            steps.append(tuple(row))
        return cls(base, tuple(levels), tuple(steps))

    @classmethod
    def trivial(cls, base: CochainComplex, levels: Sequence = (0, 1)) -> "FilteredCochainComplex":
        """F^{levels[0]} = base and zero at every higher level."""
        levels = tuple(_frac(l) for l in levels)
        steps = [tuple(base.full(k) for k in base.degrees)]
        steps += [tuple(base.zero(k) for k in base.degrees) for _ in levels[1:]]
        return cls(base, levels, tuple(steps))

    @classmethod
    def stupid(cls, base: CochainComplex) -> "FilteredCochainComplex":
        """sigma^{>=p}: F^p keeps degrees >= p."""
        levels = tuple(Fraction(p) for p in base.degrees)
        steps = tuple(tuple(base.full(k) if k >= p else base.zero(k) for k in base.degrees) for p in base.degrees)
        return cls(base, levels, steps)

    # access -------------------------------------------------------------------
    @property
    def length(self) -> int:
        return len(self.levels)

    @property
    def field(self) -> Field:
        return self.base.field

    def F(self, p: int, k: int) -> Subspace:
        """Step at position p (whole complex for p <= 0, zero for p >= length)."""
        c = self.base
        if not c.lo <= k <= c.hi:
            return Subspace(c.field, ambient=c.dim(k))
        if p <= 0:
            return self.steps[0][k - c.lo] if p == 0 else c.full(k)
        if p >= self.length:
            return c.zero(k)
        return self.steps[p][k - c.lo]

    def at(self, lam, k: int) -> Subspace:
        """F^lam in degree k for an arbitrary rational lam."""
        lam = _frac(lam)
        for p, l in enumerate(self.levels):
            if lam <= l:
                return self.F(p, k)
        return self.base.zero(k)

    def increasing_view(self, mu, k: int) -> Subspace:
        """F_mu := F^{-mu}."""
        return self.at(-_frac(mu), k)

    def subcomplex(self, p: int) -> CochainComplex:
        """F at position p as a complex in its own echelon basis."""
        c = self.base
        bases = [Basis(c.field, self.F(p, k).basis()) for k in c.degrees]
        mats = []
        for k in list(c.degrees)[:-1]:
            src = bases[k - c.lo]
            tgt = bases[k + 1 - c.lo]
            mats.append(Matrix(c.field, len(tgt), len(src), [tgt.coordinates(c.apply_d(k, v)) for v in src.vectors]))
        return CochainComplex(c.field, c.lo, tuple(len(b) for b in bases), tuple(mats))

    def refine(self, levels: Sequence) -> "FilteredCochainComplex":
        """Same filtration on a finer level set (steps constant in between)."""
        levels = tuple(sorted(set(_frac(l) for l in levels) | set(self.levels)))
        levels = tuple(l for l in levels if l >= self.levels[0])
        steps = tuple(tuple(self.at(l, k) for k in self.base.degrees) for l in levels)
        return FilteredCochainComplex(self.base, levels, steps)

    def shift(self, s) -> "FilteredCochainComplex":
        s = _frac(s)
        return FilteredCochainComplex(self.base, tuple(l + s for l in self.levels), self.steps)


def direct_sum(a: FilteredCochainComplex, b: FilteredCochainComplex) -> FilteredCochainComplex:
    """Direct sum of filtered complexes over the union of their level sets."""
    ca, cb = a.base, b.base
    if ca.field != cb.field:
        raise ComplexError("fields differ")
    lo, hi = min(ca.lo, cb.lo), max(ca.hi, cb.hi)
    f = ca.field
    dims = tuple(ca.dim(k) + cb.dim(k) for k in range(lo, hi + 1))
    mats = []
    for k in range(lo, hi):
        da, db = ca.d(k), cb.d(k)
        na1 = ca.dim(k + 1)
        cols = [dict(c) for c in da.columns] + [{i + na1: x for i, x in c.items()} for c in db.columns]
        mats.append(Matrix(f, dims[k + 1 - lo], dims[k - lo], cols))
    base = CochainComplex(f, lo, dims, tuple(mats))
    levels = sorted(set(a.levels) | set(b.levels))
    start = min(a.levels[0], b.levels[0])
    levels = [l for l in levels if l >= start]
    steps = []
    for lam in levels:
        row = []
        for k in range(lo, hi + 1):
            va = a.at(lam, k).basis()
            vb = b.at(lam, k).basis()
            shift = ca.dim(k)
            row.append(Subspace(f, list(va) + [{i + shift: x for i, x in v.items()} for v in vb], ambient=dims[k - lo]))
        steps.append(tuple(row))
    return FilteredCochainComplex(base, tuple(levels), tuple(steps))


# ---------------------------------------------------------------------------
# Spectral sequence
# ---------------------------------------------------------------------------


def _Z(f: FilteredCochainComplex, r: int, p: int, k: int) -> Subspace:
    """Z_r^p = F^p cap d^{-1}(F^{p+r}); Z_{-1}^p = F^p."""
    Fp = f.F(p, k)
    if r < 0:
        return Fp
    c = f.base
    return preimage(c.field, lambda v: c.apply_d(k, v), Fp, f.F(p + r, k + 1))


def _page_spaces(f: FilteredCochainComplex, r: int, p: int, k: int) -> Tuple[Subspace, Subspace]:
    num = _Z(f, r, p, k)
    b = f.base.image(k - 1, _Z(f, r - 1, p - r + 1, k - 1))
    den = _Z(f, r - 1, p + 1, k) + b
    return num, den


@dataclass(frozen=True)
class SpectralPage:
    """E_r page: dimensions keyed by (position p, q) with total degree p + q.

    Attributes:
        r: page number.
        levels: filtration levels (position p corresponds to levels[p]).
        entries: {(p, q): dim}.
        differentials: {(p, q): Matrix of d_r from E_r^{p,q} to E_r^{p+r,q-r+1}}.
    """

    r: int
    levels: Tuple[Fraction, ...]
    entries: Dict[Tuple[int, int], int]
    differentials: Dict[Tuple[int, int], Matrix] = dc_field(default_factory=dict)

    def total(self) -> int:
        return sum(self.entries.values())

    def total_in_degree(self, k: int) -> int:
        return sum(n for (p, q), n in self.entries.items() if p + q == k)

    def homology_dims(self) -> Dict[Tuple[int, int], int]:
        """Homology of (E_r, d_r), the predicted next page."""
        from .exactalg import rank
        out = {}
        for (p, q), n in self.entries.items():
            out_rank = rank(self.differentials[(p, q)]) if (p, q) in self.differentials else 0
            src = (p - self.r, q + self.r - 1)
            in_rank = rank(self.differentials[src]) if src in self.differentials else 0
            out[(p, q)] = n - out_rank - in_rank
        return out


def spectral_page(f: FilteredCochainComplex, r: int) -> SpectralPage:
    """E_r^{p,q} = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1}) with d_r matrices."""
    if r < 0:
        raise ComplexError("page number must be >= 0")
    c = f.base
    quots = {}
    for p in range(f.length):
        for k in c.degrees:
            num, den = _page_spaces(f, r, p, k)
            quots[(p, k)] = Quotient(num, den)
    entries = {(p, k - p): q.dim for (p, k), q in quots.items()}
    diffs = {}
    for (p, k), q in quots.items():
        tgt = quots.get((p + r, k + 1))
        if tgt is None or q.dim == 0:
            continue
        cols = [tgt.coordinates(c.apply_d(k, v)) for v in q.reps]
        diffs[(p, k - p)] = Matrix(c.field, tgt.dim, q.dim, cols)
    return SpectralPage(r, f.levels, entries, diffs)


def e_infinity(f: FilteredCochainComplex) -> SpectralPage:
    return spectral_page(f, f.length + 1)


# ---------------------------------------------------------------------------
# Degeneration, induced filtration, Rees complex
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A nonzero class of H^k(F^lam) that dies in H^k(base)."""

    lam: Fraction
    degree: int
    vector: Tuple

    def to_json(self, field: Field) -> dict:
        return {"lambda": [self.lam.numerator, self.lam.denominator], "degree": self.degree,
                "class": [list(field.to_pair(a)) for a in self.vector]}


@dataclass(frozen=True)
class DegenerationReport:
    verdict: bool
    witnesses: Tuple[Witness, ...]


def e1_degenerates(f: FilteredCochainComplex, all_witnesses: bool = False) -> DegenerationReport:
    """Injectivity of H^k(F^lam) -> H^k(base) for every level and degree."""
    c = f.base
    witnesses = []
    for k in c.degrees:
        boundaries = c.image(k - 1, c.full(k - 1))
        for p in range(1, f.length):
            Fk = f.F(p, k)
            cyc = preimage(c.field, lambda v: c.apply_d(k, v), Fk, c.zero(k + 1))
            killed = cyc.intersection(boundaries)
            local = c.image(k - 1, f.F(p, k - 1))
            for v in killed.basis():
                if not local.contains(v):
                    witnesses.append(Witness(f.levels[p], k, tuple(vec_to_dense(c.field, v, c.dim(k)))))
                    break
            if witnesses and not all_witnesses:
                return DegenerationReport(False, tuple(witnesses))
    return DegenerationReport(not witnesses, tuple(witnesses))


def induced_filtration_on_H(f: FilteredCochainComplex, k: int) -> List[Tuple[Fraction, int]]:
    """dim of the image of H^k(F^lam) in H^k(base), for each level."""
    c = f.base
    boundaries = c.image(k - 1, c.full(k - 1))
    out = []
    for p, lam in enumerate(f.levels):
        cyc = preimage(c.field, lambda v: c.apply_d(k, v), f.F(p, k), c.zero(k + 1))
        out.append((lam, (cyc + boundaries).dim - boundaries.dim))
    return out


def gr_dims_on_H(f: FilteredCochainComplex, k: int) -> List[Tuple[Fraction, int]]:
    steps = induced_filtration_on_H(f, k)
    return [(lam, n - (steps[i + 1][1] if i + 1 < len(steps) else 0)) for i, (lam, n) in enumerate(steps)]


@dataclass(frozen=True)
class ReesComplex:
    """The Rees complex on a filtration-adapted basis.

    Attributes:
        lo: lowest degree.
        weights: per degree, the position weight w(v) of each adapted basis vector.
        diffs: per degree k < hi, a PolyMatrix with entries c * h^(w(u) - w(v)).
        bases: the adapted bases (base coordinates).
    """

    field: Field
    lo: int
    weights: Tuple[Tuple[int, ...], ...]
    diffs: Tuple[PolyMatrix, ...]
    bases: Tuple[Tuple[Vector, ...], ...]

    def at(self, h) -> List[Matrix]:
        return [m.evaluate(self.field(h)) for m in self.diffs]


def _adapted_basis(f: FilteredCochainComplex, k: int) -> Tuple[List[Vector], List[int]]:
    vecs, weights = [], []
    probe = Subspace(f.field)
    for p in range(f.length - 1, -1, -1):
        for v in f.F(p, k).basis():
            if probe._insert(v) is not None:
                vecs.append(v)
                weights.append(p)
    return vecs, weights


def rees_complex(f: FilteredCochainComplex) -> ReesComplex:
    c = f.base
    field = c.field
    data = [_adapted_basis(f, k) for k in c.degrees]
    coords = [Basis(field, vecs) for vecs, _ in data]
    mats = []
    for k in list(c.degrees)[:-1]:
        src_vecs, src_w = data[k - c.lo]
        tgt_vecs, tgt_w = data[k + 1 - c.lo]
        rows = [[Poly(field) for _ in src_vecs] for _ in tgt_vecs]
        for j, v in enumerate(src_vecs):
            for i, a in coords[k + 1 - c.lo].coordinates(c.apply_d(k, v)).items():
                shift = tgt_w[i] - src_w[j]
                if shift < 0:
                    raise ComplexError("differential leaves the filtration")
                rows[i][j] = Poly.monomial(field, shift, a)
        mats.append(PolyMatrix(field, rows, len(src_vecs)))
    return ReesComplex(field, c.lo, tuple(tuple(w) for _, w in data), tuple(mats),
                       tuple(tuple(v) for v, _ in data))


@dataclass(frozen=True)
class ReesReport:
    torsion_free: bool
    torsion_exponents: Dict[int, Tuple[int, ...]]


def rees_strictness(f: FilteredCochainComplex) -> ReesReport:
    """h-torsion of Rees cohomology from the invariant factors of the differentials.

    Torsion of H^k is the non-unit part of the Smith form of d(k-1); on a
    graded complex every invariant factor is a power of h.
    """
    rc = rees_complex(f)
    torsion = {}
    for i, m in enumerate(rc.diffs):
        k = rc.lo + i + 1
        exps = []
        if m.nrows and m.ncols:
            for fac in smith_normal_form(m).factors:
                if fac.deg > 0:
                    if not fac.is_monomial():
                        raise ComplexError("non-monomial invariant factor %r" % fac)
                    exps.append(fac.deg)
        if exps:
            torsion[k] = tuple(sorted(exps))
    return ReesReport(not torsion, torsion)


@dataclass(frozen=True)
class EquivalenceCheck:
    degenerate: bool
    e1_total: int
    h_total: int
    torsion_free: bool

    @property
    def consistent(self) -> bool:
        return self.degenerate == (self.e1_total == self.h_total) == self.torsion_free


def triple_equivalence(f: FilteredCochainComplex) -> EquivalenceCheck:
    """Evaluate the three equivalent formulations of E1-degeneration."""
    deg = e1_degenerates(f).verdict
    e1 = spectral_page(f, 1).total()
    h = sum(cohomology_dims(f.base).values())
    return EquivalenceCheck(deg, e1, h, rees_strictness(f).torsion_free)


# ---------------------------------------------------------------------------
# Random complexes
# ---------------------------------------------------------------------------


def _random_invertible(rng: random.Random, field: Field, n: int) -> Matrix:
    while True:
        rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        m = Matrix.from_dense(field, rows, n)
        from .exactalg import rank
        if rank(m) == n:
            return m


def random_complex(rng: random.Random, field: Field = QQ, max_total: int = 12, max_len: int = 3) -> CochainComplex:
    """A random complex built from elementary pieces and a random change of basis."""
    length = rng.randint(1, max_len)
    budget = rng.randint(0, max_total)
    dims = [0] * length
    pieces = []  # (degree, kind) with kind 'h' (one-dim class) or 'e' (k -> k identity)
    while budget > 0:
        k = rng.randrange(length)
        if rng.random() < 0.5 or k == length - 1 or budget < 2:
            pieces.append((k, "h"))
            dims[k] += 1
            budget -= 1
        else:
            pieces.append((k, "e"))
            dims[k] += 1
            dims[k + 1] += 1
            budget -= 2
    cursor = [0] * length
    cols = [[{} for _ in range(dims[k])] for k in range(length)]
    for k, kind in pieces:
        if kind == "h":
            cursor[k] += 1
        else:
            cols[k][cursor[k]] = {cursor[k + 1]: field.one}
            cursor[k] += 1
            cursor[k + 1] += 1
    mats = [Matrix(field, dims[k + 1], dims[k], cols[k]) for k in range(length - 1)]
    changes = [_random_invertible(rng, field, n) for n in dims]
    inverses = []
    for m in changes:
        b = Basis(field, list(m.columns))
        inverses.append(Matrix(field, m.nrows, m.ncols, [b.coordinates({i: field.one}) for i in range(m.ncols)]))
    mats = [changes[k + 1] @ mats[k] @ inverses[k] for k in range(length - 1)]
    lo = rng.randint(-1, 1)
    return CochainComplex(field, lo, tuple(dims), tuple(mats))


def random_filtered_complex(rng: random.Random, field: Field = QQ, max_total: int = 12,
                            max_len: int = 4) -> FilteredCochainComplex:
    """Random flags closed under d, nested from the top level down."""
    c = random_complex(rng, field, max_total=max_total)
    length = rng.randint(1, max_len)
    steps: List[List[Subspace]] = [None] * length
    current = [c.zero(k) for k in c.degrees]
    for p in range(length - 1, 0, -1):
        for i, k in enumerate(c.degrees):
            n = c.dim(k)
            if n:
                for _ in range(rng.randint(0, 2)):
                    v = dense_to_vec(field, [rng.randint(-1, 1) for _ in range(n)])
                    current[i] = current[i] + Subspace(field, [v], ambient=n)
                if k > c.lo and c.dim(k - 1) and rng.random() < 0.7:
                    # plant a boundary whose source may stay outside the step
                    src = dense_to_vec(field, [rng.randint(-1, 1) for _ in range(c.dim(k - 1))])
                    current[i] = current[i] + Subspace(field, [c.apply_d(k - 1, src)], ambient=n)
        for i, k in enumerate(c.degrees):
            if k < c.hi:
                current[i + 1] = current[i + 1] + c.image(k, current[i])
        steps[p] = list(current)
    steps[0] = [c.full(k) for k in c.degrees]
    levels = sorted(rng.sample(range(-4, 8), length))
    denom = rng.choice([1, 1, 2, 3])
    return FilteredCochainComplex(c, tuple(Fraction(l, denom) for l in levels), tuple(tuple(s) for s in steps))


def planted_nondegenerate(field: Field = QQ) -> FilteredCochainComplex:
    """0 -> k<a> -> k<b> -> 0 with d(a) = b, F^1 = (0 -> k<b>) and F^2 = 0.

    The class of b is nonzero in H^1(F^1) but is a boundary in the whole complex.
    """
    base = CochainComplex.from_dense(field, 0, [1, 1], [[[1]]])
    return FilteredCochainComplex.from_bases(base, {0: {0: [[1]], 1: [[1]]}, 1: {1: [[1]]}, 2: {}})


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _matrix_json(field: Field, m: Matrix) -> list:
    return [[list(field.to_pair(a)) for a in row] for row in m.to_dense()]


def to_json(f: FilteredCochainComplex) -> dict:
    c = f.base
    field = c.field
    return {
        "field": field.name,
        "degrees": [c.lo, c.hi],
        "dims": list(c.dims),
        "d": [_matrix_json(field, m) for m in c.diffs],
        "filtration": [
            {"lambda": [l.numerator, l.denominator],
             "bases": {str(k): [[list(field.to_pair(a)) for a in vec_to_dense(field, v, c.dim(k))]
                                for v in f.F(p, k).basis()] for k in c.degrees}}
            for p, l in enumerate(f.levels)
        ],
    }


def from_json(doc: dict) -> FilteredCochainComplex:
    field = field_from_name(doc.get("field", "QQ"))
    lo, hi = doc["degrees"]
    dims = doc["dims"]
    if len(dims) != hi - lo + 1:
        raise ComplexError("dims do not match degree range")
    mats = [[[field.from_pair(a) for a in row] for row in m] for m in doc["d"]]
    base = CochainComplex.from_dense(field, lo, dims, mats)
    bases = {}
    for step in doc["filtration"]:
        lam = _frac(step["lambda"])
        bases[lam] = {int(k): [[field.from_pair(a) for a in v] for v in vs] for k, vs in step["bases"].items()}
    return FilteredCochainComplex.from_bases(base, bases)


def page_to_json(page: SpectralPage, field: Field) -> dict:
    return {
        "r": page.r,
        "entries": [{"p": p, "lambda": [page.levels[p].numerator, page.levels[p].denominator], "q": q, "dim": n}
                    for (p, q), n in sorted(page.entries.items())],
        "differentials": [{"p": p, "q": q, "matrix": _matrix_json(field, m)}
                          for (p, q), m in sorted(page.differentials.items())],
    }
