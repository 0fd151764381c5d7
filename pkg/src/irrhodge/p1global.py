"""Twisted de Rham complexes of a rational function on the projective line.

Sheaves are rank one and are written in a global frame: a section of a sheaf
of p-forms is ``L(z) / T(z) * dz^p`` with ``T = prod (z - q)^k_q`` over the
finite special points.  On the chart U0 = P^1 - {inf} the numerator L is a
polynomial, on U1 = P^1 - {0} it is a Laurent polynomial of degree at most
``top``, and on the overlap any Laurent polynomial.  Subsheaves (the steps of
a filtration) are cut out of their base sheaf by vanishing conditions at
finite points and a smaller ``top``.

The Cech total complex is truncated to Laurent windows chosen so that every
column is still quasi-isomorphic to its untruncated Cech complex; the
truncation is nevertheless certified by recomputing at a second window.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import comb, floor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .exactalg import QQ, Field, Matrix, Poly, Subspace, Vector, kernel_of, rank
from .filtcx import (
    CochainComplex, FilteredCochainComplex, cohomology_dims, e1_degenerates, gr_dims_on_H,
    induced_filtration_on_H, spectral_page,
)

INF = "inf"


class StabilizationError(RuntimeError):
    """Cohomology changed between the two truncation windows."""

    def __init__(self, msg: str, certificate: "Certificate"):
        super().__init__(msg)
        self.certificate = certificate


@dataclass(frozen=True)
class Certificate:
    """Dimensions computed at two truncation windows."""

    windows: Tuple[int, int]
    dims: Tuple[Tuple[int, ...], Tuple[int, ...]]

    @property
    def stable(self) -> bool:
        return self.dims[0] == self.dims[1]

    def to_json(self) -> dict:
        return {"windows": list(self.windows), "dims": [list(d) for d in self.dims], "stable": self.stable}


# ---------------------------------------------------------------------------
# Laurent polynomials as {exponent: coefficient}
# ---------------------------------------------------------------------------


def lp_add(a: Vector, b: Vector, s=1) -> Vector:
    out = dict(a)
    for k, c in b.items():
        v = out.get(k, 0) + (c if s == 1 else s * c)
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


def lp_mul(a: Vector, b: Vector) -> Vector:
    out: Vector = {}
    for i, x in a.items():
        for j, y in b.items():
            v = out.get(i + j, 0) + x * y
            if v:
                out[i + j] = v
            else:
                out.pop(i + j, None)
    return out


def lp_deriv(a: Vector) -> Vector:
    return {k - 1: c * k for k, c in a.items() if k and c * k}


def lp_scale(a: Vector, s) -> Vector:
    return {k: c * s for k, c in a.items() if c * s} if s else {}


def poly_to_lp(p: Poly) -> Vector:
    return {i: c for i, c in enumerate(p.c) if c}


def lp_to_poly(field: Field, a: Vector) -> Poly:
    if any(k < 0 for k in a):
        raise ValueError("negative exponent in a polynomial")
    top = max(a) if a else -1
    return Poly(field, [a.get(i, 0) for i in range(top + 1)])


def gbinom(j: int, t: int) -> int:
    """Generalized binomial coefficient j choose t (an integer for every integer j)."""
    if t < 0:
        return 0
    if j >= 0:
        return comb(j, t)
    return (-1) ** t * comb(t - j - 1, t)


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while b:
        a, b = b, a % b
    return a.monic() if a else a


def _linear(field: Field, q) -> Poly:
    return Poly(field, [-q, 1])


def rational_roots(p: Poly) -> Dict[object, int]:
    """Roots with multiplicity; raises ValueError unless p splits into linear factors."""
    field = p.field
    if p.deg < 0:
        raise ValueError("zero polynomial")
    roots: Dict[object, int] = {}
    rest = p
    if field == QQ:
        cands = _rational_candidates(p)
    else:
        cands = [field(i) for i in range(field.p)]
    for q in cands:
        lin = _linear(field, q)
        while rest.deg >= 1:
            quo, rem = divmod(rest, lin)
            if rem:
                break
            roots[q] = roots.get(q, 0) + 1
            rest = quo
    if rest.deg != 0:
        raise ValueError("denominator does not split into linear factors over %s" % field)
    return roots


def _rational_candidates(p: Poly) -> List:
    from math import gcd
    coeffs = [Fraction(int(c.numerator), int(c.denominator)) for c in p.c]
    den = 1
    for c in coeffs:
        den = den * c.denominator // gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    out = [QQ(0)] if ints[0] == 0 else []
    nz = next(i for i, c in enumerate(ints) if c)
    a0, an = abs(ints[nz]), abs(ints[-1])

    def divisors(n):
        return [d for d in range(1, n + 1) if n % d == 0]

    for a in divisors(a0):
        for b in divisors(an):
            for s in (1, -1):
                q = QQ(Fraction(s * a, b))
                if q not in out:
                    out.append(q)
    return out


# ---------------------------------------------------------------------------
# Problems
# ---------------------------------------------------------------------------


def _pkey(q):
    return (1, 0) if q == INF else (0, int(q) if not hasattr(q, "numerator") else Fraction(int(q.numerator), int(q.denominator)))


@dataclass(frozen=True)
class P1Problem:
    """A rational function f = num/den on P^1 with horizontal points H.

    Attributes:
        field: base field.
        num: ascending coefficients of the numerator.
        den: ascending coefficients of the denominator.
        poles: (point, multiplicity) pairs of the pole divisor P; points are
            field elements or INF.
        horizontal: points of H (disjoint from P).
        twist: default (u, v).
    """

    field: Field
    num: Tuple
    den: Tuple
    poles: Tuple[Tuple[object, int], ...]
    horizontal: Tuple[object, ...] = ()
    twist: Tuple = (1, 1)
    name: str = ""

    @classmethod
    def from_rational(cls, num: Sequence, den: Sequence = (1,), horizontal: Iterable = (), field: Field = QQ,
                      twist=(1, 1), name: str = "") -> "P1Problem":
        A = Poly(field, [field(c) for c in num])
        B = Poly(field, [field(c) for c in den])
        if not B:
            raise ValueError("zero denominator")
        g = poly_gcd(A, B)
        if g.deg > 0:
            A, _ = divmod(A, g)
            B, _ = divmod(B, g)
        lead = B.lead
        A = Poly(field, [c / lead for c in A.c])
        B = B.monic()
        poles = dict(rational_roots(B)) if B.deg > 0 else {}
        if A.deg > B.deg:
            poles[INF] = A.deg - B.deg
        if not poles:
            raise ValueError("f must be non-constant")
        hs = []
        for h in horizontal:
            h = INF if h in (INF, "oo", "infinity") else field(h)
            if h in poles:
                raise ValueError("horizontal point %s is a pole" % (h,))
            if h in hs:
                raise ValueError("horizontal points must be distinct")
            hs.append(h)
        pl = tuple(sorted(poles.items(), key=lambda t: _pkey(t[0])))
        return cls(field, tuple(A.c), tuple(B.c), pl, tuple(sorted(hs, key=_pkey)),
                   tuple(field(x) for x in twist), name)

    # geometry -----------------------------------------------------------------
    @property
    def A(self) -> Poly:
        return Poly(self.field, self.num)

    @property
    def B(self) -> Poly:
        return Poly(self.field, self.den)

    @property
    def pole_dict(self) -> Dict[object, int]:
        return dict(self.poles)

    @property
    def D(self) -> Tuple:
        return tuple(sorted([q for q, _ in self.poles] + list(self.horizontal), key=_pkey))

    @property
    def finite_special(self) -> Tuple:
        return tuple(q for q in self.D if q != INF)

    @property
    def max_e(self) -> int:
        return max(e for _, e in self.poles)

    def euler_dim(self) -> int:
        """sum (e_q + 1) over poles + |H| - 2: minus the Euler characteristic of H_dR(U)."""
        return sum(e + 1 for _, e in self.poles) + len(self.horizontal) - 2

    def default_truncation(self) -> int:
        return 4 * (sum(e for _, e in self.poles) + len(self.horizontal) + 4)

    def inverted(self) -> "P1Problem":
        """The same problem in the coordinate w = 1/z."""
        A, B = self.A, self.B
        a, b = A.deg, B.deg
        ra = Poly(self.field, list(reversed(A.c)))
        rb = Poly(self.field, list(reversed(B.c)))
        if b >= a:
            num = Poly(self.field, [0] * (b - a) + list(ra.c))
            den = rb
        else:
            num = ra
            den = Poly(self.field, [0] * (a - b) + list(rb.c))

        def inv(q):
            if q == INF:
                return self.field(0)
            return INF if q == 0 else 1 / q

        return P1Problem.from_rational(num.c, den.c, [inv(h) for h in self.horizontal], self.field, self.twist,
                                       self.name + " (z -> 1/z)" if self.name else "")

    def f_prime(self) -> Tuple[Poly, Poly]:
        """f' = (A'B - AB') / B^2."""
        A, B = self.A, self.B
        dA = lp_to_poly(self.field, lp_deriv(poly_to_lp(A)))
        dB = lp_to_poly(self.field, lp_deriv(poly_to_lp(B)))
        return dA * B - A * dB, B * B

    def to_json(self) -> dict:
        f = self.field
        return {"name": self.name, "field": str(f), "f": {"num": [f.to_pair(c) for c in self.num],
                                                          "den": [f.to_pair(c) for c in self.den]},
                "poles": [[_pt_json(f, q), e] for q, e in self.poles],
                "horizontal": [_pt_json(f, h) for h in self.horizontal]}


def _pt_json(field: Field, q):
    return INF if q == INF else field.to_pair(q)


def problem_from_json(d: dict, field: Optional[Field] = None) -> P1Problem:
    """Problem file entry: {"f": {"num": [...], "den": [...]}, "horizontal": [...]}.

    Coefficients are in ascending order of degree; entries may be integers,
    strings like "1/2", or [numerator, denominator] pairs.
    """
    from .exactalg import field_from_name
    field = field or field_from_name(d.get("field", "QQ"))

    def scalar(x):
        if isinstance(x, (list, tuple)):
            return field(Fraction(int(x[0]), int(x[1]))) if field == QQ else field(int(x[0])) / field(int(x[1]))
        if isinstance(x, str):
            if x in (INF, "oo", "infinity"):
                return INF
            fr = Fraction(x)
            return field(fr) if field == QQ else field(fr.numerator) / field(fr.denominator)
        return field(x)

    f = d["f"]
    twist = d.get("twist", (1, 1))
    return P1Problem.from_rational([scalar(x) for x in f["num"]], [scalar(x) for x in f.get("den", [1])],
                                   [scalar(h) for h in d.get("horizontal", [])], field,
                                   tuple(scalar(t) for t in twist), d.get("name", ""))


# ---------------------------------------------------------------------------
# Sheaves in global frames
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineSheaf:
    """A rank-one sheaf of p-forms given by pole bounds at every special point.

    Attributes:
        p: form degree.
        bounds: allowed pole order per point (negative means a forced zero);
            points not listed have bound 0.
    """

    p: int
    bounds: Tuple[Tuple[object, int], ...]

    @property
    def bdict(self) -> Dict[object, int]:
        return dict(self.bounds)

    def k(self, q) -> int:
        return self.bdict.get(q, 0)

    def frame_degree(self) -> int:
        return sum(b for q, b in self.bounds if q != INF)

    @property
    def top(self) -> int:
        """Largest degree of L allowed on U1."""
        return self.k(INF) + self.frame_degree() - 2 * self.p

    @property
    def degree(self) -> int:
        """Degree as a line bundle."""
        return sum(b for _, b in self.bounds) - 2 * self.p


def line_bundle_h(d: int) -> Tuple[int, int]:
    """(h^0, h^1) of O(d) on P^1."""
    return max(d + 1, 0), max(-d - 1, 0)


def _make_sheaf(p: int, bounds: Dict) -> LineSheaf:
    return LineSheaf(p, tuple(sorted(((q, b) for q, b in bounds.items() if b), key=lambda t: _pkey(t[0]))))


def kontsevich_sheaves(problem: P1Problem, alpha) -> Tuple[LineSheaf, LineSheaf]:
    """Omega_f^0([alpha P]) = O(-P + [alpha P]) and Omega_f^1([alpha P]) = Omega^1(log D)([alpha P])."""
    alpha = Fraction(alpha)
    b0, b1 = {}, {}
    for q, e in problem.poles:
        b0[q] = -e + floor(alpha * e)
        b1[q] = floor(alpha * e) + 1
    for h in problem.horizontal:
        b1[h] = 1
    return _make_sheaf(0, b0), _make_sheaf(1, b1)


def yu_sheaves(problem: P1Problem, lam) -> Tuple[Optional[LineSheaf], Optional[LineSheaf]]:
    """Degree 0 and 1 terms of F^lambda: Omega^k(log D)([(k - lambda) P])_+ (None for the zero sheaf)."""
    lam = Fraction(lam)
    out = []
    for k in (0, 1):
        mu = k - lam
        if mu < 0:
            out.append(None)
            continue
        b = {q: floor(mu * e) + k for q, e in problem.poles}
        if k == 1:
            for h in problem.horizontal:
                b[h] = 1
        out.append(_make_sheaf(k, b))
    return out[0], out[1]


def jump_grid(problem: P1Problem, lo, hi) -> List[Fraction]:
    """{j + r/e_i} in [lo, hi] over the pole multiplicities."""
    lo, hi = Fraction(lo), Fraction(hi)
    pts = set()
    for _, e in problem.poles:
        for j in range(floor(lo) - 1, floor(hi) + 2):
            for r in range(e):
                x = j + Fraction(r, e)
                if lo <= x <= hi:
                    pts.add(x)
    return sorted(pts)


# ---------------------------------------------------------------------------
# The Cech model
# ---------------------------------------------------------------------------


def _nabla_data(problem: P1Problem, s0: LineSheaf, s1: LineSheaf) -> Tuple[Vector, Vector, Vector]:
    """R = T1/T0, H = R T0'/T0 and G = R f' as polynomials (exponent dicts)."""
    field = problem.field
    R = Poly(field, [1])
    H = Poly(field, [])
    fin = [q for q in set(list(s0.bdict) + list(s1.bdict) + list(problem.finite_special)) if q != INF]
    cs = {}
    for q in fin:
        c = s1.k(q) - s0.k(q)
        if c < 0 or (s0.k(q) and c < 1):
            raise ValueError("frames are not compatible with the differential at %s" % (q,))
        cs[q] = c
        for _ in range(c):
            R = R * _linear(field, q)
    for q in fin:
        k0 = s0.k(q)
        if k0:
            quo, rem = divmod(R, _linear(field, q))
            assert not rem
            H = H + quo * Poly.const(field, field(k0))
    num, den = problem.f_prime()
    G, rem = divmod(R * num, den)
    if rem:
        raise ValueError("R f' is not a polynomial; the frames miss a pole")
    return poly_to_lp(R), poly_to_lp(H), poly_to_lp(G)


@dataclass
class _Part:
    """A block of coordinates: one Laurent window of one column on one chart."""

    name: str
    column: int
    lo: int
    hi: int
    offset: int = 0

    @property
    def size(self) -> int:
        return max(self.hi - self.lo + 1, 0)

    def index(self, j: int) -> int:
        if not self.lo <= j <= self.hi:
            raise IndexError("exponent %d outside window [%d, %d] of %s" % (j, self.lo, self.hi, self.name))
        return self.offset + j - self.lo

    def exps(self) -> range:
        return range(self.lo, self.hi + 1)


class CechModel:
    """Truncated Cech total complex of (K^0 -> K^1, u d + v df) for two line sheaves.

    Args:
        problem: the rational function and its divisor data.
        sheaves: (K^0, K^1); either may be None for the zero sheaf.
        twist: (u, v).
        N: truncation window.
    """

    def __init__(self, problem: P1Problem, sheaves: Tuple[Optional[LineSheaf], Optional[LineSheaf]],
                 twist=None, N: Optional[int] = None):
        self.problem = problem
        self.field = problem.field
        self.sheaves = sheaves
        f = self.field
        self.twist = tuple(f(x) for x in (twist if twist is not None else problem.twist))
        s0, s1 = sheaves
        if s0 is not None and s1 is not None:
            self.R, self.H, self.G = _nabla_data(problem, s0, s1)
        else:
            self.R = self.H = self.G = {}
        raise_by = max([k - 1 for k in self.R] + list(self.H) + list(self.G) + [0])
        needed = max([abs(s.top) for s in sheaves if s is not None] + [0]) + 2
        self.N = max(N if N is not None else problem.default_truncation(), needed)
        N = self.N
        self.windows = {0: (-N, N), 1: (-N - 1, N + raise_by)}
        parts: Dict[Tuple[int, str], _Part] = {}
        for c, s in enumerate(sheaves):
            lo, hi = self.windows[c]
            if s is None:
                parts[(c, "U0")] = _Part("U0", c, 0, -1)
                parts[(c, "U1")] = _Part("U1", c, 0, -1)
                parts[(c, "U01")] = _Part("U01", c, 0, -1)
            else:
                parts[(c, "U0")] = _Part("U0", c, 0, hi)
                parts[(c, "U1")] = _Part("U1", c, lo, s.top)
                parts[(c, "U01")] = _Part("U01", c, lo, hi)
        self.parts = parts
        self.layout = {0: [parts[(0, "U0")], parts[(0, "U1")]],
                       1: [parts[(0, "U01")], parts[(1, "U0")], parts[(1, "U1")]],
                       2: [parts[(1, "U01")]]}
        self.dims = {}
        for k, lst in self.layout.items():
            off = 0
            for part in lst:
                part.offset = off
                off += part.size
            self.dims[k] = off
        self.complex = self._build()

    # differential -------------------------------------------------------------
    def nabla(self, L: Vector) -> Vector:
        """u (R L' - H L) + v G L."""
        u, v = self.twist
        out: Vector = {}
        if u:
            out = lp_add(lp_mul(self.R, lp_deriv(L)), lp_mul(self.H, L), -1)
            out = lp_scale(out, u)
        if v:
            out = lp_add(out, lp_scale(lp_mul(self.G, L), v))
        return out

    def _embed(self, part: _Part, L: Vector, col: Vector, sign=1):
        for j, c in L.items():
            i = part.index(j)
            v = col.get(i, 0) + (c if sign == 1 else -c)
            if v:
                col[i] = v
            else:
                col.pop(i, None)

    def _build(self) -> CochainComplex:
        f = self.field
        one = f.one
        P = self.parts
        mats = []
        # degree 0: (s0, s1) -> (s1 - s0 on U01, nabla s0, nabla s1)
        cols = []
        for part in self.layout[0]:
            for j in part.exps():
                col: Vector = {}
                mono = {j: one}
                self._embed(P[(0, "U01")], mono, col, 1 if part.name == "U1" else -1)
                if self.sheaves[1] is not None:
                    tgt = P[(1, part.name)]
                    image = self.nabla(mono)
                    if any(not tgt.lo <= k <= tgt.hi for k in image):
                        raise ValueError("the differential leaves the sheaf on %s (exponent %d)" % (part.name, j))
                    self._embed(tgt, image, col)
                cols.append(col)
        mats.append(Matrix(f, self.dims[1], self.dims[0], cols))
        # degree 1: t on U01 of K^0 -> -nabla t; (s0, s1) of K^1 -> s1 - s0
        cols = []
        for part in self.layout[1]:
            for j in part.exps():
                col = {}
                mono = {j: one}
                if part.column == 0:
                    if self.sheaves[1] is not None:
                        self._embed(P[(1, "U01")], self.nabla(mono), col, -1)
                else:
                    self._embed(P[(1, "U01")], mono, col, 1 if part.name == "U1" else -1)
                cols.append(col)
        mats.append(Matrix(f, self.dims[2], self.dims[1], cols))
        return CochainComplex(f, 0, (self.dims[0], self.dims[1], self.dims[2]), tuple(mats))

    # subsheaves ---------------------------------------------------------------
    def _sub_part(self, part: _Part, base: LineSheaf, sub: Optional[LineSheaf]) -> List[Vector]:
        """Basis (global coordinates) of the sections of ``sub`` inside one part."""
        if sub is None or part.size == 0:
            return []
        f = self.field
        conds = []  # (q, order) vanishing conditions on L in the base frame
        for q in set(list(base.bdict) + list(sub.bdict)):
            if q == INF:
                continue
            d = base.k(q) - sub.k(q)
            if d < 0:
                raise ValueError("subsheaf exceeds its base at %s" % (q,))
            if d and (q != 0 or part.name == "U0"):
                conds.append((q, d))
        hi = part.hi
        if part.name == "U1":
            # own-frame top shifted by the degree of the frame quotient T_base / T_sub
            shift = sum(base.k(q) - sub.k(q) for q in set(base.bdict) | set(sub.bdict) if q != INF)
            hi = min(hi, sub.top + shift)
        exps = [j for j in part.exps() if j <= hi]
        zero_conds = {j for q, d in conds if q == 0 for j in range(d)}
        exps = [j for j in exps if j not in zero_conds]
        taylor = [(q, t) for q, d in conds if q != 0 for t in range(d)]
        if not taylor:
            return [{part.index(j): f.one} for j in exps]
        pos = {j: i for i, j in enumerate(exps)}

        def op(vec: Vector) -> Vector:
            out = {}
            for r, (q, t) in enumerate(taylor):
                s = f.zero
                for i, c in vec.items():
                    j = exps[i]
                    b = gbinom(j, t)
                    if b:
                        s = s + c * f(b) * q ** (j - t) if j - t >= 0 else s + c * f(b) / q ** (t - j)
                if s:
                    out[r] = s
            return out

        dom = Subspace(f, [{i: f.one} for i in range(len(exps))])
        ker = kernel_of(f, op, dom)
        return [{part.index(exps[i]): c for i, c in v.items()} for v in ker.basis()]

    def sub_subspaces(self, subs: Tuple[Optional[LineSheaf], Optional[LineSheaf]]) -> Dict[int, Subspace]:
        """Per total degree, the subspace of a subcomplex given by subsheaves of the columns."""
        out = {}
        for k, lst in self.layout.items():
            vecs = []
            for part in lst:
                base = self.sheaves[part.column]
                if base is None:
                    continue
                vecs.extend(self._sub_part(part, base, subs[part.column]))
            out[k] = Subspace(self.field, vecs, ambient=self.dims[k])
        return out


def _filtered(model: CechModel, levels: Sequence, subs_per_level: Sequence) -> FilteredCochainComplex:
    steps = []
    for subs in subs_per_level:
        sp = model.sub_subspaces(subs)
        steps.append(tuple(sp[k] for k in range(3)))
    return FilteredCochainComplex(model.complex, tuple(Fraction(x) for x in levels), tuple(steps))


# ---------------------------------------------------------------------------
# Kontsevich complexes and hypercohomology
# ---------------------------------------------------------------------------


def _check_alpha(alpha) -> Fraction:
    alpha = Fraction(alpha)
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    return alpha


def build_kontsevich(problem: P1Problem, alpha=0, twist=None, N: Optional[int] = None) -> FilteredCochainComplex:
    """Cech total complex of (Omega_f^*([alpha P]), u d + v df) with its stupid filtration."""
    alpha = _check_alpha(alpha)
    s0, s1 = kontsevich_sheaves(problem, alpha)
    model = CechModel(problem, (s0, s1), twist, N)
    f = _filtered(model, (0, 1), [(s0, s1), (None, s1)])
    return f


def kontsevich_model(problem: P1Problem, alpha=0, twist=None, N: Optional[int] = None) -> CechModel:
    alpha = _check_alpha(alpha)
    return CechModel(problem, kontsevich_sheaves(problem, alpha), twist, N)


def _dims(c: CochainComplex) -> Tuple[int, int, int]:
    h = cohomology_dims(c)
    return tuple(h.get(k, 0) for k in range(3))


@dataclass
class HypercohResult:
    dims: Tuple[int, int, int]
    certificate: Certificate

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "certificate": self.certificate.to_json()}


def hypercoh_dims(problem: P1Problem, alpha=0, twist=None, N: Optional[int] = None, delta: int = 5) -> HypercohResult:
    """dim H^k(P^1, (Omega_f^*([alpha P]), u d + v df)), certified at windows N and N + delta."""
    m1 = kontsevich_model(problem, alpha, twist, N)
    m2 = kontsevich_model(problem, alpha, twist, m1.N + delta)
    d1, d2 = _dims(m1.complex), _dims(m2.complex)
    cert = Certificate((m1.N, m2.N), (d1, d2))
    if d1 != d2:
        raise StabilizationError("hypercohomology not stable: %s at N=%d, %s at N=%d" % (d1, m1.N, d2, m2.N), cert)
    return HypercohResult(d1, cert)


@dataclass
class SigmaE1Check:
    passed: bool
    entries: Dict[Tuple[int, int], int]
    expected: Dict[Tuple[int, int], int]
    degrees: Tuple[int, int]


def sigma_e1_check(problem: P1Problem, alpha=0, N: Optional[int] = None) -> SigmaE1Check:
    """E1 of the stupid filtration against h^q(O(d)) for the line-bundle degrees of Omega_f^p."""
    f = build_kontsevich(problem, alpha, N=N)
    e1 = spectral_page(f, 1)
    s0, s1 = kontsevich_sheaves(problem, alpha)
    expected = {}
    for p, s in enumerate((s0, s1)):
        h0, h1 = line_bundle_h(s.degree)
        expected[(p, 0)] = h0
        expected[(p, 1)] = h1
    got = {key: e1.entries.get(key, 0) for key in expected}
    return SigmaE1Check(got == expected, got, expected, (s0.degree, s1.degree))


# ---------------------------------------------------------------------------
# Independent oracle on the affine curve U
# ---------------------------------------------------------------------------


def taylor_shift(p: Poly, q) -> List:
    """Coefficients of p(q + t) in t."""
    f = p.field
    n = len(p.c)
    out = [f.zero] * n
    for j, c in enumerate(p.c):
        if not c:
            continue
        qp = f.one
        powers = [f.one]
        for _ in range(j):
            qp = qp * q
            powers.append(qp)
        for t in range(j + 1):
            out[t] = out[t] + c * f(comb(j, t)) * powers[j - t]
    return out


def partial_fractions(num: Poly, den: Dict[object, int]) -> Tuple[Vector, Dict[Tuple[object, int], object]]:
    """num / prod (z - q)^m  =  polynomial part + sum c_(q,j) (z - q)^(-j)."""
    f = num.field
    D = Poly(f, [1])
    for q, m in den.items():
        for _ in range(m):
            D = D * _linear(f, q)
    quo, rem = divmod(num, D)
    poly_part = poly_to_lp(quo)
    pf = {}
    for q, m in den.items():
        other = Poly(f, [1])
        for q2, m2 in den.items():
            if q2 != q:
                for _ in range(m2):
                    other = other * _linear(f, q2)
        a = taylor_shift(rem, q)[:m] + [f.zero] * max(0, m - len(rem.c))
        b = taylor_shift(other, q)[:m] + [f.zero] * max(0, m - len(other.c))
        # series division a / b up to t^(m-1)
        s = []
        inv = 1 / b[0]
        for i in range(m):
            acc = a[i] if i < len(a) else f.zero
            for k in range(1, i + 1):
                acc = acc - b[k] * s[i - k]
            s.append(acc * inv)
        for i, c in enumerate(s):
            if c:
                pf[(q, m - i)] = c
    return poly_part, pf


@dataclass
class OracleResult:
    dims: Tuple[int, int]
    certificate: Certificate

    def to_json(self) -> dict:
        return {"dims": list(self.dims), "certificate": self.certificate.to_json()}


def _oracle_once(problem: P1Problem, N: int, twist) -> Tuple[int, int]:
    f = problem.field
    u, v = (f(x) for x in twist)
    inf_in_D = INF in problem.D
    finite = problem.finite_special
    poles = problem.pole_dict
    fn, fd = problem.f_prime()
    r = {q: (poles[q] + 1 if q in poles else 1) for q in problem.D}
    # domain: partial-fraction basis of functions regular on U
    dom = []
    if inf_in_D:
        dom += [("z", j) for j in range(N + 1)]
    else:
        dom += [("z", 0)]
    dom += [(q, j) for q in finite for j in range(1, N + 1)]
    # target coordinates
    tkeys = []
    if inf_in_D:
        tkeys += [("z", j) for j in range(N + r[INF] - 1)]
    tkeys += [(q, j) for q in finite for j in range(1, N + r[q] + 1)]
    tindex = {k: i for i, k in enumerate(tkeys)}
    fd_roots = rational_roots(fd) if fd.deg > 0 else {}
    cols = []
    for kind, j in dom:
        if kind == "z":
            a = Poly.monomial(f, j)
            bden: Dict = {}
        else:
            a = Poly(f, [1])
            bden = {kind: j}
        b = Poly(f, [1])
        for q, m in bden.items():
            for _ in range(m):
                b = b * _linear(f, q)
        da = lp_to_poly(f, lp_deriv(poly_to_lp(a)))
        db = lp_to_poly(f, lp_deriv(poly_to_lp(b)))
        # u (a'b - ab') / b^2 + v (fn / fd) (a / b) over the denominator b^2 fd
        numer = (da * b - a * db) * fd * Poly.const(f, u) + fn * a * b * Poly.const(f, v)
        den: Dict = {}
        for q, m in bden.items():
            den[q] = den.get(q, 0) + 2 * m
        for q, m in fd_roots.items():
            den[q] = den.get(q, 0) + m
        pp, pf = partial_fractions(numer, den)
        col = {}
        for e, c in pp.items():
            key = ("z", e)
            if key not in tindex:
                raise ValueError("oracle image leaves the target window at z^%d" % e)
            col[tindex[key]] = c
        for key, c in pf.items():
            if key not in tindex:
                raise ValueError("oracle image leaves the target window at %s" % (key,))
            col[tindex[key]] = c
        cols.append(col)
    m = Matrix(f, len(tkeys), len(dom), cols)
    rk = rank(m)
    tdim = len(tkeys) - (0 if inf_in_D else 1)  # residues sum to zero when inf is in U
    return len(dom) - rk, tdim - rk


def direct_de_rham_oracle(problem: P1Problem, twist=(1, 1), N: Optional[int] = None, delta: int = 5) -> OracleResult:
    """dims of (O(U) -> Omega^1(U), u d + v df) in a partial-fraction basis, certified at two windows."""
    N = N if N is not None else sum(e for _, e in problem.poles) + len(problem.horizontal) + 4
    d1 = _oracle_once(problem, N, twist)
    d2 = _oracle_once(problem, N + delta, twist)
    cert = Certificate((N, N + delta), (d1, d2))
    if d1 != d2:
        raise StabilizationError("oracle not stable: %s vs %s" % (d1, d2), cert)
    return OracleResult(d1, cert)


# ---------------------------------------------------------------------------
# Checks on instances
# ---------------------------------------------------------------------------


@dataclass
class UVReport:
    passed: bool
    table: List[Tuple[Tuple, Tuple[int, int, int]]]
    oracle: Optional[Tuple[int, int]]
    zero_twist_matches_sum: bool

    def to_json(self, field: Field = QQ) -> dict:
        return {"passed": self.passed, "table": [{"uv": [str(x) for x in uv], "dims": list(d)} for uv, d in self.table],
                "oracle": list(self.oracle) if self.oracle else None,
                "zero_twist_matches_sum": self.zero_twist_matches_sum}


DEFAULT_UV = ((1, 1), (1, 0), (0, 1), (0, 0), (2, 3))


def verify_uv_independence(problem: P1Problem, alpha=0, samples: Sequence = DEFAULT_UV,
                           N: Optional[int] = None) -> UVReport:
    """Same hypercohomology dims for every (u, v); the (1, 1) row equals the oracle."""
    f = problem.field
    samples = [tuple(f(x) for x in uv) for uv in samples]
    required = [tuple(f(x) for x in uv) for uv in ((1, 1), (1, 0), (0, 1), (0, 0))]
    if any(r not in samples for r in required):
        raise ValueError("samples must contain (1,1), (1,0), (0,1) and (0,0)")
    table = [(uv, hypercoh_dims(problem, alpha, uv, N).dims) for uv in samples]
    same = len({d for _, d in table}) == 1
    oracle = direct_de_rham_oracle(problem).dims
    d11 = dict(table)[tuple(f(x) for x in (1, 1))]
    match = d11[:2] == oracle and d11[2] == 0
    s0, s1 = kontsevich_sheaves(problem, alpha)
    h = [line_bundle_h(s0.degree), line_bundle_h(s1.degree)]
    sums = (h[0][0], h[0][1] + h[1][0], h[1][1])
    zero = dict(table)[(f.zero, f.zero)] == sums
    return UVReport(same and match and zero, table, oracle, zero)


@dataclass
class DecompositionReport:
    passed: bool
    k: int
    dim_dR: int
    terms: Dict[str, int]
    degrees: Tuple[int, int]

    def to_json(self) -> dict:
        return {"passed": self.passed, "k": self.k, "dim_dR": self.dim_dR, "terms": self.terms,
                "bundle_degrees": list(self.degrees)}


def decomposition_check(problem: P1Problem, alpha=0, k: int = 1, N: Optional[int] = None) -> DecompositionReport:
    """dim H^k_dR = sum_{p+q=k} h^q(Omega_f^p(alpha)), with h^q from the Cech columns."""
    alpha = _check_alpha(alpha)
    oracle = direct_de_rham_oracle(problem).dims
    dim_dR = oracle[k] if k < 2 else 0
    s0, s1 = kontsevich_sheaves(problem, alpha)
    terms = {}
    ok = True
    for p, s in enumerate((s0, s1)):
        q = k - p
        if not 0 <= q <= 1:
            continue
        m = CechModel(problem, (s, None) if p == 0 else (None, s), (0, 0), N)
        # the column cohomology of a single sheaf
        col = _dims(m.complex)
        hq = col[q + p]
        terms["h^%d(Omega_f^%d)" % (q, p)] = hq
        ok = ok and hq == line_bundle_h(s.degree)[q]
    return DecompositionReport(ok and sum(terms.values()) == dim_dR, k, dim_dR, terms, (s0.degree, s1.degree))


@dataclass
class IrregularHodgeReport:
    """Irregular Hodge filtration on H^k_dR.

    Attributes:
        steps: (lambda, dim of the image of H^k(F^lambda)).
        gr: (lambda, dim gr^lambda) on the grid.
        jumps: multiset of jumps (lambda repeated by gr dimension).
        injective: injectivity of H^k(F^lambda) -> H^k_dR at every level.
        full_below_zero: F^lambda H^k = H^k for lambda <= 0.
        sum_gr_matches: sum of gr dims equals dim H^k_dR.
    """

    k: int
    steps: List[Tuple[Fraction, int]]
    gr: List[Tuple[Fraction, int]]
    jumps: List[Fraction]
    injective: bool
    witnesses: List[dict]
    full_below_zero: bool
    dim_H: int
    oracle_dim: int
    sum_gr_matches: bool
    certificate: Certificate

    @property
    def passed(self) -> bool:
        return self.injective and self.full_below_zero and self.sum_gr_matches and self.dim_H == self.oracle_dim

    def to_json(self) -> dict:
        return {"k": self.k, "passed": self.passed, "steps": [[str(l), n] for l, n in self.steps],
                "gr": [[str(l), n] for l, n in self.gr if n], "jumps": [str(j) for j in self.jumps],
                "injective": self.injective, "witnesses": self.witnesses, "full_below_zero": self.full_below_zero,
                "dim_H": self.dim_H, "oracle_dim": self.oracle_dim, "sum_gr_matches": self.sum_gr_matches,
                "certificate": self.certificate.to_json()}


LAMBDA_BASE = Fraction(-1)


def yu_filtered_complex(problem: P1Problem, twist=None, N: Optional[int] = None,
                        lam_base=LAMBDA_BASE) -> FilteredCochainComplex:
    """F^Yu on the Cech model, over the jump grid from lam_base up to 1 + max e."""
    lam_base = Fraction(lam_base)
    levels = [lam_base] + [x for x in jump_grid(problem, lam_base, 1 + problem.max_e) if x > lam_base]
    base = yu_sheaves(problem, lam_base)
    subs = [yu_sheaves(problem, lam) for lam in levels]
    tops = [abs(s.top) for pair in subs for s in pair if s is not None]
    N = max(N if N is not None else problem.default_truncation(), max(tops + [0]) + 2)
    model = CechModel(problem, base, twist, N)
    return _filtered(model, levels, subs)


def irregular_hodge(problem: P1Problem, k: int = 1, twist=None, N: Optional[int] = None,
                    delta: int = 5) -> IrregularHodgeReport:
    """Steps of F^Yu on H^k_dR, injectivity of H^k(F^lambda) -> H^k_dR and the jumps."""
    f1 = yu_filtered_complex(problem, twist, N)
    steps = induced_filtration_on_H(f1, k)
    N1 = _model_N(problem, N)
    f2 = yu_filtered_complex(problem, twist, N1 + delta)
    steps2 = induced_filtration_on_H(f2, k)
    d1 = tuple(n for _, n in steps)
    d2 = tuple(n for _, n in steps2)
    cert = Certificate((N1, N1 + delta), (d1, d2))
    if d1 != d2:
        raise StabilizationError("filtration steps not stable", cert)
    rep = e1_degenerates(f1, all_witnesses=True)
    wit = [w.to_json(f1.field) for w in rep.witnesses if w.degree == k]
    h = cohomology_dims(f1.base).get(k, 0)
    gr = gr_dims_on_H(f1, k)
    jumps = [lam for lam, n in gr for _ in range(n)]
    full = all(n == h for lam, n in steps if lam <= 0)
    # injectivity in degree k: dim H^k(F^lambda) equals the dimension of its image
    inj = not wit
    oracle = direct_de_rham_oracle(problem).dims
    odim = oracle[k] if k < 2 else 0
    return IrregularHodgeReport(k, steps, gr, jumps, inj, wit, full, h, odim, sum(n for _, n in gr) == h, cert)


def alpha_grid(problem: P1Problem) -> List[Fraction]:
    """alpha in [0, 1) where some floor(alpha e_i) jumps."""
    return [a for a in jump_grid(problem, 0, 1) if a < 1]


def _model_N(problem: P1Problem, N: Optional[int]) -> int:
    levels = [LAMBDA_BASE] + jump_grid(problem, LAMBDA_BASE, 1 + problem.max_e)
    tops = [abs(s.top) for lam in levels for s in yu_sheaves(problem, lam) if s is not None]
    return max(N if N is not None else problem.default_truncation(), max(tops + [0]) + 2)


def standard_instances(field: Field = QQ) -> List[P1Problem]:
    """The instances used by the acceptance run."""
    return [
        P1Problem.from_rational([0, 1], [1], (), field, name="z on A1"),
        P1Problem.from_rational([0, 1], [1], (0,), field, name="z on Gm"),
        P1Problem.from_rational([1, 0, 1], [0, 1], (), field, name="z + 1/z"),
        P1Problem.from_rational([0, 0, 1], [1], (), field, name="z^2 on A1"),
        P1Problem.from_rational([0, 0, 1], [-1, 1], (), field, name="z^2/(z-1)"),
        P1Problem.from_rational([0, 0, 0, 1], [-1, 1], (), field, name="z^3/(z-1)"),
    ]
