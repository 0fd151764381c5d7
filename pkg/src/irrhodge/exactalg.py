"""Exact linear algebra over Q and F_p, and Smith normal form over k[h].

Vectors are sparse dictionaries mapping integer keys to field elements.  Keys
need not be contiguous or non-negative, which lets callers index coordinates
by Laurent exponents directly.  Every routine is exact; there is no floating
point anywhere in the package.

The central primitive is :class:`Subspace`, a fully reduced row echelon form
built by incremental insertion.  Rank, kernels, sums, intersections, preimages
and quotient coordinates are all derived from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import gmpy2

Vector = Dict[int, object]


class DimensionError(ValueError):
    """Raised when operands live in incompatible ambient spaces."""


# ---------------------------------------------------------------------------
# Fields
# ---------------------------------------------------------------------------


class Fp:
    """An element of the prime field F_p."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _other(self, o) -> int:
        if type(o) is Fp:
            return o.v
        if isinstance(o, Fraction):
            return o.numerator * pow(o.denominator, -1, self.p)
        return int(o)

    def __add__(self, o):
        return Fp(self.v + self._other(o), self.p)

    __radd__ = __add__

    def __sub__(self, o):
        return Fp(self.v - self._other(o), self.p)

    def __rsub__(self, o):
        return Fp(self._other(o) - self.v, self.p)

    def __mul__(self, o):
        return Fp(self.v * self._other(o), self.p)

    __rmul__ = __mul__

    def __truediv__(self, o):
        d = self._other(o) % self.p
        if d == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Fp(self.v * pow(d, -1, self.p), self.p)

    def __rtruediv__(self, o):
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.p)
        return Fp(self._other(o) * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pow__(self, k: int):
        if k < 0:
            return Fp(pow(pow(self.v, -1, self.p), -k, self.p), self.p)
        return Fp(pow(self.v, k, self.p), self.p)

    def __eq__(self, o):
        if type(o) is Fp:
            return self.v == o.v and self.p == o.p
        try:
            return (self.v - self._other(o)) % self.p == 0
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return "%d (mod %d)" % (self.v, self.p)

    def __str__(self):
        return str(self.v)


class Field:
    """Base class for the two coefficient fields."""

    characteristic: int = 0
    name: str = ""

    def __call__(self, x):
        raise NotImplementedError

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def to_pair(self, a) -> Tuple[int, int]:
        """Integer pair (numerator, denominator) used in JSON documents."""
        raise NotImplementedError

    def from_pair(self, pair) -> object:
        if isinstance(pair, (list, tuple)):
            return self(Fraction(int(pair[0]), int(pair[1])))
        return self(pair)

    def __repr__(self):
        return self.name


class RationalField(Field):
    """The field Q, backed by gmpy2.mpq."""

    characteristic = 0
    name = "QQ"

    def __call__(self, x):
        if isinstance(x, Fraction):
            return gmpy2.mpq(x.numerator, x.denominator)
        if isinstance(x, str):
            return gmpy2.mpq(Fraction(x).numerator, Fraction(x).denominator)
        if type(x) is Fp:
            raise TypeError("cannot coerce an F_p element into QQ")
        return gmpy2.mpq(x)

    def to_pair(self, a):
        a = self(a)
        return (int(a.numerator), int(a.denominator))

    def to_fraction(self, a) -> Fraction:
        a = self(a)
        return Fraction(int(a.numerator), int(a.denominator))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


def is_prime(p: int) -> bool:
    """Deterministic trial-division primality test."""
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    q = 3
    while q * q <= p:
        if p % q == 0:
            return False
        q += 2
    return True


class PrimeField(Field):
    """The prime field F_p."""

    def __init__(self, p: int):
        p = int(p)
        if not is_prime(p):
            raise ValueError("modulus %d is not prime" % p)
        self.p = p
        self.characteristic = p
        self.name = "GF(%d)" % p

    def __call__(self, x):
        if type(x) is Fp:
            if x.p != self.p:
                raise TypeError("mixing F_%d and F_%d" % (x.p, self.p))
            return x
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError("denominator divisible by %d" % self.p)
            return Fp(x.numerator * pow(x.denominator, -1, self.p), self.p)
        if isinstance(x, str):
            return self(Fraction(x))
        if isinstance(x, type(gmpy2.mpq(0))):
            return self(Fraction(int(x.numerator), int(x.denominator)))
        return Fp(int(x), self.p)

    def to_pair(self, a):
        return (int(self(a).v), 1)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    """Return the (cached) prime field F_p."""
    return PrimeField(p)


def field_from_name(name: str) -> Field:
    """Parse ``"QQ"`` or ``"GF(p)"``."""
    if name == "QQ":
        return QQ
    if name.startswith("GF(") and name.endswith(")"):
        return GF(int(name[3:-1]))
    raise ValueError("unknown field %r" % name)


# ---------------------------------------------------------------------------
# Sparse vectors
# ---------------------------------------------------------------------------


def vec_axpy(y: Vector, a, x: Vector) -> Vector:
    """Return y + a*x as a new vector."""
    out = dict(y)
    for k, v in x.items():
        nv = out.get(k, 0) + a * v
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def vec_add(x: Vector, y: Vector) -> Vector:
    return vec_axpy(x, 1, y)


def vec_sub(x: Vector, y: Vector) -> Vector:
    return vec_axpy(x, -1, y)


def vec_scale(a, x: Vector) -> Vector:
    if not a:
        return {}
    return {k: a * v for k, v in x.items()}


def vec_combination(coeffs: Iterable, vectors: Sequence[Vector]) -> Vector:
    """Return sum_i coeffs[i] * vectors[i]."""
    out: Vector = {}
    for c, v in zip(coeffs, vectors):
        if c:
            for k, x in v.items():
                nv = out.get(k, 0) + c * x
                if nv:
                    out[k] = nv
                else:
                    out.pop(k, None)
    return out


def vec_shift(x: Vector, offset: int) -> Vector:
    return {k + offset: v for k, v in x.items()}


def dense_to_vec(field: Field, entries: Sequence) -> Vector:
    out: Vector = {}
    for i, a in enumerate(entries):
        a = field(a)
        if a:
            out[i] = a
    return out


def vec_to_dense(field: Field, v: Vector, n: int) -> list:
    out = [field.zero] * n
    for k, a in v.items():
        out[k] = a
    return out


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------


class Matrix:
    """Sparse matrix stored by columns.

    Attributes:
        field: coefficient field.
        nrows: number of rows.
        ncols: number of columns.
    """

    __slots__ = ("field", "nrows", "ncols", "_cols")

    def __init__(self, field: Field, nrows: int, ncols: int, columns: Sequence[Vector]):
        if len(columns) != ncols:
            raise DimensionError("expected %d columns, got %d" % (ncols, len(columns)))
        cols = []
        for c in columns:
            clean = {}
            for i, a in c.items():
                if not 0 <= i < nrows:
                    raise DimensionError("row index %d out of range %d" % (i, nrows))
                a = field(a)
                if a:
                    clean[i] = a
            cols.append(clean)
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self._cols = tuple(cols)

    @classmethod
    def from_dense(cls, field: Field, rows: Sequence[Sequence], ncols: Optional[int] = None) -> "Matrix":
        nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        cols: List[Vector] = [{} for _ in range(ncols)]
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise DimensionError("ragged matrix")
            for j, a in enumerate(row):
                a = field(a)
                if a:
                    cols[j][i] = a
        return cls(field, nrows, ncols, cols)

    @classmethod
    def zeros(cls, field: Field, nrows: int, ncols: int) -> "Matrix":
        return cls(field, nrows, ncols, [{} for _ in range(ncols)])

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, n, n, [{i: field.one} for i in range(n)])

    @property
    def columns(self) -> Tuple[Vector, ...]:
        return self._cols

    def column(self, j: int) -> Vector:
        return dict(self._cols[j])

    def entry(self, i: int, j: int):
        return self._cols[j].get(i, self.field.zero)

    def apply(self, v: Vector) -> Vector:
        """Return M v for a sparse column vector v."""
        out: Vector = {}
        for j, a in v.items():
            if a:
                for i, x in self._cols[j].items():
                    nv = out.get(i, 0) + a * x
                    if nv:
                        out[i] = nv
                    else:
                        out.pop(i, None)
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise DimensionError("shape mismatch %dx%d @ %dx%d" % (self.nrows, self.ncols, other.nrows, other.ncols))
        return Matrix(self.field, self.nrows, other.ncols, [self.apply(c) for c in other._cols])

    def transpose(self) -> "Matrix":
        cols: List[Vector] = [{} for _ in range(self.nrows)]
        for j, c in enumerate(self._cols):
            for i, a in c.items():
                cols[i][j] = a
        return Matrix(self.field, self.ncols, self.nrows, cols)

    def is_zero(self) -> bool:
        return not any(self._cols)

    def to_dense(self) -> list:
        rows = [[self.field.zero] * self.ncols for _ in range(self.nrows)]
        for j, c in enumerate(self._cols):
            for i, a in c.items():
                rows[i][j] = a
        return rows

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self._cols == other._cols

    def __repr__(self):
        return "Matrix(%s, %dx%d)" % (self.field, self.nrows, self.ncols)


# ---------------------------------------------------------------------------
# Echelon forms and subspaces
# ---------------------------------------------------------------------------


class Subspace:
    """A subspace stored as a fully reduced row echelon basis.

    Every stored row has coefficient 1 at its pivot key and the pivot keys of
    the other rows do not occur in it.  Insertion order is Markowitz-style:
    sparser generators are inserted first, which keeps fill-in small.

    Args:
        field: coefficient field.
        vectors: spanning vectors (dicts).
        ambient: optional ambient dimension; keys must lie in range(ambient).
        pivot_limit: if set, only keys below this bound may become pivots.
    """

    __slots__ = ("field", "ambient", "pivot_limit", "_rows")

    def __init__(self, field: Field, vectors: Iterable[Vector] = (), ambient: Optional[int] = None,
                 pivot_limit: Optional[int] = None):
        self.field = field
        self.ambient = ambient
        self.pivot_limit = pivot_limit
        self._rows: Dict[int, Vector] = {}
        for v in sorted(vectors, key=len):
            self._insert(v)

    # construction -----------------------------------------------------------
    def _insert(self, v: Vector) -> Optional[int]:
        if self.ambient is not None:
            for k in v:
                if not 0 <= k < self.ambient:
                    raise DimensionError("key %d outside ambient dimension %d" % (k, self.ambient))
        r = self.reduce(v)
        if not r:
            return None
        keys = r if self.pivot_limit is None else [k for k in r if k < self.pivot_limit]
        if not keys:
            return None
        piv = min(keys)
        inv = 1 / r[piv]
        r = {k: a * inv for k, a in r.items()}
        for row in self._rows.values():
            c = row.get(piv)
            if c:
                for k, a in r.items():
                    nv = row.get(k, 0) - c * a
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        self._rows[piv] = r
        return piv

    def copy(self) -> "Subspace":
        s = Subspace(self.field, ambient=self.ambient, pivot_limit=self.pivot_limit)
        s._rows = {k: dict(v) for k, v in self._rows.items()}
        return s

    # queries ------------------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self._rows)

    def __len__(self):
        return len(self._rows)

    @property
    def pivots(self) -> List[int]:
        return sorted(self._rows)

    def basis(self) -> List[Vector]:
        """Echelon basis ordered by pivot key."""
        return [dict(self._rows[k]) for k in sorted(self._rows)]

    def reduce(self, v: Vector) -> Vector:
        """Remainder of v modulo the subspace (unique normal form)."""
        out = dict(v)
        rows = self._rows
        for c in [c for c in out if c in rows]:
            a = out.get(c)
            if a:
                for k, x in rows[c].items():
                    nv = out.get(k, 0) - a * x
                    if nv:
                        out[k] = nv
                    else:
                        out.pop(k, None)
        return out

    def contains(self, v: Vector) -> bool:
        return not self.reduce(v)

    def __contains__(self, v: Vector) -> bool:
        return self.contains(v)

    def coordinates(self, v: Vector) -> List:
        """Coordinates of v in :meth:`basis`; raises if v is not in the span."""
        if self.reduce(v):
            raise ValueError("vector not in subspace")
        return [v.get(k, self.field.zero) for k in sorted(self._rows)]

    def coordinate_vector(self, v: Vector) -> Vector:
        """Sparse coordinate vector of v (indices follow :meth:`basis`)."""
        if self.reduce(v):
            raise ValueError("vector not in subspace")
        out = {}
        for i, k in enumerate(sorted(self._rows)):
            a = v.get(k)
            if a:
                out[i] = a
        return out

    def _check(self, other: "Subspace"):
        if self.ambient is not None and other.ambient is not None and self.ambient != other.ambient:
            raise DimensionError("ambient dimensions %d and %d differ" % (self.ambient, other.ambient))
        if self.field != other.field:
            raise DimensionError("fields %s and %s differ" % (self.field, other.field))

    def __add__(self, other: "Subspace") -> "Subspace":
        self._check(other)
        s = self.copy()
        s.pivot_limit = None
        for v in other._rows.values():
            s._insert(v)
        return s

    def is_subspace_of(self, other: "Subspace") -> bool:
        self._check(other)
        return all(other.contains(v) for v in self._rows.values())

    def intersection(self, other: "Subspace") -> "Subspace":
        self._check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.field, ambient=self.ambient)
        a = self.basis()
        b = other.basis()
        rels = relations(self.field, a + b)
        vecs = [vec_combination([r.get(i, 0) for i in range(len(a))], a) for r in rels]
        return Subspace(self.field, vecs, ambient=self.ambient)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.dim == other.dim and self.is_subspace_of(other)

    def __repr__(self):
        return "Subspace(%s, dim=%d)" % (self.field, self.dim)


def span(field: Field, vectors: Iterable[Vector], ambient: Optional[int] = None) -> Subspace:
    return Subspace(field, vectors, ambient=ambient)


def _max_key(vectors: Iterable[Vector]) -> int:
    m = 0
    for v in vectors:
        if v:
            m = max(m, max(v))
    return m


def relations(field: Field, vectors: Sequence[Vector], modulo: Optional[Subspace] = None) -> List[Vector]:
    """Basis of the coefficient vectors c with sum_i c_i v_i in ``modulo``.

    The result is a list of sparse vectors indexed by position in ``vectors``;
    their number is ``len(vectors) - rank`` (rank taken modulo ``modulo``).
    """
    extra = [] if modulo is None else list(modulo._rows.values())
    big = _max_key(list(vectors) + extra) + 1
    ech = Subspace(field, pivot_limit=big)
    for v in extra:
        ech._insert(v)
    out = []
    order = sorted(range(len(vectors)), key=lambda i: len(vectors[i]))
    for i in order:
        aug = dict(vectors[i])
        aug[big + i] = field.one
        r = ech.reduce(aug)
        if any(k < big for k in r):
            ech._insert(aug)
        else:
            out.append({k - big: a for k, a in r.items()})
    out.sort(key=lambda r: max(r))
    return out


def image_of(field: Field, op: Callable[[Vector], Vector], sub: Subspace) -> Subspace:
    """Image of a subspace under a linear map given as a callable."""
    return Subspace(field, [op(v) for v in sub.basis()])


def preimage(field: Field, op: Callable[[Vector], Vector], domain: Subspace, target: Subspace) -> Subspace:
    """{x in domain : op(x) in target}."""
    basis = domain.basis()
    images = [op(v) for v in basis]
    rels = relations(field, images, modulo=target)
    return Subspace(field, [vec_combination([r.get(i, 0) for i in range(len(basis))], basis) for r in rels],
                    ambient=domain.ambient)


def kernel_of(field: Field, op: Callable[[Vector], Vector], domain: Subspace) -> Subspace:
    """Kernel of a linear map restricted to ``domain``."""
    return preimage(field, op, domain, Subspace(field))


def solve_in_span(field: Field, vectors: Sequence[Vector], target: Vector,
                  modulo: Optional[Subspace] = None) -> Optional[Vector]:
    """Coefficients c with sum c_i v_i = target (mod ``modulo``), or None."""
    rels = relations(field, [dict(target)] + list(vectors), modulo=modulo)
    for r in rels:
        c0 = r.get(0)
        if c0:
            inv = -1 / c0
            return {i - 1: a * inv for i, a in r.items() if i > 0}
    return None


class Basis:
    """An explicit independent list of vectors with a coordinate map."""

    def __init__(self, field: Field, vectors: Sequence[Vector]):
        self.field = field
        self.vectors = [dict(v) for v in vectors]
        self._big_key = _max_key(self.vectors) + 1
        ech = Subspace(field, pivot_limit=self._big_key)
        for i, v in enumerate(self.vectors):
            aug = dict(v)
            aug[self._big_key + i] = field.one
            if ech._insert(aug) is None:
                raise ValueError("basis vectors are linearly dependent")
        self._ech = ech

    def __len__(self):
        return len(self.vectors)

    def coordinates(self, v: Vector) -> Vector:
        r = self._ech.reduce(v)
        out = {}
        for k, a in r.items():
            if k < self._big_key:
                raise ValueError("vector not in the span of the basis")
            out[k - self._big_key] = -a
        return out


class Quotient:
    """The quotient V/W of two nested subspaces with explicit coordinates.

    Representatives are basis vectors of V chosen greedily modulo W.
    """

    def __init__(self, big: Subspace, small: Subspace):
        if not small.is_subspace_of(big):
            raise ValueError("quotient requires small subspace inside big subspace")
        self.field = big.field
        self.big = big
        self.small = small
        probe = small.copy()
        reps = []
        for v in big.basis():
            if probe._insert(v) is not None:
                reps.append(v)
        self.reps = reps
        vecs = list(small._rows.values())
        self._big_key = _max_key(vecs + reps) + 1
        ech = Subspace(self.field, pivot_limit=self._big_key)
        for v in vecs:
            ech._insert(v)
        for i, v in enumerate(reps):
            aug = dict(v)
            aug[self._big_key + i] = self.field.one
            ech._insert(aug)
        self._ech = ech

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coordinates(self, v: Vector) -> Vector:
        """Sparse coordinates of the class of v (v must lie in the big space)."""
        r = self._ech.reduce(v)
        out = {}
        for k, a in r.items():
            if k < self._big_key:
                raise ValueError("vector not in the numerator space")
            out[k - self._big_key] = -a
        return out

    def lift(self, coords: Vector) -> Vector:
        return vec_combination([coords.get(i, 0) for i in range(self.dim)], self.reps)

    def is_zero(self, v: Vector) -> bool:
        return self.small.contains(v)


def induced_map(op: Callable[[Vector], Vector], source: Quotient, target: Quotient) -> Matrix:
    """Matrix of the map induced by ``op`` from source V1/W1 to target V2/W2.

    Raises:
        ValueError: if op(W1) is not inside W2 or op(V1) not inside V2.
    """
    for w in source.small.basis():
        if not target.small.contains(op(w)):
            raise ValueError("map does not preserve the subspaces")
    cols = [target.coordinates(op(r)) for r in source.reps]
    return Matrix(source.field, target.dim, source.dim, cols)


def rank(m: Matrix) -> int:
    """Rank by exact elimination."""
    return Subspace(m.field, m.columns).dim


def kernel_basis(m: Matrix) -> List[list]:
    """Dense basis of the right kernel of m; length is cols - rank."""
    rels = relations(m.field, list(m.columns))
    return [vec_to_dense(m.field, r, m.ncols) for r in rels]


def subspace_ops(field: Field, a: Sequence[Sequence], b: Sequence[Sequence]) -> dict:
    """Sum, intersection and inclusion data for two subspaces given by dense bases.

    Returns:
        dict with keys ``sum``, ``intersection`` (Subspace objects),
        ``a_in_b``, ``b_in_a`` (bools) and ``quotient_dim`` of (A+B)/B.
    """
    na = {len(v) for v in a}
    nb = {len(v) for v in b}
    dims = na | nb
    if len(dims) > 1:
        raise DimensionError("ambient dimensions differ: %s" % sorted(dims))
    n = dims.pop() if dims else 0
    sa = Subspace(field, [dense_to_vec(field, v) for v in a], ambient=n)
    sb = Subspace(field, [dense_to_vec(field, v) for v in b], ambient=n)
    total = sa + sb
    return {
        "sum": total,
        "intersection": sa.intersection(sb),
        "a_in_b": sa.is_subspace_of(sb),
        "b_in_a": sb.is_subspace_of(sa),
        "quotient_dim": Quotient(total, sb).dim,
    }


# ---------------------------------------------------------------------------
# Polynomials in h and Smith normal form
# ---------------------------------------------------------------------------


class Poly:
    """Univariate polynomial over a field, coefficients in ascending order."""

    __slots__ = ("field", "c")

    def __init__(self, field: Field, coeffs: Sequence = ()):
        cs = [field(a) for a in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.field = field
        self.c = tuple(cs)

    @classmethod
    def monomial(cls, field: Field, j: int, a=1) -> "Poly":
        return cls(field, [0] * j + [a])

    @classmethod
    def const(cls, field: Field, a) -> "Poly":
        return cls(field, [a])

    @property
    def deg(self) -> int:
        return len(self.c) - 1

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self):
        return bool(self.c)

    @property
    def lead(self):
        return self.c[-1]

    def __add__(self, o: "Poly") -> "Poly":
        n = max(len(self.c), len(o.c))
        z = self.field.zero
        return Poly(self.field, [(self.c[i] if i < len(self.c) else z) + (o.c[i] if i < len(o.c) else z)
                                 for i in range(n)])

    def __neg__(self) -> "Poly":
        return Poly(self.field, [-a for a in self.c])

    def __sub__(self, o: "Poly") -> "Poly":
        return self + (-o)

    def __mul__(self, o) -> "Poly":
        if not isinstance(o, Poly):
            return Poly(self.field, [a * o for a in self.c])
        if not self.c or not o.c:
            return Poly(self.field)
        out = [self.field.zero] * (len(self.c) + len(o.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    out[i + j] = out[i + j] + a * b
        return Poly(self.field, out)

    __rmul__ = __mul__

    def __divmod__(self, o: "Poly") -> Tuple["Poly", "Poly"]:
        if not o.c:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        q = [self.field.zero] * max(len(r) - len(o.c) + 1, 0)
        inv = 1 / o.lead
        while len(r) >= len(o.c) and r:
            shift = len(r) - len(o.c)
            coef = r[-1] * inv
            q[shift] = coef
            for j, b in enumerate(o.c):
                r[shift + j] = r[shift + j] - coef * b
            while r and not r[-1]:
                r.pop()
        return Poly(self.field, q), Poly(self.field, r)

    def __mod__(self, o: "Poly") -> "Poly":
        return divmod(self, o)[1]

    def monic(self) -> "Poly":
        return self * (1 / self.lead) if self.c else self

    def is_monomial(self) -> bool:
        return sum(1 for a in self.c if a) == 1

    def valuation(self) -> int:
        for i, a in enumerate(self.c):
            if a:
                return i
        raise ValueError("zero polynomial has no valuation")

    def __eq__(self, o):
        if isinstance(o, Poly):
            return self.c == o.c
        return self == Poly(self.field, [o])

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        if not self.c:
            return "0"
        terms = []
        for i, a in enumerate(self.c):
            if a:
                mono = "" if i == 0 else ("h" if i == 1 else "h^%d" % i)
                if mono and a == 1:
                    terms.append(mono)
                else:
                    terms.append(("%s" % a) + ("*" + mono if mono else ""))
        return " + ".join(terms)


class PolyMatrix:
    """Matrix over k[h] stored as a list of rows of :class:`Poly`."""

    def __init__(self, field: Field, rows: Sequence[Sequence[Poly]], ncols: Optional[int] = None):
        self.field = field
        self.rows = [list(r) for r in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else (ncols or 0)

    @classmethod
    def identity(cls, field: Field, n: int) -> "PolyMatrix":
        return cls(field, [[Poly.const(field, 1 if i == j else 0) for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_coeffs(cls, field: Field, rows: Sequence[Sequence[Sequence]]) -> "PolyMatrix":
        return cls(field, [[Poly(field, e) for e in r] for r in rows])

    def __matmul__(self, o: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != o.nrows:
            raise DimensionError("shape mismatch")
        zero = Poly(self.field)
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(o.ncols):
                acc = zero
                for k in range(self.ncols):
                    a = self.rows[i][k]
                    if a:
                        b = o.rows[k][j]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.field, out, o.ncols)

    def evaluate(self, h) -> Matrix:
        """Substitute a scalar for h."""
        rows = []
        for r in self.rows:
            row = []
            for e in r:
                acc = self.field.zero
                for a in reversed(e.c):
                    acc = acc * h + a
                row.append(acc)
            rows.append(row)
        return Matrix.from_dense(self.field, rows, self.ncols)

    def __eq__(self, o):
        return isinstance(o, PolyMatrix) and self.rows == o.rows and self.ncols == o.ncols

    def __repr__(self):
        return "PolyMatrix(%dx%d)" % (self.nrows, self.ncols)


def poly_det(m: PolyMatrix) -> Poly:
    """Determinant by fraction-free (Bareiss) elimination over k[h]."""
    n = m.nrows
    if n != m.ncols:
        raise DimensionError("determinant of a non-square matrix")
    if n == 0:
        return Poly.const(m.field, 1)
    a = [list(r) for r in m.rows]
    sign = 1
    prev = Poly.const(m.field, 1)
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return Poly(m.field)
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                q, r = divmod(num, prev)
                if r:
                    raise ArithmeticError("inexact Bareiss division")
                a[i][j] = q
        prev = a[k][k]
    return a[n - 1][n - 1] * sign


@dataclass(frozen=True)
class SNFResult:
    """Smith form U m V = diag(factors + zeros).

    Attributes:
        factors: the nonzero invariant factors, monic, each dividing the next.
        U: row transformation (invertible over k[h]).
        V: column transformation (invertible over k[h]).
        D: the diagonal matrix U m V.
    """

    factors: Tuple[Poly, ...]
    U: PolyMatrix
    V: PolyMatrix
    D: PolyMatrix


def smith_normal_form(m: PolyMatrix) -> SNFResult:
    """Smith normal form over k[h] by repeated degree-reducing division."""
    f = m.field
    a = [list(r) for r in m.rows]
    nr, nc = m.nrows, m.ncols
    U = PolyMatrix.identity(f, nr).rows
    V = PolyMatrix.identity(f, nc).rows

    def row_op(dst, src, q):  # row_dst -= q row_src
        for M in (a, U):
            M[dst] = [x - q * y for x, y in zip(M[dst], M[src])]

    def col_op(dst, src, q):  # col_dst -= q col_src
        for M in (a, V):
            for r in M:
                r[dst] = r[dst] - q * r[src]

    def swap_rows(i, j):
        for M in (a, U):
            M[i], M[j] = M[j], M[i]

    def swap_cols(i, j):
        for M in (a, V):
            for r in M:
                r[i], r[j] = r[j], r[i]

    factors = []
    t = 0
    while t < min(nr, nc):
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None or a[i][j].deg < best[0]):
                    best = (a[i][j].deg, i, j)
        if best is None:
            break
        _, i0, j0 = best
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            restart = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q, r = divmod(a[i][t], a[t][t])
                    row_op(i, t, q)
                    if r:
                        swap_rows(i, t)
                        restart = True
                        break
            if restart:
                continue
            for j in range(t + 1, nc):
                if a[t][j]:
                    q, r = divmod(a[t][j], a[t][t])
                    col_op(j, t, q)
                    if r:
                        swap_cols(j, t)
                        restart = True
                        break
            if restart:
                continue
            bad = None
            for i in range(t + 1, nr):
                for j in range(t + 1, nc):
                    if a[i][j] and (a[i][j] % a[t][t]):
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_op(t, bad, Poly.const(f, -1))
        lead_inv = 1 / a[t][t].lead
        for M in (a, U):
            M[t] = [x * lead_inv for x in M[t]]
        factors.append(a[t][t])
        t += 1
    return SNFResult(tuple(factors), PolyMatrix(f, U, nr), PolyMatrix(f, V, nc), PolyMatrix(f, a, nc))
