import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from irrhodge.exactalg import (
    GF, QQ, DimensionError, Matrix, Poly, PolyMatrix, Quotient, Subspace, dense_to_vec, induced_map,
    kernel_basis, poly_det, preimage, rank, relations, smith_normal_form, solve_in_span, subspace_ops,
    vec_combination,
)


def test_rank_examples():
    assert rank(Matrix.identity(QQ, 2)) == 2
    assert rank(Matrix.from_dense(QQ, [[1, 2], [2, 4]])) == 1
    assert rank(Matrix.zeros(QQ, 3, 5)) == 0


def test_kernel_examples():
    ker = kernel_basis(Matrix.from_dense(QQ, [[1, 2], [2, 4]]))
    assert len(ker) == 1
    v = ker[0]
    assert v[0] * (-1) - v[1] * 2 == 0  # proportional to (2, -1)
    assert kernel_basis(Matrix.identity(QQ, 3)) == []


def test_kernel_over_f5_matches_enumeration():
    F = GF(5)
    m = Matrix.from_dense(F, [[1, 1, 1]])
    ker = kernel_basis(m)
    assert len(ker) == 2
    brute = sum(1 for x in itertools.product(range(5), repeat=3) if sum(x) % 5 == 0)
    assert brute == 25 == 5 ** len(ker)
    for v in ker:
        assert sum(int(a) for a in v) % 5 == 0
    assert rank(Matrix.from_dense(F, ker)) == 2


def test_prime_check():
    with pytest.raises(ValueError):
        GF(9)
    assert GF(7)(10) == 3
    assert GF(7)(1) / GF(7)(3) == 5


def test_subspace_examples():
    ops = subspace_ops(QQ, [[1, 0]], [[0, 1]])
    assert ops["sum"].dim == 2 and ops["intersection"].dim == 0
    ops = subspace_ops(QQ, [[1, 2, 3], [0, 1, 1]], [[1, 3, 4], [1, 1, 2]])
    assert ops["intersection"].dim == 2 and ops["a_in_b"] and ops["b_in_a"]
    with pytest.raises(DimensionError):
        subspace_ops(QQ, [[1, 0]], [[1, 0, 0]])


def _random_vec(rng, n, lo=-3, hi=3):
    return [rng.randint(lo, hi) for _ in range(n)]


def test_planted_intersection():
    rng = random.Random(7)
    for _ in range(20):
        common = [_random_vec(rng, 6) for _ in range(2)]
        a = common + [_random_vec(rng, 6)]
        b = common + [_random_vec(rng, 6) for _ in range(2)]
        ops = subspace_ops(QQ, a, b)
        sa = Subspace(QQ, [dense_to_vec(QQ, v) for v in a])
        sb = Subspace(QQ, [dense_to_vec(QQ, v) for v in b])
        assert ops["intersection"].dim >= rank(Matrix.from_dense(QQ, common))
        assert ops["sum"].dim + ops["intersection"].dim == sa.dim + sb.dim
        for v in common:
            assert ops["intersection"].contains(dense_to_vec(QQ, v))


def test_quotient_and_induced_map():
    big = Subspace(QQ, [{0: QQ(1)}, {1: QQ(1)}, {2: QQ(1)}])
    small = Subspace(QQ, [{0: QQ(1), 1: QQ(1)}])
    q = Quotient(big, small)
    assert q.dim == 2
    assert q.coordinates({0: QQ(1), 1: QQ(1)}) == {}
    # the swap of e0 and e1 preserves small and induces a map on the quotient
    swap = lambda v: {({0: 1, 1: 0}.get(k, k)): a for k, a in v.items()}
    m = induced_map(swap, q, q)
    assert rank(m) == 2


def test_preimage_and_solve():
    op = lambda v: {0: v.get(0, 0) + v.get(1, 0)} if v.get(0, 0) + v.get(1, 0) else {}
    dom = Subspace(QQ, [{0: QQ(1)}, {1: QQ(1)}])
    ker = preimage(QQ, op, dom, Subspace(QQ))
    assert ker.dim == 1 and ker.contains({0: QQ(1), 1: QQ(-1)})
    c = solve_in_span(QQ, [{0: QQ(1)}, {0: QQ(1), 1: QQ(1)}], {0: QQ(2), 1: QQ(3)})
    assert vec_combination([c.get(0, 0), c.get(1, 0)], [{0: QQ(1)}, {0: QQ(1), 1: QQ(1)}]) == {0: 2, 1: 3}
    assert solve_in_span(QQ, [{0: QQ(1)}], {1: QQ(1)}) is None


matrices = st.integers(1, 8).flatmap(
    lambda r: st.integers(1, 8).flatmap(
        lambda c: st.lists(st.lists(st.integers(-3, 3), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=500, deadline=None)
@given(matrices, st.sampled_from([0, 2, 3, 5]))
def test_rank_nullity(rows, p):
    field = QQ if p == 0 else GF(p)
    m = Matrix.from_dense(field, rows)
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == m.ncols
    assert rank(m.transpose()) == rank(m)
    for v in ker:
        assert not m.apply(dense_to_vec(field, v))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.integers(-2, 2), min_size=5, max_size=5), min_size=1, max_size=6),
       st.lists(st.lists(st.integers(-2, 2), min_size=5, max_size=5), min_size=1, max_size=6))
def test_modular_law(a, b):
    ops = subspace_ops(QQ, a, b)
    da = rank(Matrix.from_dense(QQ, a))
    db = rank(Matrix.from_dense(QQ, b))
    assert ops["sum"].dim + ops["intersection"].dim == da + db


def test_relations_count():
    vecs = [{0: QQ(1)}, {0: QQ(2)}, {1: QQ(1)}, {0: QQ(1), 1: QQ(1)}]
    rels = relations(QQ, vecs)
    assert len(rels) == 2
    for r in rels:
        assert not vec_combination([r.get(i, 0) for i in range(4)], vecs)


def _pm(entries):
    return PolyMatrix.from_coeffs(QQ, entries)


def _check_snf(m):
    res = smith_normal_form(m)
    assert res.U @ m @ res.V == res.D
    for i in range(res.D.nrows):
        for j in range(res.D.ncols):
            if i != j or i >= len(res.factors):
                assert not res.D.rows[i][j]
    for d1, d2 in zip(res.factors, res.factors[1:]):
        assert not (d2 % d1)
    du, dv = poly_det(res.U), poly_det(res.V)
    assert du.deg == 0 and dv.deg == 0
    return res


def test_snf_examples():
    res = _check_snf(_pm([[[0, 1], []], [[], [0, 0, 1]]]))
    assert [f.c for f in res.factors] == [(0, 1), (0, 0, 1)]
    res = _check_snf(PolyMatrix.identity(QQ, 2))
    assert [f.deg for f in res.factors] == [0, 0]
    res = _check_snf(_pm([[[0, 1], [1]], [[], [0, 1]]]))
    assert [f.c for f in res.factors] == [(1,), (0, 0, 1)]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.randoms(use_true_random=False))
def test_snf_random(r, c, rnd):
    entries = [[[rnd.randint(-2, 2) for _ in range(rnd.randint(0, 3))] for _ in range(c)] for _ in range(r)]
    _check_snf(_pm(entries))


def test_poly_division():
    a = Poly(QQ, [1, 0, 1])
    b = Poly(QQ, [1, 1])
    q, r = divmod(a, b)
    assert q * b + r == a and r.deg < b.deg
