from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from irrhodge.exactalg import QQ, GF, Subspace
from irrhodge.localmodel import (
    ChartData, GradedSheafSpace, MonomialLogForm, WindowError, basis_of, fyu_step, fyu_strict_step, gr_complex,
    kont_log_row, kont_slice, kont_slice_kernel, log_slice, nabla, quotient_cohomology_lemma, relative_log_complex,
    twisted_space, verify_C1_sequence, verify_gr_acyclic, verify_gr_support, verify_kont_log, window_l1,
)
from irrhodge.filtcx import cohomology_dims

X1 = ChartData(1, 0, 0, (1,))


def mono(a, J=(), c=1):
    return MonomialLogForm.monomial(QQ, a, J, c)


def test_chart_validation():
    with pytest.raises(ValueError):
        ChartData(1, 0, 0, (0,))
    with pytest.raises(ValueError):
        ChartData(2, 0, 0, (1,))
    assert ChartData(1, 1, 1, (2,)).n == 3


def test_kont_basis_examples():
    k0 = GradedSheafSpace(X1, "kont", 0)
    assert basis_of(k0, (1,)) == [mono((1,))]
    assert basis_of(k0, (0,)) == []
    assert basis_of(GradedSheafSpace(X1, "kont", 1), (0,)) == [mono((0,), (0,))]
    b = basis_of(GradedSheafSpace(ChartData(2, 0, 0, (1, 1)), "kont", 1), (0, 0))
    assert len(b) == 1 and b[0] == mono((0, 0), (0,)) + mono((0, 0), (1,))


def test_window_enforced():
    sp = GradedSheafSpace(X1, "log", 0, window=frozenset({(0,)}))
    with pytest.raises(WindowError):
        basis_of(sp, (1,))


def test_nabla_examples():
    two = ChartData(2, 0, 0, (1, 1))
    one = mono((0, 0))
    assert one.df_wedge(two) == mono((-1, -1), (0,), -1) + mono((-1, -1), (1,), -1)
    f = mono((2, 3), (1,))
    assert f.d() == mono((2, 3), (0, 1), 2)
    # nabla(x) = x dx/x - dx/x on the chart l=1, e=(1)
    r = nabla(mono((1,)), X1)
    assert r == mono((1,), (0,)) - mono((0,), (0,))
    assert GradedSheafSpace(X1, "kont", 1).contains(r)


def test_free_coordinates_render_as_dz():
    ch = ChartData(0, 0, 1, ())
    assert "dz1" in mono((1,), (0,)).render(ch)
    # dz is regular, z^0 dz/z is not
    assert log_slice(ch, 1, (0,)).dim == 0 and log_slice(ch, 1, (1,)).dim == 1


def test_fyu_step_examples():
    e2 = ChartData(1, 0, 0, (2,))
    assert fyu_step(X1, 0, 0).numerator((0,)).dim == 1
    assert fyu_step(X1, -1, 0).numerator((-1,)).dim == 1
    assert fyu_step(X1, 2, 1).numerator((5,)).dim == 0
    # the truncation rule zeroes O([-P/2 * 2]); the untruncated twist gives x-exponent >= 1
    assert fyu_step(e2, Fraction(1, 2), 0).zero
    u = twisted_space(e2, Fraction(-1, 2), 0)
    assert u.numerator((0,)).dim == 0 and u.numerator((1,)).dim == 1


def test_fyu_monotone_and_jumps():
    ch = ChartData(2, 0, 0, (2, 3))
    grid = [Fraction(j, 6) for j in range(-12, 19)]
    for k in range(3):
        for a in window_l1(2, 4):
            for lam0, lam in zip(grid, grid[1:]):
                prev = fyu_step(ch, lam0, k).numerator(a)
                cur = fyu_step(ch, lam, k).numerator(a)
                assert cur.is_subspace_of(prev)
                if cur.dim != prev.dim:
                    # F^lam0 differs from F^(lam0 + epsilon) only at lam0 in k + (1/e_i)Z
                    assert any((lam0 * e).denominator == 1 for e in ch.e)


def test_strict_step_is_union_above():
    ch = ChartData(1, 1, 0, (3,))
    for lam in [Fraction(j, 3) for j in range(-3, 7)]:
        for k in range(3):
            for a in window_l1(2, 4):
                s = fyu_strict_step(ch, lam, k).numerator(a)
                t = fyu_step(ch, lam + Fraction(1, 12), k).numerator(a)
                assert s == t


def test_kont_log_examples():
    assert verify_kont_log(X1, 0, 0, window_l1(1, 6)).passed
    ch = ChartData(2, 0, 0, (1, 2))
    v = verify_kont_log(ch, Fraction(1, 2), 1, window_l1(2, 5))
    assert v.passed and v.checked > 0
    bad = verify_kont_log(ch, Fraction(1, 2), 1, window_l1(2, 5), e_override=(0, 0))
    assert not bad.passed


def test_kont_log_row_is_complex_for_all_twists():
    ch = ChartData(1, 1, 1, (2,))
    for tw in [(1, 1), (0, 1), (1, 0), (2, -3)]:
        for c in window_l1(3, 3):
            kont_log_row(ch, Fraction(1, 2), 0, c, twist=tw)  # d o d = 0 is checked on construction


def test_gr_examples():
    assert verify_gr_acyclic(X1, -1, window_l1(1, 6)).passed
    # at lambda = 0 the degree-0 term of gr^0 is all of O and H^0 is x*O = Omega_f^0
    g = gr_complex(X1, 0, window_l1(1, 6))
    coh = g.cohomology_by_slice()
    assert {a: h[0] for a, h in coh.items() if h[0]} == {(a,): 1 for a in range(1, 7)}
    e2 = ChartData(1, 0, 0, (2,))
    assert verify_gr_support(e2, Fraction(1, 2), window_l1(1, 6)).passed


def test_gr_direct_sum_matches_slices():
    ch = ChartData(1, 1, 0, (2,))
    g = gr_complex(ch, Fraction(1, 2), window_l1(2, 4))
    total = cohomology_dims(g.direct_sum())
    per = {}
    for h in g.cohomology_by_slice().values():
        for k, d in h.items():
            per[k] = per.get(k, 0) + d
    assert all(total.get(k, 0) == per.get(k, 0) for k in set(total) | set(per))


def test_gr_window_closure():
    ch = ChartData(1, 0, 0, (1,))
    with pytest.raises(WindowError):
        gr_complex(ch, -1, [(0,)], enlarge=False)
    assert gr_complex(ch, -1, [(0,)]).enlargement >= 1


def test_relative_examples():
    rel = relative_log_complex(X1, 1)
    assert rel.space.slice((0,)).dim == 0
    two = relative_log_complex(ChartData(2, 0, 0, (1, 1)), 1)
    assert two.space.slice((0, 0)).dim == 1
    assert len(two.reduced_basis((0, 0))) == 1
    with pytest.raises(ValueError):
        relative_log_complex(ChartData(0, 1, 0, ()), 1)
    # (dg/g ^) followed by the projection is zero
    m = two.quotient_map((0, 0))
    assert m.nrows == 1 and m.ncols == 2
    assert not m.apply({0: QQ(1), 1: QQ(1)})


def test_C1_examples():
    assert verify_C1_sequence(X1, window_l1(1, 6)).passed
    e2 = ChartData(1, 0, 0, (2,))
    assert verify_C1_sequence(e2, window_l1(1, 6)).passed
    bar = GradedSheafSpace(e2, "relbar", 0)
    assert [a for a in range(-2, 7) if bar.slice((a,)).dim] == [0, 1]
    assert verify_C1_sequence(ChartData(2, 0, 0, (1, 1)), window_l1(2, 4)).passed


def test_quotient_lemma_examples():
    assert quotient_cohomology_lemma(ChartData(2, 0, 0, (1, 1)), 1, window_l1(2, 4)).dimension == 1
    r = quotient_cohomology_lemma(ChartData(1, 1, 0, (1,)), 1, window_l1(2, 4))
    assert r.passed and r.dimension == 1 and len(r.basis) == 1
    assert quotient_cohomology_lemma(X1, 0, window_l1(1, 4)).dimension == 1
    with pytest.raises(ValueError):
        quotient_cohomology_lemma(ChartData(1, 0, 0, (2,)), 0, window_l1(1, 2))


charts = st.builds(
    lambda ell, m, pz, e: ChartData(ell, m, pz, tuple(e[:ell])),
    st.integers(1, 2), st.integers(0, 1), st.integers(0, 1), st.lists(st.integers(1, 3), min_size=2, max_size=2))


@settings(max_examples=40, deadline=None)
@given(charts, st.integers(-3, 3), st.integers(0, 3))
def test_kont_generators_match_kernel_definition(ch, shift, p):
    mu = Fraction(shift, 2)
    for a in window_l1(ch.n, 3):
        gen = kont_slice(ch, p, a, mu)
        ker = kont_slice_kernel(ch, p, a, mu)
        assert gen == ker


@settings(max_examples=40, deadline=None)
@given(charts, st.integers(-2, 2), st.integers(-2, 2))
def test_nabla_squared_zero_and_degree_bookkeeping(ch, u, v):
    n = ch.n
    for a in window_l1(n, 2):
        for p in range(n + 1):
            for J in [(0,), tuple(range(min(p, n)))]:
                f = MonomialLogForm.monomial(QQ, a, J)
                assert nabla(nabla(f, ch, (u, v)), ch, (u, v)).is_zero()
                for (b, _), _c in f.d().components().items():
                    assert b == a
                for (b, _), _c in f.df_wedge(ch).components().items():
                    assert b == tuple(x - y for x, y in zip(a, ch.evec))


def test_over_prime_field():
    ch = ChartData(1, 1, 0, (1,))
    assert verify_C1_sequence(ch, window_l1(2, 3), field=GF(5)).passed
