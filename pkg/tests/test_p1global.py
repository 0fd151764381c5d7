import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from irrhodge.exactalg import GF, QQ, Poly
from irrhodge.filtcx import euler_characteristic
from irrhodge.p1global import (
    INF, Certificate, P1Problem, build_kontsevich, decomposition_check, direct_de_rham_oracle, gbinom,
    hypercoh_dims, irregular_hodge, jump_grid, kontsevich_model, kontsevich_sheaves, line_bundle_h,
    partial_fractions, problem_from_json, rational_roots, sigma_e1_check, verify_uv_independence, yu_sheaves,
)

Z_A1 = P1Problem.from_rational([0, 1])
Z_GM = P1Problem.from_rational([0, 1], horizontal=[0])
Z_INV = P1Problem.from_rational([1, 0, 1], [0, 1])
Z2 = P1Problem.from_rational([0, 0, 1])


def test_problem_parsing():
    assert Z_INV.poles == ((QQ(0), 1), (INF, 1))
    p = problem_from_json({"f": {"num": [0, 0, "1/2"], "den": [[-2, 1], 1]}, "horizontal": [5]})
    assert p.pole_dict == {QQ(2): 1, INF: 1} and p.horizontal == (QQ(5),)
    with pytest.raises(ValueError):
        P1Problem.from_rational([1], [1])
    with pytest.raises(ValueError):
        P1Problem.from_rational([0, 1], horizontal=["inf"])
    with pytest.raises(ValueError):
        P1Problem.from_rational([1], [1, 0, 1])  # z^2 + 1 has no rational root
    # common factors cancel
    assert P1Problem.from_rational([0, 1, 1], [0, 1]).poles == ((INF, 1),)


def test_rational_roots_and_partial_fractions():
    p = Poly(QQ, [-2, 1]) * Poly(QQ, [-2, 1]) * Poly(QQ, [1, 2])
    assert rational_roots(p) == {QQ(2): 2, QQ(Fraction(-1, 2)): 1}
    # 1 / (z^2 (z - 1)) = -1/z - 1/z^2 + 1/(z - 1)
    pp, pf = partial_fractions(Poly(QQ, [1]), {QQ(0): 2, QQ(1): 1})
    assert pp == {} and pf == {(QQ(0), 1): -1, (QQ(0), 2): -1, (QQ(1), 1): 1}
    assert [gbinom(-1, t) for t in range(4)] == [1, -1, 1, -1]


def test_kontsevich_sheaf_degrees():
    assert [s.degree for s in kontsevich_sheaves(Z_A1, 0)] == [-1, -1]
    assert kontsevich_sheaves(Z_GM, 0)[1].degree == 0
    assert [s.degree for s in kontsevich_sheaves(Z_INV, 0)] == [-2, 0]
    with pytest.raises(ValueError):
        build_kontsevich(Z_A1, 1)


def test_line_bundles():
    assert [line_bundle_h(d) for d in (-3, -2, -1, 0, 2)] == [(0, 2), (0, 1), (0, 0), (1, 0), (3, 0)]


def test_line_bundle_cech_columns():
    for d in range(-4, 4):
        # O(d) realised as the degree-0 column with bound d at infinity
        from irrhodge.p1global import CechModel, LineSheaf
        m = CechModel(Z_A1, (LineSheaf(0, ((INF, d),)), None), (0, 0))
        from irrhodge.filtcx import cohomology_dims
        h = cohomology_dims(m.complex)
        assert (h[0], h[1]) == line_bundle_h(d)


def test_hypercoh_examples():
    assert hypercoh_dims(Z_A1).dims == (0, 0, 0)
    assert hypercoh_dims(Z_GM).dims == (0, 1, 0)
    r = hypercoh_dims(Z_INV)
    assert r.dims == (0, 2, 0) and r.certificate.stable
    assert r.certificate.windows[1] == r.certificate.windows[0] + 5


def test_certificate():
    c = Certificate((10, 15), ((0, 1, 0), (0, 2, 0)))
    assert not c.stable and c.to_json()["stable"] is False


def test_oracle_examples():
    assert direct_de_rham_oracle(Z_A1).dims == (0, 0)
    assert direct_de_rham_oracle(Z_GM).dims == (0, 1)
    assert direct_de_rham_oracle(Z_INV).dims == (0, 2)


def test_uv_examples():
    r = verify_uv_independence(Z_INV, 0, [(1, 1), (1, 0), (0, 1), (0, 0), (2, 3)])
    assert r.passed and {d for _, d in r.table} == {(0, 2, 0)}
    assert verify_uv_independence(Z_A1).passed
    r2 = verify_uv_independence(Z2)
    assert r2.passed and len({d for _, d in r2.table}) == 1
    with pytest.raises(ValueError):
        verify_uv_independence(Z2, 0, [(1, 1)])


def test_irregular_hodge_examples():
    r = irregular_hodge(Z_GM, 1)
    assert r.passed and r.dim_H == 1 and all(j.denominator == 1 for j in r.jumps)
    r = irregular_hodge(Z_INV, 1)
    assert r.passed and len(r.jumps) == 2 and all(j.denominator == 1 for j in r.jumps)
    r = irregular_hodge(Z2, 1)
    assert r.passed and sum(n for _, n in r.gr) == 1 and all((2 * j).denominator == 1 for j in r.jumps)
    dims = [n for _, n in r.steps]
    assert dims == sorted(dims, reverse=True)


def test_yu_truncation():
    assert yu_sheaves(Z_A1, Fraction(1, 2))[0] is None
    assert yu_sheaves(Z_A1, 2) == (None, None)
    assert jump_grid(Z2, 0, 1) == [0, Fraction(1, 2), 1]


def test_decomposition_examples():
    r = decomposition_check(Z_INV, 0, 1)
    assert r.passed and r.terms == {"h^1(Omega_f^0)": 1, "h^0(Omega_f^1)": 1}
    assert decomposition_check(Z_A1, 0, 1).dim_dR == 0
    assert decomposition_check(Z2, Fraction(1, 2), 1).passed


def test_sigma_e1_matches_line_bundles():
    for p in (Z_A1, Z_GM, Z_INV, Z2):
        assert sigma_e1_check(p, 0).passed


def test_chart_relabeling():
    p = P1Problem.from_rational([0, 0, 0, 1], [-1, 1])
    q = p.inverted()
    assert q.pole_dict == {QQ(0): 2, QQ(1): 1}
    assert hypercoh_dims(p).dims == hypercoh_dims(q).dims == (0, 3, 0)


def test_over_prime_field():
    p = P1Problem.from_rational([0, 1], field=GF(5), horizontal=[0])
    assert hypercoh_dims(p, 0, (1, 0)).dims == hypercoh_dims(p, 0, (0, 0)).dims


def _random_problem(rng):
    """f = poly part + principal parts at distinct integer points."""
    pts = rng.sample(range(-3, 4), rng.randint(0, 2))
    e_inf = rng.randint(0 if pts else 1, 2)
    poly = Poly(QQ, [rng.randint(-2, 2) for _ in range(e_inf)] + ([rng.choice([-2, -1, 1, 2])] if e_inf else []))
    terms = []
    for q in pts:
        e = rng.randint(1, 2)
        coeffs = [rng.randint(-2, 2) for _ in range(e - 1)] + [rng.choice([-1, 1, 3])]
        for j, c in enumerate(coeffs, 1):
            terms.append((q, j, c))
    # build over the common denominator prod (z - q)^2
    full = Poly(QQ, [1])
    for q in pts:
        full = full * Poly(QQ, [-q, 1]) * Poly(QQ, [-q, 1])
    num = poly * full
    for q, j, c in terms:
        rest = Poly(QQ, [1])
        for q2 in pts:
            m = 2 - j if q2 == q else 2
            for _ in range(m):
                rest = rest * Poly(QQ, [-q2, 1])
        num = num + rest * QQ(c)
    hs = [h for h in rng.sample([-4, 4, 5, "inf"], rng.randint(0, 2)) if not (h == "inf" and e_inf)]
    return P1Problem.from_rational(num.c, full.c, hs)


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_problems(seed):
    p = _random_problem(random.Random(seed))
    h = hypercoh_dims(p)
    assert h.dims == direct_de_rham_oracle(p).dims + (0,)
    assert h.dims == (0, p.euler_dim(), 0)
    assert hypercoh_dims(p, 0, (0, 0)).dims == h.dims
    m1 = kontsevich_model(p, 0, (1, 1))
    m2 = kontsevich_model(p, 0, (0, 0), m1.N + 3)
    assert euler_characteristic(m1.complex) == euler_characteristic(m2.complex) == -p.euler_dim()
    assert hypercoh_dims(p.inverted()).dims == h.dims
    assert irregular_hodge(p, 1).passed
