import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from irrhodge.charp import (
    LiftError, Perturbation, W2Chart, W2ChartAtlas, affine_atlas, assemble_splitting, atlas_from_config,
    build_frob_lift, cartier_inverse, charp_degeneration_dims, cochain_D, cochain_add, cochain_product,
    p1_atlas, verify_cartier_iso_omega_f, verify_closed_intersection, verify_u_sum, w2_mul,
)
from irrhodge.exactalg import GF
from irrhodge.localmodel import ChartData, MonomialLogForm, kont_slice, window_l1


def mono(F, a, J=(), c=1):
    return MonomialLogForm.monomial(F, a, J, c)


def test_cartier_inverse_examples():
    F = GF(5)
    assert cartier_inverse(mono(F, (1,)), 5) == mono(F, (5,))
    assert cartier_inverse(mono(F, (0,), (0,)), 5) == mono(F, (0,), (0,))
    # dx1'/x1' ^ dx2' = x2' delta1 ^ delta2  ->  dx1/x1 ^ x2^(p-1) dx2 = x2^p delta1 ^ delta2
    assert cartier_inverse(mono(F, (0, 1), (0, 1)), 5) == mono(F, (0, 5), (0, 1))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([3, 5]), st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3)),
                                        min_size=1, max_size=4))
def test_cartier_inverse_closed_and_multiplicative(p, raw):
    F = GF(p)
    forms = [mono(F, (a, b), [(), (0,), (1,), (0, 1)][j], 1 + a) for a, b, j in raw]
    w = forms[0]
    for f in forms[1:]:
        w = w + f
    assert cartier_inverse(w, p).d().is_zero()
    for f, g in itertools.combinations(forms, 2):
        assert cartier_inverse(f.wedge(g), p) == cartier_inverse(f, p).wedge(cartier_inverse(g, p))


def test_closed_intersection_examples():
    assert verify_closed_intersection(ChartData(1, 0, 0, (1,)), 0, window_l1(1, 6), 3).passed
    assert verify_closed_intersection(ChartData(1, 1, 0, (1,)), 1, window_l1(2, 6), 5).passed


def test_non_reduced_negative_control_is_only_recorded():
    # the lemma is not asserted for e = 2; record the observed outcome so a change is noticed
    ch = ChartData(1, 0, 0, (2,))
    obs = (verify_closed_intersection(ch, 0, window_l1(1, 6), 3).passed,
           verify_cartier_iso_omega_f(ch, 1, 3, window_l1(1, 6)).passed)
    assert obs == (False, False)


def test_cartier_iso_examples():
    for a in (0, 1):
        assert verify_cartier_iso_omega_f(ChartData(1, 0, 0, (1,)), a, 3, window_l1(1, 6)).passed
    for a in (0, 1, 2):
        v = verify_cartier_iso_omega_f(ChartData(2, 0, 0, (1, 1)), a, 5, window_l1(2, 6))
        assert v.passed and v.checked > 0


def test_cartier_iso_degree_zero_shape():
    # closed functions in x O are the monomials x^b with p | b and b >= p on the pole coordinate
    v = verify_cartier_iso_omega_f(ChartData(1, 0, 0, (1,)), 0, 3, window_l1(1, 9))
    assert {k: d for k, d in v.details["dims"].items() if d[1]} == {"[3]": [1, 1], "[6]": [1, 1], "[9]": [1, 1]}


def test_atlas_validation():
    with pytest.raises(ValueError):
        affine_atlas(4, 1, 1, 1)
    with pytest.raises(ValueError):
        W2Chart(2, 2, 1)
    with pytest.raises(ValueError):
        W2ChartAtlas(3, (W2Chart(1, 0, 0), W2Chart(1, 1, 1)), {(0, 1): ((-1,),), (1, 0): ((1,),)})
    assert atlas_from_config({"p": 5, "atlas": "P1"}).kind == "P1"
    assert len(atlas_from_config({"p": 3, "atlas": "An", "n": 2, "ell": 2, "m": 2, "copies": 2}).charts) == 2


def test_canonical_lift():
    lifts = build_frob_lift(affine_atlas(3, 2, 2, 2))
    assert all(lf.canonical and lf.valid for lf in lifts)
    assert verify_u_sum(lifts[0]).passed


def test_p1_perturbed_lift():
    at = p1_atlas(5)
    lifts = build_frob_lift(at, [Perturbation(0, 0, (((1,), 1),))])
    assert lifts[0].to_json()["u"] == ["z"] and lifts[1].canonical
    with pytest.raises(LiftError):
        build_frob_lift(at, [Perturbation(1, 0, (((0,), 1),))])


def test_u_sum_forced_for_valid_perturbation():
    at = affine_atlas(3, 2, 2, 2)
    lf = build_frob_lift(at, [Perturbation(0, 0, (((1, 0), 1), ((0, 2), 2)), "multiplicative"),
                              Perturbation(0, 1, (((1, 0), -1), ((0, 2), -2)), "multiplicative")])[0]
    assert lf.valid and not lf.canonical and verify_u_sum(lf).passed
    # symbolic expansion: x1^p (1 + p u) * x2^p (1 - p u) = (x1 x2)^p mod p^2
    assert w2_mul(lf.images[0], lf.images[1], 3) == {(3, 3): 1}


def test_invalid_lift_negative_control():
    at = affine_atlas(3, 2, 2, 2)
    with pytest.raises(LiftError):
        build_frob_lift(at, [Perturbation(0, 0, (((0, 0), 1),), "multiplicative")])
    bad = build_frob_lift(at, [Perturbation(0, 0, (((0, 0), 1),), "multiplicative")], strict=False)[0]
    v = verify_u_sum(bad)
    assert not v.passed and v.failures[0]["residual"] == "p*(1)"
    assert bad.issues[0] == {"check": "pole", "residual": "3*x0^3*x1^3"}


def test_splitting_canonical_p1():
    at = p1_atlas(5)
    r = assemble_splitting(at, build_frob_lift(at), 1)
    assert r.passed and r.phi_zero
    # with phi = 0 the home component is exactly C^{-1}
    F = at.field
    w = mono(F, (2,), (0,))
    assert r.data.apply(1, w)[(1,)] == cartier_inverse(w, 5)


def test_splitting_perturbed_p1():
    at = p1_atlas(5)
    r = assemble_splitting(at, build_frob_lift(at, [Perturbation(0, 0, (((1,), 1),))]), 1)
    assert r.passed and not r.phi_zero
    # phi_01(dz'/z') = z^(1-p) on the overlap
    assert r.data.phi(0, 0, 1, 0) == {(-4,): at.field(1)}
    with pytest.raises(ValueError):
        assemble_splitting(at, build_frob_lift(at), 5)


def _two_dim_lifts(p):
    at = affine_atlas(p, 2, 2, 2, copies=3)
    return at, build_frob_lift(at, [
        Perturbation(1, 0, (((1, 0), 1), ((0, 1), 2)), "multiplicative"),
        Perturbation(1, 1, (((1, 0), -1), ((0, 1), -2)), "multiplicative"),
        Perturbation(2, 0, (((0, 0), 1),), "multiplicative"),
        Perturbation(2, 1, (((0, 0), -1),), "multiplicative"),
    ])


@pytest.mark.parametrize("p", [3, 5])
def test_splitting_two_dimensional(p):
    at, lifts = _two_dim_lifts(p)
    assert all(verify_u_sum(lf).passed for lf in lifts)
    r = assemble_splitting(at, lifts, 2)
    assert r.passed and not r.phi_zero and r.verdicts["c"].checked > 0


def test_splitting_with_free_and_divisor_coordinates():
    at = affine_atlas(5, 2, 1, 2, copies=2)
    lifts = build_frob_lift(at, [Perturbation(1, 1, (((1, 1), 1),), "multiplicative")])
    assert assemble_splitting(at, lifts, 2).passed
    at = affine_atlas(5, 2, 1, 1, copies=2)
    lifts = build_frob_lift(at, [Perturbation(1, 1, (((0, 1), 1), ((1, 0), 1)),)])
    assert assemble_splitting(at, lifts, 2).passed


def test_splitting_detects_bad_u_sum():
    at = affine_atlas(3, 2, 2, 2, copies=2)
    lifts = build_frob_lift(at, [Perturbation(1, 0, (((0, 0), 1),), "multiplicative")], strict=False)
    r = assemble_splitting(at, lifts, 1)
    assert not r.verdicts["c"].passed and r.verdicts["a"].passed


def _random_cochain(rng, F, cover, deg, n=2):
    x = {}
    for s in range(deg + 1):
        for I in itertools.combinations(range(cover), s + 1):
            terms = {}
            for J in itertools.combinations(range(n), deg - s):
                terms[(tuple(rng.randint(0, 3) for _ in range(n)), J)] = rng.randint(0, F.p - 1)
            f = MonomialLogForm(F, n, terms)
            if not f.is_zero():
                x[I] = f
    return x


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(0, 2), st.integers(0, 2))
def test_cech_product_leibniz(seed, dx, dy):
    rng = random.Random(seed)
    F = GF(7)
    x, y = _random_cochain(rng, F, 3, dx), _random_cochain(rng, F, 3, dy)
    assert not cochain_D(cochain_D(x, 3), 3)
    lhs = cochain_D(cochain_product(x, y), 3)
    rhs = cochain_add(cochain_product(cochain_D(x, 3), y), cochain_product(x, cochain_D(y, 3)), (-1) ** dx)
    assert not cochain_add(lhs, rhs, -1)


@settings(max_examples=15, deadline=None)
@given(st.sampled_from([3, 5]), st.integers(0, 10 ** 6))
def test_random_valid_lifts_split(p, seed):
    rng = random.Random(seed)
    at = affine_atlas(p, 2, 2, 2, copies=2)
    g = tuple(((rng.randint(0, 2), rng.randint(0, 2)), rng.randint(0, p - 1)) for _ in range(2))
    neg = tuple((e, -c) for e, c in g)
    lifts = build_frob_lift(at, [Perturbation(1, 0, g, "multiplicative"), Perturbation(1, 1, neg, "multiplicative")])
    assert verify_u_sum(lifts[1]).passed
    assert assemble_splitting(at, lifts, 2, radius=1).passed


def test_degeneration_dims():
    v = charp_degeneration_dims(5)
    assert v.passed and v.details["dims_d"] == v.details["dims_zero"] == [0, 0, 0]
    v = charp_degeneration_dims(5, [0])
    assert v.passed and v.details["dims_d"] == [0, 1, 0]
    edge = charp_degeneration_dims(2)
    assert edge.details["asserted"] is False and "dims_d" in edge.details


def test_kont_slice_over_fp_matches_generators():
    # Omega_f^1 for f = 1/(x1 x2) at slice 0 is spanned by dg/g only
    F = GF(3)
    sp = kont_slice(ChartData(2, 0, 0, (1, 1)), 1, (0, 0), 0, F)
    assert sp.dim == 1
