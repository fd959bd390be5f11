import math
import random
from fractions import Fraction

import pytest

from parajet.invariants import invariant_M, invariant_W, invariant_X
from parajet.jets import realize_series
from parajet.normalize import (
    AmbiguousBranchError,
    BranchError,
    equivalent_surfaces,
    invariantize,
    normalize_curve_gl2,
    normalize_curve_sl2,
    normalize_parabolic_surface,
    sa2_frame_fourth_order,
    sa2_moving_frame,
)
from parajet.sampling import (
    near_identity_transform,
    random_cone_branch_jet,
    random_curve_jet,
    random_parabolic_jet,
)
from parajet.scalars import cbrt, to_float
from parajet.series import TruncatedSeries1, TruncatedSeries2, apply_affine

F = Fraction


def cone_model_series(order=8):
    return TruncatedSeries2(order, {(2, k): F(math.factorial(k)) for k in range(order - 1)})


def test_cone_model_is_its_own_normal_form():
    f = cone_model_series()
    res = normalize_parabolic_surface(f)
    assert res.branch == "Cone[model]"
    assert res.normal_series == f
    assert to_float(res.readings["W"]) == 0
    assert to_float(res.readings["X"]) == 0


def test_surface_phantoms_and_inherited_relations():
    rng = random.Random(8)
    for _ in range(5):
        p = random_parabolic_jet(rng, 8)
        res = normalize_parabolic_surface(realize_series(p))
        ns = res.normal_series
        for jk, expect in [((2, 0), 1), ((1, 1), 0), ((2, 1), 1), ((3, 0), 0), ((4, 0), 0), ((4, 1), 0)]:
            assert abs(to_float(ns[jk]) - expect) < 1e-12, (jk, ns[jk])
        # the rank-one relations survive the loops: readings of dependent slots
        for jk, expect in [((0, 2), 0), ((1, 2), 0), ((0, 3), 0), ((2, 2), 2), ((1, 3), 0), ((0, 4), 0)]:
            assert abs(to_float(ns[jk]) - expect) < 1e-12, (jk, ns[jk])


def test_normal_form_matches_generic_shape():
    # u = s^2/2 + s^2 t/2 + W s^3 t/6 + s^2 t^2/2 + M s^5/120 + 6 W s^3 t^2 / 12 + ...
    rng = random.Random(9)
    p = random_parabolic_jet(rng, 8)
    res = normalize_parabolic_surface(realize_series(p))
    ns = res.normal_series
    W = ns[(3, 1)]
    # (3,2) coefficient: 6 W x^3 y^2 / (3! 2!) means u_{3,2} = 6W
    assert abs(to_float(ns[(3, 2)]) - 6 * to_float(W)) < 1e-10


def test_composed_transform_roundtrip():
    rng = random.Random(10)
    for _ in range(3):
        p = random_parabolic_jet(rng, 8)
        f = realize_series(p)
        res = normalize_parabolic_surface(f)
        g = apply_affine(f, res.transform)
        for jk in g.coeffs.keys() | res.normal_series.coeffs.keys():
            a, b = to_float(g[jk]), to_float(res.normal_series[jk])
            assert abs(a - b) <= 1e-9 * (1.0 + max(abs(a), abs(b))), (jk, a, b)


def test_loop_idempotence():
    rng = random.Random(12)
    p = random_parabolic_jet(rng, 8)
    res = normalize_parabolic_surface(realize_series(p))
    again = normalize_parabolic_surface(res.normal_series)
    # normal form of a normal form is itself, via an identity transform
    (a, b, c), (k, l, m), (pq, q, r) = again.transform.matrix()
    assert abs(to_float(a) - 1) < 1e-9 and abs(to_float(l) - 1) < 1e-9 and abs(to_float(r) - 1) < 1e-9
    for off in (b, c, k, m, pq, q):
        assert abs(to_float(off)) < 1e-9
    for jk in res.normal_series.coeffs:
        assert abs(to_float(again.normal_series[jk]) - to_float(res.normal_series[jk])) < 1e-8


def test_equivalence_decision_under_random_transform():
    rng = random.Random(14)
    p = random_parabolic_jet(rng, 8, exact=True)
    f = realize_series(p)
    f = TruncatedSeries2(f.order, {jk: c for jk, c in f.coeffs.items() if jk != (0, 0)})
    T = near_identity_transform(rng)
    g = apply_affine(f, T)
    assert equivalent_surfaces(f, g)
    # and a genuinely different surface is not equivalent
    other = dict(f.coeffs)
    other[(5, 0)] = other.get((5, 0), F(0)) + 1
    assert not equivalent_surfaces(f, TruncatedSeries2(f.order, other))


def test_invariantize_phantoms_and_readings():
    rng = random.Random(15)
    p = random_parabolic_jet(rng, 8)
    assert abs(to_float(invariantize(p, (2, 1))) - 1) < 1e-12
    w = invariantize(p, (3, 1))
    assert abs(to_float(w) - to_float(invariant_W(p.filled(4)))) < 1e-8
    m = invariantize(p, (5, 0))
    assert abs(to_float(m) - to_float(invariant_M(p.filled(5)))) < 1e-8


def test_cone_branch_readings():
    rng = random.Random(16)
    p = random_cone_branch_jet(rng, 8)
    res = normalize_parabolic_surface(realize_series(p))
    assert res.branch == "Cone"
    assert abs(to_float(res.readings["X"]) - to_float(invariant_X(p.filled(5)))) < 1e-10


def test_flat_branch():
    f = TruncatedSeries2(4, {(1, 0): F(1, 2), (0, 1): F(-1, 3), (0, 0): F(2)})
    res = normalize_parabolic_surface(f)
    assert res.branch == "Flat"


def test_nonparabolic_input_rejected():
    f = TruncatedSeries2(4, {(2, 0): F(1), (0, 2): F(1)})
    with pytest.raises(BranchError):
        normalize_parabolic_surface(f)


def test_axis_swap_handles_y_profile():
    # u = y^2/2 (+ higher): rank one with u_xx = 0; the swap must recover it
    f = TruncatedSeries2(6, {(0, 2): F(1), (0, 3): F(1, 2)})
    res = normalize_parabolic_surface(f)
    assert res.branch.startswith("Cylinder")


def test_w_point_zero_but_not_identically_rejected():
    # fabricate a jet with the W numerator zero at the point but random higher
    # mixed coordinates: the loops must refuse the cone branch
    rng = random.Random(18)
    while True:
        p = random_parabolic_jet(rng, 8, generic_floor=None)
        coords = dict(p.coords)
        u20, u11, u21, u30, u40 = (
            coords[(2, 0)],
            coords[(1, 1)],
            coords[(2, 1)],
            coords[(3, 0)],
            coords[(4, 0)],
        )
        coords[(3, 1)] = (u20 * u40 * u11 - 2 * u30**2 * u11 + 2 * u30 * u21 * u20) / u20**2
        from parajet.jets import ParabolicJet
        from parajet.invariants import w_numerator

        q = ParabolicJet(8, coords)
        if abs(to_float(coords[(4, 1)])) > 0.5:
            with pytest.raises((BranchError, AmbiguousBranchError)):
                normalize_parabolic_surface(realize_series(q))
            break


# -- curves ---------------------------------------------------------------------


def test_sl2_normal_form_and_closed_forms():
    rng = random.Random(19)
    for _ in range(10):
        jet = random_curve_jet(rng, 7)
        res = normalize_curve_sl2(TruncatedSeries1(7, dict(jet)))
        assert abs(to_float(res.normal_series[2]) - 1) < 1e-12
        assert abs(to_float(res.normal_series[3])) < 1e-12
        u2, u3, u4 = jet[2], jet[3], jet[4]
        g4 = (3 * u2 * u4 - 5 * u3 * u3) / (3 * cbrt(u2) ** 8)
        assert abs(to_float(res.readings["G4"]) - to_float(g4)) < 1e-9 * (1 + abs(to_float(g4)))


def test_parabola_normalizes_to_zero_tail():
    f = TruncatedSeries1(6, {2: F(1)})
    res = normalize_curve_sl2(f)
    for i in range(3, 7):
        assert res.readings[f"G{i}"] == 0


def test_gl2_branches():
    # already normal: u = x^2/2 + x^4/4! -> Plus with zero fifth reading
    f = TruncatedSeries1(6, {2: F(1), 4: F(1)})
    res = normalize_curve_gl2(f)
    assert res.branch == "Plus"
    assert to_float(res.readings["G5"]) == 0
    g = TruncatedSeries1(6, {2: F(1)})
    assert normalize_curve_gl2(g).branch == "Parabola"
    h = TruncatedSeries1(6, {2: F(1), 4: F(-2)})
    assert normalize_curve_gl2(h).branch == "Minus"


def test_gl2_conic_fixture():
    # u = 3 - sqrt(9 - 3 x^2) = x^2/2! + 0 + x^4/4! + 0 + O(6): Plus, G5 = 0
    terms = {1: F(1, 2), 2: F(-1, 8), 3: F(1, 16), 4: F(-5, 128)}
    mono = {}
    for p_, c in terms.items():
        mono[2 * p_] = mono.get(2 * p_, F(0)) + (-3) * c * F(-1, 3) ** p_
    f = TruncatedSeries1(8, {k: v * math.factorial(k) for k, v in mono.items()})
    assert f[2] == 1 and f[3] == 0 and f[4] == 1 and f[5] == 0
    res = normalize_curve_gl2(f)
    assert res.branch == "Plus"
    assert abs(to_float(res.readings["G5"])) < 1e-12
    assert abs(to_float(res.readings["G7"])) < 1e-10


def test_curve_flat_rejected():
    with pytest.raises(BranchError):
        normalize_curve_sl2(TruncatedSeries1(5, {3: F(1)}))


def test_sa2_moving_frame_printed_solution():
    rng = random.Random(20)
    for _ in range(20):
        jet = random_curve_jet(rng, 8)
        frame = sa2_moving_frame(jet)
        u0, u1, u2, u3 = (to_float(jet[i]) for i in range(4))
        if u2 < 0:
            u0, u2 = -u0, -u2
        c13 = u2 ** (1.0 / 3.0)
        assert abs(to_float(frame["a"]) - (3 * u2 * u2 - u1 * u3) / (3 * c13**5)) < 1e-10
        assert abs(to_float(frame["b"]) - u3 / (3 * c13**5)) < 1e-10
        assert abs(to_float(frame["k"]) + u1 / c13) < 1e-10
        # 1 = det: a l - b k with l = (1 + b k)/a automatically; plug-through:
        from parajet.invariants import equiaffine_curvature

        got = to_float(sa2_frame_fourth_order(jet))
        expect = to_float(equiaffine_curvature(jet))
        assert abs(got - expect) <= 1e-9 * (1 + abs(expect))


def test_sa2_frame_trivial_jet():
    jet = {0: F(0), 1: F(0), 2: F(1), 3: F(0), 4: F(0)}
    frame = sa2_moving_frame(jet)
    assert (frame["a"], frame["b"], frame["c"], frame["k"], frame["m"]) == (1, 0, 0, 0, 0)


def test_flat_cone_model_equivalence():
    # a unimodular image of the flat-cone model normalizes back to the model
    rng = random.Random(22)
    f = cone_model_series(8)
    T = near_identity_transform(rng)
    g = apply_affine(f, T)
    res = normalize_parabolic_surface(g)
    assert res.branch == "Cone[model]"
    for jk in f.coeffs:
        assert abs(to_float(res.normal_series[jk]) - to_float(f[jk])) < 1e-8


def test_cone_normal_form_shape():
    # the W == 0, X != 0 normal form carries the forced dependent pattern:
    # G41 = 0, G60 = 0, G51 = 4X, G52 = 20X, G23 = 6
    rng = random.Random(50)
    p = random_cone_branch_jet(rng, 8)
    res = normalize_parabolic_surface(realize_series(p))
    assert res.branch == "Cone"
    ns = res.normal_series
    X = to_float(res.readings["X"])
    assert abs(to_float(ns[(4, 1)])) < 1e-12
    assert abs(to_float(ns[(6, 0)])) < 1e-12
    assert abs(to_float(ns[(5, 1)]) - 4 * X) <= 1e-9 * (1 + abs(X))
    assert abs(to_float(ns[(5, 2)]) - 20 * X) <= 1e-9 * (1 + abs(X))
    assert abs(to_float(ns[(2, 3)]) - 6) < 1e-12
