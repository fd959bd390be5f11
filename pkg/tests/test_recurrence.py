import random
from fractions import Fraction

from parajet.invariants import invariant_W
from parajet.recurrence import (
    apply_D,
    frame_derivatives,
    homogeneous_curve_coefficients,
    homogeneous_curve_series,
    homogeneous_tangent_field,
    invariant_derivatives,
    mc_closed_form,
    cone_symmetry_fields,
    solve_mc_curve,
    solve_mc_surface,
    surface_tangency_residual,
    tangency_residual_curve,
    verify_commutator,
    verify_curve_recurrences,
    verify_recurrences,
)
from parajet.sampling import random_cone_branch_jet, random_curve_jet, random_parabolic_jet
from parajet.scalars import cbrt, to_float
from parajet.series import TruncatedSeries2

F = Fraction


def test_generic_cramer_matches_closed_forms():
    rng = random.Random(30)
    for _ in range(5):
        p = random_parabolic_jet(rng, 8)
        mc = solve_mc_surface("Generic", p)
        K1c, K2c = mc_closed_form(
            "Generic",
            W=to_float(mc.readings["W"]),
            M=to_float(mc.readings["M"]),
            I51=to_float(mc.readings["I51"]),
        )
        for a, b in zip(mc.K1 + mc.K2, K1c + K2c):
            assert abs(to_float(a) - to_float(b)) <= 1e-10 * (1 + abs(to_float(b)))


def test_generic_matrix_is_the_printed_one():
    rng = random.Random(31)
    p = random_parabolic_jet(rng, 8)
    mc = solve_mc_surface("Generic", p)
    W, M = to_float(mc.readings["W"]), to_float(mc.readings["M"])
    printed = [
        [-3, -1, 0, 0, 0, 0],
        [0, 0, -1, 0, 0, 0],
        [0, 0, 0, -3, -3, 0],
        [-3, -2, 0, 0, 0, 0],
        [0, 0, 0, 0, -4 * W, -6],
        [0, 0, -M, -10 * W, -24 * W, -18],
    ]
    for i in range(6):
        for j in range(6):
            assert abs(to_float(mc.matrix[i][j]) - printed[i][j]) <= 1e-9 * (1 + abs(printed[i][j]))
    # right sides: -(0, 1, 0, W, M, I51) and -(1, 0, W, 2, 0, 6 W^2)
    I51 = to_float(mc.readings["I51"])
    for got, expect in zip(mc.rhs1, [0, 1, 0, W, M, I51]):
        assert abs(to_float(got) + expect) <= 1e-9 * (1 + abs(expect))
    for got, expect in zip(mc.rhs2, [1, 0, W, 2, 0, 6 * W * W]):
        assert abs(to_float(got) + expect) <= 1e-9 * (1 + abs(expect))


def test_cone_cramer_matches_closed_forms():
    rng = random.Random(32)
    p = random_cone_branch_jet(rng, 8)
    mc = solve_mc_surface("Cone", p)
    X, Y = to_float(mc.readings["X"]), to_float(mc.readings["Y"])
    K1c, K2c = mc_closed_form("Cone", X=X, Y=Y)
    for a, b in zip(mc.K1 + mc.K2, K1c + K2c):
        assert abs(to_float(a) - to_float(b)) <= 1e-10 * (1 + abs(to_float(b)))
    assert abs(to_float(mc.K1[5]) - X / 6.0) <= 1e-12 * (1 + abs(X))


def test_generic_k4_vanishes_when_m_and_i51_do():
    # K1^4 = 2M/W - I51/(2W): zero numerator when both vanish
    K1, _ = mc_closed_form("Generic", W=0.7, M=0.0, I51=0.0)
    assert K1[3] == 0 and K1[4] == 0


def test_invariant_derivation_determinant_identity():
    rng = random.Random(33)
    for _ in range(10):
        p = random_parabolic_jet(rng, 6)
        coeffs = invariant_derivatives(p)
        c = p.coords
        s = c[(2, 0)] * c[(2, 1)] - c[(1, 1)] * c[(3, 0)]
        expect = c[(2, 0)] / cbrt(s) ** 2
        got = coeffs.determinant()
        assert abs(to_float(got) - to_float(expect)) <= 1e-10 * (1 + abs(to_float(expect)))


def test_closed_form_derivations_match_moving_frame():
    rng = random.Random(34)
    p = random_parabolic_jet(rng, 8)
    cd = invariant_derivatives(p)
    fd = frame_derivatives(p)
    for name in ("alpha", "beta", "gamma", "delta"):
        a, b = to_float(getattr(cd, name)), to_float(getattr(fd, name))
        assert abs(a - b) <= 1e-9 * (1 + abs(a))


def test_d2w_equals_2w():
    rng = random.Random(35)
    for _ in range(5):
        p = random_parabolic_jet(rng, 6)
        w = to_float(invariant_W(p.filled(4)))
        got = to_float(apply_D(2, invariant_W, p))
        assert abs(got - 2 * w) <= 1e-7 * (1 + abs(w))


def test_d1w_identity():
    rng = random.Random(36)
    p = random_parabolic_jet(rng, 6)
    w = to_float(invariant_W(p.filled(4)))
    got = to_float(apply_D(1, invariant_W, p))
    assert abs(got + 2.0 / 3.0 * w * w) <= 1e-7 * (1 + w * w)


def test_recurrence_reports_pass():
    rng = random.Random(37)
    rep = verify_recurrences("Generic", random_parabolic_jet(rng, 8))
    assert all(v["pass"] for v in rep.values()), rep
    rep = verify_recurrences("Cone", random_cone_branch_jet(rng, 8))
    assert all(v["pass"] for v in rep.values()), rep


def test_commutators():
    rng = random.Random(38)
    rep = verify_commutator("Generic", random_parabolic_jet(rng, 8))
    assert all(v["pass"] for v in rep.values()), rep
    rep = verify_commutator("Cone", random_cone_branch_jet(rng, 8))
    assert all(v["pass"] for v in rep.values()), rep


def test_curve_systems():
    rng = random.Random(39)
    jet = random_curve_jet(rng, 8)
    mc = solve_mc_curve("sa2", jet)
    G4 = to_float(mc.readings["G4"])
    assert abs(to_float(mc.K1[0])) < 1e-10
    assert abs(to_float(mc.K1[1]) - G4 / 3.0) < 1e-10 * (1 + abs(G4))
    assert abs(to_float(mc.K1[2]) + 1.0) < 1e-10
    jet0 = {i: F(0) for i in range(9)}
    jet0[2] = F(1)
    mc0 = solve_mc_curve("sa2", jet0)
    assert [to_float(r) for r in mc0.K1] == [0.0, 0.0, -1.0]

    jetg = random_curve_jet(rng, 8, affine_floor=0.3)
    mcg = solve_mc_curve("gl2", jetg)
    eps = mcg.readings["eps"]
    I5 = to_float(mcg.readings["G5"])
    expect = [eps * I5 / 2.0, eps * I5, eps / 3.0, -1.0]
    for a, b in zip(mcg.K1, expect):
        assert abs(to_float(a) - b) <= 1e-9 * (1 + abs(b))


def test_curve_recurrence_reports():
    rng = random.Random(40)
    rep = verify_curve_recurrences("sa2", random_curve_jet(rng, 8))
    assert all(v["pass"] for v in rep.values()), rep
    rep = verify_curve_recurrences("gl2", random_curve_jet(rng, 8, affine_floor=0.3))
    assert all(v["pass"] for v in rep.values()), rep


def test_sa2_parabola_recurrence_trivial():
    jet = {i: F(0) for i in range(9)}
    jet[2] = F(1)
    rep = verify_curve_recurrences("sa2", jet)
    assert rep["I6 = Dx^2 P + 5 P^2"]["pass"]
    assert abs(rep["I6 = Dx^2 P + 5 P^2"]["lhs"]) < 1e-12


def test_homogeneous_coefficient_values():
    assert homogeneous_curve_coefficients(F(1), 1, 7)[6] == F(13, 2)
    assert homogeneous_curve_coefficients(F(1), 1, 7)[7] == 20
    assert homogeneous_curve_coefficients(F(2), -1, 7)[6] == 5 - F(3, 2) * 4
    assert homogeneous_curve_coefficients(F(2), -1, 7)[7] == 24 - 34


def test_homogeneous_tangency():
    for a, sign in [(F(1), 1), (F(-2, 7), -1)]:
        Fs = homogeneous_curve_series(a, sign, 10)
        L = homogeneous_tangent_field(a, sign)
        resid = tangency_residual_curve(L, Fs)
        assert all(c == 0 for c in resid.coeffs.values())


def test_cone_algebra_and_tangency():
    import math

    from parajet.prolong import lie_bracket, p_neg, p_sub

    e1, e2, e3 = cone_symmetry_fields()

    def components(v):
        return (v.xi, v.eta, v.phi)

    b = lie_bracket(e1, e2)
    assert all(p_sub(x, p_neg(y)) == {} for x, y in zip(components(b), components(e3)))
    b = lie_bracket(e1, e3)
    assert all(p_sub(x, p_neg(y)) == {} for x, y in zip(components(b), components(e1)))
    b = lie_bracket(e2, e3)
    assert all(p_sub(x, y) == {} for x, y in zip(components(b), components(e2)))
    f = TruncatedSeries2(9, {(2, k): F(math.factorial(k)) for k in range(8)})
    for e in (e1, e2, e3):
        r = surface_tangency_residual(e, f)
        assert all(c == 0 for c in r.coeffs.values())


def test_generation_property_one_depth():
    # the sixth-order invariants reconstruct from {W, M, D1M, D2M} through the
    # recurrences and agree with the normalization readings
    from parajet.invariants import invariant_M
    from parajet.jets import realize_series
    from parajet.normalize import normalize_parabolic_surface
    from parajet.sampling import random_parabolic_jet

    rng = random.Random(48)
    for _ in range(5):
        p = random_parabolic_jet(rng, 8)
        coeffs = invariant_derivatives(p)
        W = to_float(invariant_W(p.filled(4)))
        M = to_float(invariant_M(p.filled(5)))
        d1m = to_float(apply_D(1, invariant_M, p, coeffs))
        d2m = to_float(apply_D(2, invariant_M, p, coeffs))
        i51 = d2m + M - 80.0 / 9.0 * W**3
        i60 = d1m + 14.0 * M * W - 10.0 / 3.0 * i51 * W
        res = normalize_parabolic_surface(realize_series(p))
        assert abs(i51 - to_float(res.readings["I51"])) <= 1e-6 * (1 + abs(i51))
        assert abs(i60 - to_float(res.readings["I60"])) <= 1e-6 * (1 + abs(i60))
