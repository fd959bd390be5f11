import json
import math
import random
from fractions import Fraction

import pytest

from parajet.series import (
    AffineTransform3,
    CurveTransform2,
    TruncatedSeries1,
    TruncatedSeries2,
    _Series3,
    apply_affine,
    apply_affine_curve,
    compose2,
    from_monomials1,
    from_monomials2,
    series_from_json,
    series_to_json,
    series3_from_bivariate_in_linear,
    solve_implicit,
)

F = Fraction


def brute_mul_monomials(a, b, order):
    """Independent oracle: convolution over raw monomial coefficients."""
    out = {}
    for (i, j), u in a.items():
        for (k, l), v in b.items():
            if i + k + j + l <= order:
                out[(i + k, j + l)] = out.get((i + k, j + l), 0) + u * v
    return out


def test_mul_difference_of_squares():
    one_plus = from_monomials1(2, {0: F(1), 1: F(1)})
    one_minus = from_monomials1(2, {0: F(1), 1: F(-1)})
    prod = one_plus * one_minus
    assert prod[0] == 1
    assert prod[1] == 0
    assert prod[2] == -2  # factorial convention: x^2 coefficient -1 -> F_2 = -2


def test_mul_annihilator():
    f = TruncatedSeries1(3, {1: F(2), 3: F(5)})
    zero = TruncatedSeries1(3, {})
    assert (f * zero).coeffs == {}


def test_exp_square_doubles_rates():
    # (sum x^i/i!)^2 truncated at 4 has F_i = 2^i; oracle: raw convolution.
    e = TruncatedSeries1(4, {i: F(1) for i in range(5)})
    sq = e * e
    for i in range(5):
        assert sq[i] == 2**i
    monos = {(i, 0): F(1, math.factorial(i)) for i in range(5)}
    oracle = brute_mul_monomials(monos, monos, 4)
    for i in range(5):
        assert oracle[(i, 0)] * math.factorial(i) == sq[i]


def test_compose2_binomial():
    f = from_monomials2(3, {(2, 0): F(1)})  # x^2
    X = from_monomials2(3, {(1, 0): F(1), (0, 1): F(1)})  # s + t
    Y = TruncatedSeries2(3, {})
    g = compose2(f, X, Y)
    assert g == from_monomials2(3, {(2, 0): F(1), (1, 1): F(2), (0, 2): F(1)})


def test_compose2_identity_substitution():
    f = from_monomials2(3, {(1, 1): F(1)})  # xy
    X = from_monomials2(3, {(1, 0): F(1)})
    Y = from_monomials2(3, {(0, 1): F(1)})
    assert compose2(f, X, Y) == f


def test_compose2_random_against_bruteforce():
    rng = random.Random(42)
    n = 3
    for _ in range(10):
        def rand_series(zero_const):
            monos = {}
            for j in range(n + 1):
                for k in range(n + 1 - j):
                    if zero_const and j == k == 0:
                        continue
                    monos[(j, k)] = F(rng.randint(-4, 4), rng.randint(1, 4))
            return monos

        fm, xm, ym = rand_series(False), rand_series(True), rand_series(True)
        got = compose2(
            from_monomials2(n, fm), from_monomials2(n, xm), from_monomials2(n, ym)
        )
        # oracle: expand monomial by monomial with raw polynomial products
        acc = {}
        for (a, b), c in fm.items():
            term = {(0, 0): c}
            for _ in range(a):
                term = brute_mul_monomials(term, xm, n)
            for _ in range(b):
                term = brute_mul_monomials(term, ym, n)
            for key, v in term.items():
                acc[key] = acc.get(key, 0) + v
        for (j, k), v in acc.items():
            assert got[(j, k)] == v * math.factorial(j) * math.factorial(k)


def test_compose2_rejects_constant_term():
    f = from_monomials2(2, {(1, 0): F(1)})
    X = from_monomials2(2, {(0, 0): F(1)})
    with pytest.raises(ValueError):
        compose2(f, X, TruncatedSeries2(2, {}))


def test_solve_implicit_explicit_graph():
    # Phi = -v + s^2  ->  G = s^2
    phi = _Series3(3, {(0, 0, 1): F(-1), (2, 0, 0): F(2)})
    g = solve_implicit(phi)
    assert g == from_monomials2(3, {(2, 0): F(1)})


def test_solve_implicit_fixed_point_oracle():
    # Phi = -2v + s + v^2 at N=3 -> G = s/2 + s^2/8 + s^3/16 (fixed point of
    # v <- (s + v^2)/2, iterated independently here).
    phi = _Series3(3, {(0, 0, 1): F(-2), (1, 0, 0): F(1), (0, 0, 2): F(2)})
    g = solve_implicit(phi)
    v = {}
    for _ in range(4):
        v2 = brute_mul_monomials(
            {(j, 0): c for (j, k), c in v.items()}, {(j, 0): c for (j, k), c in v.items()}, 3
        )
        v = {(1, 0): F(1, 2)}
        for (j, _), c in v2.items():
            v[(j, 0)] = v.get((j, 0), 0) + c / 2
    for j in range(1, 4):
        assert g[(j, 0)] == v[(j, 0)] * math.factorial(j)
    assert g == from_monomials2(3, {(1, 0): F(1, 2), (2, 0): F(1, 8), (3, 0): F(1, 16)})


def test_solve_implicit_roundtrip_graph_to_phi():
    rng = random.Random(7)
    n = 5
    coeffs = {}
    for j in range(n + 1):
        for k in range(n + 1 - j):
            if j == k == 0:
                continue
            coeffs[(j, k)] = F(rng.randint(-3, 3), 2)
    f = TruncatedSeries2(n, coeffs)
    phi = _Series3(n, {(j, k, 0): c for (j, k), c in f.coeffs.items()})
    phi = phi.add(_Series3(n, {(0, 0, 1): F(-1)}))
    assert solve_implicit(phi) == f


def test_solve_implicit_requires_v_derivative():
    phi = _Series3(2, {(1, 0, 0): F(1), (0, 0, 2): F(2)})
    with pytest.raises(ValueError):
        solve_implicit(phi)


def test_apply_affine_identity():
    f = TruncatedSeries2(4, {(2, 0): F(1), (2, 1): F(1), (3, 0): F(1, 2)})
    assert apply_affine(f, AffineTransform3.identity()) == f


def test_apply_affine_shear_hand_expansion():
    # F = x^2/2 under the inverse substitution x = s, y = t, u = eps*s + v:
    # 0 = -eps*s - v + (s^2)/2, so G = s^2/2 - eps*s exactly.
    eps = F(1, 10)
    f = TruncatedSeries2(3, {(2, 0): F(1)})
    T = AffineTransform3(p=eps)
    g = apply_affine(f, T)
    assert g[(1, 0)] == -eps
    assert g[(2, 0)] == 1
    assert g[(3, 0)] == 0


def test_apply_affine_associativity_exact():
    rng = random.Random(3)
    n = 5
    coeffs = {}
    for j in range(n + 1):
        for k in range(n + 1 - j):
            if j + k >= 2:
                coeffs[(j, k)] = F(rng.randint(-2, 2), 3)
    f = TruncatedSeries2(n, coeffs)

    def near_identity():
        eps = lambda: F(rng.randint(-2, 2), 40)
        T = AffineTransform3(
            a=1 + eps(), b=eps(), c=eps(),
            k=eps(), l=1 + eps(), m=eps(),
            p=eps(), q=eps(), r=1 + eps(),
        )
        return T

    for _ in range(5):
        T1, T2 = near_identity(), near_identity()
        lhs = apply_affine(apply_affine(f, T1), T2)
        rhs = apply_affine(f, T1.then(T2))
        assert lhs == rhs  # exact rational equality


def test_delta_multiplicative():
    T1 = AffineTransform3(a=F(2), l=F(3), r=F(1, 6), b=F(1, 2))
    T2 = AffineTransform3(a=F(1), l=F(1, 3), r=F(3), k=F(1, 5))
    assert T1.then(T2).delta() == T1.delta() * T2.delta()


def test_apply_affine_curve_rotation_recovers_euclidean_curvature():
    # Rational rotation with tan(theta) = F1 = 3/4, so cos = 4/5, sin = 3/5.
    f1, f2 = F(3, 4), F(7, 5)
    c, s = F(4, 5), F(3, 5)
    f = TruncatedSeries1(3, {1: f1, 2: f2})
    T = CurveTransform2(a=c, b=-s, c=s, d=c)
    g = apply_affine_curve(f, T)
    assert g[1] == 0
    assert g[2] == f2 / F(125, 64)  # (1 + (3/4)^2)^{3/2} = (25/16)^{3/2} = 125/64, exactly


def test_series_json_roundtrip():
    f = TruncatedSeries2(3, {(2, 0): F(1), (1, 1): F(-2, 3)})
    doc = series_to_json(f)
    assert series_from_json(json.loads(json.dumps(doc))) == f
    g = TruncatedSeries1(2, {2: 0.5})
    doc1 = series_to_json(g)
    back = series_from_json(doc1)
    assert back[2] == 0.5


def test_series_json_rejects_mixed_modes():
    doc = {
        "vars": 1,
        "order": 2,
        "coeffs": [{"j": 1, "k": 0, "value": "1/2"}, {"j": 2, "k": 0, "value": "0.5"}],
    }
    with pytest.raises(ValueError):
        series_from_json(doc)


def test_shift_reexpansion_exact():
    f = TruncatedSeries1(4, {2: F(1), 3: F(2), 4: F(-1)})
    h = F(1, 3)
    g = f.shift(h)
    # jets of the shifted series equal derivatives of the polynomial at h
    x = F(7, 11)
    assert g.eval(x) == f.eval(h + x)


def test_series3_recenter_matches_substitution():
    f = from_monomials2(3, {(1, 0): F(1), (0, 1): F(2), (2, 1): F(3)})
    phi = series3_from_bivariate_in_linear(f, (F(1), 0, 0, F(1, 2)), (0, F(1), 0, F(1, 4)), 3)
    # Phi(s,t,v) = F(1/2 + s, 1/4 + t) as a function of (s, t) only
    for s_val, t_val in [(F(1, 5), F(1, 7)), (F(-1, 3), F(2, 9))]:
        direct = f.eval(F(1, 2) + s_val, F(1, 4) + t_val)
        expanded = sum(
            c * s_val**a * t_val**b / (math.factorial(a) * math.factorial(b))
            for (a, b, cc), c in phi.coeffs.items()
            if cc == 0
        ) + phi[(0, 0, 0)] * 0
        assert expanded == direct
