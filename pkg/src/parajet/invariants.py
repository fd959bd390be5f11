"""Closed-form evaluation of the differential invariants of rank-one graphs.

All evaluators are generic over plain scalars (Fraction, float) and over
sensitivity-carrying scalars, so total and invariant derivatives apply to
them directly.  Fractional powers follow the real-root conventions of
:mod:`parajet.scalars`.

The fifth-order invariant of the generic branch (M) and the seventh-order
invariant of the cone branch (Y) carry large numerators; their monomial
tables below were generated from the normalization loops by exact rational
arithmetic and are cross-checked against the loop pipeline in the tests
(the generic numerator has exactly 57 monomials).
"""

from __future__ import annotations

from typing import Dict, Mapping, Tuple

from .scalars import cbrt, to_float
from .series import TruncatedSeries2

Coord = Tuple[int, int]


def _g(c: Mapping, jk: Coord):
    return c[jk]


# -- order 2 and 3 -------------------------------------------------------------


def invariant_H(c: Mapping[Coord, object]):
    """Hessian determinant u_xx u_yy - u_xy^2 (relative invariant, weight d^2/L^4)."""
    return c[(2, 0)] * c[(0, 2)] - c[(1, 1)] * c[(1, 1)]


def hessian_entries(c: Mapping[Coord, object]):
    return c[(2, 0)], c[(1, 1)], c[(0, 2)]


def invariant_S(c: Mapping[Coord, object]):
    """(u_xx u_xxy - u_xy u_xxx)/u_xx^2; zero exactly on cylinder-type graphs."""
    u20 = c[(2, 0)]
    if u20 == 0:
        raise ZeroDivisionError("S needs u_xx != 0")
    return (u20 * c[(2, 1)] - c[(1, 1)] * c[(3, 0)]) / (u20 * u20)


def s_numerator(c: Mapping[Coord, object]):
    return c[(2, 0)] * c[(2, 1)] - c[(1, 1)] * c[(3, 0)]


# -- order 4: the branching invariant ------------------------------------------


def w_numerator(c: Mapping[Coord, object]):
    u20, u11, u21, u30 = c[(2, 0)], c[(1, 1)], c[(2, 1)], c[(3, 0)]
    u31, u40 = c[(3, 1)], c[(4, 0)]
    return u20 * u20 * u31 - u20 * u40 * u11 + 2 * u30 * u30 * u11 - 2 * u30 * u21 * u20


def invariant_W(c: Mapping[Coord, object]):
    """The fourth-order invariant; zero exactly on the cone branch.

    W = w_numerator / (u_xx^2 (u_xx u_xxy - u_xy u_xxx)^{2/3}) with the real
    cube-root convention, so it is defined for either sign of the slope
    invariant.
    """
    u20 = c[(2, 0)]
    s = s_numerator(c)
    if u20 == 0 or s == 0:
        raise ZeroDivisionError("W needs u_xx != 0 and a nonzero slope invariant")
    r = cbrt(s)
    return w_numerator(c) / (u20 * u20 * r * r)


def invariant_W_cubed(c: Mapping[Coord, object]):
    """W^3, a rational function of the jet: exact on rational jets."""
    u20 = c[(2, 0)]
    s = s_numerator(c)
    n = w_numerator(c)
    return n**3 / (u20**6 * s**2)


# -- order 5: X (cone branch) and M (generic branch) ---------------------------


def invariant_X(c: Mapping[Coord, object]):
    """Fifth-order invariant of the cone branch (rational in the jet)."""
    u20, u30, u40, u50 = c[(2, 0)], c[(3, 0)], c[(4, 0)], c[(5, 0)]
    s = s_numerator(c)
    conic = 9 * u20**2 * u50 - 45 * u20 * u30 * u40 + 40 * u30**3
    return s * conic / (9 * u20**6)


# generic-branch fifth-order numerator: 57 monomials with exponent vectors over
# (u20, u11, u21, u30, u31, u40, u41, u50); generated from the loop composition
M_TABLE = (
    (-1280, (0, 3, 0, 7, 0, 0, 0, 0)),
    (3840, (1, 2, 1, 6, 0, 0, 0, 0)),
    (2560, (1, 3, 0, 5, 0, 1, 0, 0)),
    (-3840, (2, 1, 2, 5, 0, 0, 0, 0)),
    (-3040, (2, 2, 0, 5, 1, 0, 0, 0)),
    (-4640, (2, 2, 1, 4, 0, 1, 0, 0)),
    (-2195, (2, 3, 0, 3, 0, 2, 0, 0)),
    (192, (2, 3, 0, 4, 0, 0, 0, 1)),
    (1280, (3, 0, 3, 4, 0, 0, 0, 0)),
    (6080, (3, 1, 1, 4, 1, 0, 0, 0)),
    (1600, (3, 1, 2, 3, 0, 1, 0, 0)),
    (4600, (3, 2, 0, 3, 1, 1, 0, 0)),
    (-120, (3, 2, 0, 4, 0, 0, 1, 0)),
    (1985, (3, 2, 1, 2, 0, 2, 0, 0)),
    (-456, (3, 2, 1, 3, 0, 0, 0, 1)),
    (820, (3, 3, 0, 1, 0, 3, 0, 0)),
    (-126, (3, 3, 0, 2, 0, 1, 0, 1)),
    (-3040, (4, 0, 2, 3, 1, 0, 0, 0)),
    (480, (4, 0, 3, 2, 0, 1, 0, 0)),
    (-2000, (4, 1, 0, 3, 2, 0, 0, 0)),
    (-5200, (4, 1, 1, 2, 1, 1, 0, 0)),
    (240, (4, 1, 1, 3, 0, 0, 1, 0)),
    (615, (4, 1, 2, 1, 0, 2, 0, 0)),
    (336, (4, 1, 2, 2, 0, 0, 0, 1)),
    (-2040, (4, 2, 0, 1, 1, 2, 0, 0)),
    (90, (4, 2, 0, 2, 0, 1, 1, 0)),
    (-144, (4, 2, 0, 2, 1, 0, 0, 1)),
    (-420, (4, 2, 1, 0, 0, 3, 0, 0)),
    (432, (4, 2, 1, 1, 0, 1, 0, 1)),
    (-120, (4, 3, 0, 0, 0, 2, 0, 1)),
    (45, (4, 3, 0, 1, 0, 0, 0, 2)),
    (2000, (5, 0, 1, 2, 2, 0, 0, 0)),
    (600, (5, 0, 2, 1, 1, 1, 0, 0)),
    (-120, (5, 0, 2, 2, 0, 0, 1, 0)),
    (-405, (5, 0, 3, 0, 0, 2, 0, 0)),
    (-72, (5, 0, 3, 1, 0, 0, 0, 1)),
    (1620, (5, 1, 0, 1, 2, 1, 0, 0)),
    (180, (5, 1, 0, 2, 1, 0, 1, 0)),
    (840, (5, 1, 1, 0, 1, 2, 0, 0)),
    (-360, (5, 1, 1, 1, 0, 1, 1, 0)),
    (108, (5, 1, 1, 1, 1, 0, 0, 1)),
    (-306, (5, 1, 2, 0, 0, 1, 0, 1)),
    (120, (5, 2, 0, 0, 0, 2, 1, 0)),
    (240, (5, 2, 0, 0, 1, 1, 0, 1)),
    (-90, (5, 2, 0, 1, 0, 0, 1, 1)),
    (-45, (5, 2, 1, 0, 0, 0, 0, 2)),
    (-400, (6, 0, 0, 1, 3, 0, 0, 0)),
    (-420, (6, 0, 1, 0, 2, 1, 0, 0)),
    (-180, (6, 0, 1, 1, 1, 0, 1, 0)),
    (270, (6, 0, 2, 0, 0, 1, 1, 0)),
    (36, (6, 0, 2, 0, 1, 0, 0, 1)),
    (-240, (6, 1, 0, 0, 1, 1, 1, 0)),
    (-120, (6, 1, 0, 0, 2, 0, 0, 1)),
    (45, (6, 1, 0, 1, 0, 0, 2, 0)),
    (90, (6, 1, 1, 0, 0, 0, 1, 1)),
    (120, (7, 0, 0, 0, 2, 0, 1, 0)),
    (-45, (7, 0, 1, 0, 0, 0, 2, 0)),
)

_M_VARS = ((2, 0), (1, 1), (2, 1), (3, 0), (3, 1), (4, 0), (4, 1), (5, 0))


def m_numerator(c: Mapping[Coord, object]):
    vals = [c[v] for v in _M_VARS]
    total = 0
    for coef, exps in M_TABLE:
        term = coef
        for v, e in zip(vals, exps):
            if e == 1:
                term = term * v
            elif e:
                term = term * v**e
        total = total + term
    return total


def invariant_M(c: Mapping[Coord, object]):
    """Fifth-order invariant of the generic branch; rational in the jet.

    M = m_numerator / (36 u_xx^6 S_num W_num) where S_num, W_num are the
    numerators of the slope invariant and of the fourth-order invariant.
    """
    u20 = c[(2, 0)]
    s = s_numerator(c)
    wn = w_numerator(c)
    if u20 == 0 or s == 0 or wn == 0:
        raise ZeroDivisionError("M needs u_xx, the slope numerator and the W numerator nonzero")
    return m_numerator(c) / (36 * u20**6 * s * wn)


# cone-branch seventh-order numerator: exponent vectors over (u20 .. u70);
# generated by exact interpolation against the loop pipeline
Y_TABLE = (
    (11200, (0, 8, 0, 0, 0, 0)),
    (-33600, (1, 6, 1, 0, 0, 0)),
    (31500, (2, 4, 2, 0, 0, 0)),
    (6720, (2, 5, 0, 1, 0, 0)),
    (-7875, (3, 2, 3, 0, 0, 0)),
    (-12600, (3, 3, 1, 1, 0, 0)),
    (-4725, (4, 0, 4, 0, 0, 0)),
    (13230, (4, 1, 2, 1, 0, 0)),
    (-756, (4, 2, 0, 2, 0, 0)),
    (-3150, (4, 2, 1, 0, 1, 0)),
    (720, (4, 3, 0, 0, 0, 1)),
    (-2835, (5, 0, 1, 2, 0, 0)),
    (1890, (5, 0, 2, 0, 1, 0)),
    (1134, (5, 1, 0, 1, 1, 0)),
    (-810, (5, 1, 1, 0, 0, 1)),
    (-189, (6, 0, 0, 0, 2, 0)),
    (162, (6, 0, 0, 1, 0, 1)),
)

_Y_VARS = ((2, 0), (3, 0), (4, 0), (5, 0), (6, 0), (7, 0))


def y_numerator(c: Mapping[Coord, object]):
    vals = [c[v] for v in _Y_VARS]
    total = 0
    for coef, exps in Y_TABLE:
        term = coef
        for v, e in zip(vals, exps):
            if e == 1:
                term = term * v
            elif e:
                term = term * v**e
        total = total + term
    return total


def invariant_Y(c: Mapping[Coord, object]):
    """Seventh-order invariant of the cone branch (needs the fifth one nonzero).

    Y = y_num * S_num^{5/3} / (18 u_xx^{10} (9 u_xx^2 u5 - 45 u_xx u3 u4 + 40 u3^3)).
    """
    u20 = c[(2, 0)]
    s = s_numerator(c)
    conic = 9 * u20**2 * c[(5, 0)] - 45 * u20 * c[(3, 0)] * c[(4, 0)] + 40 * c[(3, 0)] ** 3
    if u20 == 0 or conic == 0:
        raise ZeroDivisionError("Y needs u_xx != 0 and a nonzero fifth-order invariant")
    s13 = cbrt(s)
    s53 = s13**5
    return y_numerator(c) * s53 / (18 * u20**10 * conic)


def invariant_Y_cubed(c: Mapping[Coord, object]):
    u20 = c[(2, 0)]
    s = s_numerator(c)
    conic = 9 * u20**2 * c[(5, 0)] - 45 * u20 * c[(3, 0)] * c[(4, 0)] + 40 * c[(3, 0)] ** 3
    return y_numerator(c) ** 3 * s**5 / (18**3 * u20**30 * conic**3)


# -- curve invariants -----------------------------------------------------------


def equiaffine_curvature(jet: Mapping[int, object]):
    """P = (1/3)(3 u2 u4 - 5 u3^2)/u2^{8/3}; zero exactly on parabolas."""
    u2, u3, u4 = jet[2], jet[3], jet[4]
    if u2 == 0:
        raise ZeroDivisionError("curvature needs u2 != 0")
    r = cbrt(u2)
    return (3 * u2 * u4 - 5 * u3 * u3) / (3 * r**8)


def conic_invariant(jet: Mapping[int, object]):
    """C = (1/9)(9 u2^2 u5 - 45 u2 u3 u4 + 40 u3^3)/u2^4; zero exactly on conics."""
    u2, u3, u4, u5 = jet[2], jet[3], jet[4], jet[5]
    if u2 == 0:
        raise ZeroDivisionError("conic invariant needs u2 != 0")
    return (9 * u2**2 * u5 - 45 * u2 * u3 * u4 + 40 * u3**3) / (9 * u2**4)


def curve_invariant_I5(jet: Mapping[int, object], eps: int):
    """Fifth-order full-affine invariant; eps must match the sign of 3 u2 u4 - 5 u3^2."""
    from .scalars import sqrt

    u2, u3, u4, u5 = jet[2], jet[3], jet[4], jet[5]
    disc = eps * (3 * u2 * u4 - 5 * u3 * u3)
    if to_float(disc) <= 0:
        raise ValueError("sign mismatch in the 3/2-power argument")
    num = 9 * u2**2 * u5 - 45 * u2 * u3 * u4 + 40 * u3**3
    root = sqrt(disc)
    return num / (3**0.5 * root**3)


def curve_invariant_F6(jet: Mapping[int, object]):
    """Sixth-order unimodular invariant of curves."""
    u2, u3, u4, u5, u6 = jet[2], jet[3], jet[4], jet[5], jet[6]
    r = cbrt(u2)
    num = 9 * u2**3 * u6 - 63 * u2**2 * u3 * u5 + 105 * u2 * u3**2 * u4 - 35 * u3**4
    return num / (9 * r**16)


def curve_invariant_F7(jet: Mapping[int, object]):
    """Seventh-order unimodular invariant of curves."""
    u2, u3, u4, u5, u6, u7 = jet[2], jet[3], jet[4], jet[5], jet[6], jet[7]
    r = cbrt(u2)
    num = (
        9 * u2**4 * u7
        - 84 * u2**3 * u3 * u6
        + 210 * u2**2 * u3**2 * u5
        - 105 * u2**2 * u3 * u4**2
        + 210 * u2 * u3**3 * u4
        - 280 * u3**5
    )
    return num / (9 * r**20)


def curve_invariant_F6_affine(jet: Mapping[int, object]):
    """Sixth-order full-affine invariant (denominator the fourth-order one squared)."""
    u2, u3, u4, u5, u6 = jet[2], jet[3], jet[4], jet[5], jet[6]
    disc = 3 * u2 * u4 - 5 * u3**2
    num = 9 * u2**3 * u6 - 63 * u2**2 * u3 * u5 + 105 * u2 * u3**2 * u4 - 35 * u3**4
    return num / disc**2


def euclid_curvature(jet: Mapping[int, object]):
    """u_xx / (1 + u_x^2)^{3/2}; exact when 1 + u_x^2 is a perfect rational square."""
    from .scalars import sqrt

    u1, u2 = jet[1], jet[2]
    root = sqrt(1 + u1 * u1)
    return u2 / root**3


# -- the third-order invariant of nondegenerate surfaces ------------------------


def _pick_sum(c: Mapping[Coord, object]):
    u20, u11, u02 = c[(2, 0)], c[(1, 1)], c[(0, 2)]
    u30, u21, u12, u03 = c[(3, 0)], c[(2, 1)], c[(1, 2)], c[(0, 3)]
    return (
        -18 * u20 * u21 * u11 * u12 * u02
        + 12 * u30 * u11**2 * u12 * u02
        + 9 * u20**2 * u12**2 * u02
        + 9 * u20 * u21**2 * u02**2
        - 6 * u30 * u21 * u11 * u02**2
        - 6 * u20 * u30 * u12 * u02**2
        + u30**2 * u02**3
        + 12 * u20 * u21 * u11**2 * u03
        - 8 * u30 * u11**3 * u03
        - 6 * u20**2 * u11 * u12 * u03
        - 6 * u20**2 * u21 * u02 * u03
        + 6 * u20 * u30 * u11 * u02 * u03
        + u20**3 * u03**2
    )


def pick_invariant(c: Mapping[Coord, object], kind: str):
    """Third-order invariant of elliptic/hyperbolic graphs, >= 0 by construction.

    Normalized so that the standard cubic normal forms with parameter C give
    C^2/2; the 13-term cubic form below is a relative invariant whose square
    over H^{11/2} is the printed rendering (which equals twice the square of
    this quantity).
    """
    H = invariant_H(c)
    h = to_float(H)
    if kind == "elliptic":
        if h <= 0:
            raise ValueError("elliptic evaluation needs a positive Hessian determinant")
    elif kind == "hyperbolic":
        if h >= 0:
            raise ValueError("hyperbolic evaluation needs a negative Hessian determinant")
    else:
        raise ValueError("kind must be 'elliptic' or 'hyperbolic'")
    mag = abs(h)
    s = abs(to_float(_pick_sum(c)))
    return s / (32.0 * mag**2.75)


# -- relative invariance and transfer laws --------------------------------------


def _centered(F: TruncatedSeries2) -> TruncatedSeries2:
    """Drop the constant term: the graph is translated through the origin."""
    if F[(0, 0)] == 0:
        return F
    coeffs = dict(F.coeffs)
    coeffs.pop((0, 0), None)
    return TruncatedSeries2(F.order, coeffs)


def hessian_transfer_check(F: TruncatedSeries2, T_fwd) -> dict:
    """Verify H_G = (delta^2 / Lambda^4) H_F at the origin for a forward map.

    ``T_fwd`` is the forward transform (target from source); its inverse acts
    on the series.  The graph is first translated through the origin, which
    changes none of the compared quantities.  Exact on rational data.
    """
    from .series import AffineTransform3, apply_affine
    from .jets import jets_of_series

    F = _centered(F)
    inv = _invert_transform(T_fwd)
    G = apply_affine(F, inv)
    cf = jets_of_series(F)
    cg = jets_of_series(G)
    fx, fy = cf[(1, 0)], cf[(0, 1)]
    delta = T_fwd.delta()
    lam = _lambda_forward(T_fwd, fx, fy)
    hf = invariant_H(cf.values)
    hg = invariant_H(cg.values)
    return {
        "H_F": hf,
        "H_G": hg,
        "delta": delta,
        "Lambda": lam,
        "lhs": hg * lam**4,
        "rhs": delta**2 * hf,
    }


def _lambda_forward(T, fx, fy):
    return (T.a + T.c * fx) * (T.l + T.m * fy) - (T.k + T.m * fx) * (T.b + T.c * fy)


def _invert_transform(T):
    from .series import AffineTransform3

    inv_lin = T.inverse_matrix()
    (d, n, w) = T.translation()
    tr = [-sum(inv_lin[i][h] * (d, n, w)[h] for h in range(3)) for i in range(3)]
    return AffineTransform3(
        a=inv_lin[0][0], b=inv_lin[0][1], c=inv_lin[0][2],
        k=inv_lin[1][0], l=inv_lin[1][1], m=inv_lin[1][2],
        p=inv_lin[2][0], q=inv_lin[2][1], r=inv_lin[2][2],
        d=tr[0], n=tr[1], w=tr[2],
    )


def hessian_congruence_check(F: TruncatedSeries2, T_fwd) -> dict:
    """The 2x2 congruence A Hess_G A^t = (delta/Lambda) Hess_F at the origin."""
    from .series import apply_affine
    from .jets import jets_of_series

    F = _centered(F)
    G = apply_affine(F, _invert_transform(T_fwd))
    cf = jets_of_series(F)
    cg = jets_of_series(G)
    fx, fy = cf[(1, 0)], cf[(0, 1)]
    A = (
        (T_fwd.a + T_fwd.c * fx, T_fwd.k + T_fwd.m * fx),
        (T_fwd.b + T_fwd.c * fy, T_fwd.l + T_fwd.m * fy),
    )
    HG = ((cg[(2, 0)], cg[(1, 1)]), (cg[(1, 1)], cg[(0, 2)]))
    lhs = [[0, 0], [0, 0]]
    for i in range(2):
        for j in range(2):
            lhs[i][j] = sum(A[i][a] * HG[a][b] * A[j][b] for a in range(2) for b in range(2))
    delta = T_fwd.delta()
    lam = _lambda_forward(T_fwd, fx, fy)
    factor = delta / lam
    rhs = (
        (factor * cf[(2, 0)], factor * cf[(1, 1)]),
        (factor * cf[(1, 1)], factor * cf[(0, 2)]),
    )
    return {"lhs": tuple(tuple(r) for r in lhs), "rhs": rhs}


def slope_transfer_check(F: TruncatedSeries2, T_fwd) -> dict:
    """S_G = (F_xx / Upsilon) S_F with Upsilon = (l + m F_y) F_xx - (k + m F_x) F_xy."""
    from .series import apply_affine
    from .jets import jets_of_series

    F = _centered(F)
    G = apply_affine(F, _invert_transform(T_fwd))
    cf = jets_of_series(F)
    cg = jets_of_series(G)
    fx, fy = cf[(1, 0)], cf[(0, 1)]
    upsilon = (T_fwd.l + T_fwd.m * fy) * cf[(2, 0)] - (T_fwd.k + T_fwd.m * fx) * cf[(1, 1)]
    sf = invariant_S(cf.values)
    sg = invariant_S(cg.values)
    return {"S_F": sf, "S_G": sg, "factor": cf[(2, 0)] / upsilon, "lhs": sg, "rhs": cf[(2, 0)] / upsilon * sf}


# -- evaluation reports ----------------------------------------------------------


class InvariantReport:
    """Branch label plus the invariant values defined on that branch."""

    def __init__(self, branch: str, values: Dict[str, object], tol: float, provenance: str):
        self.branch = branch
        self.values = values
        self.tol = tol
        self.provenance = provenance

    def to_dict(self) -> dict:
        from .scalars import scalar_to_string

        out = {"branch": self.branch, "tolerance": self.tol, "provenance": self.provenance}
        for key in ("H", "S", "W", "X", "Y", "M"):
            v = self.values.get(key)
            out[key] = None if v is None else scalar_to_string(v)
        return out


def scaled_zero(value, monomials, tol) -> bool:
    """|value| <= tol (1 + scale), scale the largest absolute numerator monomial."""
    scale = max([0.0] + [abs(to_float(m)) for m in monomials])
    return abs(to_float(value)) <= tol * (1.0 + scale)


def _h_monomials(c):
    return (c[(2, 0)] * c[(0, 2)], c[(1, 1)] * c[(1, 1)])


def _s_monomials(c):
    return (c[(2, 0)] * c[(2, 1)], c[(1, 1)] * c[(3, 0)])


def _w_monomials(c):
    u20, u11, u21, u30 = c[(2, 0)], c[(1, 1)], c[(2, 1)], c[(3, 0)]
    return (
        u20 * u20 * c[(3, 1)],
        u20 * c[(4, 0)] * u11,
        2 * u30 * u30 * u11,
        2 * u30 * u21 * u20,
    )


def evaluate_at_jet(c: Mapping[Coord, object], tol: float = 1e-9) -> InvariantReport:
    """Branch decision and invariant values at a single filled jet."""
    u20, u11, u02 = c[(2, 0)], c[(1, 1)], c[(0, 2)]
    flat_scale = max(abs(to_float(u20)), abs(to_float(u11)), abs(to_float(u02)))
    H = invariant_H(c)
    values: Dict[str, object] = {"H": H}
    if flat_scale <= tol:
        return InvariantReport("Flat", values, tol, "closed-form")
    if not scaled_zero(H, _h_monomials(c), tol):
        kind = "elliptic" if to_float(H) > 0 else "hyperbolic"
        values["Pick"] = pick_invariant(c, kind)
        return InvariantReport(kind.capitalize(), values, tol, "closed-form")
    S = invariant_S(c)
    values["S"] = S
    if scaled_zero(s_numerator(c), _s_monomials(c), tol):
        return InvariantReport("Cylinder-branch", values, tol, "closed-form")
    W = invariant_W(c)
    values["W"] = W
    if scaled_zero(w_numerator(c), _w_monomials(c), tol):
        X = invariant_X(c)
        values["X"] = X
        if not scaled_zero(X, (X,), tol):
            try:
                values["Y"] = invariant_Y(c)
            except KeyError:
                pass
        return InvariantReport("Cone-branch", values, tol, "closed-form")
    values["M"] = invariant_M(c)
    return InvariantReport("Generic", values, tol, "closed-form")
