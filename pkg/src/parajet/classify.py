"""Developable-surface families, graph realization, and classification.

A developable graph is locally a cylinder, a cone, or the tangent surface of
a space curve; the three cases are separated by the vanishing pattern of the
slope invariant S and the fourth-order invariant W.  Families are realized
as graphing series by a graded linear solve of u(t, v) = F(x(t, v), y(t, v)),
which reproduces the printed coefficient tables; classification evaluates
the invariants on a sample grid plus the jet-coefficient criterion at the
base point and reports its witnesses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .invariants import (
    _s_monomials,
    _w_monomials,
    invariant_H,
    s_numerator,
    scaled_zero,
    w_numerator,
)
from .jets import jets_of_series
from .series import TruncatedSeries1, TruncatedSeries2

Coord = Tuple[int, int]


@dataclass(frozen=True)
class Cylinder:
    profile: TruncatedSeries1

    kind = "cylinder"


@dataclass(frozen=True)
class Cone:
    """Directrix c(t) with c(0) = c'(0) = 0 and c'' != 0; apex on the y-axis."""

    directrix: TruncatedSeries1

    kind = "cone"

    def __post_init__(self):
        c = self.directrix
        if c[0] != 0 or c[1] != 0:
            raise ValueError("directrix must vanish to first order")
        if c[2] == 0:
            raise ValueError("degenerate cone: c'' = 0")


@dataclass(frozen=True)
class Tangential:
    """Tangent surface of (a(t), -1 + t, c(t)) with a, c vanishing to first order."""

    a: TruncatedSeries1
    c: TruncatedSeries1

    kind = "tangential"

    def __post_init__(self):
        for s in (self.a, self.c):
            if s[0] != 0 or s[1] != 0:
                raise ValueError("curve components must vanish to first order")
        if self.a[2] == 0:
            raise ValueError("degenerate tangential family: a'' = 0 at the marked point")


@dataclass(frozen=True)
class Graph:
    series: TruncatedSeries2

    kind = "graph"


def _solve_graph(x2: TruncatedSeries2, y2: TruncatedSeries2, u2: TruncatedSeries2) -> TruncatedSeries2:
    """F with F(x(t,v), y(t,v)) = u(t,v), by graded inversion of the linear part.

    Requires x, y, u to vanish at the origin and the linear part of (x, y) to
    be invertible; coefficients solve order by order, exactly on rationals.
    """
    n = u2.order
    a11, a12 = x2[(1, 0)], x2[(0, 1)]
    a21, a22 = y2[(1, 0)], y2[(0, 1)]
    det = a11 * a22 - a12 * a21
    if det == 0:
        raise ValueError("parametrization has a singular linear part")
    # inverse linear substitution (t, v) = L^{-1}(x, y) as series
    inv = (
        TruncatedSeries2(n, {(1, 0): a22 / det, (0, 1): -a12 / det}),
        TruncatedSeries2(n, {(1, 0): -a21 / det, (0, 1): a11 / det}),
    )
    from .series import compose2

    F = TruncatedSeries2(n, {})
    for d in range(1, n + 1):
        # residual of degree d, in the (t, v) chart
        FofXY = compose2(F, x2, y2)
        resid = u2 - FofXY
        layer = TruncatedSeries2(n, {jk: c for jk, c in resid.coeffs.items() if jk[0] + jk[1] == d})
        if not layer.coeffs:
            continue
        # push the layer through the inverse linear map to read F's degree-d part
        corr = compose2(layer, inv[0], inv[1])
        merged = dict(F.coeffs)
        for jk, c in corr.coeffs.items():
            if jk[0] + jk[1] == d and c != 0:
                merged[jk] = merged.get(jk, 0) + c
        F = TruncatedSeries2(n, merged)
    return F


def realize_graph(fam, order: int) -> TruncatedSeries2:
    """The graphing series of the family at its marked point."""
    if isinstance(fam, Graph):
        return fam.series
    if isinstance(fam, Cylinder):
        prof = fam.profile
        return TruncatedSeries2(order, {(j, 0): c for j, c in prof.coeffs.items() if j <= order})
    if isinstance(fam, Cone):
        c = fam.directrix
        n = order
        # x = (1 - v) t, y = v, u = (1 - v) c(t)
        x2 = TruncatedSeries2(n, {(1, 0): Fraction(1), (1, 1): Fraction(-1)})
        y2 = TruncatedSeries2(n, {(0, 1): Fraction(1)})
        cu = {(j, 0): cv for j, cv in c.coeffs.items() if j <= n}
        cu.update({(j, 1): -cv for j, cv in c.coeffs.items() if j + 1 <= n})
        u2 = TruncatedSeries2(n, cu)
        return _solve_graph(x2, y2, u2)
    if isinstance(fam, Tangential):
        a, c = fam.a, fam.c
        n = order
        # around (t, v) = (0, 1): with v = 1 + w,
        # x = a(t) + (1 + w) a'(t), y = t + w, u = c(t) + (1 + w) c'(t)
        ap, cp = a.derivative(), c.derivative()

        def embed(s1: TruncatedSeries1, col: int) -> Dict[Coord, object]:
            return {(j, col): cv for j, cv in s1.coeffs.items() if j + col <= n}

        x2 = TruncatedSeries2(n, {})
        for src, col in ((a, 0), (ap, 0), (ap, 1)):
            add = embed(src, col)
            merged = dict(x2.coeffs)
            for jk, cv in add.items():
                merged[jk] = merged.get(jk, 0) + cv
            x2 = TruncatedSeries2(n, merged)
        y2 = TruncatedSeries2(n, {(1, 0): Fraction(1), (0, 1): Fraction(1)})
        u2 = TruncatedSeries2(n, {})
        for src, col in ((c, 0), (cp, 0), (cp, 1)):
            add = embed(src, col)
            merged = dict(u2.coeffs)
            for jk, cv in add.items():
                merged[jk] = merged.get(jk, 0) + cv
            u2 = TruncatedSeries2(n, merged)
        return _solve_graph(x2, y2, u2)
    raise TypeError(f"not a surface family: {fam!r}")


@dataclass
class Classification:
    point_type: str
    developable_kind: Optional[str]
    witnesses: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        from .scalars import to_float

        return {
            "point_type": self.point_type,
            "kind": self.developable_kind,
            "witnesses": {k: to_float(v) for k, v in self.witnesses.items()},
        }


class MixedTypeError(ValueError):
    pass


def _padded(F: TruncatedSeries2, order: int) -> TruncatedSeries2:
    return TruncatedSeries2(order, dict(F.coeffs))


def _full_products(F: TruncatedSeries2):
    """The Hessian, slope and fourth-order numerators as full polynomials.

    Padding before multiplying keeps every cross term, so a truncated series
    that realizes a family to its order evaluates these exactly: the low part
    vanishes and the high part is the honest truncation tail.
    """
    big = 4 * F.order
    G = _padded(F, big)
    fx = G.derivative("x")
    fy = G.derivative("y")
    fxx = fx.derivative("x")
    fxy = fx.derivative("y")
    fyy = fy.derivative("y")
    fxxx = fxx.derivative("x")
    fxxy = fxx.derivative("y")
    fxxxx = fxxx.derivative("x")
    fxxxy = fxxx.derivative("y")
    two = TruncatedSeries2(big, {(0, 0): Fraction(2)})
    H = fxx * fyy - fxy * fxy
    S = fxx * fxxy - fxy * fxxx
    W = fxx * fxx * fxxxy - fxx * fxxxx * fxy + fxxx * fxxx * fxy * two - fxxx * fxxy * fxx * two
    return H, S, W


def _low_zero(num: TruncatedSeries2, low_degree: int, tol: float) -> bool:
    from .scalars import to_float

    # monomial-convention magnitudes, measured against a near-low window:
    # these graphs may have small convergence radii, so the far tail grows
    # geometrically and must not set the scale of the zero test
    coeffs = [
        ((j, k), abs(to_float(c)) / (math.factorial(j) * math.factorial(k)))
        for (j, k), c in num.coeffs.items()
    ]
    scale = max([1.0] + [v for jk, v in coeffs if jk[0] + jk[1] <= low_degree + 2])
    return all(v <= tol * scale for jk, v in coeffs if jk[0] + jk[1] <= low_degree)


def _tail_envelope(num: TruncatedSeries2, low_degree: int, pt) -> float:
    from .scalars import to_float

    hx, hy = abs(to_float(pt[0])), abs(to_float(pt[1]))
    total = 0.0
    for (j, k), c in num.coeffs.items():
        if j + k > low_degree:
            total += abs(to_float(c)) * hx**j * hy**k / (math.factorial(j) * math.factorial(k))
    return total


def _grid_zero(num: TruncatedSeries2, low_degree: int, pt, tol: float, monoms) -> bool:
    from .scalars import to_float

    value = num.eval(pt[0], pt[1])
    scale = max([0.0] + [abs(to_float(m)) for m in monoms])
    return abs(to_float(value)) <= tol * (1.0 + scale) + 2.0 * _tail_envelope(num, low_degree, pt)


def classify(
    F: TruncatedSeries2,
    sample_points: Optional[List[Tuple[object, object]]] = None,
    tol: float = 1e-9,
) -> Classification:
    """Point type by Hessian rank; parabolic surfaces split by S and W.

    Identical vanishing is decided by the jet coefficients at the base point
    together with agreement on a finite grid of base points; each grid value
    is compared against the truncation-tail envelope of the corresponding
    numerator polynomial, and disagreement between the two criteria reports a
    mixed type instead of guessing.
    """
    if sample_points is None:
        h = Fraction(1, 8)
        sample_points = [(0, 0), (h, 0), (0, h), (-h, h), (h, -h)]
    witnesses: Dict[str, object] = {}
    n = F.order
    Hfull, Sfull, Wfull = _full_products(F)

    def jets_at(pt):
        return jets_of_series(F.shift(pt[0], pt[1])).values

    from .invariants import _h_monomials
    from .scalars import to_float

    # point type across the grid
    types = []
    for pt in sample_points:
        c = jets_at(pt)
        flat_scale = max(abs(to_float(c[(2, 0)])), abs(to_float(c[(1, 1)])), abs(to_float(c[(0, 2)])))
        if flat_scale <= tol:
            types.append("flat")
        elif _grid_zero(Hfull, n - 2, pt, tol, _h_monomials(c)):
            types.append("parabolic")
        else:
            types.append("elliptic" if to_float(invariant_H(c)) > 0 else "hyperbolic")
    if len(set(types)) != 1:
        raise MixedTypeError(f"inconsistent point types across samples: {types}")
    point_type = types[0]
    witnesses["H"] = invariant_H(jets_at(sample_points[0]))
    if point_type != "parabolic":
        return Classification(point_type, None, witnesses)
    if not _low_zero(Hfull, n - 2, 1e3 * tol):
        raise MixedTypeError("Hessian vanishes on the grid but not as a jet")

    # slope invariant: the jet criterion decides (analyticity); when it says
    # zero, every grid value must stay inside the truncation-tail envelope,
    # otherwise the surface is of mixed type
    c0 = jets_at((0, 0))
    jet_s_zero = _low_zero(Sfull, n - 3, 1e3 * tol)
    if jet_s_zero and not all(
        _grid_zero(Sfull, n - 3, pt, tol, _s_monomials(jets_at(pt))) for pt in sample_points
    ):
        raise MixedTypeError("slope invariant vanishes as a jet but not across the grid")
    witnesses["S"] = s_numerator(c0) / c0[(2, 0)] ** 2
    if jet_s_zero:
        return Classification(point_type, "cylinder", witnesses)
    if scaled_zero(s_numerator(c0), _s_monomials(c0), tol):
        raise MixedTypeError("slope invariant vanishes at the base point but not identically")

    jet_w_zero = _low_zero(Wfull, n - 4, 1e3 * tol)
    if jet_w_zero and not all(
        _grid_zero(Wfull, n - 4, pt, tol, _w_monomials(jets_at(pt))) for pt in sample_points
    ):
        raise MixedTypeError("fourth-order invariant vanishes as a jet but not across the grid")
    from .invariants import invariant_W

    try:
        witnesses["W"] = invariant_W(c0)
    except ZeroDivisionError:
        pass
    if jet_w_zero:
        return Classification(point_type, "cone", witnesses)
    if scaled_zero(w_numerator(c0), _w_monomials(c0), tol):
        raise MixedTypeError("fourth-order invariant vanishes at the base point but not identically")
    return Classification(point_type, "tangential", witnesses)


def torsion(alpha: Tuple[TruncatedSeries1, TruncatedSeries1, TruncatedSeries1], t0=0):
    """The printed torsion expression for curves (a(t), -1 + t, c(t)).

    tau = (1 + a'^2 + c'^2) / (a''^2 + c''^2)^2 * (c'' a''' - a'' c''');
    its zero set flags cuspidal edges of the tangent surface.  (The classical
    normalization divides by |alpha' x alpha''|^2 instead; the zero sets
    agree, and only the zero set is used here.)
    """
    a, y, c = alpha
    if y[1] == 0:
        raise ValueError("expected a curve graphed over its second coordinate")
    ap, cp = a.derivative(), c.derivative()
    app, cpp = ap.derivative(), cp.derivative()
    appp, cppp = app.derivative(), cpp.derivative()
    av, cv = ap.eval(t0), cp.eval(t0)
    a2, c2 = app.eval(t0), cpp.eval(t0)
    a3, c3 = appp.eval(t0), cppp.eval(t0)
    denom = (a2 * a2 + c2 * c2) ** 2
    if denom == 0:
        raise ZeroDivisionError("degenerate second derivatives")
    return (1 + av * av + cv * cv) / denom * (c2 * a3 - a2 * c3)
