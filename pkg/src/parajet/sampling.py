"""Seeded random sampling of jets, curves and transforms for the test suites.

Domain conventions shared by property tests and the CLI verification suites:
independent coordinates uniform in [-2, 2], resampled until |u_{2,0}| >= 0.3,
|slope numerator| >= 0.1, and per-branch floors on the fourth-order-invariant
numerator, keeping all samples away from the excluded zero sets and from
denominator blowups.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, Tuple

from .invariants import s_numerator, w_numerator
from .jets import ParabolicJet, realize_series
from .series import AffineTransform3, TruncatedSeries1, TruncatedSeries2

Coord = Tuple[int, int]

U20_FLOOR = 0.3
S_FLOOR = 0.1
W_FLOOR = 0.1


def rand_rational(rng: random.Random, lo=-2, hi=2, den=16) -> Fraction:
    return Fraction(rng.randint(int(lo * den), int(hi * den)), den)


def random_parabolic_jet(
    rng: random.Random,
    order: int,
    exact: bool = False,
    generic_floor: float | None = W_FLOOR,
) -> ParabolicJet:
    """A random rank-one jet; with a floor on the W numerator when requested."""

    def val():
        if exact:
            return rand_rational(rng)
        return Fraction(rng.uniform(-2.0, 2.0)).limit_denominator(10**6)

    while True:
        coords: Dict[Coord, object] = {(0, 0): val()}
        for j in range(1, order + 1):
            coords[(j, 0)] = val()
        for j in range(order):
            coords[(j, 1)] = val()
        if abs(float(coords[(2, 0)])) < U20_FLOOR:
            continue
        if abs(float(s_numerator(coords))) < S_FLOOR:
            continue
        if generic_floor is not None and abs(float(w_numerator(coords))) < generic_floor:
            continue
        return ParabolicJet(order, coords)


def random_cone_branch_jet(rng: random.Random, order: int, exact: bool = False) -> ParabolicJet:
    """A random jet on the vanishing-fourth-order-invariant subvariety.

    The mixed coordinates u_{j,1} for j >= 3 are solved from the vanishing of
    the fourth-order numerator and all its total-derivative consequences, by
    successive linear solves on the realized series (each unknown enters the
    corresponding series coefficient linearly).  The chain always runs in
    exact rational arithmetic so the jet sits exactly on the subvariety; with
    ``exact=False`` the free draws are uniform floats converted losslessly.
    """

    def val():
        if exact:
            return rand_rational(rng)
        return Fraction(rng.uniform(-2.0, 2.0)).limit_denominator(10**6)

    while True:
        coords: Dict[Coord, object] = {(0, 0): val(), (1, 0): val(), (0, 1): val()}
        for j in range(2, order + 1):
            coords[(j, 0)] = val()
        coords[(1, 1)] = val()
        coords[(2, 1)] = val()
        if abs(float(coords[(2, 0)])) < U20_FLOOR:
            continue
        if abs(float(s_numerator(coords))) < S_FLOOR:
            continue
        u20, u11, u21, u30, u40 = (
            coords[(2, 0)],
            coords[(1, 1)],
            coords[(2, 1)],
            coords[(3, 0)],
            coords[(4, 0)],
        )
        coords[(3, 1)] = (u20 * u40 * u11 - 2 * u30**2 * u11 + 2 * u30 * u21 * u20) / u20**2
        for m in range(4, order):
            coords[(m, 1)] = 0
            g0 = _w_chain_residual(coords, order, m)
            coords[(m, 1)] = 1
            g1 = _w_chain_residual(coords, order, m)
            coords[(m, 1)] = -g0 / (g1 - g0)
        p = ParabolicJet(order, coords)
        # keep away from the degenerate fifth-order locus
        conic = (
            9 * p[(2, 0)] ** 2 * p[(5, 0)]
            - 45 * p[(2, 0)] * p[(3, 0)] * p[(4, 0)]
            + 40 * p[(3, 0)] ** 3
        )
        if abs(float(conic)) < 0.1:
            continue
        return p


def _w_chain_residual(coords, order, m):
    sub: Dict[Coord, object] = {(0, 0): coords[(0, 0)]}
    for j in range(1, m + 2):
        sub[(j, 0)] = coords[(j, 0)]
    for j in range(m + 1):
        sub[(j, 1)] = coords[(j, 1)]
    F = realize_series(ParabolicJet(m + 1, sub))
    return _w_numerator_series(F)[(m - 3, 0)]


def _w_numerator_series(F: TruncatedSeries2) -> TruncatedSeries2:
    fx = F.derivative("x")
    fy = F.derivative("y")
    fxx = fx.derivative("x")
    fxy = fx.derivative("y")
    fxxx = fxx.derivative("x")
    fxxy = fxx.derivative("y")
    fxxxx = fxxx.derivative("x")
    fxxxy = fxxx.derivative("y")
    two = TruncatedSeries2(fxxxy.order, {(0, 0): Fraction(2)})
    return fxx * fxx * fxxxy - fxx * fxxxx * fxy + fxxx * fxxx * fxy * two - fxxx * fxxy * fxx * two


def random_curve_jet(
    rng: random.Random, order: int, exact: bool = False, affine_floor: float | None = None
) -> Dict[int, object]:
    """Curve jet u_0..u_order with |u_2| floored; optional full-affine floor."""

    def val():
        if exact:
            return rand_rational(rng)
        return Fraction(rng.uniform(-2.0, 2.0)).limit_denominator(10**6)

    while True:
        jet = {i: val() for i in range(order + 1)}
        if abs(float(jet[2])) < U20_FLOOR:
            continue
        if affine_floor is not None:
            disc = 3 * jet[2] * jet[4] - 5 * jet[3] ** 2
            if abs(float(disc)) < affine_floor:
                continue
        return jet


def near_identity_transform(
    rng: random.Random, spread: Fraction = Fraction(1, 20), special: bool = True
) -> AffineTransform3:
    """A random rational transform near the identity; exactly unimodular if special."""

    def eps():
        d = 40
        return Fraction(rng.randint(-int(spread * d * 2), int(spread * d * 2)), d * 2)

    a, b, c = 1 + eps(), eps(), eps()
    k, l, m = eps(), 1 + eps(), eps()
    p, q = eps(), eps()
    r = 1 + eps()
    T = AffineTransform3(a=a, b=b, c=c, k=k, l=l, m=m, p=p, q=q, r=r)
    if special:
        # solve r exactly from det = 1; the r-cofactor is near 1, never zero here
        cof_r = a * l - b * k
        rest = T.delta() - r * cof_r
        r = (1 - rest) / cof_r
        T = AffineTransform3(a=a, b=b, c=c, k=k, l=l, m=m, p=p, q=q, r=r)
    return T


def random_curve_series(rng: random.Random, order: int, exact=True) -> TruncatedSeries1:
    def val():
        return rand_rational(rng) if exact else rng.uniform(-2.0, 2.0)

    while True:
        coeffs = {i: val() for i in range(2, order + 1)}
        if abs(float(coeffs[2])) >= U20_FLOOR:
            return TruncatedSeries1(order, coeffs)
