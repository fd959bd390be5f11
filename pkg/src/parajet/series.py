"""Truncated power series in one and two variables, factorial convention.

A series of order N stores coefficients ``F[j]`` (or ``F[j, k]``) for
``j + k <= N`` and denotes ``sum F_{j,k} x^j y^k / (j! k!)``, so the stored
coefficient equals the corresponding partial derivative at the expansion
point.  Coefficients are exact ``Fraction``s or ``float``s; a series never
mixes the two kinds on construction from JSON, and arithmetic propagates
float-ness the way IEEE does.

The module also provides affine transforms of graphs: an
:class:`AffineTransform3` holds the *inverse* substitution (source
coordinates as functions of target coordinates), and :func:`apply_affine`
produces the graphing series of the transformed surface by solving the
fundamental equation with a degree-graded Newton step.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Tuple

from .scalars import is_exact, scalar_from_string, scalar_to_string

_BINOM_CACHE: dict = {}


def _binom(n: int, k: int) -> int:
    key = (n, k)
    v = _BINOM_CACHE.get(key)
    if v is None:
        v = math.comb(n, k)
        _BINOM_CACHE[key] = v
    return v


class TruncatedSeries1:
    """Univariate truncated series, value sum_i F_i x^i / i!."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Dict[int, object] | None = None):
        if order < 0:
            raise ValueError("order must be >= 0")
        self.order = order
        self.coeffs = {}
        if coeffs:
            for i, c in coeffs.items():
                if i <= order and c != 0:
                    self.coeffs[i] = c

    def __getitem__(self, i: int):
        return self.coeffs.get(i, 0)

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries1)
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs.values())

    def copy(self) -> "TruncatedSeries1":
        return TruncatedSeries1(self.order, dict(self.coeffs))

    def __add__(self, other: "TruncatedSeries1") -> "TruncatedSeries1":
        n = min(self.order, other.order)
        out = {}
        for i in range(n + 1):
            c = self[i] + other[i]
            if c != 0:
                out[i] = c
        return TruncatedSeries1(n, out)

    def __sub__(self, other: "TruncatedSeries1") -> "TruncatedSeries1":
        return self + other.scale(-1)

    def scale(self, s) -> "TruncatedSeries1":
        return TruncatedSeries1(self.order, {i: s * c for i, c in self.coeffs.items()})

    def __mul__(self, other: "TruncatedSeries1") -> "TruncatedSeries1":
        n = min(self.order, other.order)
        out: Dict[int, object] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                d = i + j
                if d > n:
                    continue
                t = _binom(d, i) * a * b
                out[d] = out.get(d, 0) + t
        return TruncatedSeries1(n, out)

    def derivative(self) -> "TruncatedSeries1":
        """d/dx, order drops by one."""
        if self.order == 0:
            return TruncatedSeries1(0, {})
        return TruncatedSeries1(self.order - 1, {i - 1: c for i, c in self.coeffs.items() if i >= 1})

    def eval(self, x):
        """Evaluate the truncated polynomial at x."""
        total = 0
        fact = 1
        for i in range(self.order + 1):
            if i > 0:
                fact *= i
            c = self.coeffs.get(i)
            if c is not None:
                total = total + c * x**i / fact
        return total

    def shift(self, h) -> "TruncatedSeries1":
        """Re-expand at x = h: G(x') := F(h + x'); exact on the truncation."""
        out: Dict[int, object] = {}
        for j in range(self.order + 1):
            acc = 0
            hp = 1
            fact = 1
            for a in range(j, self.order + 1):
                if a > j:
                    hp = hp * h
                    fact *= a - j
                c = self.coeffs.get(a)
                if c is not None:
                    acc = acc + c * hp / fact
            if acc != 0:
                out[j] = acc
        return TruncatedSeries1(self.order, out)

    def __repr__(self):
        terms = ", ".join(f"{i}: {c}" for i, c in sorted(self.coeffs.items()))
        return f"TruncatedSeries1(order={self.order}, {{{terms}}})"


class TruncatedSeries2:
    """Bivariate truncated series, value sum F_{j,k} x^j y^k / (j! k!)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Dict[Tuple[int, int], object] | None = None):
        if order < 0:
            raise ValueError("order must be >= 0")
        self.order = order
        self.coeffs = {}
        if coeffs:
            for (j, k), c in coeffs.items():
                if j + k <= order and c != 0:
                    self.coeffs[(j, k)] = c

    def __getitem__(self, jk: Tuple[int, int]):
        return self.coeffs.get(jk, 0)

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedSeries2)
            and self.order == other.order
            and self.coeffs == other.coeffs
        )

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self.coeffs.values())

    def copy(self) -> "TruncatedSeries2":
        return TruncatedSeries2(self.order, dict(self.coeffs))

    def __add__(self, other: "TruncatedSeries2") -> "TruncatedSeries2":
        n = min(self.order, other.order)
        out: Dict[Tuple[int, int], object] = {}
        for jk in set(self.coeffs) | set(other.coeffs):
            if jk[0] + jk[1] <= n:
                c = self[jk] + other[jk]
                if c != 0:
                    out[jk] = c
        return TruncatedSeries2(n, out)

    def __sub__(self, other: "TruncatedSeries2") -> "TruncatedSeries2":
        return self + other.scale(-1)

    def scale(self, s) -> "TruncatedSeries2":
        return TruncatedSeries2(self.order, {jk: s * c for jk, c in self.coeffs.items()})

    def __mul__(self, other: "TruncatedSeries2") -> "TruncatedSeries2":
        n = min(self.order, other.order)
        out: Dict[Tuple[int, int], object] = {}
        for (a, b), u in self.coeffs.items():
            for (c, d), v in other.coeffs.items():
                j, k = a + c, b + d
                if j + k > n:
                    continue
                t = _binom(j, a) * _binom(k, b) * u * v
                out[(j, k)] = out.get((j, k), 0) + t
        return TruncatedSeries2(n, out)

    def derivative(self, direction: str) -> "TruncatedSeries2":
        if self.order == 0:
            return TruncatedSeries2(0, {})
        if direction == "x":
            return TruncatedSeries2(
                self.order - 1, {(j - 1, k): c for (j, k), c in self.coeffs.items() if j >= 1}
            )
        if direction == "y":
            return TruncatedSeries2(
                self.order - 1, {(j, k - 1): c for (j, k), c in self.coeffs.items() if k >= 1}
            )
        raise ValueError("direction must be 'x' or 'y'")

    def eval(self, x, y):
        total = 0
        for (j, k), c in self.coeffs.items():
            total = total + c * x**j * y**k / (math.factorial(j) * math.factorial(k))
        return total

    def shift(self, hx, hy) -> "TruncatedSeries2":
        """Re-expand at (hx, hy); exact on the truncation."""
        out: Dict[Tuple[int, int], object] = {}
        for (j, k) in [(j, k) for j in range(self.order + 1) for k in range(self.order + 1 - j)]:
            acc = 0
            for (a, b), c in self.coeffs.items():
                if a < j or b < k:
                    continue
                acc = acc + c * hx ** (a - j) * hy ** (b - k) / (
                    math.factorial(a - j) * math.factorial(b - k)
                )
            if acc != 0:
                out[(j, k)] = acc
        return TruncatedSeries2(self.order, out)

    def x_profile(self) -> TruncatedSeries1:
        """The section y = 0 as a univariate series."""
        return TruncatedSeries1(self.order, {j: c for (j, k), c in self.coeffs.items() if k == 0})

    def __repr__(self):
        terms = ", ".join(f"{jk}: {c}" for jk, c in sorted(self.coeffs.items()))
        return f"TruncatedSeries2(order={self.order}, {{{terms}}})"


def from_monomials2(order: int, monos: Dict[Tuple[int, int], object]) -> TruncatedSeries2:
    """Build from plain monomial coefficients c_{j,k} x^j y^k."""
    return TruncatedSeries2(
        order,
        {jk: c * math.factorial(jk[0]) * math.factorial(jk[1]) for jk, c in monos.items()},
    )


def from_monomials1(order: int, monos: Dict[int, object]) -> TruncatedSeries1:
    return TruncatedSeries1(order, {i: c * math.factorial(i) for i, c in monos.items()})


def one2(order: int) -> TruncatedSeries2:
    return TruncatedSeries2(order, {(0, 0): Fraction(1)})


def compose2(F: TruncatedSeries2, X: TruncatedSeries2, Y: TruncatedSeries2) -> TruncatedSeries2:
    """Coefficients of F(X(s,t), Y(s,t)) for substitutions vanishing at the origin."""
    if X[(0, 0)] != 0 or Y[(0, 0)] != 0:
        raise ValueError("substitution series must have zero constant term")
    n = min(F.order, X.order, Y.order)
    # Work in monomial convention: F = sum f_{a,b} x^a y^b, then accumulate
    # f_{a,b} X^a Y^b with cached powers.
    xpows = [one2(n)]
    ypows = [one2(n)]
    for _ in range(n):
        xpows.append(xpows[-1] * TruncatedSeries2(n, dict(X.coeffs)))
        ypows.append(ypows[-1] * TruncatedSeries2(n, dict(Y.coeffs)))
    out = TruncatedSeries2(n, {})
    for (a, b), Fc in F.coeffs.items():
        if a + b > n:
            continue
        f = Fc / Fraction(math.factorial(a) * math.factorial(b)) if is_exact(Fc) else Fc / (
            math.factorial(a) * math.factorial(b)
        )
        out = out + (xpows[a] * ypows[b]).scale(f)
    return out


class _Series3:
    """Internal trivariate truncated series in (s, t, v), factorial convention."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Dict[Tuple[int, int, int], object] | None = None):
        self.order = order
        self.coeffs = {}
        if coeffs:
            for key, c in coeffs.items():
                if sum(key) <= order and c != 0:
                    self.coeffs[key] = c

    def __getitem__(self, key):
        return self.coeffs.get(key, 0)

    def add(self, other: "_Series3") -> "_Series3":
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            s = out.get(key, 0) + c
            if s != 0:
                out[key] = s
            elif key in out:
                del out[key]
        return _Series3(min(self.order, other.order), out)

    def scale(self, s) -> "_Series3":
        return _Series3(self.order, {k: s * c for k, c in self.coeffs.items()})

    def mul(self, other: "_Series3") -> "_Series3":
        n = min(self.order, other.order)
        out: Dict[Tuple[int, int, int], object] = {}
        for (a1, b1, c1), u in self.coeffs.items():
            for (a2, b2, c2), v in other.coeffs.items():
                j, k, l = a1 + a2, b1 + b2, c1 + c2
                if j + k + l > n:
                    continue
                t = _binom(j, a1) * _binom(k, b1) * _binom(l, c1) * u * v
                out[(j, k, l)] = out.get((j, k, l), 0) + t
        return _Series3(n, out)

    def dv_at_zero(self):
        return self.coeffs.get((0, 0, 1), 0)

    def substitute_v(self, G: TruncatedSeries2, upto: int | None = None) -> TruncatedSeries2:
        """Evaluate Phi(s, t, G(s, t)) truncated at degree ``upto``.

        G must vanish at the origin, so the substitution is degree-graded and
        the truncated result only consumes coefficients up to that degree.
        """
        if G[(0, 0)] != 0:
            raise ValueError("graph series must vanish at the origin")
        n = min(self.order, G.order)
        if upto is not None:
            n = min(n, upto)
        Gn = TruncatedSeries2(n, {jk: c for jk, c in G.coeffs.items() if jk[0] + jk[1] <= n})
        gpows = [one2(n)]
        vmax = max((c for (_, _, c) in self.coeffs), default=0)
        for _ in range(min(n, vmax)):
            gpows.append(gpows[-1] * Gn)
        out: Dict[Tuple[int, int], object] = {}
        for (a, b, c), coeff in self.coeffs.items():
            if a + b > n or c > len(gpows) - 1:
                continue
            f = coeff / Fraction(math.factorial(c)) if is_exact(coeff) else coeff / math.factorial(c)
            for (j, k), g in gpows[c].coeffs.items():
                jj, kk = a + j, b + k
                if jj + kk > n:
                    continue
                t = _binom(jj, a) * _binom(kk, b) * f * g
                key = (jj, kk)
                out[key] = out.get(key, 0) + t
        return TruncatedSeries2(n, out)


def series3_from_bivariate_in_linear(
    F: TruncatedSeries2, xs, ys, order: int
) -> _Series3:
    """Expand F(x, y) after x := xs . (s,t,v) + xs0, y := ys . (s,t,v) + ys0.

    ``xs`` and ``ys`` are 4-tuples (coef_s, coef_t, coef_v, constant).  The
    constant parts re-center the expansion exactly on the truncation.
    """
    ax, bx, cx, dx = xs
    ay, by, cy, dy = ys
    Fc = F if (dx == 0 and dy == 0) else F.shift(dx, dy)
    n = order
    s_x = _Series3(n, {(1, 0, 0): ax, (0, 1, 0): bx, (0, 0, 1): cx})
    s_y = _Series3(n, {(1, 0, 0): ay, (0, 1, 0): by, (0, 0, 1): cy})
    xp = [_Series3(n, {(0, 0, 0): Fraction(1)})]
    yp = [_Series3(n, {(0, 0, 0): Fraction(1)})]
    for _ in range(n):
        xp.append(xp[-1].mul(s_x))
        yp.append(yp[-1].mul(s_y))
    out = _Series3(n, {})
    for (a, b), c in Fc.coeffs.items():
        if a + b > n:
            continue
        f = c / Fraction(math.factorial(a) * math.factorial(b)) if is_exact(c) else c / (
            math.factorial(a) * math.factorial(b)
        )
        out = out.add(xp[a].mul(yp[b]).scale(f))
    return out


def solve_implicit(Phi: _Series3) -> TruncatedSeries2:
    """The unique G(s,t), G(0,0)=0, with Phi(s,t,G(s,t)) = 0 to truncation order.

    Degree-graded Newton: the degree-d correction is the degree-d residual
    divided by -dPhi/dv(0), so exactness is preserved in rational mode.
    """
    if Phi[(0, 0, 0)] != 0:
        raise ValueError("Phi must vanish at the origin")
    pv = Phi.dv_at_zero()
    if pv == 0 or (not is_exact(pv) and abs(pv) < 1e-12):
        raise ValueError("implicit solve needs a nonvanishing v-derivative at the origin")
    n = Phi.order
    G = TruncatedSeries2(n, {})
    for d in range(1, n + 1):
        residual = Phi.substitute_v(G, upto=d)
        corr = {
            jk: -c / pv for jk, c in residual.coeffs.items() if jk[0] + jk[1] == d and c != 0
        }
        if corr:
            merged = dict(G.coeffs)
            merged.update(corr)
            G = TruncatedSeries2(n, merged)
    return G


@dataclass(frozen=True)
class AffineTransform3:
    """An affine map of R^3 stored in inverse form.

    Source coordinates as functions of target coordinates:

        x = a s + b t + c v + d
        y = k s + l t + m v + n
        u = p s + q t + r v + w

    ``w`` plays the role of the translation on the graph axis.
    """

    a: object = Fraction(1)
    b: object = Fraction(0)
    c: object = Fraction(0)
    k: object = Fraction(0)
    l: object = Fraction(1)
    m: object = Fraction(0)
    p: object = Fraction(0)
    q: object = Fraction(0)
    r: object = Fraction(1)
    d: object = Fraction(0)
    n: object = Fraction(0)
    w: object = Fraction(0)

    def delta(self):
        """Determinant of the linear part (equals 1 for special affine maps)."""
        return (
            self.a * (self.l * self.r - self.m * self.q)
            - self.b * (self.k * self.r - self.m * self.p)
            + self.c * (self.k * self.q - self.l * self.p)
        )

    def lam(self, fx, fy):
        """al - bk + (cl - bm) u10 + (am - ck) u01, the graph-transversality factor."""
        return (
            self.a * self.l
            - self.b * self.k
            + (self.c * self.l - self.b * self.m) * fx
            + (self.a * self.m - self.c * self.k) * fy
        )

    def matrix(self):
        return ((self.a, self.b, self.c), (self.k, self.l, self.m), (self.p, self.q, self.r))

    def translation(self):
        return (self.d, self.n, self.w)

    def then(self, second: "AffineTransform3") -> "AffineTransform3":
        """The transform whose application equals applying self, then second.

        In inverse form: x = M1 (M2 w' + t2) + t1, so the matrix is M1 M2 and
        the translation is M1 t2 + t1.
        """
        m1 = self.matrix()
        m2 = second.matrix()
        t1 = self.translation()
        t2 = second.translation()
        prod = [
            [sum(m1[i][h] * m2[h][j] for h in range(3)) for j in range(3)] for i in range(3)
        ]
        tr = [sum(m1[i][h] * t2[h] for h in range(3)) + t1[i] for i in range(3)]
        return AffineTransform3(
            a=prod[0][0], b=prod[0][1], c=prod[0][2],
            k=prod[1][0], l=prod[1][1], m=prod[1][2],
            p=prod[2][0], q=prod[2][1], r=prod[2][2],
            d=tr[0], n=tr[1], w=tr[2],
        )

    def inverse_matrix(self):
        """The forward linear part (target coordinates from source)."""
        (a, b, c), (k, l, m), (p, q, r) = self.matrix()
        det = self.delta()
        cof = (
            (l * r - m * q, c * q - b * r, b * m - c * l),
            (m * p - k * r, a * r - c * p, c * k - a * m),
            (k * q - l * p, b * p - a * q, a * l - b * k),
        )
        return tuple(tuple(e / det for e in row) for row in cof)

    @staticmethod
    def identity() -> "AffineTransform3":
        return AffineTransform3()


def apply_affine(F: TruncatedSeries2, T: AffineTransform3) -> TruncatedSeries2:
    """Graphing series of the transformed surface {u = F} under T (inverse form).

    Assembles Phi(s,t,v) = -(p s + q t + r v + w) + F(a s + b t + c v + d, ...)
    and solves it for v = G(s,t).  Requires the image surface to pass through
    the target origin, i.e. Phi(0,0,0) = 0.
    """
    n = F.order
    phi = series3_from_bivariate_in_linear(
        F, (T.a, T.b, T.c, T.d), (T.k, T.l, T.m, T.n), n
    )
    lin = _Series3(
        n, {(0, 0, 0): -T.w, (1, 0, 0): -T.p, (0, 1, 0): -T.q, (0, 0, 1): -T.r}
    )
    phi = phi.add(lin)
    c0 = phi[(0, 0, 0)]
    if c0 != 0:
        if is_exact(c0) or abs(c0) > 1e-9:
            raise ValueError(
                "transformed surface misses the target origin; adjust the translation"
            )
    phi.coeffs.pop((0, 0, 0), None)
    return solve_implicit(phi)


@dataclass(frozen=True)
class CurveTransform2:
    """A plane affine map in inverse form: x = a y + b v + e, u = c y + d v + f."""

    a: object = Fraction(1)
    b: object = Fraction(0)
    c: object = Fraction(0)
    d: object = Fraction(1)
    e: object = Fraction(0)
    f: object = Fraction(0)

    def det(self):
        return self.a * self.d - self.b * self.c

    def then(self, second: "CurveTransform2") -> "CurveTransform2":
        a = self.a * second.a + self.b * second.c
        b = self.a * second.b + self.b * second.d
        c = self.c * second.a + self.d * second.c
        d = self.c * second.b + self.d * second.d
        e = self.a * second.e + self.b * second.f + self.e
        f = self.c * second.e + self.d * second.f + self.f
        return CurveTransform2(a, b, c, d, e, f)

    def forward_matrix(self):
        det = self.det()
        return ((self.d / det, -self.b / det), (-self.c / det, self.a / det))

    @staticmethod
    def identity() -> "CurveTransform2":
        return CurveTransform2()


def apply_affine_curve(F: TruncatedSeries1, T: CurveTransform2) -> TruncatedSeries1:
    """Curve analogue: solve 0 = -(c y + d v + f) + F(a y + b v + e) for v = G(y)."""
    n = F.order
    Fc = F if T.e == 0 else F.shift(T.e)
    # embed as a trivariate series constant in t
    F2 = TruncatedSeries2(n, {(j, 0): c for j, c in Fc.coeffs.items()})
    phi = series3_from_bivariate_in_linear(F2, (T.a, 0, T.b, 0), (0, 0, 0, 0), n)
    phi = phi.add(_Series3(n, {(0, 0, 0): -T.f, (1, 0, 0): -T.c, (0, 0, 1): -T.d}))
    c0 = phi[(0, 0, 0)]
    if c0 != 0:
        if is_exact(c0) or abs(c0) > 1e-9:
            raise ValueError("transformed curve misses the target origin")
        phi.coeffs.pop((0, 0, 0), None)
    G2 = solve_implicit(phi)
    return TruncatedSeries1(n, {j: c for (j, k), c in G2.coeffs.items() if k == 0})


# -- JSON interchange --------------------------------------------------------


def series_to_json(F) -> dict:
    if isinstance(F, TruncatedSeries1):
        coeffs = [
            {"j": j, "k": 0, "value": scalar_to_string(c)} for j, c in sorted(F.coeffs.items())
        ]
        return {"vars": 1, "order": F.order, "coeffs": coeffs}
    coeffs = [
        {"j": j, "k": k, "value": scalar_to_string(c)}
        for (j, k), c in sorted(F.coeffs.items())
    ]
    return {"vars": 2, "order": F.order, "coeffs": coeffs}


def series_from_json(doc: dict):
    try:
        nvars = doc["vars"]
        order = doc["order"]
        entries = doc["coeffs"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed series document: missing {exc}") from exc
    if nvars not in (1, 2):
        raise ValueError("vars must be 1 or 2")
    values = []
    for pos, entry in enumerate(entries):
        try:
            j = int(entry["j"])
            k = int(entry.get("k", 0))
            v = scalar_from_string(str(entry["value"]))
        except (KeyError, ValueError, TypeError) as exc:
            raise ValueError(f"malformed coefficient at index {pos}: {exc}") from exc
        values.append((j, k, v))
    kinds = {is_exact(v) for _, _, v in values if v != 0}
    if len(kinds) > 1:
        raise ValueError("series mixes exact rational and floating coefficients")
    if nvars == 1:
        if any(k != 0 for _, k, _ in values):
            raise ValueError("univariate series has nonzero k index")
        return TruncatedSeries1(order, {j: v for j, _, v in values})
    return TruncatedSeries2(order, {(j, k): v for j, k, v in values})


def load_series(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return series_from_json(json.load(fh))
