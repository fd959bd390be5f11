"""Prolongation of polynomial vector fields to jet spaces, over exact rationals.

Variables of the jet polynomial ring are encoded as integer pairs:

* ``(-1, 0)`` is x, ``(-1, 1)`` is y,
* ``(j, k)`` with ``j, k >= 0`` is ``u_{j,k}`` (so ``(0, 0)`` is u itself).

Curves are the ``k = 0`` slice of the same machinery.

A prolonged coefficient is computed from the generator by total
differentiation; push-forward to the rank-one jet locus substitutes every
``u_{j,k}`` with ``k >= 2`` by its rational expression, giving a
(polynomial, power-of-u20) pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

X = (-1, 0)
Y = (-1, 1)
U = (0, 0)

Var = Tuple[int, int]
Monomial = Tuple[Tuple[Var, int], ...]
Poly = Dict[Monomial, Fraction]

ONE: Monomial = ()


def poly(*terms) -> Poly:
    """Build a polynomial from (coefficient, {var: exp}) terms."""
    out: Poly = {}
    for coeff, powers in terms:
        mono = tuple(sorted((v, e) for v, e in powers.items() if e))
        c = out.get(mono, Fraction(0)) + Fraction(coeff)
        if c:
            out[mono] = c
        elif mono in out:
            del out[mono]
    return out


def p_add(a: Poly, b: Poly) -> Poly:
    out = dict(a)
    for m, c in b.items():
        s = out.get(m, Fraction(0)) + c
        if s:
            out[m] = s
        elif m in out:
            del out[m]
    return out


def p_neg(a: Poly) -> Poly:
    return {m: -c for m, c in a.items()}


def p_sub(a: Poly, b: Poly) -> Poly:
    return p_add(a, p_neg(b))


def p_scale(a: Poly, s) -> Poly:
    s = Fraction(s)
    if not s:
        return {}
    return {m: c * s for m, c in a.items()}


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def p_mul(a: Poly, b: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in a.items():
        for m2, c2 in b.items():
            m = _mono_mul(m1, m2)
            s = out.get(m, Fraction(0)) + c1 * c2
            if s:
                out[m] = s
            elif m in out:
                del out[m]
    return out


def p_pow(a: Poly, n: int) -> Poly:
    out = poly((1, {}))
    for _ in range(n):
        out = p_mul(out, a)
    return out


def p_diff(a: Poly, var: Var) -> Poly:
    out: Poly = {}
    for m, c in a.items():
        d = dict(m)
        e = d.get(var, 0)
        if not e:
            continue
        if e == 1:
            del d[var]
        else:
            d[var] = e - 1
        mono = tuple(sorted(d.items()))
        s = out.get(mono, Fraction(0)) + c * e
        if s:
            out[mono] = s
    return out


def p_vars(a: Poly):
    seen = set()
    for m in a:
        for v, _ in m:
            seen.add(v)
    return seen


def p_eval(a: Poly, assignment):
    """Evaluate with a mapping from Var to scalar; generic over scalar type."""
    total = 0
    for m, c in a.items():
        term = c
        for v, e in m:
            term = term * assignment[v] ** e
        total = total + term
    return total


def p_total_derivative(a: Poly, direction: str) -> Poly:
    """Formal D_x or D_y on the full jet polynomial ring."""
    out: Poly = {}
    for var in p_vars(a):
        da = p_diff(a, var)
        if not da:
            continue
        if var == X:
            shift = poly((1, {})) if direction == "x" else {}
        elif var == Y:
            shift = {} if direction == "x" else poly((1, {}))
        else:
            j, k = var
            shift = poly((1, {(j + 1, k) if direction == "x" else (j, k + 1): 1}))
        if shift:
            out = p_add(out, p_mul(da, shift))
    return out


def p_divexact(num: Poly, den: Poly) -> Poly:
    """Exact multivariate division; raises if the remainder is nonzero."""

    def key(m: Monomial):
        return (sum(e for _, e in m), m)

    if not den:
        raise ZeroDivisionError("polynomial division by zero")
    lead_den = max(den, key=key)
    quot: Poly = {}
    rem = dict(num)
    while rem:
        lead_rem = max(rem, key=key)
        dd, dr = dict(lead_den), dict(lead_rem)
        q: Dict[Var, int] = {}
        ok = True
        for v, e in dr.items():
            q[v] = e - dd.get(v, 0)
        for v, e in dd.items():
            if v not in dr:
                ok = False
        if ok:
            ok = all(e >= 0 for e in q.values())
        if not ok:
            raise ArithmeticError("polynomial division leaves a remainder")
        qm = tuple(sorted((v, e) for v, e in q.items() if e))
        qc = rem[lead_rem] / den[lead_den]
        quot[qm] = quot.get(qm, Fraction(0)) + qc
        rem = p_sub(rem, p_mul({qm: qc}, den))
    return quot


def p_str(a: Poly) -> str:
    def vname(v: Var) -> str:
        if v == X:
            return "x"
        if v == Y:
            return "y"
        if v == U:
            return "u"
        return f"u{v[0]}{v[1]}"

    if not a:
        return "0"
    parts = []
    for m, c in sorted(a.items()):
        factors = "*".join(
            vname(v) + (f"^{e}" if e > 1 else "") for v, e in m
        )
        parts.append(f"{c}" + (f"*{factors}" if factors else ""))
    return " + ".join(parts)


@dataclass(frozen=True)
class VectorField:
    """xi d/dx + eta d/dy + phi d/du with polynomial coefficients in (x, y, u)."""

    xi: dict
    eta: dict
    phi: dict
    name: str = ""


def vf(name: str, xi=None, eta=None, phi=None) -> VectorField:
    return VectorField(xi or {}, eta or {}, phi or {}, name)


def sa3_generators() -> List[VectorField]:
    """The 11 generators of the special affine algebra on (x, y, u)."""
    x, y, u = poly((1, {X: 1})), poly((1, {Y: 1})), poly((1, {U: 1}))
    return [
        vf("v1", xi=x, phi=p_neg(u)),
        vf("v2", eta=y, phi=p_neg(u)),
        vf("v3", xi=y),
        vf("v4", xi=u),
        vf("v5", eta=x),
        vf("v6", eta=u),
        vf("v7", phi=x),
        vf("v8", phi=y),
        vf("w1", xi=poly((1, {}))),
        vf("w2", eta=poly((1, {}))),
        vf("w3", phi=poly((1, {}))),
    ]


def sl2_curve_generators() -> List[VectorField]:
    x, u = poly((1, {X: 1})), poly((1, {U: 1}))
    return [
        vf("v1", xi=x, phi=p_neg(u)),
        vf("v2", xi=u),
        vf("v3", phi=x),
    ]


def gl2_curve_generators() -> List[VectorField]:
    x, u = poly((1, {X: 1})), poly((1, {U: 1}))
    return [
        vf("v1", xi=x),
        vf("v2", phi=u),
        vf("v3", xi=u),
        vf("v4", phi=x),
    ]


def lie_bracket(v: VectorField, w: VectorField, name="") -> VectorField:
    """[v, w] componentwise on (x, y, u) coefficients."""

    def apply(field: VectorField, target: dict) -> dict:
        out: Poly = {}
        for var, comp in ((X, field.xi), (Y, field.eta), (U, field.phi)):
            d = p_diff(target, var)
            if d and comp:
                out = p_add(out, p_mul(comp, d))
        return out

    return VectorField(
        p_sub(apply(v, w.xi), apply(w, v.xi)),
        p_sub(apply(v, w.eta), apply(w, v.eta)),
        p_sub(apply(v, w.phi), apply(w, v.phi)),
        name or f"[{v.name},{w.name}]",
    )


def prolong(v: VectorField, J: Tuple[int, int]) -> Poly:
    """Coefficient of d/du_J of the prolonged field: D_J(phi - xi u10 - eta u01) + ...

    Exact rational polynomial depending on jets of order <= |J| only.
    """
    j, k = J
    if j + k < 1:
        raise ValueError("prolongation needs |J| >= 1")
    q = p_sub(
        v.phi,
        p_add(
            p_mul(v.xi, poly((1, {(1, 0): 1}))),
            p_mul(v.eta, poly((1, {(0, 1): 1}))),
        ),
    )
    for _ in range(j):
        q = p_total_derivative(q, "x")
    for _ in range(k):
        q = p_total_derivative(q, "y")
    q = p_add(q, p_mul(v.xi, poly((1, {(j + 1, k): 1}))))
    q = p_add(q, p_mul(v.eta, poly((1, {(j, k + 1): 1}))))
    return q


def max_jet_order(a: Poly) -> int:
    m = 0
    for v in p_vars(a):
        if v[0] >= 0:
            m = max(m, v[0] + v[1])
    return m


# -- symbolic rank-one substitutions -----------------------------------------

RationalPoly = Tuple[Poly, int]  # numerator and the exponent of the u20 denominator


def _rp_add(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    (na, ma), (nb, mb) = a, b
    m = max(ma, mb)
    u20 = poly((1, {(2, 0): 1}))
    na2 = p_mul(na, p_pow(u20, m - ma)) if m > ma else na
    nb2 = p_mul(nb, p_pow(u20, m - mb)) if m > mb else nb
    return _rp_normalize((p_add(na2, nb2), m))


def _rp_mul(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    return _rp_normalize((p_mul(a[0], b[0]), a[1] + b[1]))


def _rp_normalize(a: RationalPoly) -> RationalPoly:
    num, m = a
    u20 = poly((1, {(2, 0): 1}))
    while m > 0:
        try:
            num = p_divexact(num, u20)
            m -= 1
        except ArithmeticError:
            break
    return (num, m)


_R_CACHE: Dict[Tuple[int, int], RationalPoly] = {}


def rank_one_substitution(j: int, k: int) -> RationalPoly:
    """The rational expression of u_{j,k}, k >= 2, on the rank-one locus.

    Generated by total differentiation of u_{0,2} = u_{1,1}^2 / u_{2,0};
    denominators are powers of u_{2,0} by construction.
    """
    if k < 2:
        raise ValueError("only k >= 2 is dependent")
    key = (j, k)
    if key in _R_CACHE:
        return _R_CACHE[key]
    if key == (0, 2):
        val: RationalPoly = (poly((1, {(1, 1): 2})), 1)
    elif j > 0:
        val = _rp_total_derivative(rank_one_substitution(j - 1, k), "x")
    else:
        val = _rp_total_derivative(rank_one_substitution(0, k - 1), "y")
    _R_CACHE[key] = val
    return val


def _rp_total_derivative(a: RationalPoly, direction: str) -> RationalPoly:
    # d/d(dir) of num/u20^m = (D num)/u20^m - m num D(u20)/u20^{m+1};
    # D num may reintroduce dependent jets, which are substituted back.
    num, m = a
    dn, dm = _substitute_dependents(p_total_derivative(num, direction))
    d_u20 = poly((1, {(3, 0): 1})) if direction == "x" else poly((1, {(2, 1): 1}))
    lhs: RationalPoly = (dn, dm + m)
    rhs: RationalPoly = (p_neg(p_scale(p_mul(num, d_u20), m)), m + 1)
    return _rp_add(lhs, rhs)


def _substitute_dependents(a: Poly) -> RationalPoly:
    """Replace every u_{j,k} with k >= 2 by its rank-one substitution."""
    out: RationalPoly = ({}, 0)
    for m, c in a.items():
        term: RationalPoly = ({ONE: c}, 0)
        for v, e in m:
            if v[0] >= 0 and v[1] >= 2:
                sub = rank_one_substitution(v[0], v[1])
                for _ in range(e):
                    term = _rp_mul(term, sub)
            else:
                term = _rp_mul(term, (poly((1, {v: e})), 0))
        out = _rp_add(out, term)
    return out


def parabolic_pushforward(phi: Poly) -> RationalPoly:
    """Push a prolonged coefficient to the rank-one jet coordinates.

    Substitutes all dependent jets; the result is a polynomial in the
    independent coordinates over a power of u_{2,0}.
    """
    return _substitute_dependents(phi)


def tangency_quotients() -> List[Poly]:
    """v_sigma(H)/H for the six non-trivial generators, H the Hessian determinant.

    Exact polynomial quotients; a division remainder signals a bug.
    """
    H = p_sub(
        p_mul(poly((1, {(2, 0): 1})), poly((1, {(0, 2): 1}))),
        poly((1, {(1, 1): 2})),
    )
    out = []
    for v in sa3_generators()[:6]:
        applied: Poly = {}
        for J in [(2, 0), (1, 1), (0, 2)]:
            dH = p_diff(H, J)
            if dH:
                applied = p_add(applied, p_mul(prolong(v, J), dH))
        out.append(p_divexact(applied, H) if applied else {})
    return out


# -- exact linear algebra -----------------------------------------------------


def rank_exact(rows: Sequence[Sequence[Fraction]]) -> int:
    """Rank over the rationals by exact Gaussian elimination."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    row = 0
    for col in range(ncols):
        piv = None
        for r in range(row, len(m)):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        pv = m[row][col]
        for r in range(row + 1, len(m)):
            if m[r][col] != 0:
                f = m[r][col] / pv
                for cidx in range(col, ncols):
                    m[r][cidx] -= f * m[row][cidx]
        row += 1
        rank += 1
        if row == len(m):
            break
    return rank


def det_exact(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = None
        for r in range(col, n):
            if m[r][col] != 0:
                piv = r
                break
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pv = m[col][col]
        det *= pv
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] / pv
                for cidx in range(col, n):
                    m[r][cidx] -= f * m[col][cidx]
    return det


def solve_linear_exact(a: Sequence[Sequence], b: Sequence):
    """Solve a square system; works for Fractions and floats alike."""
    n = len(b)
    m = [list(a[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(float(m[r][col])))
        if m[piv][col] == 0:
            raise ZeroDivisionError("singular linear system")
        m[col], m[piv] = m[piv], m[col]
        pv = m[col][col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / pv
                for cidx in range(col, n + 1):
                    m[r][cidx] -= f * m[col][cidx]
    return [m[i][n] / m[i][i] for i in range(n)]


# -- the order-2 and order-4 rank stories -------------------------------------

_ORDER4_COLS = [(2, 0), (1, 1), (3, 0), (2, 1), (4, 0), (3, 1)]


def order4_matrix_symbolic() -> List[List[RationalPoly]]:
    """Pushed-forward coefficients of v1..v6 on the order-4 jet block."""
    gens = sa3_generators()[:6]
    return [[parabolic_pushforward(prolong(v, J)) for J in _ORDER4_COLS] for v in gens]


def order2_matrix_symbolic() -> List[List[Poly]]:
    """The 7x7 block (v2, v3, v7, v8, w1, w2, w3) x (x, y, u, u10, u01, u20, u11).

    These generators never touch a dependent jet at this order, so the
    pushed-forward entries are plain polynomials.
    """
    gens = {g.name: g for g in sa3_generators()}
    out = []
    for name in ["v2", "v3", "v7", "v8", "w1", "w2", "w3"]:
        g = gens[name]
        row = [g.xi, g.eta, g.phi]
        for J in [(1, 0), (0, 1), (2, 0), (1, 1)]:
            num, m = parabolic_pushforward(prolong(g, J))
            if m != 0:
                raise AssertionError("unexpected denominator at order 2")
            row.append(num)
        out.append(row)
    return out


def _eval_rp(rp: RationalPoly, assignment):
    num, m = rp
    return p_eval(num, assignment) / assignment[(2, 0)] ** m


def orbit_rank(order: int, p, base=(0, 0)) -> dict:
    """Rank data of the prolonged special-affine action at a rank-one jet.

    order 2: rank of all 11 pushed fields on the 7 coordinates; also the
    exact 7x7 block determinant.  order 3: full rank on 9 coordinates.
    order 4: the 6x6 jet-block of v1..v6, its determinant and rank, plus the
    three key 5x5 minors.
    """
    if order not in (2, 3, 4):
        raise ValueError("order must be 2, 3 or 4")
    assignment = {X: base[0], Y: base[1]}
    for j in range(p.order + 1):
        for k in range(p.order + 1 - j):
            if k <= 1:
                if (j, k) in p.coords:
                    assignment[(j, k)] = p.coords[(j, k)]
            else:
                if j + k <= p.order:
                    assignment[(j, k)] = p.value((j, k))

    coords = [X, Y, U, (1, 0), (0, 1)]
    jet_cols = []
    for n in range(2, order + 1):
        jet_cols.append((n, 0))
        jet_cols.append((n - 1, 1))
    coords = coords + jet_cols

    gens = sa3_generators()
    rows = []
    for g in gens:
        row = [p_eval(g.xi, assignment), p_eval(g.eta, assignment), p_eval(g.phi, assignment)]
        for J in [(1, 0), (0, 1)] + jet_cols:
            row.append(_eval_rp(parabolic_pushforward(prolong(g, J)), assignment))
        rows.append(row)

    result = {"rank": rank_exact(rows), "dim": 3 + 2 * order}

    if order == 2:
        names = ["v2", "v3", "v7", "v8", "w1", "w2", "w3"]
        sel = {g.name: r for g, r in zip(gens, rows)}
        block = [sel[n] for n in names]
        result["det7"] = det_exact(block)
    if order == 4:
        sub = []
        for g, _ in zip(gens[:6], range(6)):
            sub.append(
                [
                    _eval_rp(parabolic_pushforward(prolong(g, J)), assignment)
                    for J in _ORDER4_COLS
                ]
            )
        result["block_det"] = det_exact(sub)
        result["block_rank"] = rank_exact(sub)
        result["minors"] = {
            "M46": det_exact(_delete(sub, 3, 5)),
            "M56": det_exact(_delete(sub, 4, 5)),
            "M66": det_exact(_delete(sub, 5, 5)),
        }
    return result


def _delete(matrix, i, j):
    return [
        [e for cj, e in enumerate(row) if cj != j]
        for ri, row in enumerate(matrix)
        if ri != i
    ]


def det_poly_matrix(entries: List[List[Poly]]) -> Poly:
    """Determinant over the polynomial ring by minor expansion with caching."""
    n = len(entries)

    cache: Dict[Tuple[int, ...], Poly] = {}

    def minor(cols: Tuple[int, ...], row: int) -> Poly:
        if row == n:
            return poly((1, {}))
        key = cols
        if key in cache:
            return cache[key]
        acc: Poly = {}
        for idx, col in enumerate(cols):
            e = entries[row][col]
            if not e:
                continue
            rest = minor(cols[:idx] + cols[idx + 1 :], row + 1)
            term = p_mul(e, rest)
            acc = p_add(acc, term if idx % 2 == 0 else p_neg(term))
        cache[key] = acc
        return acc

    return minor(tuple(range(n)), 0)
