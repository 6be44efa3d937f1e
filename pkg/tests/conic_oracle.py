"""Independent brute-force decision procedure for conic systems.

Decides exactly, over the complex numbers, whether a list of ternary
quadratic forms with rational coefficients has a common projective zero.
The route is deliberately different from the library's pairwise-resultant
gcd method: the plane splits into the line K1 = 0 (binary-form gcd over Q)
and the affine chart K1 = 1, where the candidate K2-coordinates of the
intersection of the first two conics are enumerated as the roots of their
squarefree K3-resultant; surviving candidates are then intersected with
every remaining form by gcds computed in Q[u]/(m(u)) with dynamic splitting
(D5 style) whenever a leading coefficient fails to be invertible.  No
polynomial factorization is used, yet every verdict is sound and complete
over the algebraic closure.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Tuple

Poly = List[Fraction]  # dense univariate over Q, index = degree


class OracleInconclusive(Exception):
    pass


# -- univariate arithmetic over Q -------------------------------------------

def ptrim(p: Poly) -> Poly:
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else Fraction(0))
                  + (b[i] if i < len(b) else Fraction(0)) for i in range(n)])


def pscale(a: Poly, c: Fraction) -> Poly:
    return [] if c == 0 else [x * c for x in a]


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return ptrim(out)


def pdivmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    b = ptrim(b)
    if not b:
        raise ZeroDivisionError
    a = list(ptrim(a))
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        factor = a[-1] / b[-1]
        q[shift] += factor
        for i, y in enumerate(b):
            a[shift + i] -= factor * y
        a = list(ptrim(a))
    return ptrim(q), a


def pmod(a: Poly, m: Poly) -> Poly:
    return pdivmod(a, m)[1]


def pmonic(a: Poly) -> Poly:
    a = ptrim(a)
    return pscale(a, 1 / a[-1]) if a else a


def pgcd(a: Poly, b: Poly) -> Poly:
    a, b = ptrim(a), ptrim(b)
    while b:
        a, b = b, pmod(a, b)
    return pmonic(a)


def pdiff(a: Poly) -> Poly:
    return ptrim([a[i] * i for i in range(1, len(a))])


def squarefree(a: Poly) -> Poly:
    g = pgcd(a, pdiff(a))
    if len(g) <= 1:
        return pmonic(a)
    q, r = pdivmod(a, g)
    assert not r
    return pmonic(q)


def pext_gcd(a: Poly, m: Poly) -> Tuple[Poly, Poly]:
    """(g, s) with s*a == g (mod m) and g = gcd(a, m) monic."""
    r0, r1 = ptrim(m), pmod(a, m)
    s0, s1 = [], [Fraction(1)]
    while r1:
        q, r = pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, padd(s0, pscale(pmul(q, s1), Fraction(-1)))
    if r0:
        lc = r0[-1]
        r0, s0 = pscale(r0, 1 / lc), pscale(s0, 1 / lc)
    return r0, s0


# -- polynomials in v over Q[u]/(m) ------------------------------------------

VPoly = List[Poly]  # index = power of v, entries = Poly in u


def vtrim(f: VPoly, m: Poly) -> VPoly:
    f = [pmod(c, m) for c in f]
    while f and not f[-1]:
        f = f[:-1]
    return f


def _v_reduce(a: VPoly, bm: VPoly, m: Poly) -> VPoly:
    """a mod bm with bm monic in v (leading coefficient 1)."""
    a = list(a)
    while len(a) >= len(bm):
        lead = a[-1]
        shift = len(a) - len(bm)
        a = a[:-1]
        for i, c in enumerate(bm[:-1]):
            a[shift + i] = padd(a[shift + i], pscale(pmul(lead, c), Fraction(-1)))
        a = vtrim(a, m)
        if not a:
            break
    return a


def _normalize(b: VPoly, m: Poly):
    """("zero",) | ("unit",) | ("monic", bm) | ("split", factor)."""
    b = vtrim(b, m)
    while b:
        if len(b) == 1:
            g, _ = pext_gcd(b[0], m)
            if len(g) == 1:
                return ("unit",)
            if g == pmonic(m):
                return ("zero",)
            return ("split", g)
        g, s = pext_gcd(b[-1], m)
        if g == pmonic(m):
            b = vtrim(b[:-1], m)
            continue
        if len(g) > 1:
            return ("split", g)
        bm = vtrim([pmod(pmul(c, s), m) for c in b], m)
        return ("monic", bm)
    return ("zero",)


def v_gcd_components(fs: List[VPoly], m: Poly):
    """[(m_i, g_i)] with the squarefree m_i covering the roots of m and g_i
    the normalised gcd of all forms on the component: "zero" (everything
    vanishes), "unit", or a v-monic polynomial of positive degree."""
    out = []
    stack = [pmonic(m)]
    while stack:
        mc = stack.pop()
        if len(mc) <= 1:
            continue
        g: VPoly = []
        verdict = None
        split_factor = None
        for f in fs:
            a = g
            b = vtrim(f, m=mc)
            while True:
                norm = _normalize(b, mc)
                if norm[0] == "split":
                    split_factor = norm[1]
                    break
                if norm[0] == "zero":
                    b = []
                    break
                if norm[0] == "unit":
                    a, b = [[Fraction(1)]], []
                    verdict = "unit"
                    break
                bm = norm[1]
                r = _v_reduce(a, bm, mc) if a else []
                a, b = bm, r
                if not b:
                    break
            if split_factor:
                break
            g = a
            if verdict == "unit":
                break
        if split_factor:
            q, rem = pdivmod(mc, split_factor)
            assert not rem
            stack.append(split_factor)
            stack.append(q)
            continue
        if verdict == "unit":
            out.append((mc, "unit"))
        elif not g:
            out.append((mc, "zero"))
        else:
            out.append((mc, g))
    return out


# -- Sylvester resultant in v over Q[u] --------------------------------------

def _det_poly(rows: List[List[Poly]]) -> Poly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    out: Poly = []
    for j in range(n):
        if not rows[0][j]:
            continue
        minor = [[rows[i][k] for k in range(n) if k != j] for i in range(1, n)]
        term = pmul(rows[0][j], _det_poly(minor))
        if j % 2:
            term = pscale(term, Fraction(-1))
        out = padd(out, term)
    return out


def resultant_v(f: VPoly, g: VPoly) -> Poly:
    n, md = len(f) - 1, len(g) - 1
    if n <= 0 or md <= 0:
        raise ValueError("resultant needs positive v-degree")
    size = n + md
    rows = []
    for i in range(md):
        row: List[Poly] = [[] for _ in range(size)]
        for j, c in enumerate(reversed(f)):
            row[i + j] = c
        rows.append(row)
    for i in range(n):
        row = [[] for _ in range(size)]
        for j, c in enumerate(reversed(g)):
            row[i + j] = c
        rows.append(row)
    return _det_poly(rows)


# -- main entry ---------------------------------------------------------------

def _to_dict(f):
    if isinstance(f, dict):
        return {k: Fraction(v) for k, v in f.items() if v != 0}
    out = {}
    names = ("K1", "K2", "K3")
    for exps, coeff in f.terms.items():
        key = [0, 0, 0]
        for pos, name in enumerate(names):
            if name in f.vars:
                key[pos] = exps[f.vars.index(name)]
        out[tuple(key)] = Fraction(coeff)
    return out


def common_projective_zero_exists(forms) -> Tuple[bool, str]:
    """True iff the quadratic forms share a projective zero over C."""
    dicts = [d for d in (_to_dict(f) for f in forms) if d]
    if not dicts:
        return True, "all forms identically zero"
    if all(d.get((0, 0, 2), Fraction(0)) == 0 for d in dicts):
        return True, "(0:0:1)"
    # line K1 = 0, points (0 : 1 : u)
    line = []
    for d in dicts:
        uni = [Fraction(0)] * 3
        for (i, j, k), c in d.items():
            if i == 0:
                uni[k] += c
        line.append(ptrim(uni))
    nz = [p for p in line if p]
    if not nz:
        return True, "entire line K1=0"
    g = nz[0]
    for p in nz[1:]:
        g = pgcd(g, p)
    if len(g) > 1:
        return True, "line K1=0 common root"
    # chart K1 = 1, u = K2, v = K3
    fs: List[VPoly] = []
    for d in dicts:
        f: VPoly = [[], [], []]
        for (i, j, k), c in d.items():
            cur = f[k]
            while len(cur) <= j:
                cur.append(Fraction(0))
            cur[j] += c
        f = [ptrim(c) for c in f]
        while f and not f[-1]:
            f = f[:-1]
        if f:
            fs.append(f)
    pos = [f for f in fs if len(f) >= 2]
    vfree = [f[0] for f in fs if len(f) == 1]
    if len(pos) >= 2:
        r = resultant_v(pos[0], pos[1])
    elif vfree:
        r = vfree[0]
        for p in vfree[1:]:
            r = pgcd(r, p)
    else:
        raise OracleInconclusive("no usable elimination pair")
    r = ptrim(r)
    if not r:
        raise OracleInconclusive("vanishing resultant: shared pencil component")
    if len(r) == 1:
        return False, "no affine candidate coordinates"
    m = squarefree(r)
    for m_i, g_i in v_gcd_components(fs, m):
        if g_i == "unit":
            continue
        if g_i == "zero":
            return True, f"component modulus degree {len(m_i)-1}: all forms vanish"
        return True, (f"component modulus degree {len(m_i)-1}: common v-root of "
                      f"degree {len(g_i)-1}")
    return False, "all candidate components exhausted"
