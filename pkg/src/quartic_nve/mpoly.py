"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a mapping from exponent tuples to nonzero Fraction
coefficients, relative to an ordered tuple of variable names.  The variable
order is global and canonical so that polynomials built in different modules
(solver, jets, certifier) agree term-for-term:

    x < x1 < x2 < y1 < b < c < d < e < a < K1 < K2 < K3 < y < yp < ypp
      < alpha0 < alpha1 < ... < phi1 < phi2 < ... < a0 < a1 < ...

followed by any other identifiers in alphabetical order.  Terms are compared
lexicographically on the exponent tuple; the "leading" term is the largest.

Everything here is immutable after construction and all operations are pure,
so values can be shared freely across threads.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

Rational = Fraction
Exponents = Tuple[int, ...]
Scalar = Union[int, Fraction]

_BASE_ORDER = ("x", "x1", "x2", "y1", "b", "c", "d", "e", "a",
               "K1", "K2", "K3", "y", "yp", "ypp")
_BASE_RANK = {name: i for i, name in enumerate(_BASE_ORDER)}


def _var_key(name: str) -> tuple:
    """Sort key realising the canonical global variable order."""
    if name in _BASE_RANK:
        return (0, _BASE_RANK[name], 0, "")
    for rank, prefix in enumerate(("alpha", "phi")):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return (1, rank, int(name[len(prefix):]), "")
    if name[:1] == "a" and name[1:].isdigit():
        return (1, 2, int(name[1:]), "")
    return (2, 0, 0, name)


def canonical_vars(names: Iterable[str]) -> Tuple[str, ...]:
    return tuple(sorted(set(names), key=_var_key))


class MPoly:
    """Immutable sparse polynomial with Fraction coefficients."""

    __slots__ = ("vars", "terms")

    def __init__(self, vars: Sequence[str], terms: Mapping[Exponents, Scalar]):
        cleaned: Dict[Exponents, Fraction] = {}
        for exps, coeff in terms.items():
            q = Fraction(coeff)
            if q != 0:
                cleaned[tuple(exps)] = q
        order = canonical_vars(vars)
        if tuple(vars) != order:
            remap = [list(vars).index(v) for v in order]
            cleaned = {tuple(e[i] for i in remap): q for e, q in cleaned.items()}
        # drop variables that never occur with positive exponent
        used = [i for i, v in enumerate(order)
                if any(e[i] for e in cleaned)]
        if len(used) != len(order):
            order = tuple(order[i] for i in used)
            cleaned = {tuple(e[i] for i in used): q for e, q in cleaned.items()}
        object.__setattr__(self, "vars", order)
        object.__setattr__(self, "terms", cleaned)

    def __setattr__(self, *_):  # pragma: no cover
        raise AttributeError("MPoly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def const(cls, value: Scalar) -> "MPoly":
        q = Fraction(value)
        return cls((), {(): q} if q else {})

    @classmethod
    def var(cls, name: str, power: int = 1) -> "MPoly":
        if power < 0:
            raise ValueError("negative power")
        if power == 0:
            return cls.const(1)
        return cls((name,), {(power,): Fraction(1)})

    @classmethod
    def zero(cls) -> "MPoly":
        return cls((), {})

    # -- basic queries ------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.vars

    def constant_value(self) -> Fraction:
        if self.vars:
            raise ValueError("not a constant polynomial")
        return self.terms.get((), Fraction(0))

    def degree(self, var: str) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        if self.is_zero:
            return -1
        if var not in self.vars:
            return 0
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    def total_degree(self) -> int:
        if self.is_zero:
            return -1
        return max(sum(e) for e in self.terms) if self.vars else 0

    def leading(self) -> Tuple[Exponents, Fraction]:
        """Largest term under the canonical lexicographic order."""
        if self.is_zero:
            raise ValueError("zero polynomial has no leading term")
        exps = max(self.terms)
        return exps, self.terms[exps]

    def __bool__(self) -> bool:
        return not self.is_zero

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self.vars == other.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def __repr__(self):
        return f"MPoly({self.to_text()})"

    # -- arithmetic ---------------------------------------------------

    def _aligned(self, other: "MPoly"):
        if self.vars == other.vars:
            return self.vars, self.terms, other.terms
        allvars = canonical_vars(self.vars + other.vars)
        def lift(p: "MPoly"):
            idx = [p.vars.index(v) if v in p.vars else -1 for v in allvars]
            return {tuple(e[i] if i >= 0 else 0 for i in idx): q
                    for e, q in p.terms.items()}
        return allvars, lift(self), lift(other)

    def __add__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        allvars, a, b = self._aligned(other)
        out = dict(a)
        for e, q in b.items():
            out[e] = out.get(e, Fraction(0)) + q
        return MPoly(allvars, out)

    __radd__ = __add__

    def __neg__(self) -> "MPoly":
        return MPoly(self.vars, {e: -q for e, q in self.terms.items()})

    def __sub__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            other = MPoly.const(other)
        if not isinstance(other, MPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "MPoly":
        return (-self) + other

    def __mul__(self, other) -> "MPoly":
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            if q == 0:
                return MPoly.zero()
            return MPoly(self.vars, {e: c * q for e, c in self.terms.items()})
        if not isinstance(other, MPoly):
            return NotImplemented
        allvars, a, b = self._aligned(other)
        out: Dict[Exponents, Fraction] = {}
        for e1, q1 in a.items():
            for e2, q2 in b.items():
                key = tuple(i + j for i, j in zip(e1, e2))
                out[key] = out.get(key, Fraction(0)) + q1 * q2
        return MPoly(allvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = MPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    # -- structure ----------------------------------------------------

    def collect(self, var: str) -> Dict[int, "MPoly"]:
        """Coefficients by power of `var`, as polynomials in the rest."""
        if var not in self.vars:
            return {0: self} if not self.is_zero else {}
        i = self.vars.index(var)
        rest = self.vars[:i] + self.vars[i + 1:]
        buckets: Dict[int, Dict[Exponents, Fraction]] = {}
        for e, q in self.terms.items():
            k = e[i]
            buckets.setdefault(k, {})[e[:i] + e[i + 1:]] = q
        return {k: MPoly(rest, t) for k, t in buckets.items()}

    def coefficient(self, var: str, power: int) -> "MPoly":
        return self.collect(var).get(power, MPoly.zero())

    def subs(self, assignment: Mapping[str, Union["MPoly", Scalar]]) -> "MPoly":
        """Substitute polynomials or scalars for variables."""
        values = {n: (v if isinstance(v, MPoly) else MPoly.const(v))
                  for n, v in assignment.items()}
        if not any(v in values for v in self.vars):
            return self
        result = MPoly.zero()
        pow_cache: Dict[Tuple[str, int], MPoly] = {}
        for e, q in self.terms.items():
            term = MPoly.const(q)
            for i, v in enumerate(self.vars):
                if e[i] == 0:
                    continue
                if v in values:
                    key = (v, e[i])
                    if key not in pow_cache:
                        pow_cache[key] = values[v] ** e[i]
                    term = term * pow_cache[key]
                else:
                    term = term * MPoly.var(v, e[i])
            result = result + term
        return result

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        """Full evaluation at a rational point."""
        total = Fraction(0)
        for e, q in self.terms.items():
            val = q
            for i, v in enumerate(self.vars):
                if e[i]:
                    val *= Fraction(point[v]) ** e[i]
            total += val
        return total

    def diff(self, var: str) -> "MPoly":
        if var not in self.vars:
            return MPoly.zero()
        i = self.vars.index(var)
        out: Dict[Exponents, Fraction] = {}
        for e, q in self.terms.items():
            if e[i]:
                key = e[:i] + (e[i] - 1,) + e[i + 1:]
                out[key] = out.get(key, Fraction(0)) + q * e[i]
        return MPoly(self.vars, out)

    # -- normalisation ------------------------------------------------

    def content(self) -> Fraction:
        """Positive rational c with self/c integer-primitive; 0 for zero."""
        if self.is_zero:
            return Fraction(0)
        from math import gcd
        num = 0
        den = 1
        for q in self.terms.values():
            num = gcd(num, q.numerator)
            den = den * q.denominator // gcd(den, q.denominator)
        return Fraction(num, den)

    def primitive(self) -> "MPoly":
        """Integer-primitive associate with positive leading coefficient."""
        if self.is_zero:
            return self
        c = self.content()
        if self.terms[max(self.terms)] < 0:
            c = -c
        return self * (1 / c)

    def to_text(self) -> str:
        """Canonical text: terms in decreasing order, explicit * and ^."""
        if self.is_zero:
            return "0"
        pieces = []
        for e in sorted(self.terms, reverse=True):
            q = self.terms[e]
            factors = []
            for i, v in enumerate(self.vars):
                if e[i] == 1:
                    factors.append(v)
                elif e[i] > 1:
                    factors.append(f"{v}^{e[i]}")
            mag = abs(q)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            pieces.append(("-" if q < 0 else "+", body))
        sign, body = pieces[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in pieces[1:]:
            out += f" {sign} {body}"
        return out

    __str__ = to_text


# ---------------------------------------------------------------------------
# division, gcd, resultant
# ---------------------------------------------------------------------------


def exact_div(p: MPoly, d: MPoly) -> MPoly:
    """Exact polynomial quotient p/d; raises ValueError if d does not divide p.

    Single-divisor division under the canonical lex order: when p is a
    multiple of d the leading terms always divide, so the loop terminates
    with remainder zero.
    """
    if d.is_zero:
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero:
        return MPoly.zero()
    if d.is_constant():
        return p * (1 / d.constant_value())
    allvars, pt, dt = p._aligned(d)
    lead_d = max(dt)
    lc_d = dt[lead_d]
    rem = dict(pt)
    quo: Dict[Exponents, Fraction] = {}
    while rem:
        lead_r = max(rem)
        qexp = tuple(a - b for a, b in zip(lead_r, lead_d))
        if any(k < 0 for k in qexp):
            raise ValueError("not an exact multiple")
        qc = rem[lead_r] / lc_d
        quo[qexp] = quo.get(qexp, Fraction(0)) + qc
        for e, c in dt.items():
            key = tuple(a + b for a, b in zip(qexp, e))
            val = rem.get(key, Fraction(0)) - qc * c
            if val:
                rem[key] = val
            else:
                rem.pop(key, None)
    return MPoly(allvars, quo)


def divides(d: MPoly, p: MPoly) -> bool:
    try:
        exact_div(p, d)
        return True
    except ValueError:
        return False


def poly_diff(p: MPoly, var: str) -> MPoly:
    """Formal partial derivative with respect to a canonical variable."""
    if not isinstance(var, str) or not var:
        raise ValueError(f"unknown variable name: {var!r}")
    return p.diff(var)


def _coeff_list(p: MPoly, var: str):
    """Dense coefficient list [c_0 .. c_deg] of p in var (MPoly coefficients)."""
    by_power = p.collect(var)
    deg = max(by_power) if by_power else 0
    return [by_power.get(k, MPoly.zero()) for k in range(deg + 1)]


def _pseudo_rem(f: Sequence[MPoly], g: Sequence[MPoly]):
    """Pseudo-remainder of dense coefficient lists (univariate in main var)."""
    f = list(f)
    n, m = len(f) - 1, len(g) - 1
    if n < m:
        return f
    lc_g = g[m]
    for _ in range(n - m + 1):
        if len(f) - 1 < m:
            f = [c * lc_g for c in f]
            continue
        lc_f = f[-1]
        shift = len(f) - 1 - m
        f = [c * lc_g for c in f[:-1]]
        for i in range(m):
            f[shift + i] = f[shift + i] - lc_f * g[i]
        while f and f[-1].is_zero:
            f.pop()
    return f


def _poly_from_coeffs(coeffs: Sequence[MPoly], var: str) -> MPoly:
    out = MPoly.zero()
    xv = MPoly.var(var)
    for k, c in enumerate(coeffs):
        if not c.is_zero:
            out = out + c * xv ** k
    return out


def _content_wrt(p: MPoly, var: str) -> MPoly:
    coeffs = [c for c in p.collect(var).values() if not c.is_zero]
    g = MPoly.zero()
    for c in coeffs:
        g = poly_gcd(g, c)
    return g


def poly_gcd(p: MPoly, q: MPoly) -> MPoly:
    """GCD via subresultant pseudo-remainder sequences with recursive content.

    The result is integer-primitive with positive leading coefficient;
    poly_gcd(p, 0) is the normalised p.  Both inputs zero is an error.
    """
    if p.is_zero and q.is_zero:
        raise ValueError("gcd(0, 0) is undefined")
    if p.is_zero:
        return q.primitive()
    if q.is_zero:
        return p.primitive()
    if p.is_constant() or q.is_constant():
        return MPoly.const(1)
    main = min(set(p.vars) | set(q.vars), key=_var_key)
    if main not in p.vars or main not in q.vars:
        # main variable missing from one input: gcd divides its content
        if main in p.vars:
            return poly_gcd(_content_wrt(p, main), q)
        return poly_gcd(p, _content_wrt(q, main))
    cont_p, cont_q = _content_wrt(p, main), _content_wrt(q, main)
    cont = poly_gcd(cont_p, cont_q) if not (cont_p.is_constant() and cont_q.is_constant()) else MPoly.const(1)
    f = [exact_div(c, cont_p) for c in _coeff_list(p, main)]
    g = [exact_div(c, cont_q) for c in _coeff_list(q, main)]
    if len(f) < len(g):
        f, g = g, f
    h = MPoly.const(1)
    s = MPoly.const(1)
    while True:
        delta = len(f) - len(g)
        r = _pseudo_rem(f, g)
        if not r:
            break
        if len(r) == 1:
            g = [MPoly.const(1)]
            break
        denom_poly = s * h ** delta
        f, g = g, [exact_div(c, denom_poly) for c in r]
        s = f[-1]
        h = exact_div(s ** delta, h ** (delta - 1)) if delta > 0 else h
    result = _poly_from_coeffs(g, main)
    pp = exact_div(result, _content_wrt(result, main))
    return (cont * pp).primitive()


def resultant(p: MPoly, q: MPoly, var: str) -> MPoly:
    """Sylvester resultant of p and q eliminating var."""
    n, m = p.degree(var), q.degree(var)
    if n <= 0 or m <= 0:
        raise ValueError("resultant needs positive degree in the eliminated variable")
    pc = _coeff_list(p, var)
    qc = _coeff_list(q, var)
    size = n + m
    rows = []
    for i in range(m):
        row = [MPoly.zero()] * size
        for j, cval in enumerate(reversed(pc)):
            row[i + j] = cval
        rows.append(row)
    for i in range(n):
        row = [MPoly.zero()] * size
        for j, cval in enumerate(reversed(qc)):
            row[i + j] = cval
        rows.append(row)
    return det_mpoly(rows)


def det_mpoly(matrix: Sequence[Sequence[MPoly]]) -> MPoly:
    """Determinant of a square MPoly matrix, fraction-free (Bareiss)."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix is not square")
    if n == 0:
        return MPoly.const(1)
    a = [list(row) for row in matrix]
    sign = 1
    prev = MPoly.const(1)
    for k in range(n - 1):
        if a[k][k].is_zero:
            for r in range(k + 1, n):
                if not a[r][k].is_zero:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return MPoly.zero()
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = exact_div(num, prev)
            a[i][k] = MPoly.zero()
        prev = a[k][k]
    return a[n - 1][n - 1] * sign
