"""Parametric linear algebra: fraction-free elimination and determinants.

Systems are linear in designated unknowns with coefficients polynomial in
the remaining parameters.  Elimination is Bareiss-style (division-controlled,
every division exact), and the pivot polynomials are reported: they are the
parameter conditions under which the generic solution degenerates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .mpoly import MPoly, det_mpoly, exact_div
from .ratfunc import RatFunc


@dataclass(frozen=True)
class LinearSolution:
    """Outcome of solving a parametric linear system.

    status is one of "unique", "parametric", "inconsistent".  For solvable
    systems, `particular` maps each unknown to its generic value and `kernel`
    lists a basis of homogeneous solutions (empty when unique).  The
    `degenerations` are the primitive pivot polynomials: parameter loci where
    the generic pivot choice breaks down.
    """

    status: str
    particular: Optional[Dict[str, RatFunc]]
    kernel: List[Dict[str, RatFunc]]
    free: List[str]
    degenerations: List[MPoly] = field(default_factory=list)


def _split_equation(eq: MPoly, unknowns: Sequence[str]) -> Tuple[List[MPoly], MPoly]:
    """eq == 0 rewritten as sum coeff_i * u_i + constant == 0."""
    unknown_set = set(unknowns)
    coeffs = []
    for u in unknowns:
        by = eq.collect(u)
        if any(k > 1 for k in by):
            raise ValueError(f"equation is not linear in {u}")
        cu = by.get(1, MPoly.zero())
        if any(v in unknown_set for v in cu.vars):
            raise ValueError("equation has cross terms in the unknowns")
        coeffs.append(cu)
    const = eq.subs({u: 0 for u in unknowns if u in eq.vars})
    return coeffs, const


def _forward_eliminate(rows: List[List[MPoly]]):
    """Fraction-free (Bareiss) row echelon reduction.

    Returns (echelon rows, pivot (row, col) list, pivot polynomials).
    The augmented column, if any, should be included in `rows`.
    """
    m = len(rows)
    ncols = len(rows[0]) if rows else 0
    a = [list(r) for r in rows]
    pivots: List[Tuple[int, int]] = []
    pivot_polys: List[MPoly] = []
    prev = MPoly.const(1)
    r = 0
    for col in range(ncols):
        sel = None
        for i in range(r, m):
            if not a[i][col].is_zero:
                sel = i
                break
        if sel is None:
            continue
        if sel != r:
            a[r], a[sel] = a[sel], a[r]
        piv = a[r][col]
        pivots.append((r, col))
        pivot_polys.append(piv.primitive())
        for i in range(r + 1, m):
            for j in range(col + 1, ncols):
                a[i][j] = exact_div(a[i][j] * piv - a[i][col] * a[r][j], prev)
            a[i][col] = MPoly.zero()
        prev = piv
        r += 1
        if r == m:
            break
    return a, pivots, pivot_polys


def solve_parametric_linear(equations: Sequence[MPoly],
                            unknowns: Sequence[str]) -> LinearSolution:
    """Solve equations == 0, linear in `unknowns`, over the parameter field.

    Example: {e*u + v, v - c} in (u, v) has the unique generic solution
    u = -c/e, v = c, degenerating when the pivot e vanishes.
    """
    unknowns = list(unknowns)
    rows = []
    for eq in equations:
        coeffs, const = _split_equation(eq, unknowns)
        if all(c.is_zero for c in coeffs) and const.is_zero:
            continue
        rows.append(coeffs + [const])
    if not rows:
        return LinearSolution("parametric", {u: RatFunc.zero() for u in unknowns},
                              [{v: RatFunc(1 if v == u else 0) for v in unknowns}
                               for u in unknowns],
                              list(unknowns), [])
    ech, pivots, pivot_polys = _forward_eliminate(rows)
    n = len(unknowns)
    for (r, c) in pivots:
        if c == n:
            return LinearSolution("inconsistent", None, [], [], _dedupe(pivot_polys))
    # rows beyond the pivot rows must be identically zero
    for i in range(len(pivots), len(ech)):
        if any(not v.is_zero for v in ech[i]):
            return LinearSolution("inconsistent", None, [], [], _dedupe(pivot_polys))
    pivot_cols = [c for (_, c) in pivots]
    free_cols = [j for j in range(n) if j not in pivot_cols]

    def back_substitute(rhs_of_free: Dict[int, RatFunc], const_scale: int) -> Dict[str, RatFunc]:
        vals: Dict[int, RatFunc] = {j: rhs_of_free.get(j, RatFunc.zero()) for j in free_cols}
        for (r, c) in reversed(pivots):
            acc = RatFunc(ech[r][n]) * const_scale
            for j in range(c + 1, n):
                if not ech[r][j].is_zero:
                    acc = acc + RatFunc(ech[r][j]) * vals[j]
            vals[c] = (-acc) / RatFunc(ech[r][c])
        return {unknowns[j]: vals[j] for j in range(n)}

    particular = back_substitute({}, 1)
    kernel = []
    for f in free_cols:
        vec = back_substitute({f: RatFunc.one()}, 0)
        kernel.append(vec)
    status = "unique" if not free_cols else "parametric"
    return LinearSolution(status, particular, kernel,
                          [unknowns[j] for j in free_cols], _dedupe(pivot_polys))


def _dedupe(polys: Sequence[MPoly]) -> List[MPoly]:
    seen = []
    for p in polys:
        if p.is_constant():
            continue
        if all(p != q for q in seen):
            seen.append(p)
    return seen


def matrix_kernel(rows: Sequence[Sequence[MPoly]], ncols: int):
    """Kernel basis of a homogeneous system with MPoly entries.

    Returns (list of kernel vectors over RatFunc, pivot polynomials).
    """
    work = [list(r) + [MPoly.zero()] for r in rows if any(not c.is_zero for c in r)]
    if not work:
        basis = []
        for j in range(ncols):
            basis.append([RatFunc(1 if k == j else 0) for k in range(ncols)])
        return basis, []
    ech, pivots, pivot_polys = _forward_eliminate(work)
    pivot_cols = [c for (_, c) in pivots]
    free_cols = [j for j in range(ncols) if j not in pivot_cols]
    basis = []
    for f in free_cols:
        vals: Dict[int, RatFunc] = {j: RatFunc(1 if j == f else 0) for j in free_cols}
        for (r, c) in reversed(pivots):
            acc = RatFunc.zero()
            for j in range(c + 1, ncols):
                if not ech[r][j].is_zero:
                    acc = acc + RatFunc(ech[r][j]) * vals[j]
            vals[c] = (-acc) / RatFunc(ech[r][c])
        basis.append([vals[j] for j in range(ncols)])
    return basis, _dedupe(pivot_polys)


def determinant(matrix: Sequence[Sequence[RatFunc]]) -> RatFunc:
    """Exact determinant of a square RatFunc matrix.

    Cofactor expansion for n <= 3 (the Wronskian case), ordinary Gaussian
    elimination over the function field otherwise.
    """
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix is not square")
    m = [[RatFunc._coerce(v) for v in row] for row in matrix]
    if n == 0:
        return RatFunc.one()
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    if n == 3:
        return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    det = RatFunc.one()
    for k in range(n):
        sel = next((i for i in range(k, n) if not m[i][k].is_zero), None)
        if sel is None:
            return RatFunc.zero()
        if sel != k:
            m[k], m[sel] = m[sel], m[k]
            det = -det
        det = det * m[k][k]
        for i in range(k + 1, n):
            factor = m[i][k] / m[k][k]
            for j in range(k, n):
                m[i][j] = m[i][j] - factor * m[k][j]
    return det
