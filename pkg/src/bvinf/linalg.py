"""Exact linear algebra over Q (thin wrappers over sympy's DomainMatrix)."""

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix


def _to_dm(rows, ncols):
    data = [[QQ(int(x.numerator), int(x.denominator)) if isinstance(x, Fraction) else QQ(x)
             for x in row] for row in rows]
    return DomainMatrix(data, (len(rows), ncols), QQ)


def _frac(x):
    return Fraction(int(x.numerator), int(x.denominator))


def _from_dm(m):
    return [[_frac(x) for x in row] for row in m.to_list()]


def rref(rows, ncols):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    if not rows:
        return [], ()
    m, pivots = _to_dm(rows, ncols).rref()
    out = _from_dm(m)[: len(pivots)]
    return out, tuple(pivots)


def rank(rows, ncols):
    return len(rref(rows, ncols)[1])


def nullspace(rows, ncols):
    """Basis (as vectors) of {x : rows . x = 0}."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ns = _to_dm(rows, ncols).nullspace()
    return _from_dm(ns) if ns.shape[0] else []


def inverse(rows):
    n = len(rows)
    if n == 0:
        return []
    return _from_dm(_to_dm(rows, n).inv())


def det(rows):
    n = len(rows)
    if n == 0:
        return Fraction(1)
    return _frac(_to_dm(rows, n).det())


def greedy_extend(basis, candidates, n):
    """Indices of the candidates a left-to-right greedy pass adds to ``basis``.

    ``basis`` is assumed independent.  One rref of the column matrix
    [basis | candidates] replaces a rank test per candidate.
    """
    if not candidates:
        return []
    cols = list(basis) + list(candidates)
    _, piv = rref(transpose(cols, n), len(cols))
    nb = len(basis)
    return [p - nb for p in piv if p >= nb]


def transpose(rows, ncols):
    return [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]


def solve_consistent(rows, rhs, ncols):
    """A particular solution of rows . x = rhs, or None if inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, piv = rref(aug, ncols + 1)
    if ncols in piv:
        return None
    x = [Fraction(0)] * ncols
    for r, p in zip(red, piv):
        x[p] = r[ncols]
    return x
