"""Exact rational linear algebra on the character and cocharacter lattices.

Vectors are tuples of ``Fraction`` (or ``int``). A character vector D lives in
the dual lattice and a cocharacter vector sigma in the lattice itself; both are
stored by coordinates in a fixed basis, so the pairing is a plain dot product.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Sequence

from .errors import DivisionByZero, SingularBasis

Vec = tuple


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


def qvec(v) -> Vec:
    return tuple(as_fraction(x) for x in v)


def pairing(u: Sequence, v: Sequence) -> Fraction:
    if len(u) != len(v):
        raise ValueError("pairing needs vectors of equal length")
    return sum((as_fraction(a) * as_fraction(b) for a, b in zip(u, v)), Fraction(0))


def _rows(matrix) -> list:
    return [[as_fraction(x) for x in row] for row in matrix]


def det(matrix) -> Fraction:
    """Determinant by Gaussian elimination over Q."""
    a = _rows(matrix)
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("det needs a square matrix")
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        p = a[c][c]
        result *= p
        for r in range(c + 1, n):
            f = a[r][c] / p
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return sign * result


def inverse(matrix) -> list:
    """Exact inverse by Gauss-Jordan; raises SingularBasis."""
    a = _rows(matrix)
    n = len(a)
    aug = [row + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next((r for r in range(c, n) if aug[r][c] != 0), None)
        if piv is None:
            raise SingularBasis("matrix is singular")
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for r in range(n):
            if r != c and aug[r][c] != 0:
                f = aug[r][c]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[c])]
    return [row[n:] for row in aug]


def rank(matrix) -> int:
    a = _rows(matrix)
    if not a:
        return 0
    ncol = len(a[0])
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, len(a)):
            f = a[i][c] / a[r][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == len(a):
            break
    return r


def solve_unique(matrix, rhs):
    """Unique solution of ``matrix @ x = rhs`` (any shape) or None."""
    a = _rows(matrix)
    m = len(a)
    ncol = len(a[0]) if a else 0
    aug = [row + [as_fraction(b)] for row, b in zip(a, rhs)]
    pivots = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        p = aug[r][c]
        aug[r] = [x / p for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(all(x == 0 for x in row[:ncol]) and row[ncol] != 0 for row in aug):
        return None
    if len(pivots) < ncol:
        return None
    x = [Fraction(0)] * ncol
    for i, c in enumerate(pivots):
        x[c] = aug[i][ncol]
    return tuple(x)


def dual_basis(charges: Sequence[Sequence]) -> list:
    """Vectors D_j^* with <D_i, D_j^*> = delta_ij (columns of the inverse)."""
    inv = inverse(charges)
    k = len(inv)
    return [tuple(inv[a][j] for a in range(k)) for j in range(k)]


def smith_diagonal(matrix) -> list:
    """Nonzero diagonal of the Smith normal form of an integer matrix."""
    a = [[int(x) for x in row] for row in matrix]
    m = len(a)
    n = len(a[0]) if a else 0
    diag = []
    for t in range(min(m, n)):
        while True:
            nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
            if not nz:
                return diag
            _, i, j = min(nz)
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
            p = a[t][t]
            dirty = False
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                dirty = dirty or a[i][t] != 0
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        diag.append(abs(a[t][t]))
    return diag


@dataclass(frozen=True)
class GroupStructure:
    order: int
    cyclic_factors: tuple


def det_index(charges: Sequence[Sequence]) -> GroupStructure:
    d = det(charges)
    if d == 0:
        raise SingularBasis("charges at the index set are dependent")
    factors = tuple(x for x in smith_diagonal(charges) if x != 1)
    order = abs(int(d))
    return GroupStructure(order, factors)


def sign_wedge(numerator_basis, denominator_basis) -> int:
    dd = det(denominator_basis)
    if dd == 0:
        raise DivisionByZero("denominator basis is singular")
    dn = det(numerator_basis)
    if dn == 0:
        return 0
    return 1 if (dn > 0) == (dd > 0) else -1


def lattice_index(matrix) -> int:
    """Index of the integer span of the rows inside Z^k (0 if not full rank)."""
    diag = smith_diagonal(matrix)
    k = len(matrix[0])
    if len(diag) < k or any(x == 0 for x in diag):
        return 0
    out = 1
    for x in diag:
        out *= x
    return out


def primitive(v) -> tuple:
    """Primitive integer vector on the ray of a rational vector."""
    fr = qvec(v)
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    if g == 0:
        raise ValueError("zero vector has no primitive direction")
    return tuple(x // g for x in ints)


def frac_part(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def mod_one(v) -> tuple:
    return tuple(frac_part(as_fraction(x)) for x in v)


def matvec(matrix, v) -> tuple:
    return tuple(pairing(row, v) for row in matrix)
