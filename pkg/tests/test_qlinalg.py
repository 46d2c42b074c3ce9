import itertools
import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glsmcharge import qlinalg as ql
from glsmcharge.errors import DivisionByZero, SingularBasis


def bareiss_det(m):
    """Fraction-free determinant, used as an independent oracle."""
    a = [list(map(int, r)) for r in m]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            sw = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if sw is None:
                return 0
            a[k], a[sw] = a[sw], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def minors_gcd(m, r):
    n = len(m)
    g = 0
    for rows in itertools.combinations(range(n), r):
        for cols in itertools.combinations(range(n), r):
            g = gcd(g, abs(bareiss_det([[m[i][j] for j in cols] for i in rows])))
    return g


def test_pairing_examples():
    assert ql.pairing((1,), (Fraction(-1, 5),)) == Fraction(-1, 5)
    assert ql.pairing((1, 0), (0, 1)) == 0
    assert ql.pairing((-2, -2), (Fraction(1, 2), 0)) == -1


def test_dual_basis_examples():
    assert ql.dual_basis([[-5]]) == [(Fraction(-1, 5),)]
    assert ql.dual_basis([[1]]) == [(Fraction(1),)]
    assert ql.dual_basis([[1, 0], [0, 1]]) == [(1, 0), (0, 1)]
    with pytest.raises(SingularBasis):
        ql.dual_basis([[1, 2], [2, 4]])


def test_det_index_examples():
    g = ql.det_index([[-5]])
    assert g.order == 5 and g.cyclic_factors == (5,)
    assert ql.det_index([[1]]).cyclic_factors == ()
    assert ql.det_index([[1, 0], [0, 1]]).order == 1
    with pytest.raises(SingularBasis):
        ql.det_index([[0]])


def test_sign_wedge_examples():
    b = [[1, 2], [3, 1]]
    assert ql.sign_wedge(b, b) == 1
    assert ql.sign_wedge([[1]], [[-1]]) == -1
    assert ql.sign_wedge(b, [[2, 0], [0, 1]]) == -ql.sign_wedge(b, [[0, 1], [2, 0]])
    assert ql.sign_wedge([[1, 1], [1, 1]], b) == 0
    with pytest.raises(DivisionByZero):
        ql.sign_wedge(b, [[1, 1], [2, 2]])


def test_random_matrices_against_bareiss():
    rng = random.Random(20261015)
    for _ in range(100):
        n = rng.randint(1, 5)
        m = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        d = bareiss_det(m)
        assert ql.det(m) == d
        if d == 0:
            with pytest.raises(SingularBasis):
                ql.inverse(m)
            continue
        inv = ql.inverse(m)
        for i in range(n):
            for j in range(n):
                assert sum(Fraction(m[i][k]) * inv[k][j] for k in range(n)) == (i == j)
        duals = ql.dual_basis(m)
        for i in range(n):
            for j in range(n):
                assert ql.pairing(m[i], duals[j]) == (i == j)
        g = ql.det_index(m)
        assert g.order == abs(d)
        prod = 1
        for f in g.cyclic_factors:
            prod *= f
        assert prod == abs(d)


def test_smith_against_determinantal_divisors():
    rng = random.Random(7)
    for _ in range(60):
        n = rng.randint(1, 4)
        m = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(n)]
        if bareiss_det(m) == 0:
            continue
        diag = ql.smith_diagonal(m)
        for a, b in zip(diag, diag[1:]):
            assert b % a == 0
        for r in range(1, n + 1):
            prod = 1
            for x in diag[:r]:
                prod *= x
            assert prod == minors_gcd(m, r)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=9, max_size=9),
       st.lists(st.integers(-6, 6), min_size=9, max_size=9),
       st.lists(st.integers(-6, 6), min_size=9, max_size=9))
def test_sign_wedge_is_multiplicative(a, b, c):
    A, B, C = ([v[0:3], v[3:6], v[6:9]] for v in (a, b, c))
    if 0 in (ql.det(B), ql.det(C)):
        return
    assert ql.sign_wedge(A, B) * ql.sign_wedge(B, C) == ql.sign_wedge(A, C)


@settings(max_examples=40, deadline=None)
@given(st.permutations([0, 1, 2]), st.lists(st.integers(-5, 5), min_size=9, max_size=9))
def test_det_index_reorder_invariant(perm, v):
    m = [v[0:3], v[3:6], v[6:9]]
    if ql.det(m) == 0:
        return
    assert ql.det_index(m) == ql.det_index([m[i] for i in perm])


def test_primitive_and_fractions():
    assert ql.primitive((Fraction(2, 3), Fraction(-4, 3))) == (1, -2)
    assert ql.frac_part(Fraction(-1, 5)) == Fraction(4, 5)
    assert ql.lattice_index([[1], [1], [-5]]) == 1
    assert ql.lattice_index([[2], [4]]) == 2
