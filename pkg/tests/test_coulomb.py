import math

import numpy as np
import pytest

from glsmcharge import coulomb
from glsmcharge import toriccomb as tc
from glsmcharge.errors import AtPole, BadDelta, NoDecay
from glsmcharge.higgs import chamber_partition, chamber_term, theta_from
from glsmcharge.wallcross import circuit_of_wall, p_of_m
from conftest import BARNES_ALPHA, CONIFOLD_ALPHA, KP1P1_ALPHA, QUINTIC_ALPHA, barnes_closed_form, rel


def test_integrand_examples(barnes):
    got = coulomb.integrand(barnes, [0.0], BARNES_ALPHA, [0.0])
    assert rel(got, math.gamma(0.3) * math.gamma(0.4)) < 1e-14
    with pytest.raises(AtPole):
        coulomb.integrand(barnes, [-0.3], BARNES_ALPHA, [0.0])


def test_decay_certificate(quintic):
    th = theta_from([10])
    res = coulomb.mb_integral_1d(quintic, None, th, None, QUINTIC_ALPHA)
    assert res.decay_certified
    delta = coulomb.find_delta(quintic, QUINTIC_ALPHA)
    S = res.truncation_radius
    for s in (S, -S, 1.5 * S):
        val = abs(coulomb.integrand(quintic, [delta + 1j * s], QUINTIC_ALPHA, th))
        assert val <= coulomb.certified_bound_at(quintic, delta, th, None, QUINTIC_ALPHA, s)


def test_barnes_delta_independence(barnes):
    th = theta_from([2])
    vals = [coulomb.mb_integral_1d(barnes, d, th, None, BARNES_ALPHA).value for d in (0.01, 0.1, 0.2)]
    assert max(abs(a - b) for a in vals for b in vals) < 1e-9
    assert rel(vals[0], -barnes_closed_form(2.0)) < 1e-8


def test_bad_delta_and_no_decay(conifold):
    with pytest.raises(BadDelta):
        coulomb.mb_integral_1d(conifold, 0.5, theta_from([1]), None, CONIFOLD_ALPHA)
    # <B + t, h> = 1.5 lies outside the window |.| < 1
    with pytest.raises(NoDecay):
        coulomb.mb_integral_1d(conifold, None, theta_from([1], [0.5]), {(1,): 1}, CONIFOLD_ALPHA)


def test_line_integral_reduces_to_disk_integral(conifold):
    th = theta_from([1.5], [0.1])
    a = coulomb.mb_integral_1d(conifold, 0.0, th, None, CONIFOLD_ALPHA).value
    b = coulomb.line_integral_after_residues(conifold, (), (), [0.0], [1], th, None, CONIFOLD_ALPHA).value
    assert abs(a - b) <= 1e-12 * abs(a)


def test_kp1p1_line_against_completions(kp1p1):
    c = circuit_of_wall(kp1p1, [8, 4], [8, -4])
    th = theta_from([4, 5])
    p = p_of_m(kp1p1, c, (0,), (0,), KP1P1_ALPHA, 0.37)
    L = coulomb.line_integral_after_residues(kp1p1, (0,), (0,), p, c.h, th, None, KP1P1_ALPHA).value
    total = 0
    for i in (2, 3):
        a = tc.make_anticone(kp1p1, (0, i))
        total += sum(coulomb.residue_value(kp1p1, a, (0, k), KP1P1_ALPHA, th) for k in range(200))
    # closing toward the I_plus poles picks up -(sum of completions)
    assert rel(-L, total) < 1e-4


def test_residue_value_is_signed_term(barnes, quintic):
    a = tc.make_anticone(quintic, (5,))
    th = [-3.0]
    for m in range(4):
        assert coulomb.residue_value(quintic, a, [m], QUINTIC_ALPHA, th) == \
            pytest.approx(-chamber_term(quintic, a, [m], QUINTIC_ALPHA, th) / 5, rel=1e-15)


def test_residue_small_circle(conifold):
    a = tc.make_anticone(conifold, (2,))
    th = np.array([-2.0 + 0.3j])
    for m in range(3):
        sig = -(m + CONIFOLD_ALPHA[2]) * -1
        circ = coulomb.small_circle_residue(conifold, sig, CONIFOLD_ALPHA, th)
        # field 2 has charge -1: clockwise closing reverses the circle
        assert rel(-circ, coulomb.residue_value(conifold, a, [m], CONIFOLD_ALPHA, th)) < 1e-9


def test_log_space_large_arguments(quintic):
    import mpmath
    a = tc.make_anticone(quintic, (0,))
    alpha = [0.5, 100.3, 150.7, 200.1, 299.9, 280.2]
    # each Gamma overflows a double on its own; theta brings the term back to O(1)
    args = [x - 0.5 for x in alpha[1:5]] + [alpha[5] + 5 * 0.5]
    log_ref = sum(mpmath.loggamma(x) for x in args)
    theta = float(2 * log_ref)
    v = coulomb.residue_value(quintic, a, [0], alpha, [theta])
    ref = -mpmath.exp(log_ref - theta / 2)
    assert np.isfinite(v) and abs(v / complex(ref) - 1) < 1e-9


@pytest.mark.parametrize("name,zeta,alpha,tol", [
    ("barnes", 2.0, BARNES_ALPHA, 1e-6), ("barnes", -2.0, BARNES_ALPHA, 1e-6),
    ("conifold", 3.0, CONIFOLD_ALPHA, 1e-6), ("conifold", -3.0, CONIFOLD_ALPHA, 1e-6),
    ("quintic", 10.0, QUINTIC_ALPHA, 1e-5), ("quintic", -3.0, QUINTIC_ALPHA, 1e-6),
])
def test_higgs_coulomb(request, name, zeta, alpha, tol):
    spec = request.getfixturevalue(name)
    th = theta_from([zeta])
    mb = coulomb.mb_integral_1d(spec, None, th, None, alpha)
    ch = chamber_partition(spec, [zeta], th, None, alpha)
    bound = max(tol, 10 * (ch.tail_estimate + mb.quadrature_error + mb.tail_bound))
    assert abs(mb.value - ch.value) <= bound * max(1.0, abs(ch.value))


def test_brane_linearity(conifold):
    th = theta_from([0.5], [0.2])
    f = lambda br: coulomb.mb_integral_1d(conifold, None, th, br, CONIFOLD_ALPHA, tol=1e-13).value  # noqa: E731
    a, b = f({(0,): 1}), f({(-1,): 1})
    assert rel(f({(0,): 3, (-1,): -2}), 3 * a - 2 * b) < 1e-12


def test_thread_determinism(quintic):
    th = theta_from([10])
    a = coulomb.mb_integral_1d(quintic, None, th, None, QUINTIC_ALPHA, threads=1).value
    b = coulomb.mb_integral_1d(quintic, None, th, None, QUINTIC_ALPHA, threads=4).value
    assert a == b


def test_find_delta(conifold, barnes):
    d = coulomb.find_delta(conifold, CONIFOLD_ALPHA)
    coulomb.check_delta(conifold, [d], CONIFOLD_ALPHA)
    assert -0.11 < d < 0.17
    assert -0.3 < coulomb.find_delta(barnes, BARNES_ALPHA) < 0.4
