"""Pinned reference values checked against closed forms."""
import numpy as np
import pytest

from glsmcharge.coulomb import mb_integral_1d
from glsmcharge.higgs import central_charge_equivariant, chamber_partition, theta_from

from conftest import BARNES_ALPHA, CONIFOLD_ALPHA, QUINTIC_ALPHA, barnes_closed_form, rel

BARNES_ZETA2 = -0.6518229120723478


def test_barnes_sign_pinned(barnes):
    v = chamber_partition(barnes, [2], theta_from([2]), None, BARNES_ALPHA).value
    assert abs(v - BARNES_ZETA2) < 1e-12
    assert rel(v, -barnes_closed_form(2.0)) < 1e-12


@pytest.mark.parametrize("zeta", [-2.0, -4.5, 2.0, 6.0])
@pytest.mark.parametrize("B", [0.0, 0.13])
def test_barnes_both_phases(barnes, zeta, B):
    th = theta_from([zeta], [B])
    v = chamber_partition(barnes, [zeta], th, None, BARNES_ALPHA).value
    assert rel(v, -barnes_closed_form(zeta, B=B)) < 1e-9


def test_barnes_continuation_identity():
    a1, a2 = BARNES_ALPHA
    c = a1 + a2
    for th in np.linspace(-6, 6, 25):
        left = np.exp(-th * a1) * (1 + np.exp(-th)) ** (-c)
        right = np.exp(th * a2) * (1 + np.exp(th)) ** (-c)
        assert abs(left - right) < 1e-8 * abs(left)


def test_barnes_mb_matches(barnes):
    r = mb_integral_1d(barnes, 0.1, theta_from([2]), None, BARNES_ALPHA)
    assert rel(r.value, BARNES_ZETA2) < 1e-9


@pytest.mark.parametrize("model,zeta,alpha", [
    ("barnes", 2.0, BARNES_ALPHA),
    ("barnes", -2.0, BARNES_ALPHA),
    ("conifold", 3.0, CONIFOLD_ALPHA),
    ("conifold", -3.0, CONIFOLD_ALPHA),
    ("quintic", 10.0, QUINTIC_ALPHA),
    ("quintic", -3.0, QUINTIC_ALPHA),
])
def test_central_charge_at_z1(request, model, zeta, alpha):
    spec = request.getfixturevalue(model)
    q = np.array([float(x) for x in spec.r_charges])
    lam = np.asarray(alpha) - q / 2
    cc = central_charge_equivariant(spec, [zeta], [-zeta], lam, 1.0).value
    ref = chamber_partition(spec, [zeta], theta_from([zeta]), None, alpha).value
    assert rel(cc, ref) < 1e-10
