"""Mellin-Barnes disk integrals and residue-reduced line integrals.

The integrand is F(sigma) = prod_i Gamma(<D_i, sigma> + alpha_i) exp(<theta + 2 pi i t, sigma>).
With measure (-2 pi i)^{-1} d sigma on the line sigma = p + i s h (d sigma = i ds h)
a line integral is -(1/2 pi) int F ds.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import gamma as sp_gamma
from scipy.special import gammaincc

from . import cgamma
from . import qlinalg as ql
from .errors import AtPole, BadDelta, NoDecay
from .higgs import as_brane, chamber_term
from .toriccomb import Anticone, GlsmSpec


@dataclass
class QuadratureResult:
    value: complex
    samples: int
    truncation_radius: float
    quadrature_error: float
    decay_certified: bool
    tail_bound: float = 0.0
    samples_s: list = field(default_factory=list, repr=False)


def integrand(spec: GlsmSpec, sigma, alpha, theta, t=None) -> complex:
    sigma = np.asarray(sigma, dtype=complex)
    t = np.zeros(spec.kappa) if t is None else np.asarray(t, dtype=float)
    args = spec.charge_array() @ sigma + np.asarray(alpha, dtype=complex)
    lg = cgamma.log_gamma(args)
    lin = (np.asarray(theta, dtype=complex) + 2j * math.pi * t) @ sigma
    return complex(np.exp(np.sum(lg) + lin))


class _Line:
    """F restricted to p + i s h with the Gamma factors of ``exempt`` dropped."""

    def __init__(self, spec, p, h, alpha, theta, brane, exempt=()):
        keep = [i for i in range(spec.n_fields) if i not in set(exempt)]
        D = spec.charge_array()[keep]
        p = np.asarray(p, dtype=complex)
        h = np.asarray(h, dtype=float)
        alpha = np.asarray(alpha, dtype=complex)[keep]
        self.a0 = D @ p + alpha  # Gamma arguments at s = 0
        self.a1 = 1j * (D @ h)  # d/ds of the arguments
        theta = np.asarray(theta, dtype=complex)
        self.l0 = theta @ p
        self.l1 = 1j * (theta @ h)
        self.br = [(complex(c), 2j * math.pi * (np.asarray(t, float) @ p),
                    2j * math.pi * 1j * (np.asarray(t, float) @ h)) for t, c in brane]
        self.D = D
        self.alpha = alpha
        self.h = h
        self.p = p
        self.count = 0

    def __call__(self, s: float) -> complex:
        self.count += 1
        lg = cgamma.log_gamma(self.a0 + self.a1 * s)
        base = np.sum(lg) + self.l0 + self.l1 * s
        return complex(sum(c * np.exp(base + b0 + b1 * s) for c, b0, b1 in self.br))

    def values(self, S):
        S = np.asarray(S, dtype=float)
        args = self.a0[None, :] + self.a1[None, :] * S[:, None]
        base = np.sum(cgamma.log_gamma(args), axis=1) + self.l0 + self.l1 * S
        out = np.zeros(S.shape, dtype=complex)
        for c, b0, b1 in self.br:
            out += c * np.exp(base + b0 + b1 * S)
        return out


def _tail_bound(line: _Line, S: float, c: float, delta_strip: float) -> float:
    """Certified bound on int_{|s|>=S} |F| ds from the Gamma majorant."""
    C = cgamma.gamma_bound_constant(delta_strip)
    x = line.a0.real
    ima = line.a0.imag
    b = np.abs(line.a1.imag)
    logK = 0.0
    P = 0.0
    for xi, yi, bi, a0 in zip(x, ima, b, line.a0):
        if bi == 0:
            # constant factor along the line
            logK += float(cgamma.log_gamma(a0).real)
            continue
        pw = xi - 0.5
        logK += math.log(C) - min(xi, 0.0) + math.pi * abs(yi) / 2
        if pw >= 0:
            # |z| <= (|x| + |Im a0| + b)(1 + s)
            logK += pw * math.log(abs(xi) + abs(yi) + bi)
            P += pw
        else:
            lower = max(abs(xi), bi * S - abs(yi), 1e-300)
            logK += pw * math.log(lower)
    # exponential part of the linear term: |exp(l0 + l1 s + b0 + b1 s)|
    amp = max(abs(cf) * math.exp((line.l0 + b0).real) for cf, b0, _ in line.br)
    logK += math.log(amp) + math.log(len(line.br))
    # int_S^inf (1+s)^P e^{-c s} ds = e^c Gamma(P+1, c(1+S)) / c^{P+1}
    upper = sp_gamma(P + 1) * gammaincc(P + 1, c * (1 + S))
    if upper <= 0:
        return 0.0
    val = logK + c + math.log(upper) - (P + 1) * math.log(c)
    return 2 * math.exp(val)


def _strip_delta(line: _Line) -> float:
    d = min(cgamma.pole_distance_real(x) for x in line.a0.real)
    if d < 1e-12:
        raise AtPole("contour passes through a pole")
    return min(d, 0.5)


def _integrate(line: _Line, c: float, tol: float, threads: int = 1):
    """-(1/2 pi) int_R F(p + i s h) ds with a certified truncation radius."""
    dstrip = _strip_delta(line)
    S = 4.0
    while True:
        tb = _tail_bound(line, S, c, dstrip) / (2 * math.pi)
        if tb < tol / 2 or S > 1e4:
            break
        S *= 1.25
    certified = tb < tol / 2
    # short panels keep each adaptive call well inside its subdivision limit
    width = 1.0 / (1.0 + abs(line.l1.imag) / 10)
    n = max(2, int(math.ceil(2 * S / width)))
    edges = np.linspace(-S, S, n + 1)
    mag = np.max(np.abs(line.values(np.linspace(-min(S, 2.0), min(S, 2.0), 41))))
    epsabs = max(tol, 1e-15 * mag) / (4 * n)

    def panel(k):
        a, b = edges[k], edges[k + 1]
        with warnings.catch_warnings():
            # roundoff notices at the 1e-13 level are expected; the error estimate is kept
            warnings.simplefilter("ignore", IntegrationWarning)
            re = quad(lambda s: line(s).real, a, b, epsabs=epsabs, epsrel=1e-13, limit=200)
            im = quad(lambda s: line(s).imag, a, b, epsabs=epsabs, epsrel=1e-13, limit=200)
        return complex(re[0], im[0]), re[1] + im[1]

    if threads and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(panel, range(n)))
    else:
        parts = [panel(k) for k in range(n)]
    total = complex(math.fsum(v.real for v, _ in parts), math.fsum(v.imag for v, _ in parts))
    err = sum(e for _, e in parts)
    value = -total / (2 * math.pi)
    return value, err / (2 * math.pi), S, certified, tb


def find_delta(spec: GlsmSpec, alpha) -> float:
    """Midpoint of the 1-D positivity interval <D_i, delta> + alpha_i > 0."""
    if spec.kappa != 1:
        raise BadDelta("automatic delta search is implemented for rank one")
    lo, hi = -math.inf, math.inf
    for row, a in zip(spec.charges, np.asarray(alpha, dtype=complex).real):
        d = row[0]
        if d > 0:
            lo = max(lo, -a / d)
        elif d < 0:
            hi = min(hi, -a / d)
        elif a <= 0:
            raise BadDelta("a neutral field has nonpositive alpha")
    if not lo < hi:
        raise BadDelta("no delta satisfies the positivity condition")
    if math.isinf(lo) and math.isinf(hi):
        return 0.0
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return (lo + hi) / 2


def check_delta(spec, delta, alpha):
    D = spec.charge_array()
    x = D @ np.atleast_1d(np.asarray(delta, float)) + np.asarray(alpha, dtype=complex).real
    if np.any(x <= 0):
        raise BadDelta(f"positivity fails at delta={delta}: {x}")


def mb_integral_1d(spec: GlsmSpec, delta, theta, brane=None, alpha=None, tol: float = 1e-11,
                   threads: int = 1) -> QuadratureResult:
    if spec.kappa != 1:
        raise BadDelta("mb_integral_1d needs a rank-one spec")
    if delta is None:
        delta = find_delta(spec, alpha)
    check_delta(spec, [delta], alpha)
    return _line_result(spec, (), (), [float(delta)], [1.0], theta, brane, alpha, tol, threads)


def _line_result(spec, J, m_J, p, h, theta, brane, alpha, tol, threads):
    br = as_brane(brane, spec.kappa)
    if not br:
        return QuadratureResult(0j, 0, 0.0, 0.0, True)
    theta = np.asarray(theta, dtype=complex)
    B = theta.imag / (2 * math.pi)
    c = min(cgamma.decay_exponent(spec, J, h, B, t) for t, _ in br)
    c2 = min(cgamma.decay_exponent(spec, J, -np.asarray(h, float), B, t) for t, _ in br)
    c = min(c, c2)
    if c <= 0:
        raise NoDecay(f"decay exponent {c:.3g} <= 0: the grade restriction window is violated")
    line = _Line(spec, p, h, alpha, theta, br, exempt=J)
    pre = _jacobian(spec, J, m_J, h)
    value, err, S, cert, tb = _integrate(line, c, tol / max(abs(pre), 1e-300), threads)
    return QuadratureResult(pre * value, line.count, S, abs(pre) * err, cert, abs(pre) * tb)


def _jacobian(spec, J, m_J, h):
    """Residue weight for the directions in J: prod (-1)^m/m! / |det(D_J; Omega)|."""
    if not J:
        return 1.0
    k = spec.kappa
    h = [Fraction(int(x)) for x in h]
    # Omega: any covector with <Omega, h> = 1; the determinant does not depend on the choice
    j = next(a for a in range(k) if h[a] != 0)
    omega = [Fraction(0)] * k
    omega[j] = 1 / h[j]
    rows = [spec.charges[i] for i in J] + [omega]
    det = abs(ql.det(rows))
    if det == 0:
        raise ValueError("h is not transverse to the residue directions")
    w = 1.0 / float(det)
    for m in m_J:
        w *= (-1) ** int(m) / math.factorial(int(m))
    return w


def line_integral_after_residues(spec: GlsmSpec, J, m_J, p, h, theta, brane=None, alpha=None,
                                 tol: float = 1e-11, threads: int = 1) -> QuadratureResult:
    """Line integral over p + i R h after taking residues along the fields in J.

    p must satisfy <D_j, p> + alpha_j = -m_j for j in J, and <D_j, h> = 0.
    For rank one and J empty this is the disk integral at delta = p.
    """
    J = tuple(J)
    m_J = tuple(m_J)
    alpha = np.asarray(alpha, dtype=complex)
    p = np.asarray(p, dtype=complex)
    D = spec.charge_array()
    for j, m in zip(J, m_J):
        if abs(D[j] @ p + alpha[j] + m) > 1e-9:
            raise ValueError(f"p is not on the polar hyperplane of field {j}")
        if abs(D[j] @ np.asarray(h, float)) > 0:
            raise ValueError("h must be orthogonal to the residue charges")
    return _line_result(spec, J, m_J, p, h, theta, brane, alpha, tol, threads)


def residue_value(spec: GlsmSpec, anticone: Anticone, m, alpha, theta, t=None) -> complex:
    """Residue contribution (-1)^k / |det Q_I| times the chamber term."""
    return (-1) ** spec.kappa * chamber_term(spec, anticone, m, alpha, theta, t) / anticone.group.order


def small_circle_residue(spec: GlsmSpec, center, alpha, theta, t=None, radius=1e-3, n=64) -> complex:
    """(-2 pi i)^{-1} times a trapezoidal contour integral around ``center`` (rank one)."""
    ang = 2 * math.pi * np.arange(n) / n
    pts = center + radius * np.exp(1j * ang)
    vals = np.array([integrand(spec, [s], alpha, theta, t) for s in pts])
    integral = np.sum(vals * 1j * radius * np.exp(1j * ang)) * (2 * math.pi / n)
    return complex(integral / (-2j * math.pi))


def integrand_samples(spec, delta, theta, brane, alpha, S=None, n=401):
    """(s, F) samples along the standard rank-one contour for plotting."""
    br = as_brane(brane, spec.kappa)
    line = _Line(spec, [delta], [1.0], alpha, theta, br)
    S = 6.0 if S is None else S
    s = np.linspace(-S, S, n)
    return s, line.values(s)


def certified_bound_at(spec, delta, theta, brane, alpha, s: float) -> float:
    """The pointwise majorant of |F(delta + i s)| used by the tail certificate."""
    br = as_brane(brane, spec.kappa)
    line = _Line(spec, [delta], [1.0], alpha, theta, br)
    dstrip = _strip_delta(line)
    C = cgamma.gamma_bound_constant(dstrip)
    args = line.a0 + line.a1 * s
    out = 0.0
    lin = line.l0 + line.l1 * s
    for c, b0, b1 in line.br:
        out += abs(c) * math.exp((lin + b0 + b1 * s).real)
    for z in args:
        out *= C * abs(z) ** (z.real - 0.5) * math.exp(-min(z.real, 0.0)) * math.exp(-math.pi * abs(z.imag) / 2)
    return out
