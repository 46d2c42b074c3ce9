"""Higgs-branch series: chamber sums, central charges, I-function values.

Conventions (fixed once, see tests/test_golden.py):

* theta = zeta + 2 pi i B is a complex k-vector; a brane is a finite map
  from integer characters t to coefficients.
* For an anticone I and m in Z_{>=0}^I,
  sigma_m = -sum_i (m_i + alpha_i) D_i^{*,I}.
* The chamber sum carries the orientation sign (-1)^k and the weight
  1/|det Q_I|, so that it equals the Mellin-Barnes integral with measure
  (-2 pi i)^{-k} d sigma on the standard contour.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
import itertools
import math
from typing import Optional

import numpy as np
from scipy.special import gammaln

from . import cgamma
from . import qlinalg as ql
from .errors import AtPole, Inconclusive, NotConverging, Resonant, UnitCircleQ, VanishingFactor, ZeroZ
from .toriccomb import (Anticone, Chamber, GlsmSpec, anticone_box, box_element, chamber_of,
                        fixed_point_weights, make_anticone, minimal_anticones)

DEFAULT_TOL = 1e-10


def default_max_shell(kappa: int) -> int:
    return 400 if kappa == 1 else 120


def theta_from(zeta, B=None) -> np.ndarray:
    zeta = np.asarray([float(x) for x in zeta], dtype=float)
    B = np.zeros_like(zeta) if B is None else np.asarray([float(x) for x in B], dtype=float)
    return zeta + 2j * math.pi * B


def as_brane(brane, kappa: int) -> list:
    """Normalize a brane to a sorted list of (t, coefficient) pairs."""
    if brane is None:
        return [(tuple([0] * kappa), 1)]
    if isinstance(brane, dict):
        items = brane.items()
    else:
        items = brane
    out = {}
    for t, c in items:
        t = (int(t),) if np.isscalar(t) else tuple(int(x) for x in t)
        if len(t) != kappa:
            raise ValueError("brane character has the wrong length")
        out[t] = out.get(t, 0) + c
    return sorted((t, c) for t, c in out.items() if c != 0)


@dataclass
class SeriesResult:
    value: complex
    shells_used: int
    terms_used: int
    tail_estimate: float
    converged: bool
    resonant_terms: int = 0
    partial_sums: list = field(default_factory=list, repr=False)
    shell_magnitudes: list = field(default_factory=list, repr=False)


def shell(k: int, kappa: int) -> np.ndarray:
    """All m in Z_{>=0}^kappa with |m| = k, lexicographic."""
    if kappa == 1:
        return np.array([[k]])
    rows = []
    for first in range(k, -1, -1):
        for rest in shell(k - first, kappa - 1):
            rows.append([first, *rest])
    return np.array(rows, dtype=int).reshape(-1, kappa)


def sigma_m(anticone: Anticone, m, alpha) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=complex)
    coef = np.asarray(m, dtype=float) + alpha[list(anticone.indices)]
    return -coef @ anticone.dual_array()


def _exact(x):
    x = complex(x)
    return Fraction(x.real), Fraction(x.imag)


def screen_resonance(spec: GlsmSpec, anticone: Anticone, alpha, max_shell: int):
    """Exact search for m with |m| <= max_shell hitting a Gamma pole.

    Returns None or the offending (indices, i', m).
    """
    idx = anticone.indices
    ex = [_exact(a) for a in alpha]
    for ip in anticone.complement:
        s = anticone.s[ip]
        c_re = ex[ip][0] - sum((s[a] * ex[i][0] for a, i in enumerate(idx)), Fraction(0))
        c_im = ex[ip][1] - sum((s[a] * ex[i][1] for a, i in enumerate(idx)), Fraction(0))
        if c_im != 0:
            continue
        L = 1
        for x in s:
            L = L * x.denominator // math.gcd(L, x.denominator)
        if (c_re * L).denominator != 1:
            continue
        for k in range(max_shell + 1):
            for m in shell(k, len(idx)):
                v = c_re - sum((s[a] * int(m[a]) for a in range(len(idx))), Fraction(0))
                if v.denominator == 1 and v <= 0:
                    return idx, ip, tuple(int(x) for x in m)
    return None


class _ChamberTerms:
    """Vectorized chamber terms for one anticone."""

    def __init__(self, spec, anticone, alpha, theta, brane):
        self.anticone = anticone
        self.kappa = spec.kappa
        alpha = np.asarray(alpha, dtype=complex)
        idx = list(anticone.indices)
        comp = list(anticone.complement)
        S = anticone.s_array()
        self.S = S[comp]
        self.alpha_I = alpha[idx]
        self.c = alpha[comp] - self.S @ self.alpha_I
        dual = anticone.dual_array()
        self.theta_I = dual @ np.asarray(theta, dtype=complex)
        self.brane = [(dual @ np.asarray(t, float), complex(c)) for t, c in brane]
        self.weight = (-1) ** self.kappa / anticone.group.order

    def log_term(self, M):
        """Complex log of the term without brane factor and sign; M has shape (r, k)."""
        M = np.asarray(M, dtype=float)
        args = self.c[None, :] - M @ self.S.T
        lg = cgamma.log_gamma(args) if args.size else np.zeros((M.shape[0], 0))
        coef = M + self.alpha_I[None, :]
        return np.sum(lg, axis=1) - np.sum(gammaln(M + 1), axis=1) - coef @ self.theta_I

    def terms(self, M):
        M = np.asarray(M, dtype=float)
        try:
            base = np.exp(self.log_term(M))
        except AtPole as exc:
            raise Resonant(f"Gamma pole at anticone {self.anticone.indices}") from exc
        sign = np.where(np.sum(M, axis=1) % 2 == 0, 1.0, -1.0)
        coef = M + self.alpha_I[None, :]
        br = np.zeros(M.shape[0], dtype=complex)
        for tI, c in self.brane:
            br += c * np.exp(-2j * math.pi * (coef @ tI))
        return self.weight * sign * base * br


def chamber_term(spec: GlsmSpec, anticone: Anticone, m, alpha, theta, t=None) -> complex:
    """Single term prod Gamma(...) prod (-1)^m_i/m_i! exp(<theta + 2 pi i t, sigma_m>)."""
    t = tuple([0] * spec.kappa) if t is None else tuple(t)
    T = _ChamberTerms(spec, anticone, alpha, theta, [(t, 1)])
    return complex(T.terms(np.atleast_2d(m))[0] / T.weight)


def _neumaier(values, state):
    s, comp = state
    for v in values:
        t = s + v
        if abs(s) >= abs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
    return s, comp


def _tail(mags):
    tail_mags = [x for x in mags[-4:]]
    ratios = [b / a for a, b in zip(tail_mags, tail_mags[1:]) if a > 0]
    if not ratios:
        return 0.0, 0.0
    r = max(ratios)
    if r >= 1:
        return math.inf, r
    return mags[-1] * r / (1 - r), r


def sum_shells(blocks, kappa, tol, max_shell, stop_early=True, threads=1) -> SeriesResult:
    """Shell-by-shell summation of term generators (one per anticone).

    ``blocks`` are callables mapping an (r, k) array of m to r complex terms.
    """
    re_state = (0.0, 0.0)
    im_state = (0.0, 0.0)
    mags, partials = [], []
    quiet = 0
    terms_used = 0
    pool = ThreadPoolExecutor(threads) if threads and threads > 1 else None
    try:
        for k in range(max_shell + 1):
            M = shell(k, kappa)
            if pool is not None:
                parts = list(pool.map(lambda f: f(M), blocks))
            else:
                parts = [f(M) for f in blocks]
            vals = np.concatenate(parts) if parts else np.zeros(0, complex)
            terms_used += vals.size
            if not np.all(np.isfinite(vals)):
                raise NotConverging(f"non-finite term in shell {k}")
            re_state = _neumaier(vals.real.tolist(), re_state)
            im_state = _neumaier(vals.imag.tolist(), im_state)
            total = complex(re_state[0] + re_state[1], im_state[0] + im_state[1])
            mag = float(np.sum(np.abs(vals)))
            mags.append(mag)
            partials.append(total)
            if not stop_early:
                continue
            quiet = quiet + 1 if mag < tol * abs(total) or mag == 0 else 0
            if quiet >= 3 and k >= 3:
                tail, _ = _tail(mags)
                if tail <= tol * max(1.0, abs(total)):
                    return SeriesResult(total, k + 1, terms_used, tail, True, 0, partials, mags)
    finally:
        if pool is not None:
            pool.shutdown()
    tail, r = _tail(mags)
    total = partials[-1]
    if stop_early and r >= 1:
        raise NotConverging(f"shell ratio {r:.3g} >= 1 at shell {max_shell}")
    converged = tail <= tol * max(1.0, abs(total))
    return SeriesResult(total, max_shell + 1, terms_used, tail, converged, 0, partials, mags)


def _resolve_chamber(spec, chamber):
    if isinstance(chamber, Chamber):
        return chamber
    return chamber_of(spec, chamber)


def chamber_partition(spec: GlsmSpec, chamber, theta, brane=None, alpha=None,
                      tol: float = DEFAULT_TOL, max_shell: Optional[int] = None,
                      stop_early: bool = True, threads: int = 1) -> SeriesResult:
    """Chamber hemisphere partition function as a shell-truncated residue sum."""
    ch = _resolve_chamber(spec, chamber)
    max_shell = default_max_shell(spec.kappa) if max_shell is None else max_shell
    br = as_brane(brane, spec.kappa)
    if alpha is None:
        raise ValueError("alpha is required")
    alpha = np.asarray(alpha, dtype=complex)
    if not br:
        return SeriesResult(0j, 0, 0, 0.0, True)
    for a in ch.min_anticones:
        hit = screen_resonance(spec, a, alpha, max_shell)
        if hit is not None:
            raise Resonant(f"Gamma pole: anticone {hit[0]}, field {hit[1]}, m={hit[2]}")
    blocks = [_ChamberTerms(spec, a, alpha, theta, br).terms for a in ch.min_anticones]
    return sum_shells(blocks, spec.kappa, tol, max_shell, stop_early, threads)


# -- central charge ---------------------------------------------------------


class _CentralTerms:
    def __init__(self, spec, anticone, log_y, lam, z, t, sign):
        self.kappa = spec.kappa
        z = complex(z)
        self.logz = np.log(z)
        self.logmz = np.log(-z)
        q = np.array([float(x) for x in spec.r_charges])
        alpha = np.asarray(lam, dtype=complex) / z + q / 2
        idx = list(anticone.indices)
        comp = list(anticone.complement)
        self.alpha_I = alpha[idx]
        self.alpha_c = alpha[comp]
        self.S = anticone.s_array()[comp]
        dual = anticone.dual_array()
        lin = np.asarray(log_y, dtype=complex) - 2j * math.pi * np.asarray(t, dtype=float)
        self.lin_I = dual @ lin  # <L - 2 pi i t, D_i^*>
        self.pref = sign / anticone.group.order
        self.idx = anticone.indices

    def terms(self, M):
        M = np.asarray(M, dtype=float)
        coef = M + self.alpha_I[None, :]  # (m_i + alpha_i)
        pair = coef @ self.S.T  # <D_i', beta_m>
        args = -pair + self.alpha_c[None, :]
        try:
            lg = cgamma.log_gamma(args) if args.size else np.zeros((M.shape[0], 0))
        except AtPole as exc:
            raise Resonant(f"Gamma pole at anticone {self.idx}") from exc
        zpow = (pair - self.alpha_c[None, :]) * self.logz
        logt = (np.sum(lg - zpow, axis=1) - M @ np.full(self.kappa, self.logmz)
                - np.sum(gammaln(M + 1), axis=1) + coef @ self.lin_I)
        return self.pref * np.exp(logt)


def central_charge_equivariant(spec: GlsmSpec, zeta, log_y, lam, z, t=None,
                               tol: float = DEFAULT_TOL, max_shell: Optional[int] = None,
                               orientation_sign: bool = True, threads: int = 1) -> SeriesResult:
    """Equivariant central charge of the line bundle L_t as a fixed-point sum.

    With ``orientation_sign`` the result carries the same (-1)^k as the
    chamber sum, so that at z = 1 it coincides with ``chamber_partition``
    under theta = -log y, alpha = lambda + q/2.
    """
    z = complex(z)
    if z == 0:
        raise ZeroZ("z must be nonzero")
    t = tuple([0] * spec.kappa) if t is None else tuple(t)
    max_shell = default_max_shell(spec.kappa) if max_shell is None else max_shell
    ch = chamber_of(spec, zeta)
    q = np.array([float(x) for x in spec.r_charges])
    alpha = np.asarray(lam, dtype=complex) / z + q / 2
    for a in ch.min_anticones:
        hit = screen_resonance(spec, a, alpha, max_shell)
        if hit is not None:
            raise Resonant(f"Gamma pole: anticone {hit[0]}, field {hit[1]}, m={hit[2]}")
    sign = (-1) ** spec.kappa if orientation_sign else 1
    blocks = [_CentralTerms(spec, a, log_y, lam, z, t, sign).terms for a in ch.min_anticones]
    return sum_shells(blocks, spec.kappa, tol, max_shell, True, threads)


# -- convergence domain -----------------------------------------------------


def horn_vector_log(spec: GlsmSpec, anticone: Anticone, sigma) -> float:
    """<log Psi(sigma), sigma> = sum_j (s_j sigma) log|s_j sigma|, 0 log 0 = 0.

    sigma is given in the basis D_i^{*,I}; the j in I part reproduces
    sum_i sigma_i log sigma_i.
    """
    sigma = np.asarray(sigma, dtype=float)
    v = anticone.s_array() @ sigma
    out = 0.0
    for x in v:
        if x != 0:
            out += x * math.log(abs(x))
    return float(out)


def _sphere_mesh(kappa, M):
    if kappa == 1:
        return np.array([[1.0]])
    pts = []
    for c in itertools.product(range(M + 1), repeat=kappa - 1):
        if sum(c) <= M:
            pts.append(list(c) + [M - sum(c)])
    P = np.array(pts, dtype=float)
    return P / np.linalg.norm(P, axis=1)[:, None]


def _horn_profile(spec, anticone, zeta, P):
    a = np.array([float(ql.pairing(zeta, d)) for d in anticone.dual_basis])
    S = anticone.s_array()
    V = P @ S.T
    with np.errstate(divide="ignore", invalid="ignore"):
        xl = np.where(V != 0, V * np.log(np.abs(V)), 0.0)
    f = P @ a + np.sum(xl, axis=1)
    g = np.sum(V, axis=1)
    return f, g


@dataclass
class ConvergenceReport:
    contains: bool
    margin: float
    mesh_size: int


def convergence_check(spec: GlsmSpec, anticone, zeta, max_refine: int = 10) -> ConvergenceReport:
    if not isinstance(anticone, Anticone):
        anticone = make_anticone(spec, anticone)
    zeta = ql.qvec(zeta)
    M = 8
    for _ in range(max_refine):
        P = _sphere_mesh(spec.kappa, M)
        f, g = _horn_profile(spec, anticone, zeta, P)
        eps = 1e-12
        # leading r log r growth dominates when g != 0 (non-CY directions)
        good_lead = g > eps
        bad = (g < -eps) | ((np.abs(g) <= eps) & (f < 0))
        if np.any(bad):
            return ConvergenceReport(False, float(np.min(np.where(np.abs(g) <= eps, f, np.inf)))
                                     if np.any(np.abs(g) <= eps) else -math.inf, M)
        rel = np.abs(g) <= eps
        if not np.any(rel):
            return ConvergenceReport(True, math.inf, M)
        fmin = float(np.min(f[rel]))
        if spec.kappa == 1:
            modulus = 0.0
        else:
            modulus = float(np.max(np.abs(np.diff(np.sort(f))))) if f.size > 1 else 0.0
            modulus = max(modulus, _neighbor_modulus(f, spec.kappa, M))
        if fmin > modulus and np.all(good_lead | rel):
            return ConvergenceReport(True, fmin, M)
        if spec.kappa == 1 and fmin == 0.0:
            break
        M *= 2
    raise Inconclusive(f"Horn minimum {fmin:.3g} within mesh resolution")


def _neighbor_modulus(f, kappa, M):
    if kappa == 2:
        return float(np.max(np.abs(np.diff(f)))) if f.size > 1 else 0.0
    return float(np.max(f) - np.min(f)) / max(M, 1)


def convergence_contains(spec: GlsmSpec, anticone, zeta) -> bool:
    return convergence_check(spec, anticone, zeta).contains


# -- effective classes and I-functions --------------------------------------


@dataclass(frozen=True)
class EffectiveClass:
    anticone: tuple
    m: tuple
    beta: tuple
    d: tuple


def effective_classes(spec: GlsmSpec, anticone, degree_cutoff: int) -> list:
    if not isinstance(anticone, Anticone):
        anticone = make_anticone(spec, anticone)
    if degree_cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    idx = anticone.indices
    q = spec.r_charges
    out = []
    for k in range(degree_cutoff + 1):
        for m in shell(k, spec.kappa):
            m = tuple(int(x) for x in m)
            beta = [Fraction(0)] * spec.kappa
            for a, i in enumerate(idx):
                c = m[a] + q[i] / 2
                for b in range(spec.kappa):
                    beta[b] += c * anticone.dual_basis[a][b]
            beta = tuple(beta)
            d = tuple(ql.pairing(spec.charges[j], beta) - q[j] / 2 for j in range(spec.n_fields))
            out.append(EffectiveClass(idx, m, beta, d))
    return out


def _box_lookup(spec, anticone):
    table = {}
    for g in anticone_box(spec, anticone):
        b = box_element(spec, g)
        table[b.fractional_weights] = b
    return table


def box_of_class(spec: GlsmSpec, anticone: Anticone, ec: EffectiveClass, table=None):
    """Box element v(beta): the element whose weights are {-d_j}."""
    table = _box_lookup(spec, anticone) if table is None else table
    key = tuple(ql.frac_part(-x) for x in ec.d)
    if key not in table:
        raise ValueError(f"class {ec.m} matches no Box element of the anticone")
    return table[key]


def _checked_anticone(spec, zeta, indices):
    anti = {a.indices: a for a in minimal_anticones(spec, zeta)}
    key = tuple(indices)
    if key not in anti:
        raise ValueError(f"{key} is not a minimal anticone of zeta")
    return anti[key]


def gamma_ratio(x: complex, d: Fraction) -> complex:
    """Gamma(1 + x - {-d}) / Gamma(1 + x + d) as an exact finite product."""
    e = ql.frac_part(-d)
    w = 1 + x - float(e)
    n = int(d + e)  # integer ceil(d)
    out = 1.0 + 0j
    if n >= 0:
        for k in range(n):
            den = w + k
            if den == 0:
                raise Resonant("Gamma-ratio denominator vanishes")
            out /= den
    else:
        for k in range(1, -n + 1):
            out *= w - k
    return out


def i_function_fixed_point(spec: GlsmSpec, zeta, anticone, lam, z, log_y, cutoff: int) -> dict:
    z = complex(z)
    if z == 0:
        raise ZeroZ("z must be nonzero")
    a = _checked_anticone(spec, zeta, anticone)
    fw = fixed_point_weights(spec, a)
    u = fw.u_values(np.asarray(lam, dtype=complex))
    p = fw.p_values(np.asarray(lam, dtype=complex))
    log_y = np.asarray(log_y, dtype=complex)
    logz = np.log(z)
    table = _box_lookup(spec, a)
    sumD = tuple(sum(row[b] for row in spec.charges) for b in range(spec.kappa))
    groups = {}
    for ec in effective_classes(spec, a, cutoff):
        v = box_of_class(spec, a, ec, table)
        beta = np.array([float(x) for x in ec.beta])
        term = np.exp(log_y @ beta - float(ql.pairing(sumD, ec.beta)) * logz)
        for j in range(spec.n_fields):
            term *= gamma_ratio(u[j] / z, ec.d[j])
        groups.setdefault(v, []).append(term)
    out = {}
    for v, terms in groups.items():
        pref = np.exp((log_y @ p) / z - float(v.age - spec.qhat) * logz)
        out[v] = complex(pref * math.fsum(t.real for t in terms)
                         + 1j * pref * math.fsum(t.imag for t in terms))
    return out


def i_function_counts(spec: GlsmSpec, zeta, anticone, cutoff: int) -> dict:
    a = _checked_anticone(spec, zeta, anticone)
    table = _box_lookup(spec, a)
    counts = {}
    for ec in effective_classes(spec, a, cutoff):
        v = box_of_class(spec, a, ec, table)
        counts[v] = counts.get(v, 0) + 1
    return counts


def _cpow(base: complex, expo) -> complex:
    return complex(np.exp(float(expo) * np.log(complex(base))))


def k_factor_parts(d: Fraction, U: complex, q: complex):
    """Split the q-product ratio for one field into (G part, normal part).

    The full ratio prod_k (1 - U q^{k+{-d}}) / prod_k (1 - U q^{k-d}) is
    finite: with e = {-d} and N = floor(-d) it equals
    prod_{k=0}^{N-1} (1 - U q^{k+e}) for N >= 0 and the reciprocal of
    prod_{k=N}^{-1} (1 - U q^{k+e}) for N < 0. For integer d < 0 the k = 0
    factor (1 - U) is the fixed-locus class; the rest is the normal part.
    """
    d = ql.as_fraction(d)
    if abs(abs(complex(q)) - 1.0) < 1e-12:
        raise UnitCircleQ("|q| = 1")
    e = ql.frac_part(-d)
    N = int((-d) - e)
    g = 1.0 + 0j
    rest = 1.0 + 0j
    if N >= 0:
        for k in range(N):
            f = 1 - U * _cpow(q, k + e)
            if k == 0 and e == 0:
                g *= f
            else:
                rest *= f
    else:
        for k in range(N, 0):
            f = 1 - U * _cpow(q, k + e)
            if abs(f) == 0:
                raise VanishingFactor(f"denominator factor vanishes for d={d}")
            rest /= f
    return g, rest


def k_factor(d, U, q) -> complex:
    g, rest = k_factor_parts(d, U, q)
    return g * rest


def k_factor_order(d) -> int:
    """Net number of linear factors (numerator minus denominator), integer d."""
    d = ql.as_fraction(d)
    if d.denominator != 1:
        raise ValueError("order is defined for integer d")
    return -int(d)


def k_i_function_fixed_point(spec: GlsmSpec, zeta, anticone, Lambda, q, y, cutoff: int) -> dict:
    q = complex(q)
    if abs(abs(q) - 1.0) < 1e-12:
        raise UnitCircleQ("|q| = 1")
    a = _checked_anticone(spec, zeta, anticone)
    fw = fixed_point_weights(spec, a)
    Lambda = np.asarray(Lambda, dtype=complex)
    if np.any(Lambda == 0):
        raise VanishingFactor("Lambda must be nonzero")
    logL = np.log(Lambda)
    E = np.array([[float(x) for x in row] for row in fw.k_exponents])
    U = np.exp(E @ logL)
    logy = np.log(np.asarray(y, dtype=complex))
    table = _box_lookup(spec, a)
    groups = {}
    for ec in effective_classes(spec, a, cutoff):
        v = box_of_class(spec, a, ec, table)
        beta = np.array([float(x) for x in ec.beta])
        term = complex(np.exp(logy @ beta))
        for j in range(spec.n_fields):
            term *= k_factor(ec.d[j], U[j], q)
        groups.setdefault(v, []).append(term)
    return {v: complex(math.fsum(t.real for t in ts), math.fsum(t.imag for t in ts))
            for v, ts in groups.items()}
