"""Wall crossing between adjacent chambers.

A wall with circuit h splits the fields into I_plus (h_i > 0), I_minus
(h_i < 0) and the rest. Minimal anticones shared by both chambers are
nonessential; the others have the form J + {i} with J inside the rest and i in
the circuit. For every J and m_J the wall function takes the residues along J,
integrates the remaining direction over the line p(m_J) + i R h and adds the
poles that sit between that line and the chamber contour.

Supported for gauge rank at most two.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import math
from typing import Optional

import numpy as np

from . import cgamma
from . import qlinalg as ql
from .coulomb import line_integral_after_residues, mb_integral_1d, residue_value
from .errors import (GradeRestrictionViolated, NoDecay, NotAdjacent, NotConverging, OnWall,
                     Resonant, Unsupported)
from .higgs import (DEFAULT_TOL, _ChamberTerms, as_brane, chamber_partition, default_max_shell,
                    screen_resonance, sum_shells, theta_from)
from .toriccomb import GlsmSpec, chamber_of, contains, make_anticone, walls_of_chamber

EPSILONS = (0.37, 0.61, 0.23, 0.79, 0.13, 0.53)
GENERIC_TOL = 1e-9


@dataclass(frozen=True)
class Circuit:
    h: tuple
    h_i: tuple
    I_plus: tuple
    I_minus: tuple

    @property
    def support(self) -> tuple:
        return tuple(sorted(self.I_plus + self.I_minus))

    @property
    def window(self) -> Fraction:
        return Fraction(sum(abs(x) for x in self.h_i), 4)


def _circuit(spec, h) -> Circuit:
    h_i = tuple(int(sum(q * x for q, x in zip(row, h))) for row in spec.charges)
    plus = tuple(i for i, x in enumerate(h_i) if x > 0)
    minus = tuple(i for i, x in enumerate(h_i) if x < 0)
    return Circuit(tuple(int(x) for x in h), h_i, plus, minus)


def circuit_of_wall(spec: GlsmSpec, zeta_plus, zeta_minus) -> Circuit:
    try:
        cp = chamber_of(spec, zeta_plus)
        cm = chamber_of(spec, zeta_minus)
    except OnWall as exc:
        raise NotAdjacent(f"both points must lie in chambers: {exc}") from exc
    for w in walls_of_chamber(spec, cp):
        if contains(cm, w.other_side):
            c = _circuit(spec, w.normal)
            if not c.I_plus or not c.I_minus:
                raise NotAdjacent("the shared facet is a boundary of the secondary fan")
            return c
    raise NotAdjacent("the chambers do not share a facet")


@dataclass
class WallData:
    circuit: Circuit
    a0: list
    essential_plus: list
    essential_minus: list
    nonessential: list
    spec: Optional[GlsmSpec] = field(default=None, repr=False)


def classify_anticones(spec: GlsmSpec, circuit: Circuit, zeta_plus, zeta_minus) -> WallData:
    plus = chamber_of(spec, zeta_plus).min_anticones
    minus = chamber_of(spec, zeta_minus).min_anticones
    shared = {a.indices for a in plus} & {a.indices for a in minus}
    ess_p = [a.indices for a in plus if a.indices not in shared]
    ess_m = [a.indices for a in minus if a.indices not in shared]
    support = set(circuit.support)
    a0 = []
    for I in ess_p + ess_m:
        hit = [i for i in I if i in support]
        if len(hit) == 1:
            J = tuple(i for i in I if i != hit[0])
            if J not in a0:
                a0.append(J)
    return WallData(circuit, sorted(a0), ess_p, ess_m,
                    [a.indices for a in plus if a.indices in shared], spec)


def grade_restriction(circuit: Circuit, B, t=None):
    """(ok, margin) with margin = sum |h_i|/4 - |<B+t, h>| exact; min over brane characters."""
    B = [ql.as_fraction(x) for x in np.atleast_1d(B)] if B is not None else [Fraction(0)] * len(circuit.h)
    if len(B) == 1 and len(circuit.h) > 1:
        B = B * len(circuit.h)
    chars = [t for t, _ in as_brane(t, len(circuit.h))] if isinstance(t, (dict, list)) or t is None \
        else [tuple(np.atleast_1d(t))]
    margin = None
    for ch in chars:
        pair = sum(((b + int(x)) * hh for b, x, hh in zip(B, ch, circuit.h)), Fraction(0))
        m = circuit.window - abs(pair)
        margin = m if margin is None else min(margin, m)
    if margin is None:
        margin = circuit.window
    return bool(margin > 0), margin


def p_of_m(spec: GlsmSpec, circuit: Circuit, J, m_J, alpha, epsilon: float) -> np.ndarray:
    """Base point on the polar hyperplanes of J and on <D_i0, p> + alpha_i0 = epsilon."""
    J = tuple(J)
    alpha = np.asarray(alpha, dtype=complex)
    D = spec.charge_array()
    i0 = min(circuit.I_plus)
    rows = [D[j] for j in J] + [D[i0]]
    rhs = [-m - alpha[j] for j, m in zip(J, m_J)] + [epsilon - alpha[i0]]
    p = np.linalg.solve(np.array(rows, float), np.array(rhs, complex))
    a = D @ p + alpha
    for i in range(spec.n_fields):
        if i in J:
            continue
        if circuit.h_i[i] != 0:
            if cgamma.pole_distance_real(a[i].real) < GENERIC_TOL:
                raise Resonant(f"line at epsilon={epsilon} meets a pole of field {i}")
        elif a[i].real <= 0.5 and abs(a[i] - round(a[i].real)) < GENERIC_TOL:
            raise Resonant(f"p sits on a pole of field {i}")
    return p


def ray_corrections(spec: GlsmSpec, circuit: Circuit, J, m_J, p, brane, alpha, theta) -> list:
    """Poles of the circuit fields on p + R_{>=0} h (I_plus) or p - R_{>=0} h (I_minus).

    Returns (anticone indices, m, value) triples; the values already carry the
    orientation sign and 1/|det Q_I|.
    """
    J = tuple(J)
    alpha = np.asarray(alpha, dtype=complex)
    a = spec.charge_array() @ np.asarray(p, complex) + alpha
    br = as_brane(brane, spec.kappa)
    out = []
    for i in circuit.support:
        # pole k of field i sits at u = -(k + a_i)/h_i; it is crossed iff k <= -Re a_i
        kmax = math.floor(-a[i].real)
        if kmax < 0:
            continue
        idx = tuple(sorted(J + (i,)))
        anti = make_anticone(spec, idx)
        for k in range(kmax + 1):
            mm = dict(zip(J, m_J))
            mm[i] = k
            m = tuple(mm[j] for j in idx)
            val = sum(c * residue_value(spec, anti, m, alpha, theta, t) for t, c in br)
            out.append((idx, m, complex(val)))
    return out


@dataclass
class WallResult:
    value: complex
    grr_margin: Fraction
    essential_contributions: dict
    nonessential_contributions: dict
    error_estimate: float = 0.0
    epsilon: float = 0.0
    line_integrals: int = 0
    ray_terms: int = 0
    chamber_plus_value: Optional[complex] = None
    chamber_minus_value: Optional[complex] = None


def _essential_term(spec, circuit, J, m_J, eps, theta, brane, alpha, tol, threads):
    p = p_of_m(spec, circuit, J, m_J, alpha, eps)
    line = line_integral_after_residues(spec, J, m_J, p, circuit.h, theta, brane, alpha,
                                        tol=tol, threads=threads)
    rays = ray_corrections(spec, circuit, J, m_J, p, brane, alpha, theta)
    sign = (-1) ** (spec.kappa + 1)
    val = sign * line.value + sum(v for _, _, v in rays)
    return val, line.quadrature_error + line.tail_bound, len(rays)


def _essential_sum(spec, circuit, J, eps, theta, brane, alpha, tol, max_terms, threads):
    if spec.kappa == 1:
        v, e, nr = _essential_term(spec, circuit, J, (), eps, theta, brane, alpha, tol, threads)
        return v, e, 1, nr
    total, err, nr_total = 0j, 0.0, 0
    mags = []
    quiet = 0
    for m in range(max_terms):
        v, e, nr = _essential_term(spec, circuit, J, (m,), eps, theta, brane, alpha, tol, threads)
        total += v
        err += e
        nr_total += nr
        mags.append(abs(v))
        quiet = quiet + 1 if abs(v) < tol * max(1.0, abs(total)) else 0
        if quiet >= 3:
            tail = 0.0
            r = [b / a for a, b in zip(mags[-4:], mags[-3:]) if a > 0]
            if r and max(r) < 1:
                tail = mags[-1] * max(r) / (1 - max(r))
            if tail <= tol * max(1.0, abs(total)):
                return total, err + tail, m + 1, nr_total
    raise NotConverging(f"essential sum over m_J for J={J} did not settle in {max_terms} terms")


def wall_partition(spec: GlsmSpec, wall: WallData, theta, brane=None, alpha=None,
                   tol: float = DEFAULT_TOL, epsilon: Optional[float] = None,
                   max_terms: int = 200, threads: int = 1) -> WallResult:
    if spec.kappa > 2:
        raise Unsupported("wall_partition is implemented for gauge rank at most two")
    if alpha is None:
        raise ValueError("alpha is required")
    alpha = np.asarray(alpha, dtype=complex)
    theta = np.asarray(theta, dtype=complex)
    br = as_brane(brane, spec.kappa)
    c = wall.circuit
    B = [Fraction(x) for x in theta.imag / (2 * math.pi)]
    ok, margin = grade_restriction(c, B, br)
    if not ok:
        raise GradeRestrictionViolated(f"grade restriction margin {margin} <= 0")
    if not br:
        return WallResult(0j, margin, {}, {})
    candidates = EPSILONS if epsilon is None else (epsilon,)
    last = None
    for eps in candidates:
        try:
            ess, err, nl, nr = {}, 0.0, 0, 0
            for J in wall.a0:
                v, e, n1, n2 = _essential_sum(spec, c, J, eps, theta, br, alpha, tol, max_terms, threads)
                ess[J] = v
                err += e
                nl += n1
                nr += n2
            break
        except Resonant as exc:
            last = exc
    else:
        raise Resonant(f"no generic epsilon found: {last}")
    noness = {}
    for I in wall.nonessential:
        anti = make_anticone(spec, I)
        hit = screen_resonance(spec, anti, alpha, default_max_shell(spec.kappa))
        if hit is not None:
            raise Resonant(f"Gamma pole: anticone {hit[0]}, field {hit[1]}, m={hit[2]}")
        res = sum_shells([_ChamberTerms(spec, anti, alpha, theta, br).terms], spec.kappa, tol,
                         default_max_shell(spec.kappa), threads=threads)
        noness[I] = res.value
        err += res.tail_estimate
    total = sum(ess.values()) + sum(noness.values())
    return WallResult(complex(total), margin, ess, noness, err, eps, nl, nr)


@dataclass
class WallCheckReport:
    circuit: Circuit
    grr_ok: bool
    grr_margin: Fraction
    values: dict  # label -> complex
    discrepancies: list  # (label_a, label_b, relative discrepancy)
    max_discrepancy: float
    skipped: list = field(default_factory=list)


def discrepancy(a: complex, b: complex) -> float:
    return abs(a - b) / max(1.0, abs(a))


def wall_crossing_check(spec: GlsmSpec, zeta_plus, zeta_minus, B=None, brane=None, alpha=None,
                        tol: float = 1e-10, threads: int = 1) -> WallCheckReport:
    """Evaluate both chamber series, the wall function and (rank one) the disk integral."""
    k = spec.kappa
    B = [0.0] * k if B is None else list(np.atleast_1d(B))
    c = circuit_of_wall(spec, zeta_plus, zeta_minus)
    wd = classify_anticones(spec, c, zeta_plus, zeta_minus)
    br = as_brane(brane, k)
    ok, margin = grade_restriction(c, [ql.as_fraction(x) for x in B], br)
    values, skipped = {}, []
    sides = {"+": zeta_plus, "-": zeta_minus}
    pairs = []
    for s, z in sides.items():
        th = theta_from(np.atleast_1d(z), B)
        values[f"chamber{s}"] = chamber_partition(spec, z, th, br, alpha, tol=tol, threads=threads).value
        if not ok:
            continue
        values[f"wall@{s}"] = wall_partition(spec, wd, th, br, alpha, tol=tol, threads=threads).value
        pairs.append((f"chamber{s}", f"wall@{s}"))
        if k == 1:
            values[f"mb@{s}"] = mb_integral_1d(spec, None, th, br, alpha, tol=tol, threads=threads).value
            pairs += [(f"chamber{s}", f"mb@{s}"), (f"wall@{s}", f"mb@{s}")]
    if not ok:
        skipped.append(f"wall and disk integrals skipped: grade restriction margin {margin} <= 0")
    elif k == 1:
        # a point between the chambers, where neither series needs to converge
        z0 = (np.atleast_1d(np.asarray(zeta_plus, float)) + np.atleast_1d(np.asarray(zeta_minus, float))) / 2
        th = theta_from(z0, B)
        try:
            values["wall@0"] = wall_partition(spec, wd, th, br, alpha, tol=tol, threads=threads).value
            values["mb@0"] = mb_integral_1d(spec, None, th, br, alpha, tol=tol, threads=threads).value
            pairs.append(("wall@0", "mb@0"))
        except NoDecay as exc:
            skipped.append(f"midpoint comparison skipped: {exc}")
    disc = [(a, b, discrepancy(values[a], values[b])) for a, b in pairs]
    mx = max((d for _, _, d in disc), default=0.0)
    return WallCheckReport(c, ok, margin, values, disc, mx, skipped)
