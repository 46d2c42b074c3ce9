"""Phase combinatorics of an abelian GLSM.

Indices of fields are 0-based throughout the Python API. A spec with ``n+k``
fields and gauge rank ``k`` has an ``(n+k) x k`` integer charge matrix whose
row ``i`` is the character D_i.
"""
import itertools
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from . import qlinalg as ql
from .errors import BadRCharge, OnWall, RankDeficient


@dataclass(frozen=True)
class GlsmSpec:
    name: str
    charges: tuple  # tuple of int tuples, one per field
    r_charges: tuple  # tuple of Fraction
    labels: Optional[tuple] = None

    @property
    def kappa(self) -> int:
        return len(self.charges[0])

    @property
    def n_fields(self) -> int:
        return len(self.charges)

    @property
    def is_calabi_yau(self) -> bool:
        return all(sum(row[a] for row in self.charges) == 0 for a in range(self.kappa))

    @property
    def qhat(self) -> Fraction:
        return sum(self.r_charges, Fraction(0)) / 2

    @property
    def chat(self) -> Fraction:
        return self.n_fields - self.kappa - 2 * self.qhat

    @property
    def lattice_index(self) -> int:
        """Index of the span of the charges inside the character lattice."""
        return ql.lattice_index(self.charges)

    def charge_array(self) -> np.ndarray:
        return np.array(self.charges, dtype=float)


def validate_spec(name, charges, r_charges=None, labels=None) -> GlsmSpec:
    rows = [tuple(int(x) for x in row) for row in charges]
    if not rows or not rows[0]:
        raise RankDeficient("empty charge matrix")
    k = len(rows[0])
    if any(len(r) != k for r in rows):
        raise ValueError("charge rows have inconsistent lengths")
    if any(Fraction(x) != int(x) for row in charges for x in row):
        raise ValueError("charges must be integers")
    if ql.rank(rows) < k:
        raise RankDeficient("charges do not span the character space")
    if r_charges is None:
        r_charges = [0] * len(rows)
    if len(r_charges) != len(rows):
        raise BadRCharge("need one R-charge per field")
    qs = []
    for q in r_charges:
        if isinstance(q, float):
            raise BadRCharge("R-charges must be exact rationals, got a float")
        try:
            qf = ql.as_fraction(q)
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise BadRCharge(f"bad R-charge {q!r}") from exc
        if qf < 0:
            raise BadRCharge(f"negative R-charge {q}")
        qs.append(qf)
    if labels is not None:
        labels = tuple(str(x) for x in labels)
        if len(labels) != len(rows):
            raise ValueError("need one label per field")
    spec = GlsmSpec(str(name), tuple(rows), tuple(qs), labels)
    if spec.lattice_index != 1:
        warnings.warn(
            f"charges of {spec.name} generate a sublattice of index {spec.lattice_index}; "
            "series prefactors use |det Q_I|", stacklevel=2)
    return spec


@dataclass(frozen=True)
class Anticone:
    indices: tuple
    dual_basis: tuple  # D_i^{*,I} for i in indices, same order
    group: ql.GroupStructure
    s: tuple  # s[j][a] = <D_j, D_{indices[a]}^*>, one row per field
    coefficients: tuple = ()  # a_i with zeta = sum a_i D_i (when built from a zeta)

    @property
    def complement(self) -> tuple:
        return tuple(j for j in range(len(self.s)) if j not in self.indices)

    def s_array(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.s])

    def dual_array(self) -> np.ndarray:
        return np.array([[float(x) for x in v] for v in self.dual_basis])


def make_anticone(spec: GlsmSpec, indices, coefficients=()) -> Anticone:
    indices = tuple(indices)
    rows = [spec.charges[i] for i in indices]
    dual = ql.dual_basis(rows)
    group = ql.det_index(rows)
    s = tuple(tuple(ql.pairing(spec.charges[j], dual[a]) for a in range(len(indices)))
              for j in range(spec.n_fields))
    return Anticone(indices, tuple(dual), group, s, tuple(coefficients))


def _coefficients(spec, indices, zeta):
    rows = [spec.charges[i] for i in indices]
    if ql.det(rows) == 0:
        return None
    # zeta = sum a_i D_i  <=>  a_i = <zeta, D_i^*>
    dual = ql.dual_basis(rows)
    return tuple(ql.pairing(zeta, d) for d in dual)


def minimal_anticones(spec: GlsmSpec, zeta) -> list:
    zeta = ql.qvec(zeta)
    if len(zeta) != spec.kappa:
        raise ValueError("zeta has the wrong length")
    out = []
    for idx in itertools.combinations(range(spec.n_fields), spec.kappa):
        a = _coefficients(spec, idx, zeta)
        if a is None:
            continue
        if all(x >= 0 for x in a) and any(x == 0 for x in a):
            raise OnWall(f"zeta={tuple(map(str, zeta))} lies on a wall (anticone {idx})")
        if all(x > 0 for x in a):
            out.append(make_anticone(spec, idx, a))
    return out


@dataclass
class Chamber:
    spec: GlsmSpec
    zeta: tuple
    min_anticones: list

    @property
    def index_sets(self) -> list:
        return [a.indices for a in self.min_anticones]

    def inequalities(self) -> list:
        """Normals n with <zeta', n> > 0 on the chamber (one per (I, i))."""
        seen = []
        for a in self.min_anticones:
            for d in a.dual_basis:
                p = ql.primitive(d)
                if p not in seen:
                    seen.append(p)
        return seen


def chamber_of(spec: GlsmSpec, zeta) -> Chamber:
    anti = minimal_anticones(spec, zeta)
    if not anti:
        raise OnWall("zeta lies outside the support of the secondary fan")
    return Chamber(spec, ql.qvec(zeta), anti)


def contains(chamber: Chamber, zeta) -> bool:
    try:
        other = minimal_anticones(chamber.spec, zeta)
    except OnWall:
        return False
    return [a.indices for a in other] == chamber.index_sets


@dataclass(frozen=True)
class Wall:
    normal: tuple  # primitive h with <zeta_C, h> > 0
    interior_point: tuple  # a point in the relative interior of the facet
    other_side: tuple  # a point just across the facet


def _facet_point(normals, n, kappa):
    """Relative-interior point of the facet {<z,n>=0} of {<z,m> >= 0}."""
    others = [m for m in normals if m != n]
    if kappa == 1:
        return (Fraction(0),)
    # maximise a common slack t subject to <z,m> >= t, <z,n> = 0, |z|_inf <= 1
    c = np.zeros(kappa + 1)
    c[-1] = -1.0
    A_ub = [list(-np.array(m, float)) + [1.0] for m in others] or None
    b_ub = [0.0] * len(others) or None
    A_eq = [list(np.array(n, float)) + [0.0]]
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[0.0],
                  bounds=[(-1, 1)] * kappa + [(None, 1)], method="highs")
    if not res.success or res.x[-1] <= 1e-9:
        return None
    pt = tuple(Fraction(float(x)).limit_denominator(10**6) for x in res.x[:kappa])
    # project exactly onto the hyperplane along a coordinate with nonzero normal entry
    j = next(a for a in range(kappa) if n[a] != 0)
    off = ql.pairing(n, pt)
    pt = tuple(x - (off / n[j] if a == j else 0) for a, x in enumerate(pt))
    if all(ql.pairing(m, pt) > 0 for m in others):
        return pt
    return None


def walls_of_chamber(spec: GlsmSpec, chamber: Chamber) -> list:
    normals = chamber.inequalities()
    walls = []
    for n in normals:
        pt = _facet_point(normals, n, spec.kappa)
        if pt is None:
            continue
        # step across the facet by a small exact amount
        step = Fraction(1, 10**3)
        for _ in range(20):
            other = tuple(x - step * hn for x, hn in zip(pt, n))
            try:
                minimal_anticones(spec, other)
                break
            except OnWall:
                step /= 7
        walls.append(Wall(n, pt, other))
    return walls


@dataclass(frozen=True)
class BoxElement:
    gamma: tuple
    fractional_weights: tuple
    age: Fraction
    narrow: bool

    @property
    def inverse_gamma(self) -> tuple:
        return ql.mod_one(-g for g in self.gamma)

    @property
    def fixed_fields(self) -> tuple:
        return tuple(i for i, f in enumerate(self.fractional_weights) if f == 0)


def _weights(spec, gamma):
    return tuple(ql.frac_part(ql.pairing(row, gamma)) for row in spec.charges)


def _zero_in_hull(vectors) -> bool:
    """Exact test of 0 in conv(vectors) by Caratheodory enumeration."""
    if not vectors:
        return False
    k = len(vectors[0])
    if any(all(x == 0 for x in v) for v in vectors):
        return True
    for size in range(2, min(len(vectors), k + 1) + 1):
        for sub in itertools.combinations(vectors, size):
            # unknowns n_1..n_size with sum n_i v_i = 0, sum n_i = 1
            rows = [[v[a] for v in sub] for a in range(k)] + [[1] * size]
            rhs = [0] * k + [1]
            sol = ql.solve_unique(rows, rhs)
            if sol is not None and all(x >= 0 for x in sol):
                return True
    return False


def _is_narrow(spec, weights) -> bool:
    fixed = [spec.charges[i] for i, f in enumerate(weights) if f == 0]
    return not _zero_in_hull(fixed)


def box_element(spec: GlsmSpec, gamma) -> BoxElement:
    gamma = ql.mod_one(gamma)
    w = _weights(spec, gamma)
    return BoxElement(gamma, w, sum(w, Fraction(0)), _is_narrow(spec, w))


def narrowness(spec: GlsmSpec, zeta, element: BoxElement) -> bool:
    return _is_narrow(spec, element.fractional_weights)


def anticone_box(spec: GlsmSpec, anticone: Anticone) -> list:
    """Coset representatives of the stabilizer group of the fixed point."""
    gens = [ql.mod_one(d) for d in anticone.dual_basis]
    zero = tuple(Fraction(0) for _ in range(spec.kappa))
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for g in frontier:
            for d in gens:
                h = ql.mod_one(x + y for x, y in zip(g, d))
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return sorted(seen)


def box_elements(spec: GlsmSpec, zeta) -> list:
    gammas = set()
    for a in minimal_anticones(spec, zeta):
        gammas.update(anticone_box(spec, a))
    elems = [box_element(spec, g) for g in gammas]
    return sorted(elems, key=lambda b: (b.age, b.gamma))


@dataclass(frozen=True)
class FixedPointWeights:
    anticone: Anticone
    u_weights: tuple  # u_weights[j][l] = coefficient of lambda_l in iota^* u_j
    p_weights: tuple  # p_weights[a][l]
    k_exponents: tuple  # k_exponents[j][l] = exponent of Lambda_l in iota^* U_j

    def u_values(self, lam) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.u_weights]) @ np.asarray(lam)

    def p_values(self, lam) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.p_weights]) @ np.asarray(lam)


def fixed_point_weights(spec: GlsmSpec, anticone: Anticone) -> FixedPointWeights:
    N = spec.n_fields
    idx = anticone.indices
    u = []
    for j in range(N):
        row = [Fraction(0)] * N
        for a, i in enumerate(idx):
            row[i] += anticone.s[j][a]
        row[j] -= 1
        u.append(tuple(row))
    p = []
    for a in range(spec.kappa):
        row = [Fraction(0)] * N
        for b, i in enumerate(idx):
            row[i] += anticone.dual_basis[b][a]
        p.append(tuple(row))
    return FixedPointWeights(anticone, tuple(u), tuple(p), tuple(u))


def empty_divisors(spec: GlsmSpec, zeta) -> tuple:
    """Fields that lie in every minimal anticone (informational only)."""
    anti = minimal_anticones(spec, zeta)
    return tuple(i for i in range(spec.n_fields) if all(i in a.indices for a in anti))


def transform_spec(spec: GlsmSpec, g) -> GlsmSpec:
    """Apply an integer basis change g (k x k, det +-1) to every character."""
    g = [[int(x) for x in row] for row in g]
    k = spec.kappa
    rows = tuple(tuple(sum(row[b] * g[b][a] for b in range(k)) for a in range(k))
                 for row in spec.charges)
    return GlsmSpec(spec.name, rows, spec.r_charges, spec.labels)


def transform_character(v, g) -> tuple:
    k = len(v)
    return tuple(sum(v[b] * g[b][a] for b in range(k)) for a in range(k))
