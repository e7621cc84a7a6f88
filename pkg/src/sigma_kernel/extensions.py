"""Difference field extensions presented as prolongation towers.

An :class:`ExtensionTower` is a finitely σ-generated extension given by
difference relations, each monic in its top variable.  The relation of
least order whose top variable belongs to generator j defines σ^i(x_j) for
every level i at or above that order; below it x_j is transcendental.
Level k of the tower is the field K(A_k), A_k = {σ^i(x_j) : i <= k}.

The first ``base_gens`` generators span the base difference field K; the
degree sequence only counts steps of the remaining generators.
"""

import math
from dataclasses import dataclass, field as dc_field

from .diffring import DiffPolyRing
from .errors import (BaseMismatch, InvalidPresentation, KernelError,
                     MonotonicityViolation, NotStabilized, PositiveSigmaDimension)
from .exact import upoly
from .exact.fields import FunctionField
from .exact.poly import MultiPoly
from .exact.tower import INF, FieldTower, Step, certify_steps
from .rig import SigmaDegree, rig_add, ZERO

DEFAULT_WINDOW = 3
CERTIFY_LIMIT = 64
SPECIAL_VALUES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _top_var(f):
    return max(f.variables(), key=lambda v: (v[1], v[0]))


@dataclass
class ExtensionTower:
    ring: DiffPolyRing
    relations: list
    base_gens: int = 0
    label: str = ""

    def __post_init__(self):
        self._defining = self._find_defining()
        self._levels = {}

    @property
    def ground(self):
        return self.ring.ground

    @property
    def names(self):
        return self.ring.names

    def _find_defining(self):
        R = self.ring
        defining = {}
        for r in self.relations:
            if not r.variables():
                if r:
                    raise InvalidPresentation("a nonzero constant relation makes the ring trivial")
                continue
            v = _top_var(r)
            cf = r.coeffs_in(v)
            if not cf[max(cf)].is_constant():
                raise InvalidPresentation(
                    f"relation {R.render(r)} is not monic in its top variable {R.var_name(v)}")
            j, o = v
            if j not in defining or o < defining[j][0]:
                defining[j] = (o, r.monic_in(v) if hasattr(r, "monic_in") else r * (R.field.one / cf[max(cf)].constant_coeff()))
        return defining

    def order_of(self, j):
        return self._defining[j][0] if j in self._defining else None

    def step_poly(self, j, i):
        """Minimal polynomial of x_{j,i}, or None when transcendental."""
        if j not in self._defining:
            return None
        o, r = self._defining[j]
        if i < o:
            return None
        return self.ring.sigma_apply(r, i - o)

    def tower_index(self, v):
        j, i = v
        return i * self.ring.ngens + j

    def level_tower(self, k):
        """FieldTower for K(A_k) (base generators included)."""
        if k in self._levels:
            return self._levels[k]
        n = self.ring.ngens
        steps = []
        for i in range(k + 1):
            for j in range(n):
                p = self.step_poly(j, i)
                name = self.ring.var_name((j, i))
                if p is None:
                    steps.append(Step(name, None))
                else:
                    q = p.rename(lambda v: (self.tower_index(v),))
                    steps.append(Step(name, q))
        t = FieldTower(self.ring.field, steps)
        self._check_consistency(t, k)
        self._levels[k] = t
        return t

    def _check_consistency(self, t, k):
        for r in self.relations:
            o = self.ring.order(r)
            for s in range(0, k - max(o, 0) + 1):
                g = self.ring.sigma_apply(r, s)
                red = t.reduce(g.rename(lambda v: (self.tower_index(v),)))
                if red:
                    raise InvalidPresentation(
                        f"relation {self.ring.render(g)} is not implied by the triangular presentation")

    def step_degree(self, j, i):
        p = self.step_poly(j, i)
        if p is None:
            return INF
        return p.degree_in((j, i))

    def level_degree(self, k):
        d = 1
        for j in range(self.base_gens, self.ring.ngens):
            d = d * self.step_degree(j, k)
        return d

    def level_increment(self, k):
        return sum(1 for j in range(self.base_gens, self.ring.ngens) if self.step_poly(j, k) is None)

    def describe(self):
        return {"generators": list(self.names), "base_generators": self.names[: self.base_gens],
                "relations": [self.ring.render(r) for r in self.relations]}


# --- certification by specialisation ----------------------------------------

def _special_coeff(c, field, value):
    if isinstance(field, FunctionField):
        base = field.base
        num = upoly.evaluate(c.num, base.coerce(value)) if c.num else base.zero
        den = upoly.evaluate(c.den, base.coerce(value))
        if not den:
            return None
        return num / den
    return c


def specialise(t, assignment, t_value=None):
    """Replace transcendental steps (and the ground variable t, when the
    carrier is a function field) by constants.  Returns a finite tower over
    the prime field of the carrier, or None when a denominator vanishes."""
    field = t.base
    target = field.base if isinstance(field, FunctionField) else field
    index = {}
    steps = []
    trans = {}
    vi = iter(assignment)
    for k, st in enumerate(t.steps):
        if st.minpoly is None:
            trans[(k,)] = target.coerce(next(vi))
        else:
            index[(k,)] = (len(index),)
    for k, st in enumerate(t.steps):
        if st.minpoly is None:
            continue
        terms = {}
        for m, c in st.minpoly.terms.items():
            cc = _special_coeff(c, field, t_value)
            if cc is None:
                return None
            newm = []
            for v, e in m:
                if v in trans:
                    cc = cc * trans[v] ** e
                else:
                    newm.append((index[v], e))
            newm = tuple(sorted(newm, reverse=True))
            terms[newm] = terms[newm] + cc if newm in terms else cc
        steps.append(Step(st.name, MultiPoly(terms, target)))
    try:
        return FieldTower(target, steps)
    except KernelError:
        # specialisation collapsed a step (leading term vanished)
        return None


def certify_level(E, k, limit=CERTIFY_LIMIT, prefer=None):
    """Certificate that the level-k algebra is a field, by specialising the
    transcendental steps at several points (a field specialisation of the
    monic triangular presentation forces the generic algebra to be one)."""
    t = E.level_tower(k)
    algebraic = [st.degree for st in t.steps if st.minpoly is not None]
    size = math.prod(algebraic) if algebraic else 1
    if size == 1:
        return {"verified": True, "method": "linear-steps", "level": k}
    if size > limit:
        return {"verified": False, "method": "size-limit", "level": k,
                "warning": f"UnverifiedIrreducibility: level {k} algebra of degree {size} above certification limit"}
    ntrans = sum(1 for st in t.steps if st.minpoly is None)
    reasons = []
    attempts = [tuple(SPECIAL_VALUES[a: a + ntrans]) for a in range(6)]
    if prefer is not None:
        attempts.insert(0, prefer)
    for vals in attempts:
        if len(vals) < ntrans:
            vals = tuple(range(2, 2 + ntrans))
        tv = SPECIAL_VALUES[-1] if isinstance(t.base, FunctionField) else None
        st = specialise(t, vals[:ntrans], tv)
        if st is None:
            continue
        cert = st.certify()
        if cert.verified:
            return {"verified": True, "method": "specialisation:" + cert.method, "level": k,
                    "assignment": [str(v) for v in vals[:ntrans]], "_vals": vals}
        reasons.extend(cert.warnings)
        if cert.method == "asserted":
            break  # the algebra is a field candidate but too large to decide
    return {"verified": False, "method": "specialisation", "level": k,
            "warning": "UnverifiedIrreducibility: no field specialisation found"
            + (f" ({reasons[0]})" if reasons else "")}


def certify_levels(E, depth, limit=CERTIFY_LIMIT):
    """Certify levels 1..depth in turn; stop at the first failure.  Returns
    (last certified level, certificate list, warnings)."""
    t = E.level_tower(depth)
    cert = certify_steps(t)
    if cert.verified:
        return depth, [{"verified": True, "method": "modular", "level": depth,
                        "steps": cert.warnings}], []
    certs, warnings = [], []
    prefer = None
    done = 0
    for k in range(1, depth + 1):
        c = certify_level(E, k, limit, prefer)
        prefer = c.pop("_vals", prefer)
        certs.append(c)
        if not c["verified"]:
            warnings.append(c.get("warning", f"UnverifiedIrreducibility: level {k}"))
            if k < depth:
                warnings.append(f"UnverifiedIrreducibility: levels {k}..{depth} asserted, not certified")
            break
        done = k
    return done, certs, warnings


# --- degree sequences and limit degree --------------------------------------

@dataclass
class DegreeSequence:
    values: list
    start: int  # index (1-based) from which the sequence is constant to depth
    window: tuple
    certificates: list = dc_field(default_factory=list)
    warnings: list = dc_field(default_factory=list)

    def to_dict(self):
        return {"d": [_num(v) for v in self.values], "stabilization": {"from": self.start,
                "window": list(self.window)}, "warnings": list(self.warnings)}


def _num(v):
    return "inf" if v == INF else v


def degree_sequence(E, depth, certify=True):
    if depth < 2:
        raise KernelError("degree sequence needs depth >= 2")
    values = [E.level_degree(k) for k in range(1, depth + 1)]
    last_inf = max((i for i, v in enumerate(values) if v == INF), default=-1)
    finite = values[last_inf + 1:]
    for a, b in zip(finite, finite[1:]):
        if b > a:
            raise MonotonicityViolation(f"d_k increased from {a} to {b}: inconsistent presentation",
                                        sequence=[_num(v) for v in values])
    start = depth
    while start > 1 and values[start - 2] == values[depth - 1]:
        start -= 1
    warnings, certs = [], []
    if certify:
        _, certs, warnings = certify_levels(E, depth)
    return DegreeSequence(values, start, (start, depth), certs, warnings)


def limit_degree(E, depth, window=DEFAULT_WINDOW):
    seq = degree_sequence(E, depth)
    if depth - seq.start + 1 < window:
        raise NotStabilized(f"no constant window of length {window} by depth {depth}",
                            depth=depth, sequence=[_num(v) for v in seq.values])
    return min(seq.values), seq


def transcendence_profile(E, depth, window=DEFAULT_WINDOW):
    incs = [E.level_increment(k) for k in range(0, depth + 1)]
    tail = incs[-window:]
    if len(tail) < window or len(set(tail)) != 1:
        raise NotStabilized("transcendence increments not constant over the window", increments=incs)
    sigma_trdeg = tail[0]
    trdeg = sum(incs) if sigma_trdeg == 0 else None
    return trdeg, sigma_trdeg, incs


def is_sigma_separable(E):
    """Yes / No / Unsupported.  Only decided where the inversive closure of
    the base is trivially available."""
    if E.ground.char == 0:
        return "Yes"
    if E.ring.ngens == E.base_gens or not E.relations and E.ring.ngens == 0:
        return "Yes"
    if E.ground.invertible and E.base_gens == 0 and not isinstance(E.ground.field, FunctionField):
        return "Yes"
    return "Unsupported"


@dataclass
class InvariantReport:
    dl: object
    trdeg: int
    sigma_trdeg: int
    dd: SigmaDegree
    dt: int
    separable: str
    effective_dd: object
    sequence: DegreeSequence = None
    warnings: list = dc_field(default_factory=list)

    def to_dict(self):
        out = {"dl": _num(self.dl), "trdeg": self.trdeg, "sigma_trdeg": self.sigma_trdeg,
               "dd": self.dd.render(), "dt": self.dt, "separable": self.separable,
               "effective_dd": self.effective_dd if isinstance(self.effective_dd, str) else self.effective_dd.render()}
        if self.sequence is not None:
            out["sequence"] = self.sequence.to_dict()
        out["warnings"] = list(self.warnings)
        return out


def sigma_degree(E, depth=6, window=DEFAULT_WINDOW):
    trdeg, sigma_trdeg, incs = transcendence_profile(E, depth, window)
    if sigma_trdeg > 0:
        raise PositiveSigmaDimension("extension has positive σ-transcendence degree",
                                     sigma_trdeg=sigma_trdeg)
    dl, seq = limit_degree(E, depth, window)
    dd = SigmaDegree(dl, trdeg)
    sep = is_sigma_separable(E)
    effective = dd if (E.ground.invertible and sep == "Yes") else "Unsupported"
    return InvariantReport(dl, trdeg, sigma_trdeg, dd, trdeg, sep, effective, seq, list(seq.warnings))


def compose_towers(E1, E2):
    """M/K from L/K and M/L, where E2's base generators are E1's generators
    and E2 repeats E1's relations."""
    if E2.base_gens != E1.ring.ngens or E2.ring.names[: E1.ring.ngens] != E1.ring.names:
        raise BaseMismatch("base of the second tower is not the top of the first")
    if E2.ring.field != E1.ring.field:
        raise BaseMismatch("towers over different ground fields")
    rels2 = set(E2.relations)
    missing = [r for r in E1.relations if r not in rels2]
    if missing:
        raise BaseMismatch("second tower does not restate the first tower's relations")
    return ExtensionTower(E2.ring, list(E2.relations), E1.base_gens, label=f"{E1.label}*{E2.label}")


def trivial_over(E):
    """The identity extension of E's top field."""
    return ExtensionTower(E.ring, list(E.relations), E.ring.ngens, label="trivial")


def component_degree_sum(components):
    total = ZERO
    for c in components:
        dd = c.dd if isinstance(c, InvariantReport) else c
        total = rig_add(total, dd)
    return total


def from_ideal(ring, gens, base_gens=0):
    """Extension tower of the quotient by an ideal given through relations
    that already form a triangular set (as produced by closures)."""
    return ExtensionTower(ring, [g for g in gens if g], base_gens)
