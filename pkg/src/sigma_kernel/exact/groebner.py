"""Buchberger completion with a degree cap, and certified ideal membership."""

from dataclasses import dataclass, field as dc_field
from enum import Enum

from .poly import MultiPoly, grlex, mono_coprime, mono_deg, mono_div, mono_lcm

DEFAULT_EFFORT = 24


class Membership(Enum):
    IN = "In"
    NOT_IN = "NotIn"
    UNDECIDED = "UndecidedAtBound"


@dataclass
class GroebnerBasis:
    polys: list
    order: object
    complete: bool
    effort: int
    # cofactor rows: basis[i] = sum_j reps[i][j] * gens[j]
    reps: list = None
    gens: list = None

    def reduce(self, f):
        return f.divide_by(self.polys, self.order)

    def leading_monomials(self):
        return [p.leading(self.order)[0] for p in self.polys]


@dataclass
class MembershipResult:
    status: Membership
    cofactors: list = None
    basis: GroebnerBasis = None
    remainder: MultiPoly = None
    effort: int = 0
    notes: list = dc_field(default_factory=list)

    def __bool__(self):
        return self.status is Membership.IN


def _spoly(f, g, order):
    mf, cf = f.leading(order)
    mg, cg = g.leading(order)
    lcm = mono_lcm(mf, mg)
    a = mono_div(lcm, mf)
    b = mono_div(lcm, mg)
    one = f.field.one
    return a, one / cf, b, one / cg


def groebner(gens, order=grlex, effort=DEFAULT_EFFORT, track=False):
    """Reduced-ish Groebner basis by Buchberger's algorithm.

    S-pairs whose lcm exceeds ``effort`` in total degree are skipped and the
    result is then marked incomplete.
    """
    gens = [g for g in gens if g]
    if not gens:
        return GroebnerBasis([], order, True, effort, [], [])
    fld = gens[0].field
    zero = MultiPoly.zero(fld)
    one = MultiPoly.const(1, fld)
    n = len(gens)
    basis = []
    reps = []
    for i, g in enumerate(gens):
        basis.append(g)
        if track:
            row = [zero] * n
            row[i] = one
            reps.append(row)
    # inter-reduce leading terms by simple normalisation (make monic)
    for i, g in enumerate(basis):
        _, c = g.leading(order)
        inv = fld.one / c
        basis[i] = g * inv
        if track:
            reps[i] = [r * inv for r in reps[i]]
    pairs = [(i, j) for j in range(len(basis)) for i in range(j)]
    complete = True
    while pairs:
        pairs.sort(key=lambda ij: mono_deg(mono_lcm(basis[ij[0]].leading(order)[0],
                                                    basis[ij[1]].leading(order)[0])))
        i, j = pairs.pop(0)
        fi, fj = basis[i], basis[j]
        mi, mj = fi.leading(order)[0], fj.leading(order)[0]
        if mono_coprime(mi, mj):
            continue
        lcm = mono_lcm(mi, mj)
        if mono_deg(lcm) > effort:
            complete = False
            continue
        if _chain_criterion(i, j, lcm, basis, pairs, order):
            continue
        a, ca, b, cb = _spoly(fi, fj, order)
        s = fi.mul_term(a, ca) - fj.mul_term(b, cb)
        if track:
            srep = [reps[i][k].mul_term(a, ca) - reps[j][k].mul_term(b, cb) for k in range(n)]
        quots, r = s.divide_by(basis, order)
        if not r:
            continue
        _, c = r.leading(order)
        inv = fld.one / c
        r = r * inv
        if track:
            rrep = list(srep)
            for q, row in zip(quots, reps):
                if q:
                    rrep = [x - q * y for x, y in zip(rrep, row)]
            reps.append([x * inv for x in rrep])
        basis.append(r)
        k = len(basis) - 1
        pairs.extend((m, k) for m in range(k))
    keep = _minimal_indices(basis, order)
    gb = GroebnerBasis([basis[i] for i in keep], order, complete, effort,
                       [reps[i] for i in keep] if track else None, list(gens))
    return gb


def _chain_criterion(i, j, lcm, basis, pairs, order):
    pending = set(pairs)
    for k in range(len(basis)):
        if k in (i, j):
            continue
        mk = basis[k].leading(order)[0]
        if mono_div(lcm, mk) is None:
            continue
        a, b = (min(i, k), max(i, k)), (min(j, k), max(j, k))
        if a not in pending and b not in pending:
            return True
    return False


def _minimal_indices(basis, order):
    leads = [p.leading(order)[0] for p in basis]
    keep = []
    for i, m in enumerate(leads):
        redundant = False
        for j, mj in enumerate(leads):
            if j == i:
                continue
            if mono_div(m, mj) is not None and (mj != m or j < i):
                redundant = True
                break
        if not redundant:
            keep.append(i)
    return keep


def ideal_membership(gens, f, effort=DEFAULT_EFFORT, order=grlex, basis=None):
    """Decide f in (gens) with certificate.

    ``In`` carries cofactors c_j with f = sum c_j * gens[j]; ``NotIn`` is only
    returned when the completion finished below the degree cap.
    """
    gens = [g for g in gens if g]
    if not f:
        return MembershipResult(Membership.IN, [MultiPoly.zero(f.field)] * len(gens), effort=effort)
    if not gens:
        return MembershipResult(Membership.NOT_IN, [], remainder=f, effort=effort)
    gb = basis if basis is not None else groebner(gens, order, effort, track=True)
    quots, r = gb.reduce(f)
    if not r:
        cof = None
        if gb.reps is not None:
            zero = MultiPoly.zero(f.field)
            cof = [zero] * len(gb.gens)
            for q, row in zip(quots, gb.reps):
                if q:
                    cof = [c + q * x for c, x in zip(cof, row)]
        return MembershipResult(Membership.IN, cof, gb, r, effort)
    if gb.complete:
        return MembershipResult(Membership.NOT_IN, None, gb, r, effort)
    return MembershipResult(Membership.UNDECIDED, None, gb, r, effort,
                            ["degree cap reached before completion"])


def contains_one(gens, effort=DEFAULT_EFFORT):
    if not gens:
        return MembershipResult(Membership.NOT_IN)
    return ideal_membership(gens, MultiPoly.const(1, gens[0].field), effort)


def eliminate(gens, drop, effort=DEFAULT_EFFORT):
    """Generators of (gens) intersected with the ring without the variables
    satisfying the predicate ``drop``.  Returns (polys, complete)."""
    from .poly import block_order

    order = block_order(drop)
    gb = groebner(gens, order, effort)
    out = [p for p in gb.polys if not any(drop(v) for v in p.variables())]
    return out, gb.complete


def intersect_ideals(I, J, effort=DEFAULT_EFFORT):
    """I ∩ J via the auxiliary-variable trick."""
    if not I or not J:
        return [], True
    fld = I[0].field
    tv = (10**9,)
    t = MultiPoly.var(tv, fld)
    gens = [t * f for f in I] + [(MultiPoly.const(1, fld) - t) * g for g in J]
    return eliminate(gens, lambda v: v == tv, effort)
