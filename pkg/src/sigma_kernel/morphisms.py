"""σ-finite morphisms onto base curves, fibres and multiplicities, and the
difference Chinese remainder check."""

from dataclasses import dataclass, field as dc_field

import sympy

from .curves import (A, BASE, CLOSED, DEFAULT_DEPTH, DEFAULT_WINDOW, Divisor,
                     LocalValuation, check_nonsingular, enumerate_points_over,
                     residue_limit_degree, to_sympy)
from .diffring import (DiffGroundField, DiffPolyRing, SigmaIdealPresentation, perfect_close,
                       truncate)
from .errors import (BasisSearchExhausted, EmptyFiber, InvalidPresentation, KernelError,
                     MembershipUndecidedAtBound, SeparationUndecided, StabilizationNotReached)
from .exact.fields import QQ
from .exact.groebner import DEFAULT_EFFORT, Membership, groebner, ideal_membership, intersect_ideals
from .exact.poly import MultiPoly
from .extensions import ExtensionTower, limit_degree


class SigmaFiniteMorphism:
    """X -> Y where Y is a base curve Q[y] and X is built over the same y.

    The ring map sends y to y.  Each level of X is free over Q[y] with the
    monomial basis in the adjoined α_i, since every step relation is monic.
    """

    def __init__(self, X, Y_, label=""):
        if Y_.mode != BASE:
            raise InvalidPresentation("the target must be a base curve Q[y]")
        if X.mode == BASE:
            raise InvalidPresentation("the source needs a primitive element")
        self.X, self.Y = X, Y_
        self.label = label
        for r in X.rules:
            if X.reduce(r.sigma_y - Y_.sigma_y):
                raise InvalidPresentation(
                    f"rule {r.name} does not commute with the ring map on y",
                    source=X.render(r.sigma_y), target=Y_.render(Y_.sigma_y))
        self.sigma_size = len(X.rules)
        self.galois = self._galois_certificate() if X.mode == CLOSED and self.sigma_size > 1 else None

    def _galois_certificate(self):
        """The rule images of α must be deg(f) distinct roots of f."""
        X = self.X
        imgs = [r.sigma_alpha for r in X.rules]
        distinct = len({X.render(X.reduce(g)) for g in imgs}) == len(imgs)
        roots = all(not X.reduce(X.f.substitute({A(0): g})) for g in imgs)
        full = len(imgs) == X.f.degree_in(A(0))
        return {"distinct_lifts": distinct, "roots_of_f": roots, "all_conjugates": full,
                "verified": distinct and roots and full}

    def integrality(self, depth=DEFAULT_DEPTH):
        """Per-level module bases of X over Q[y]."""
        X = self.X
        out = []
        for i in range(X.tower_length(depth)):
            d = X.step_poly(i).degree_in(A(i))
            out.append({"level": i + 1, "adjoined": f"{X.names[1]}@{i}",
                        "basis": ["1"] + [f"{X.names[1]}@{i}" + (f"^{e}" if e > 1 else "")
                                          for e in range(1, d)]})
        return out

    def relative_tower(self):
        """The function-field extension as an ExtensionTower over k(y)."""
        X = self.X
        ring = DiffPolyRing(DiffGroundField(QQ), list(X.names))
        ypoly = MultiPoly.var((0, 1), QQ) - self.Y.sigma_y
        return ExtensionTower(ring, [ypoly, X.f], base_gens=1, label="X/Y")

    def relative_limit_degree(self, depth=DEFAULT_DEPTH, window=DEFAULT_WINDOW):
        """(dl, details).  Closed presentations fold every σ-image back into
        level 0, so d_k = 1 for k >= 1."""
        X = self.X
        if X.mode == CLOSED:
            y, T = sympy.Symbol("y"), sympy.Symbol("a0")
            facs = sympy.factor_list(to_sympy(X.f), T, y)[1]
            irreducible = len(facs) == 1 and facs[0][1] == 1
            if not irreducible:
                raise InvalidPresentation("f is reducible over Q(y); X is not integral")
            d0 = X.f.degree_in(A(0))
            return 1, {"method": "closed", "d": [d0] + [1] * depth, "window": [1, depth]}
        E = self.relative_tower()
        dl, seq = limit_degree(E, depth, window)
        d = [E.level_degree(0)] + list(seq.values)
        return dl, {"method": "tower", "d": [_num(v) for v in d],
                    "window": list(seq.window) if seq.window else None,
                    "warnings": list(seq.warnings), "certificates": list(seq.certificates)}

    def strongly_finite(self, depth=DEFAULT_DEPTH, window=DEFAULT_WINDOW):
        dl, info = self.relative_limit_degree(depth, window)
        return all(v == dl for v in info["d"][1:])


def _num(v):
    return "inf" if v == float("inf") else int(v)


def _check_base_point(m, q):
    Yc = m.Y
    pts = enumerate_points_over(Yc, q, 0)
    if not pts:
        raise InvalidPresentation("the base prime is not a σ-fixed point of Y", prime=Yc.render(q))
    return pts[0]


@dataclass
class FiberEntry:
    point: object
    e: int
    residue_dl: int
    sigma_x: tuple

    def to_dict(self):
        return {"point": self.point.label(), "e": self.e, "residue_dl": self.residue_dl,
                "sigma_x": list(self.sigma_x)}


@dataclass
class FiberReport:
    base: object
    uniformizer: str
    entries: list
    empty: bool
    certificates: dict = dc_field(default_factory=dict)

    def to_dict(self):
        return {"base_point": self.base.label(), "uniformizer": self.uniformizer,
                "empty": self.empty, "points": [e.to_dict() for e in self.entries],
                "certificates": dict(self.certificates)}


def ramification_index(x, m, window=DEFAULT_WINDOW):
    """e_x = v_x(t_y) with t_y the base prime polynomial."""
    L = LocalValuation(m.X, x, window)
    return L(x.base)


def fiber(m, q, depth=DEFAULT_DEPTH, window=DEFAULT_WINDOW):
    yp = _check_base_point(m, q)
    pts = enumerate_points_over(m.X, q, depth, window)
    entries, certs = [], {}
    for x in pts:
        rep = check_nonsingular(m.X, x, window=window)
        certs[x.label()] = rep.verdict
        if rep.verdict != "DVRCertificate":
            raise StabilizationNotReached("fibre point is not certified non-singular",
                                          point=x.label(), verdict=rep.verdict)
        e = ramification_index(x, m, window)
        entries.append(FiberEntry(x, e, residue_limit_degree(x, window), x.fixed_by))
    return FiberReport(yp, m.Y.render(yp.base), entries, not entries, certs)


def pullback(m, D, depth=DEFAULT_DEPTH, window=DEFAULT_WINDOW):
    out = Divisor()
    for yp, n in D.items():
        F = fiber(m, yp.base, depth, window)
        if F.empty:
            raise EmptyFiber("no σ-fixed point lies over a support point", point=yp.label())
        out = out + Divisor({e.point: n * e.e for e in F.entries})
    return out


@dataclass
class MultiplicityReport:
    lhs: int
    rhs: int
    verdict: str
    breakdown: list
    dl: int
    sigma_size: int
    labels: list
    details: dict

    def to_dict(self):
        return {"verdict": self.verdict, "lhs": self.lhs, "rhs": self.rhs, "dl": self.dl,
                "sigma_size": self.sigma_size, "labels": list(self.labels),
                "breakdown": list(self.breakdown), "details": dict(self.details)}


def verify_multiplicity(m, q, depth=DEFAULT_DEPTH, window=DEFAULT_WINDOW):
    """deg(φ*(y)) against dl(X/Y), or |Σ|·dl(X/Y) when X carries a Σ-set."""
    dl, info = m.relative_limit_degree(depth, window)
    size = m.sigma_size
    rhs = size * dl
    F = fiber(m, q, depth, window)
    labels = []
    if not m.strongly_finite(depth, window):
        labels.append("OutsideHypotheses")
    details = {"relative_degrees": info, "fiber": F.to_dict()}
    if m.galois is not None:
        details["galois"] = m.galois
    if F.empty:
        return MultiplicityReport(0, rhs, "EmptyFiber", [], dl, size, labels, details)
    yp = F.base
    D = pullback(m, Divisor({yp: 1}), depth, window)
    breakdown = []
    for x, n in D.items():
        r = residue_limit_degree(x, window)
        breakdown.append({"point": x.label(), "e": n, "residue_dl": r, "contribution": n * r})
    lhs = sum(b["contribution"] for b in breakdown)
    if size > 1:
        stab = sum(len(e.sigma_x) for e in F.entries)
        details["sigma_bookkeeping"] = {"sum_sigma_x": stab, "sigma_size": size,
                                        "consistent": stab == size}
    # ramification in the finite layer is not covered by the degree formula
    if any(e.e > 1 for e in F.entries) and "OutsideHypotheses" not in labels:
        labels.append("OutsideHypotheses")
    verdict = "Match" if lhs == rhs else "Mismatch"
    return MultiplicityReport(lhs, rhs, verdict, breakdown, dl, size, labels, details)


def tower_free_ranks(E, depth):
    """Rank of each level over the previous one with the monomial basis in
    the newly adjoined elements."""
    ranks = []
    for k in range(depth + 1):
        d = E.level_degree(k)
        if d == float("inf"):
            raise BasisSearchExhausted("a level adds a transcendental element", level=k)
        ranks.append(int(d))
    return ranks


def sigma_free_rank(m, q, depth=DEFAULT_DEPTH, window=DEFAULT_WINDOW):
    """Per-level ranks of the semilocal ring over 𝒪_y; each level is free
    on {α_i^e : e < deg} because the step relation is monic."""
    F = fiber(m, q, depth, window)
    if F.empty:
        raise EmptyFiber("σ-free rank needs a nonempty fibre")
    X = m.X
    levels = []
    for i in range(X.tower_length(depth)):
        d = X.step_poly(i).degree_in(A(i))
        name = f"{X.names[1]}@{i}"
        levels.append({"level": i + 1, "rank": d,
                       "basis": ["1"] + [name + (f"^{e}" if e > 1 else "") for e in range(1, d)]})
    ranks = [lv["rank"] for lv in levels]
    if X.mode == CLOSED:
        ranks = ranks + [1] * (depth - 1)
    dl, _ = m.relative_limit_degree(depth, window)
    eventual = ranks[-1] if ranks else 1
    return {"ranks": ranks, "levels": levels, "eventual_rank": eventual, "dl": dl,
            "consistent": eventual == dl}


# --- difference Chinese remainder ---------------------------------------------

@dataclass
class CRTReport:
    separated: dict
    kernel: dict
    almost_surjectivity: list
    depth: int
    verdict: str

    def to_dict(self):
        return {"verdict": self.verdict, "depth": self.depth, "separation": self.separated,
                "kernel": self.kernel, "almost_surjectivity": self.almost_surjectivity}


def _close_shifts(ring, gens, N):
    out = []
    for g in gens:
        o = ring.order(g)
        for k in range(0, N - max(o, 0) + 1):
            out.append(ring.sigma_apply(g, k))
    return out


def _status(gens, f, effort):
    st = ideal_membership(gens, f, effort).status
    if st is Membership.UNDECIDED:
        raise MembershipUndecidedAtBound("membership not settled at the effort bound", effort=effort)
    return st


def crt_check(R, ideals, depth=3, effort=DEFAULT_EFFORT):
    """Check R -> ∏ R/p_i at the truncation of order ``depth``."""
    ring = R.ring
    base = list(truncate(R, depth).gens)
    P = [[g for g in base + _close_shifts(ring, list(p), depth) if g] for p in ideals]
    n = len(ideals)
    # each p_i must be a σ-ideal inside the window
    for i, p in enumerate(ideals):
        for g in p:
            s = ring.sigma_apply(g)
            if ring.order(s) <= depth and _status(P[i], s, effort) is not Membership.IN:
                raise KernelError("an ideal is not closed under σ", ideal=i, generator=ring.render(g))
    separated = {}
    cofactors = {}
    for i in range(n):
        for j in range(i + 1, n):
            gens = P[i] + P[j]
            res = ideal_membership(gens, ring.one(), effort)
            how = "ideal"
            if res.status is not Membership.IN:
                I = SigmaIdealPresentation(ring, tuple(gens))
                C = perfect_close(I, depth, effort)
                if ring.one() not in C.gens and not any(g.is_constant() and g for g in C.gens):
                    raise SeparationUndecided("perfect closure of p_i + p_j does not reach 1 at the bound",
                                              pair=(i, j), depth=depth)
                how = "perfect-closure"
                res = ideal_membership(list(C.gens), ring.one(), effort)
            separated[f"{i},{j}"] = how
            # split 1 = a + b with a in p_i, b in p_j
            k = len(P[i])
            a = sum((c * g for c, g in zip(res.cofactors[:k], gens[:k])), ring.zero()) \
                if res.cofactors and how == "ideal" else None
            cofactors[(i, j)] = a
    # kernel: intersection of the p_i
    K = list(P[0])
    complete = True
    for i in range(1, n):
        K, ok = intersect_ideals(K, P[i], effort)
        complete = complete and ok
    kernel_in = all(_status(P[i], g, effort) is Membership.IN for g in K for i in range(n))
    prod_in = True
    if n > 1:
        prods = [MultiPoly.const(1, ring.field)]
        for i in range(n):
            prods = [a * g for a in prods for g in ideals[i]]
        prod_in = all(_status(K, g, effort) is Membership.IN for g in prods)
    kernel = {"generators": [ring.render(g) for g in K], "complete": complete,
              "contained_in_each": kernel_in, "contains_products": prod_in}
    # almost surjectivity: idempotent-type preimages of each component's basis
    surj = []
    for i in range(n):
        e = MultiPoly.const(1, ring.field)
        for j in range(n):
            if j == i:
                continue
            a = cofactors.get((min(i, j), max(i, j)))
            if a is None:
                e = None
                break
            # a lies in p_min; the factor must be ≡ 1 mod p_i and lie in p_j
            factor = a if j < i else MultiPoly.const(1, ring.field) - a
            e = e * factor
        basis = _standard_basis(P[i], ring, depth, effort)
        entry = {"component": i, "basis": [ring.render(b) for b in basis], "certified_depth": depth}
        if e is None:
            entry["status"] = "ModuloClosure"
            surj.append(entry)
            continue
        ok = True
        for b in basis:
            img = b * e
            if _status(P[i], img - b, effort) is not Membership.IN:
                ok = False
            for j in range(n):
                if j != i and _status(P[j], img, effort) is not Membership.IN:
                    ok = False
        entry["idempotent"] = ring.render(e)
        entry["status"] = "Verified" if ok else "Failed"
        surj.append(entry)
    good = kernel_in and prod_in and complete and all(s["status"] in ("Verified", "ModuloClosure") for s in surj)
    return CRTReport(separated, kernel, surj, depth, "Verified" if good else "Failed")


def _standard_basis(gens, ring, depth, effort, limit=64):
    """Standard monomials of the quotient by gens (it must be finite)."""
    gb = groebner(gens, effort=effort)
    if not gb.complete:
        raise MembershipUndecidedAtBound("Groebner basis incomplete at bound", effort=effort)
    leads = gb.leading_monomials()
    vs = ring.variables_upto(depth)
    from .exact.poly import mono_div
    basis = []
    frontier = [()]
    seen = set()
    while frontier:
        m = frontier.pop(0)
        if m in seen:
            continue
        seen.add(m)
        if any(mono_div(m, l) is not None for l in leads):
            continue
        basis.append(MultiPoly({m: ring.field.one}, ring.field))
        if len(basis) > limit:
            raise BasisSearchExhausted("quotient is not finite-dimensional at the bound")
        for v in vs:
            d = dict(m)
            d[v] = d.get(v, 0) + 1
            frontier.append(tuple(sorted(d.items(), reverse=True)))
    return basis
