"""Difference ground fields, difference polynomial rings and σ-ideals.

Variables of a difference polynomial ring are keys ``(j, i)`` meaning
σ^i applied to generator j.  Difference polynomials are plain
:class:`MultiPoly` values over the ground carrier; the ring object supplies
σ, orders, truncations and rendering.
"""

from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction
from itertools import product

import sympy

from .errors import KernelError, MembershipUndecidedAtBound, SchemaError
from .exact.fields import FunctionField, PrimeField, RatFunc, RationalField
from .exact.groebner import (DEFAULT_EFFORT, Membership, eliminate,
                             ideal_membership)
from .exact.poly import MultiPoly
from .exact.tower import FieldTower

AUX = (10**9, 0)


class DiffGroundField:
    """A field with a distinguished endomorphism σ₀.

    ``rule`` is one of ``identity``, ``frobenius``, ``shift`` (t -> t+1),
    ``scale`` (t -> q*t) or ``tower`` (explicit images of the primitives of
    a :class:`FieldTower` carrier, optionally with inverse images).
    """

    RULES = ("identity", "frobenius", "shift", "scale", "tower")

    def __init__(self, field, rule="identity", q=None, images=None, inverse_images=None):
        if rule not in self.RULES:
            raise SchemaError(f"unknown ground rule {rule!r}")
        self.field = field
        self.rule = rule
        self.q = field.base.coerce(q) if q is not None and isinstance(field, FunctionField) else q
        self.images = images
        self.inverse_images = inverse_images
        self._validate()
        self.invertible = self._invertible()

    def _validate(self):
        f, rule = self.field, self.rule
        if rule in ("shift", "scale") and not isinstance(f, FunctionField):
            raise SchemaError(f"rule {rule} needs a rational function field")
        if rule == "scale" and not self.q:
            raise SchemaError("scale rule needs a nonzero q")
        if rule == "frobenius" and f.char == 0:
            raise SchemaError("Frobenius needs positive characteristic")
        if rule == "tower":
            if not isinstance(f, FieldTower) or self.images is None:
                raise SchemaError("tower rule needs a tower carrier and primitive images")
            if len(self.images) != f.depth:
                raise SchemaError("one image per tower primitive is required")
            # σ₀ must respect every minimal polynomial
            for k, st in enumerate(f.steps):
                if st.minpoly is None:
                    continue
                val = self._eval_tower_poly(st.minpoly, self.images)
                if val:
                    raise KernelError(f"image of {st.name} does not satisfy its minimal polynomial")

    def _eval_tower_poly(self, p, images):
        vals = {(k,): images[k] for k in range(len(images))}
        return p.evaluate(vals, self.field.one) if p.variables() else self.field.elem(p)

    def _invertible(self):
        rule, f = self.rule, self.field
        if rule in ("identity", "shift", "scale"):
            return True
        if rule == "frobenius":
            # x -> x^p is onto only on perfect fields; of our carriers only
            # prime fields and finite towers over them qualify
            if isinstance(f, PrimeField):
                return True
            return isinstance(f, FieldTower) and isinstance(f.base, PrimeField) and f.is_finite()
        if self.inverse_images is None:
            return False
        inv = DiffGroundField(f, "tower", images=self.inverse_images)
        for k in range(f.depth):
            g = f.gen(k)
            if inv.apply(self.apply(g)) != g or self.apply(inv.apply(g)) != g:
                raise KernelError("supplied inverse rule does not invert σ₀")
        return True

    @property
    def char(self):
        return self.field.char

    def is_identity(self):
        if self.rule == "identity":
            return True
        if self.rule == "frobenius" and isinstance(self.field, PrimeField):
            return True
        return False

    def apply(self, c, k=1):
        """σ₀^k(c)."""
        for _ in range(k):
            c = self._apply1(c)
        return c

    def _apply1(self, c):
        rule, f = self.rule, self.field
        if self.is_identity():
            return c
        if rule == "frobenius":
            if isinstance(f, FunctionField):
                c = f.coerce(c)
                return c ** f.char
            return f.coerce(c) ** f.char
        if rule == "shift":
            return f.coerce(c).substitute(f.t + 1)
        if rule == "scale":
            return f.coerce(c).substitute(f.t * self.q)
        c = f.coerce(c)
        return self._eval_tower_poly(c.poly, self.images)

    def apply_inverse(self, c):
        rule, f = self.rule, self.field
        if not self.invertible:
            raise KernelError("ground endomorphism has no verified inverse")
        if self.is_identity():
            return c
        if rule == "shift":
            return f.coerce(c).substitute(f.t - 1)
        if rule == "scale":
            return f.coerce(c).substitute(f.t * (1 / self.q))
        if rule == "frobenius":
            # finite tower over F_p: inverse is a power of Frobenius
            n = f.degree()
            return f.coerce(c) ** (f.char ** (n - 1))
        inv = DiffGroundField(f, "tower", images=self.inverse_images)
        return inv.apply(c)

    def describe(self):
        out = {"field": self.field.name, "rule": self.rule, "invertible": self.invertible}
        if self.rule == "scale":
            out["q"] = str(self.q)
        return out

    def __repr__(self):
        return f"DiffGroundField({self.field.name}, {self.rule})"


class DiffPolyRing:
    """k{x_1, ..., x_n}: polynomials in x_{j,i} with σ(x_{j,i}) = x_{j,i+1}."""

    def __init__(self, ground, names):
        if len(set(names)) != len(names):
            raise SchemaError("generator names must be distinct")
        self.ground = ground
        self.names = list(names)

    @property
    def field(self):
        return self.ground.field

    @property
    def ngens(self):
        return len(self.names)

    def index(self, name):
        try:
            return self.names.index(name)
        except ValueError:
            raise KernelError(f"undeclared generator {name!r}") from None

    def var(self, j, i=0):
        if isinstance(j, str):
            j = self.index(j)
        return MultiPoly.var((j, i), self.field)

    def const(self, c):
        return MultiPoly.const(c, self.field)

    def zero(self):
        return MultiPoly.zero(self.field)

    def one(self):
        return MultiPoly.const(1, self.field)

    def order(self, f):
        """Largest shift index present; -1 for constants."""
        vs = f.variables()
        return max((v[1] for v in vs), default=-1)

    def sigma_apply(self, f, k=1):
        if k == 0:
            return f
        g = f.rename(lambda v: (v[0], v[1] + k))
        if self.ground.is_identity():
            return g
        return g.map_coeffs(lambda c: self.ground.apply(c, k))

    def variables_upto(self, N):
        return [(j, i) for j in range(self.ngens) for i in range(N + 1)]

    def var_name(self, v):
        return f"{self.names[v[0]]}@{v[1]}"

    def render(self, f):
        from .parse import render_poly
        return render_poly(f, self)

    def __eq__(self, other):
        return isinstance(other, DiffPolyRing) and self.names == other.names and self.field == other.field

    def __hash__(self):
        return hash(tuple(self.names))


@dataclass(frozen=True)
class SigmaIdealPresentation:
    ring: DiffPolyRing
    gens: tuple = ()
    sigma_order: int = None
    well_mixed: dict = None
    perfect: dict = None
    warnings: tuple = ()

    def with_gens(self, gens, **flags):
        return replace(self, gens=tuple(_dedupe(gens)), **flags)

    def max_order(self):
        return max((self.ring.order(g) for g in self.gens), default=-1)

    def flags(self):
        return {"sigma_closed_to": self.sigma_order, "well_mixed": self.well_mixed, "perfect": self.perfect}


def _dedupe(gens):
    seen, out = set(), []
    for g in gens:
        if not g:
            continue
        g = g.monic()
        if g not in seen:
            seen.add(g)
            out.append(g)
    return out


def sigma_close(I, order):
    """Add σ^k(g) for every generator g and 1 <= k <= order."""
    if I.sigma_order is not None and I.sigma_order >= order:
        return I
    R = I.ring
    gens = list(I.gens)
    for g in I.gens:
        for k in range(1, order + 1):
            gens.append(R.sigma_apply(g, k))
    return I.with_gens(gens, sigma_order=order)


# --- factorisation of candidate pools ---------------------------------------

def _sym(v):
    return sympy.Symbol(f"v{v[0]}_{v[1]}")


def _to_sympy(f):
    field = f.field
    t = sympy.Symbol("t")
    expr = sympy.Integer(0)
    for m, c in f.terms.items():
        term = _coeff_to_sympy(c, field, t)
        for v, e in m:
            term = term * _sym(v) ** e
        expr += term
    return expr


def _coeff_to_sympy(c, field, t):
    if isinstance(field, RationalField):
        return sympy.Rational(c.numerator, c.denominator)
    if isinstance(field, PrimeField):
        return sympy.Integer(c.v)
    if isinstance(field, FunctionField):
        num = sum((_coeff_to_sympy(a, field.base, t) * t**i for i, a in enumerate(c.num)), sympy.Integer(0))
        den = sum((_coeff_to_sympy(a, field.base, t) * t**i for i, a in enumerate(c.den)), sympy.Integer(0))
        return num / den
    raise KernelError("unsupported coefficient field for factorisation")


def _from_sympy(expr, variables, field):
    t = sympy.Symbol("t")
    syms = [_sym(v) for v in variables]
    gens = syms + ([t] if isinstance(field, FunctionField) else [])
    if isinstance(field, PrimeField):
        P = sympy.Poly(expr, *gens, modulus=field.p)
    else:
        P = sympy.Poly(expr, *gens, domain="QQ")
    terms = {}
    for exps, c in P.terms():
        ve = exps[: len(syms)]
        mono = tuple(sorted(((v, e) for v, e in zip(variables, ve) if e), reverse=True))
        if isinstance(field, FunctionField):
            te = exps[-1]
            base = field.base
            cc = base.coerce(Fraction(int(c.p), int(c.q))) if isinstance(base, RationalField) else base.coerce(int(c))
            coeffs = [base.zero] * te + [cc]
            val = RatFunc(coeffs, [base.one])
            terms[mono] = terms[mono] + val if mono in terms else val
        elif isinstance(field, PrimeField):
            terms[mono] = field.coerce(int(c))
        else:
            terms[mono] = Fraction(int(c.p), int(c.q))
    return MultiPoly(terms, field)


def factor_poly(f):
    """Irreducible factors with multiplicity, or None when the coefficient
    field is outside what the factoriser handles."""
    field = f.field
    if not isinstance(field, (RationalField, PrimeField, FunctionField)):
        return None
    variables = sorted(f.variables())
    if not variables:
        return []
    expr = _to_sympy(f)
    if isinstance(field, FunctionField):
        expr = sympy.together(expr)
        expr, _ = sympy.fraction(expr)
    try:
        if isinstance(field, PrimeField):
            _, facs = sympy.factor_list(expr, modulus=field.p)
        else:
            _, facs = sympy.factor_list(expr)
    except sympy.PolynomialError:
        return None
    out = []
    for fac, mult in facs:
        if not (fac.free_symbols - {sympy.Symbol("t")}):
            continue  # unit of the coefficient field
        out.append((_from_sympy(fac, variables, field).monic(), mult))
    return out


# --- closures ---------------------------------------------------------------

def _member(gens, f, effort):
    res = ideal_membership(list(gens), f, effort)
    return res.status


def _in_ideal(gens, f, effort, undecided):
    st = _member(gens, f, effort)
    if st is Membership.UNDECIDED:
        undecided.append(f)
    return st is Membership.IN


def _window(I, order):
    return max(I.max_order(), 0) + order


def _products_from_factors(facs):
    """All splittings of a factored polynomial into a*b with a, b non-units."""
    units = []
    for fac, mult in facs:
        units.extend([fac] * mult)
    n = len(units)
    out = set()
    for mask in range(1, 2 ** n - 1):
        a = b = None
        for i in range(n):
            if mask >> i & 1:
                a = units[i] if a is None else a * units[i]
            else:
                b = units[i] if b is None else b * units[i]
        out.add((a, b))
    return out


def well_mixed_close(I, order, effort=DEFAULT_EFFORT):
    """Close under ab in I => a σ(b) in I, for products visible through
    factorisations of the generators, inside the order window."""
    if I.well_mixed is not None and I.well_mixed.get("order", -1) >= order:
        return I
    if I.sigma_order is None or I.sigma_order < order:
        I = sigma_close(I, order)
    R = I.ring
    W = _window(I, 0)
    gens = list(I.gens)
    undecided = []
    warnings = list(I.warnings)
    exhaustive = True
    changed = True
    rounds = 0
    while changed:
        changed = False
        rounds += 1
        for g in list(gens):
            facs = factor_poly(g)
            if facs is None:
                exhaustive = False
                continue
            for a, b in _products_from_factors(facs):
                for new in (a * R.sigma_apply(b), R.sigma_apply(a) * b):
                    if R.order(new) > W:
                        continue
                    if not _in_ideal(gens, new, effort, undecided):
                        gens.append(new.monic())
                        changed = True
    if undecided:
        raise MembershipUndecidedAtBound("membership undecided inside well-mixed closure", effort=effort)
    if not exhaustive:
        warnings.append("IncompletePool: some generators could not be factored")
    flag = {"order": order, "window": W, "effort": effort, "rounds": rounds, "pool_exhaustive": exhaustive}
    return replace(I, gens=tuple(_dedupe(gens)), well_mixed=flag, warnings=tuple(warnings))


def radical_member(gens, a, effort=DEFAULT_EFFORT):
    """a in rad(gens), decided through 1 in gens + (1 - z a)."""
    fld = a.field
    z = MultiPoly.var(AUX, fld)
    return ideal_membership(list(gens) + [MultiPoly.const(1, fld) - z * a],
                            MultiPoly.const(1, fld), effort).status


def perfect_close(I, order, effort=DEFAULT_EFFORT):
    """Bounded perfect closure: radical, well-mixed and shuffle rules over a
    pool of generator factors and their σ-shifts inside the order window."""
    if I.perfect is not None and I.perfect.get("order", -1) >= order:
        return I
    if I.sigma_order is None or I.sigma_order < order:
        I = sigma_close(I, order)
    R = I.ring
    W = _window(I, 0)
    gens = list(I.gens)
    undecided = []
    warnings = list(I.warnings)
    exhaustive = True
    one = R.one()

    def pool_of(polys):
        nonlocal exhaustive
        pool = []
        for g in polys:
            facs = factor_poly(g)
            if facs is None:
                exhaustive = False
                pool.append(g)
                continue
            for fac, _ in facs:
                pool.append(fac)
        ext = []
        for a in pool:
            for k in range(0, W + 1):
                s = R.sigma_apply(a, k)
                if R.order(s) <= W:
                    ext.append(s)
        return _dedupe(ext)

    pool = pool_of(gens)
    rounds = 0
    changed = True
    while changed:
        changed = False
        rounds += 1
        if _member(gens, one, effort) is Membership.IN:
            gens = [one]
            break
        for a in pool:
            if _in_ideal(gens, a, effort, undecided):
                continue
            st = radical_member(gens, a, effort)
            if st is Membership.UNDECIDED:
                undecided.append(a)
            hit = st is Membership.IN
            if not hit:
                s = a * R.sigma_apply(a)
                hit = R.order(s) <= W + 1 and _in_ideal(gens, s, effort, undecided)
            if hit:
                gens.append(a)
                for k in range(1, W + 1):
                    s = R.sigma_apply(a, k)
                    if R.order(s) <= W:
                        gens.append(s)
                changed = True
        for a in pool:
            for b in pool:
                if not _in_ideal(gens, a * b, effort, undecided):
                    continue
                new = a * R.sigma_apply(b)
                if R.order(new) <= W and not _in_ideal(gens, new, effort, undecided):
                    gens.append(new)
                    changed = True
        if changed:
            gens = _dedupe(gens)
            pool = _dedupe(pool + pool_of(gens))
    if undecided:
        warnings.append(f"UndecidedAtBound: {len(undecided)} membership tests hit the degree cap")
    if not exhaustive:
        warnings.append("IncompletePool: some generators could not be factored")
    flag = {"order": order, "window": W, "effort": effort, "rounds": rounds,
            "pool_size": len(pool), "pool_exhaustive": exhaustive, "undecided": len(undecided)}
    return replace(I, gens=tuple(_dedupe(gens)), perfect=flag, warnings=tuple(warnings))


# --- presentations with optional Σ-structure --------------------------------

@dataclass(frozen=True)
class SigmaRule:
    """An endomorphism given by images of the order-0 generators; ground
    coefficients are moved by the ground σ₀ raised to ``ground_power``."""
    name: str
    images: tuple
    ground_power: int = 1


@dataclass
class SigmaSet:
    rules: list
    table: dict  # (i, j) -> k means rules[i]^{rules[j]} = rules[k]
    checked: bool = False


@dataclass
class DiffRingPresentation:
    ring: DiffPolyRing
    ideal: SigmaIdealPresentation
    sigma_set: SigmaSet = None
    notes: list = dc_field(default_factory=list)

    def __post_init__(self):
        if self.sigma_set is not None:
            verify_sigma_set(self)

    @property
    def relations(self):
        return list(self.ideal.gens)

    def apply_rule(self, rule, f):
        R = self.ring
        mapping = {(j, 0): rule.images[j] for j in range(R.ngens)}
        for v in f.variables():
            if v[1] != 0:
                raise KernelError("Σ-rules act on order-0 presentations only")
        g = f
        if not R.ground.is_identity() and rule.ground_power:
            g = g.map_coeffs(lambda c: R.ground.apply(c, rule.ground_power))
        return g.substitute(mapping)


def verify_sigma_set(R, effort=DEFAULT_EFFORT):
    """Check τ∘σ^τ = σ∘τ on generators modulo the order-0 relations, and
    the cocycle identity (σ^τ)^φ = (σ^φ)^(τ^φ) on table entries."""
    S = R.sigma_set
    n = len(S.rules)
    rels = [g for g in R.ideal.gens if R.ring.order(g) <= 0]
    for i in range(n):
        for j in range(n):
            if (i, j) not in S.table:
                raise KernelError(f"commutation table misses entry ({i}, {j})")
    for (i, j), k in S.table.items():
        sigma, tau, sig_tau = S.rules[i], S.rules[j], S.rules[k]
        for jj in range(R.ring.ngens):
            x = R.ring.var(jj, 0)
            lhs = R.apply_rule(tau, R.apply_rule(sig_tau, x))
            rhs = R.apply_rule(sigma, R.apply_rule(tau, x))
            diff = lhs - rhs
            if diff and (not rels or _member(rels, diff, effort) is not Membership.IN):
                raise KernelError(f"commutation rule fails for ({sigma.name}, {tau.name}) on generator {jj}")
    for i in range(n):
        for j in range(n):
            for l in range(n):
                left = S.table[(S.table[(i, j)], l)]
                right = S.table[(S.table[(i, l)], S.table[(j, l)])]
                if left != right:
                    raise KernelError("commutation table violates the cocycle identity")
    S.checked = True
    return True


def truncate(R, N):
    """Ordinary presentation: variables x_{j,i} with i <= N and all shifts of
    the relations that stay inside the window."""
    ring = R.ring
    gens = []
    for g in R.ideal.gens:
        o = ring.order(g)
        for k in range(0, N - max(o, 0) + 1):
            gens.append(ring.sigma_apply(g, k))
    return TruncatedRing(ring, N, tuple(_dedupe(gens)))


@dataclass(frozen=True)
class TruncatedRing:
    ring: DiffPolyRing
    N: int
    gens: tuple

    def variables(self):
        return self.ring.variables_upto(self.N)

    def describe(self):
        return {"window": self.N,
                "variables": [self.ring.var_name(v) for v in self.variables()],
                "relations": [self.ring.render(g) for g in self.gens]}


def is_fixed_prime(p, R, order=2, effort=DEFAULT_EFFORT):
    """Test σ^{-1}(p) = p at a truncation.

    Returns (verdict, details) where verdict is "Fixed", "NotFixed" or
    "UndecidedAtBound".  σ(p) ⊆ p is checked generator-wise; the preimage
    σ^{-1}(p) is computed by elimination and compared back with p.
    """
    ring = R.ring
    pmax = max((ring.order(g) for g in p.gens), default=0)
    N = max(pmax, 0) + order
    base = list(truncate(R, N).gens)
    P = _dedupe(base + list(p.gens))
    statuses = []
    forward = []
    for g in p.gens:
        st = _member(P, ring.sigma_apply(g), effort)
        forward.append(st.value)
        statuses.append(st)
    if Membership.NOT_IN in statuses:
        return "NotFixed", {"window": N, "forward": forward}
    # preimage of P under σ restricted to the level N-1 window
    fld = ring.field
    z = lambda v: (v[0] + ring.ngens + 1, v[1])  # noqa: E731  source copies
    src = ring.variables_upto(N - 1)
    links = [MultiPoly.var(z(v), fld) - ring.sigma_apply(MultiPoly.var(v, fld)) for v in src]
    polys, complete = eliminate(P + links, lambda v: v[0] < ring.ngens, effort)
    back = []
    for h in polys:
        h = h.rename(lambda v: (v[0] - ring.ngens - 1, v[1]))
        st = _member(P, h, effort)
        back.append(st.value)
        statuses.append(st)
    details = {"window": N, "forward": forward, "preimage_generators": len(polys),
               "preimage_complete": complete, "backward": back}
    if Membership.NOT_IN in statuses:
        return "NotFixed", details
    if Membership.UNDECIDED in statuses or not complete:
        return "UndecidedAtBound", details
    return "Fixed", details


def rational_points(R, K, phi_power=1):
    """All (K, Frob^phi_power)-rational points, by exhaustive enumeration.

    ``K`` is a :class:`FiniteField`; the relations must have prime-field
    (or rational, reduced mod p) coefficients.
    """
    ring = R.ring
    if ring.field.char not in (0, K.p):
        raise KernelError("relations live in a different characteristic")
    rels = list(R.ideal.gens)
    orders = [ring.order(g) for g in rels]
    top = max(orders, default=0)
    elems = K.elements()
    frob_cache = {}

    def frob(a, i):
        key = (K.to_vector(a), i)
        if key not in frob_cache:
            frob_cache[key] = K.frobenius(a, i * phi_power)
        return frob_cache[key]

    prime = K.prime
    conv = [_reduce_coeffs(g, prime) for g in rels]
    points = []
    for tup in product(elems, repeat=ring.ngens):
        vals = {}
        for j, a in enumerate(tup):
            for i in range(top + 1):
                vals[(j, i)] = frob(a, i)
        if all(not g.evaluate(vals, K.one) for g in conv):
            points.append(tup)
    points.sort(key=lambda tup: tuple(K.sort_key(a) for a in tup))
    return points


def _reduce_coeffs(g, prime):
    if isinstance(g.field, PrimeField):
        return g
    if isinstance(g.field, RationalField):
        return g.map_coeffs(lambda c: prime.coerce(c), prime)
    raise KernelError("rational points need prime-field or rational coefficients")
