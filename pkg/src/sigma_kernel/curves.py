"""Difference curves presented as étale prolongation towers over the line.

The base ring is R₀ = Q[y].  A primitive element α has a monic polynomial
f(y, α) = 0 and σ(y) = S(y, α₀).  Two shapes are supported:

* ``tower``: level i+1 adjoins α_i = σ^i(α) subject to f^{σ^i}, so the
  rings R₀ ⊂ R₁ ⊂ ... keep growing;
* ``closed``: R = R₀[α]/(f) with σ(α) given explicitly, possibly by several
  rules (a Σ-set);
* ``base``: no α at all, R = Q[y] with σ(y) = S(y).

Variables use the difference-ring convention: y is (0, 0) and α_i is (1, i).
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import sympy

from .diffring import DiffGroundField, DiffPolyRing
from .errors import (InseparableMinimalPolynomial, InvalidPresentation, KernelError,
                     NotStabilized, SearchExhausted, StabilizationNotReached,
                     UniverseIncomplete, ZeroFunction)
from .exact.fields import QQ
from .exact.groebner import DEFAULT_EFFORT, Membership, ideal_membership
from .exact.poly import MultiPoly
from .exact.series import Series, newton_root
from .exact.tower import FieldTower, Step, certify_steps, factor_over_tower, theta
from .parse import render_terms

Y = (0, 0)
TOWER, CLOSED, BASE = "tower", "closed", "base"
DEFAULT_DEPTH = 6
DEFAULT_WINDOW = 3


def A(i):
    return (1, i)


def _poly(x):
    if isinstance(x, MultiPoly):
        return x
    return MultiPoly.const(x, QQ)


def reduce_monic(g, p, v):
    """Remainder of g on division by p, monic in the variable v."""
    cp = p.coeffs_in(v)
    d = max(cp)
    if cp[d] != MultiPoly.const(1, QQ):
        raise KernelError("reduction needs a monic divisor")
    tail = {e: c for e, c in cp.items() if e < d}
    cf = g.coeffs_in(v)
    for e in range(max(cf, default=0), d - 1, -1):
        c = cf.pop(e, None)
        if c is None or not c:
            continue
        for re_, rc in tail.items():
            k = e - d + re_
            cf[k] = cf[k] - c * rc if k in cf else -(c * rc)
    out = MultiPoly.zero(QQ)
    for e, c in cf.items():
        out = out + (c * MultiPoly.var(v, QQ, e) if e else c)
    return out


@dataclass(frozen=True)
class CurveRule:
    name: str
    sigma_y: MultiPoly
    sigma_alpha: MultiPoly = None


class CurvePresentation:
    def __init__(self, f, sigma_y, mode=TOWER, sigma_alpha=None, rules=None,
                 inverted=(), names=("y", "x"), label=""):
        self.mode = mode
        self.f = _poly(f) if f is not None else None
        self.names = tuple(names)
        self.label = label
        self.ring = DiffPolyRing(DiffGroundField(QQ), list(self.names))
        self.inverted = tuple(_poly(g) for g in inverted)
        self._sy_cache = {0: MultiPoly.var(Y, QQ)}
        self._step_cache = {}
        if mode == BASE:
            if self.f is not None:
                raise InvalidPresentation("a base curve has no primitive element")
            self._check_vars(sigma_y, {Y}, "sigma(y)")
        elif mode in (TOWER, CLOSED):
            if self.f is None:
                raise InvalidPresentation("missing the minimal polynomial f")
            self._check_vars(self.f, {Y, A(0)}, "f")
            cf = self.f.coeffs_in(A(0))
            if not cf or max(cf) < 1 or cf[max(cf)] != MultiPoly.const(1, QQ):
                raise InvalidPresentation("f must be monic in the primitive element")
            self._check_vars(sigma_y, {Y, A(0)}, "sigma(y)")
        else:
            raise InvalidPresentation(f"unknown curve mode {mode!r}")
        if mode == CLOSED:
            if rules is None:
                if sigma_alpha is None:
                    raise InvalidPresentation("closed presentations need sigma(alpha)")
                rules = [CurveRule("sigma", _poly(sigma_y), _poly(sigma_alpha))]
            self.rules = tuple(rules)
            for r in self.rules:
                self._check_vars(r.sigma_y, {Y, A(0)}, f"{r.name}(y)")
                self._check_vars(r.sigma_alpha, {Y, A(0)}, f"{r.name}(alpha)")
                img = self.f.substitute({Y: r.sigma_y, A(0): r.sigma_alpha})
                if self.reduce(img):
                    raise InvalidPresentation(f"rule {r.name} does not preserve the relation f")
        else:
            self.rules = (CurveRule("sigma", _poly(sigma_y)),)
        self.sigma_y = self.rules[0].sigma_y

    @staticmethod
    def _check_vars(p, allowed, what):
        p = _poly(p)
        extra = [v for v in p.variables() if v not in allowed]
        if extra:
            raise InvalidPresentation(f"{what} uses variables outside the presentation")

    # structure
    @property
    def levels_grow(self):
        return self.mode == TOWER

    def tower_length(self, depth):
        return {TOWER: depth, CLOSED: 1, BASE: 0}[self.mode]

    def sigma(self, g, rule=None):
        g = _poly(g)
        if self.mode == CLOSED:
            r = rule or self.rules[0]
            return self.reduce(g.substitute({Y: r.sigma_y, A(0): r.sigma_alpha}))
        g = g.rename(lambda v: v if v == Y else (1, v[1] + 1))
        return g.substitute({Y: self.sigma_y})

    def sigma_power_y(self, i):
        if i not in self._sy_cache:
            self._sy_cache[i] = self.sigma(self.sigma_power_y(i - 1))
        return self._sy_cache[i]

    def step_poly(self, i):
        """f^{σ^i} as a polynomial monic in α_i."""
        if i not in self._step_cache:
            if self.mode == CLOSED and i > 0:
                raise KernelError("closed presentations have a single step")
            g = self.f.rename(lambda v: A(i) if v == A(0) else v)
            if i:
                g = g.substitute({Y: self.sigma_power_y(i)})
            self._step_cache[i] = g
        return self._step_cache[i]

    def top_level(self, g):
        """Number of α-steps a polynomial needs."""
        return max((v[1] + 1 for v in _poly(g).variables() if v[0] == 1), default=0)

    def reduce(self, g):
        g = _poly(g)
        if self.mode == BASE:
            return g
        for i in range(self.top_level(g) - 1, -1, -1):
            if self.mode == CLOSED and i > 0:
                raise KernelError("closed presentations only have alpha_0")
            if g.degree_in(A(i)) >= self.step_poly(i).degree_in(A(i)):
                g = reduce_monic(g, self.step_poly(i), A(i))
        return g

    def is_zero(self, g):
        return not self.reduce(g)

    def relations(self, levels):
        return [self.step_poly(i) for i in range(min(levels, self.tower_length(levels)))]

    def render(self, g):
        return self.ring.render(_poly(g))

    def describe(self):
        out = {"mode": self.mode, "names": list(self.names), "sigma_y": self.render(self.sigma_y)}
        if self.f is not None:
            out["f"] = self.render(self.f)
        if self.mode == CLOSED:
            out["rules"] = [{"name": r.name, "sigma_y": self.render(r.sigma_y),
                             "sigma_alpha": self.render(r.sigma_alpha)} for r in self.rules]
        if self.inverted:
            out["inverted"] = [self.render(g) for g in self.inverted]
        return out

    def generic_tower(self, depth):
        """The function-field tower Q(y)(α₀, ..., α_{depth-1}) as a FieldTower
        with y transcendental."""
        steps = [Step(self.names[0], None)]
        index = {Y: theta(0)}
        for i in range(self.tower_length(depth)):
            index[A(i)] = theta(i + 1)
            steps.append(Step(f"{self.names[1]}@{i}", self.step_poly(i).rename(lambda v: index[v])))
        return FieldTower(QQ, steps)

    def certify_integral(self, depth=DEFAULT_DEPTH):
        return certify_steps(self.generic_tower(depth))


# --- sympy bridge ------------------------------------------------------------

def _sym(v):
    return sympy.Symbol("y") if v == Y else sympy.Symbol(f"a{v[1]}")


def to_sympy(g):
    expr = sympy.Integer(0)
    for m, c in _poly(g).terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for v, e in m:
            term *= _sym(v) ** e
        expr += term
    return expr


def from_sympy_y(expr):
    y = sympy.Symbol("y")
    P = sympy.Poly(expr, y, domain="QQ")
    out = MultiPoly.zero(QQ)
    for (e,), c in P.terms():
        c = MultiPoly.const(Fraction(int(c.p), int(c.q)), QQ)
        out = out + (c * MultiPoly.var(Y, QQ, e) if e else c)
    return out


def etale_localize(f, sigma_y, mode=TOWER, sigma_alpha=None, rules=None, names=("y", "x"), label=""):
    """Check separability of f over Q(y) and record f' among the inverted
    elements, so every level of the tower is étale over the previous one."""
    f = _poly(f)
    T = _sym(A(0))
    fs, ds = to_sympy(f), sympy.diff(to_sympy(f), T)
    if ds == 0 or sympy.degree(sympy.gcd(fs, ds), T) > 0:
        raise InseparableMinimalPolynomial("gcd(f, f') is nontrivial over Q(y)", f=f)
    der = f.derivative(A(0))
    inverted = () if der.is_constant() else (der,)
    C = CurvePresentation(f, sigma_y, mode, sigma_alpha, rules, inverted, names, label)
    C.etale_certificate = {"derivative": C.render(der),
                           "gcd_with_derivative": "1",
                           "inverted": [C.render(g) for g in inverted]}
    return C


# --- closed points ------------------------------------------------------------

def _ev(poly, values, tower):
    out = _poly(poly).evaluate(values, tower.one)
    return tower.elem(out)


def _lift(elem, tvars):
    return elem.poly.rename(lambda v: tvars[v[0]])


class ClosedPoint:
    """A σ-fixed chain of primes P₀ ⊂ P₁ ⊂ ... given by factor choices."""

    def __init__(self, curve, base, residue, values, choices, degrees, mults,
                 gens, tvars, kdepth, fixed_by, branching, window):
        self.curve = curve
        self.base = base
        self.residue = residue
        self.values = values
        self.choices = tuple(choices)
        self.degrees = tuple(degrees)
        self.mults = tuple(mults)
        self.gens = tuple(gens)
        self.tvars = tuple(tvars)
        self.kdepth = tuple(kdepth)
        self.fixed_by = tuple(fixed_by)
        self.branching = tuple(branching)
        self.depth = len(self.choices)
        self.stable_from = self._stable_from()
        grows = curve.levels_grow
        self.status = ("Stabilized" if not grows or self.depth - self.stable_from >= window
                       else "Undetermined")

    def _stable_from(self):
        k = len(self.branching)
        while k > 0 and self.branching[k - 1] == 1:
            k -= 1
        return k

    @property
    def key(self):
        return (self.curve.render(self.base),) + self.choices

    def sort_key(self):
        return (self.base.total_degree(),) + self.key

    def same_chain(self, other, depth=None):
        n = min(self.depth, other.depth) if depth is None else depth
        return self.key[: n + 1] == other.key[: n + 1]

    def __eq__(self, other):
        return isinstance(other, ClosedPoint) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"ClosedPoint({self.label()})"

    @property
    def etale(self):
        return all(m == 1 for m in self.mults)

    def label(self):
        if not self.choices:
            return f"({self.key[0]})"
        return f"({self.key[0]}; " + ", ".join(self.choices) + ")"

    def residue_tower(self, level):
        return self.residue.prefix(self.kdepth[level])

    def to_dict(self):
        return {"base": self.key[0], "chain": list(self.choices), "factor_degrees": list(self.degrees),
                "multiplicities": list(self.mults), "residue_field": self.residue.name,
                "residue_degree": self.residue.degree(), "fixed_by": list(self.fixed_by),
                "stabilization": {"status": self.status, "forced_from": self.stable_from,
                                  "checked_depth": self.depth, "branching": list(self.branching)}}


def _prime_base(p0):
    p0 = _poly(p0)
    if any(v != Y for v in p0.variables()) or p0.total_degree() < 1:
        raise InvalidPresentation("a base prime is a nonconstant polynomial in y")
    cf = p0.coeffs_in(Y)
    p0 = p0 * (Fraction(1) / cf[max(cf)].constant_coeff())
    sp = sympy.Poly(to_sympy(p0), sympy.Symbol("y"), domain="QQ")
    if not sp.is_irreducible:
        raise InvalidPresentation("base polynomial is not irreducible over Q")
    return p0


def enumerate_points_over(C, p0, depth=DEFAULT_DEPTH, window=DEFAULT_WINDOW, max_points=64):
    """All σ-fixed chains over the base prime (p0) up to the given depth."""
    pi = _prime_base(p0)
    for g in C.inverted:
        if all(v == Y for v in g.variables()) and not reduce_monic(g, pi, Y):
            raise KernelError("base prime meets the inverted set", prime=C.render(pi))
    d0 = pi.degree_in(Y)
    if d0 == 1:
        t0 = FieldTower(QQ, [])
        c0 = pi.coeffs_in(Y).get(0)
        ry = t0.elem(-c0.constant_coeff() if c0 is not None else 0)
        tvars, kd = [], 0
    else:
        t0 = FieldTower(QQ, [Step(C.names[0], pi.rename(lambda v: theta(0)))])
        ry = t0.gen(0)
        tvars, kd = [Y], 1
    values = {Y: ry}
    N = C.tower_length(depth)
    rules = list(C.rules)
    if C.mode == BASE:
        if _ev(C.sigma(pi), values, t0):
            return []
        return [ClosedPoint(C, pi, t0, values, [], [], [], [pi], tvars, [kd], ["sigma"], [], window)]
    out = []

    def extend(i, tower, values, gens, choices, degs, mults, tvars, kdepth, branching):
        if i == N:
            fixed = [r.name for r in rules] if C.mode == TOWER else fixed_rules(tower, values, gens)
            out.append(ClosedPoint(C, pi, tower, values, choices, degs, mults, gens, tvars,
                                   kdepth, fixed, branching, window))
            if len(out) > max_points:
                raise StabilizationNotReached("too many chains; choices do not stabilise",
                                              limit=max_points)
            return
        F = C.step_poly(i)
        cf = F.coeffs_in(A(i))
        coeffs = [tower.zero] * (max(cf) + 1)
        for e, c in cf.items():
            coeffs[e] = _ev(c, values, tower)
        facs = factor_over_tower(coeffs)
        facs.sort(key=lambda fm: (len(fm[0]), _factor_text(fm[0], tower, C, i)))
        children = []
        for fac, mult in facs:
            if len(fac) == 2:
                r = -fac[0]
                ntower, ntvars = tower, tvars
                gen = MultiPoly.var(A(i), QQ) - _lift(r, tvars)
                choice = f"{C.names[1]}@{i} = {tower.render(r)}"
            else:
                k = tower.depth
                ntower = tower.extend(f"{C.names[1]}@{i}", _fac_poly(fac, k))
                r = ntower.gen(k)
                ntvars = tvars + [A(i)]
                gen = MultiPoly.zero(QQ)
                for e, c in enumerate(fac):
                    lc = _lift(c, tvars)
                    gen = gen + lc * MultiPoly.var(A(i), QQ, e) if e else gen + lc
                choice = f"{_factor_text(fac, tower, C, i)} = 0"
            nvalues = {v: ntower.elem(x) for v, x in values.items()}
            nvalues[A(i)] = ntower.elem(r)
            ngens = gens + [gen]
            if C.mode == TOWER:
                # σ(P_i) ⊆ P_{i+1}: the newest generator of P_i must map into the chain
                if _ev(C.sigma(gens[i]), nvalues, ntower):
                    continue
            elif not fixed_rules(ntower, nvalues, ngens):
                continue
            children.append((ntower, nvalues, ngens, choice, len(fac) - 1, mult, ntvars))
        for ntower, nvalues, ngens, choice, deg, mult, ntvars in children:
            extend(i + 1, ntower, nvalues, ngens, choices + [choice], degs + [deg], mults + [mult],
                   ntvars, kdepth + [ntower.depth], branching + [len(children)])

    def fixed_rules(tower, values, gens):
        ok = []
        for r in rules:
            if all(not _ev(C.sigma(g, r), values, tower) for g in gens):
                ok.append(r.name)
        return ok

    extend(0, t0, values, [pi], [], [], [], tvars, [kd], [])
    out.sort(key=ClosedPoint.sort_key)
    return out


def _fac_poly(fac, k):
    mp = MultiPoly.zero(QQ)
    for e, c in enumerate(fac):
        mp = mp + c.poly * MultiPoly.var(theta(k), QQ, e) if e else mp + c.poly
    return mp


def _factor_text(fac, tower, C, i):
    names = tower.names() + [f"{C.names[1]}@{i}"]
    return render_terms(_fac_poly(fac, tower.depth), lambda v: names[v[0]], QQ.render)


# --- functions on a curve -----------------------------------------------------

class Function:
    """A formal quotient num/den of polynomials on the curve."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        self.num = _poly(num)
        self.den = _poly(1 if den is None else den)
        if not self.den:
            raise ZeroDivisionError("function with zero denominator")

    @classmethod
    def of(cls, g):
        return g if isinstance(g, Function) else cls(g)

    def __mul__(self, other):
        o = Function.of(other)
        return Function(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Function.of(other)
        if not o.num:
            raise ZeroDivisionError("division by the zero function")
        return Function(self.num * o.den, self.den * o.num)

    def __add__(self, other):
        o = Function.of(other)
        return Function(self.num * o.den + o.num * self.den, self.den * o.den)

    def __pow__(self, e):
        if e >= 0:
            return Function(self.num ** e, self.den ** e)
        return Function(self.den ** (-e), self.num ** (-e))

    def render(self, C):
        if self.den == MultiPoly.const(1, QQ):
            return C.render(self.num)
        return f"({C.render(self.num)})/({C.render(self.den)})"


# --- local rings ----------------------------------------------------------------

@dataclass
class LocalData:
    level: int
    prec: int
    tower: object
    series: dict
    e_steps: list
    uniformizer: MultiPoly
    failure: dict = None


def _local_data(C, x, levels, prec):
    pi = x.base
    t0 = x.residue_tower(0)
    ry = x.values[Y]
    if pi.degree_in(Y) == 1:
        sy = Series([ry, t0.one], t0, prec)
    else:
        cf = pi.coeffs_in(Y)
        coeffs = [Series.const(t0.elem(cf.get(e, MultiPoly.zero(QQ))), t0, prec) for e in range(max(cf) + 1)]
        coeffs[0] = coeffs[0] - Series.param(t0, prec)
        sy = newton_root(coeffs, t0.elem(ry), t0, prec)
    series = {Y: sy}
    e_steps = []
    unif = pi
    tower = t0
    for i in range(levels):
        nt = x.residue_tower(i + 1)
        series = {v: s.recast(nt) for v, s in series.items()}
        tower = nt
        F = C.step_poly(i)
        cf = F.coeffs_in(A(i))
        coeffs = [Series([], nt, prec)] * (max(cf) + 1)
        for e, c in cf.items():
            coeffs[e] = _eval_series(c, series, Series.const(nt.one, nt, prec))
        r = nt.elem(x.values[A(i)])
        m = x.mults[i]
        if m == 1:
            series[A(i)] = newton_root(coeffs, r, nt, prec)
            e_steps.append(1)
            continue
        if x.degrees[i] != 1:
            return LocalData(i, prec, tower, series, e_steps, unif,
                             {"verdict": "Undetermined", "level": i,
                              "reason": "ramified step with a nonlinear residue factor"})
        # shift α_i = r + Z and look at the Newton polygon
        G = _taylor_shift(coeffs, r, nt, prec)
        v0 = G[0].valuation()
        if v0 is None or v0 >= 2:
            return LocalData(i, prec, tower, series, e_steps, unif,
                             {"verdict": "Singular", "level": i,
                              "reason": "step relation lies in the square of the maximal ideal"})
        h = _solve_parameter(G, nt, prec)
        series = {v: s.compose(h) for v, s in series.items()}
        series[A(i)] = Series([r, nt.one], nt, prec)
        unif = MultiPoly.var(A(i), QQ) - _lift(r, x.tvars)
        e_steps.append(m)
    return LocalData(levels, prec, tower, series, e_steps, unif)


def _eval_series(g, series, one):
    """g evaluated at coordinate series, with powers built incrementally."""
    powers = {}
    for m in g.terms:
        for v, e in m:
            powers[v] = max(powers.get(v, 0), e)
    table = {}
    for v, top in powers.items():
        row = [one, series[v]]
        for _ in range(2, top + 1):
            row.append(row[-1] * series[v])
        table[v] = row
    acc = one * 0
    for m, c in g.terms.items():
        term = None
        for v, e in m:
            term = table[v][e] if term is None else term * table[v][e]
        acc = acc + (one * c if term is None else term * c)
    return acc


def _binom(n, k):
    from math import comb
    return comb(n, k)


def _taylor_shift(coeffs, r, field, prec):
    n = len(coeffs)
    out = []
    rp = [field.one]
    for _ in range(n):
        rp.append(rp[-1] * r)
    for j in range(n):
        acc = Series([], field, prec)
        for k in range(j, n):
            acc = acc + coeffs[k] * (rp[k - j] * _binom(k, j))
        out.append(acc)
    return out


def _solve_parameter(G, field, prec):
    """Solve Σ_j G_j(u) Z^j = 0 for u as a series in Z (G_0 has valuation 1)."""
    c = G[0].c[1]
    Z = Series.param(field, prec)
    zpow = [Series.const(field.one, field, prec)]
    for _ in range(len(G)):
        zpow.append(zpow[-1] * Z)
    h = Series([], field, prec)
    for _ in range(prec + 1):
        res = Series([], field, prec)
        for j, Gj in enumerate(G):
            res = res + Gj.compose(h) * zpow[j]
        if res.valuation() is None:
            return h
        h = h - res * (field.one / c)
    raise StabilizationNotReached("parameter series did not converge")


@dataclass
class NonsingularReport:
    verdict: str
    e_steps: list
    i0: int = None
    uniformizer: str = None
    witness: dict = None
    sigma_stable: bool = None

    def to_dict(self):
        out = {"verdict": self.verdict, "e_steps": list(self.e_steps)}
        if self.i0 is not None:
            out["stable_from_level"] = self.i0
        if self.uniformizer is not None:
            out["uniformizer"] = self.uniformizer
        if self.witness:
            out["witness"] = dict(self.witness)
        if self.sigma_stable is not None:
            out["sigma_maximal_ideal_stable"] = self.sigma_stable
        return out


def check_nonsingular(C, x, depth=None, window=DEFAULT_WINDOW):
    """DVRCertificate, Singular or Undetermined for the local ring at x."""
    levels = x.depth if depth is None else min(depth, x.depth)
    data = _local_data(C, x, levels, 4)
    if data.failure:
        f = data.failure
        return NonsingularReport(f["verdict"], data.e_steps, witness=f)
    e = data.e_steps
    if C.mode == TOWER:
        tail = e[-window:]
        if len(e) < window:
            return NonsingularReport("Undetermined", e, witness={"reason": "depth below the window"})
        if all(v > 1 for v in tail):
            return NonsingularReport("Singular", e, witness={
                "reason": "step ramification persists across the window",
                "value_group": f"Z[1/{tail[-1]}]"})
        if any(v > 1 for v in tail):
            return NonsingularReport("Undetermined", e, witness={"reason": "ramification inside the window"})
    i0 = max((i + 1 for i, v in enumerate(e) if v > 1), default=0)
    return NonsingularReport("DVRCertificate", e, i0, C.render(data.uniformizer),
                             sigma_stable=bool(x.fixed_by))


class LocalValuation:
    """v_x on functions, computed from coordinate series at the point."""

    def __init__(self, C, x, window=DEFAULT_WINDOW, prec=4, max_prec=128):
        self.curve = C
        self.point = x
        self.report = check_nonsingular(C, x, window=window)
        if self.report.verdict != "DVRCertificate":
            raise StabilizationNotReached("point has no DVR certificate", verdict=self.report.verdict)
        self.i0 = self.report.i0
        self.e = 1
        for v in self.report.e_steps[: self.i0]:
            self.e *= v
        self.prec = prec
        self.max_prec = max_prec
        self._data = {}

    @property
    def uniformizer(self):
        return self._local(max(self.i0, 0), self.prec).uniformizer

    def _local(self, levels, prec):
        levels = max(levels, self.i0)
        key = (levels, prec)
        if key not in self._data:
            if levels > self.point.depth:
                raise StabilizationNotReached("function needs more levels than the point carries",
                                              needed=levels, depth=self.point.depth)
            d = _local_data(self.curve, self.point, levels, prec)
            if d.failure:
                raise StabilizationNotReached("local data failed", **d.failure)
            self._data[key] = d
        return self._data[key]

    def _order(self, g):
        g = _poly(g)
        if self.curve.is_zero(g):
            raise ZeroFunction("function is zero on the curve")
        levels = self.curve.top_level(g)
        prec = self.prec
        while prec <= self.max_prec:
            d = self._local(levels, prec)
            one = Series.const(d.tower.one, d.tower, prec)
            v = _eval_series(g, d.series, one).valuation()
            if v is not None:
                return v
            prec *= 2
        raise StabilizationNotReached("valuation exceeds the working precision", max_prec=self.max_prec)

    def __call__(self, g):
        g = Function.of(g)
        return self._order(g.num) - self._order(g.den)


def valuation(L, g):
    return L(g)


def sigma_quotient_bounded(C, L, g, rule=None):
    """Compare v_x(σ(g)) with v_x(g)."""
    x = L.point
    if rule is None and C.mode == CLOSED:
        rule = next(r for r in C.rules if r.name in x.fixed_by)
    g = Function.of(g)
    sg = Function(C.sigma(g.num, rule), C.sigma(g.den, rule))
    vg, vs = L(g), L(sg)
    return {"v_g": vg, "v_sigma_g": vs, "holds": vs >= vg}


# --- divisors -------------------------------------------------------------------

class Divisor:
    """Finite formal sum of closed points with integer coefficients."""

    def __init__(self, coeffs=None):
        self.coeffs = {p: n for p, n in (coeffs or {}).items() if n}

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: kv[0].sort_key())

    def __add__(self, other):
        out = dict(self.coeffs)
        for p, n in other.coeffs.items():
            out[p] = out.get(p, 0) + n
        return Divisor(out)

    def __neg__(self):
        return Divisor({p: -n for p, n in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, k):
        return Divisor({p: k * n for p, n in self.coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, Divisor) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.items()))

    def __len__(self):
        return len(self.coeffs)

    def support(self):
        return [p for p, _ in self.items()]

    def is_effective(self):
        return all(n > 0 for n in self.coeffs.values())

    def to_dict(self):
        return [{"point": p.label(), "coefficient": n} for p, n in self.items()]

    def __repr__(self):
        return "Divisor(" + " + ".join(f"{n}*{p.label()}" for p, n in self.items()) + ")"


def residue_limit_degree(x, window=DEFAULT_WINDOW):
    """dl(κ(x)/k): the eventual degree of the residue steps past level 0."""
    if not x.curve.levels_grow:
        return 1
    d = list(x.degrees[1:])
    if len(d) < window or len(set(d[-window:])) > 1:
        raise NotStabilized("residue degrees have not settled", degrees=d)
    return min(d)


def divisor_degree(D, window=DEFAULT_WINDOW):
    return sum(n * residue_limit_degree(p, window) for p, n in D.items())


def norm_to_base(C, g):
    """N(g) in Q[y], through successive resultants with the step relations."""
    expr = to_sympy(C.reduce(g))
    for i in range(C.top_level(g) - 1, -1, -1):
        a = _sym(A(i))
        expr = sympy.resultant(expr, to_sympy(C.step_poly(i)), a) if expr.has(a) else \
            expr ** C.step_poly(i).degree_in(A(i))
    return sympy.expand(expr)


def base_primes(C, g):
    """Irreducible monic factors in Q[y] of the norm of g."""
    N = norm_to_base(C, g)
    if N == 0:
        raise ZeroFunction("function is zero on the curve")
    y = sympy.Symbol("y")
    out = []
    for fac, _ in sympy.factor_list(N, y)[1]:
        if sympy.degree(fac, y) > 0:
            out.append(_prime_base(from_sympy_y(fac)))
    out.sort(key=lambda p: (p.total_degree(), C.render(p)))
    return out


def _locals_for(C, universe, window):
    return {x: LocalValuation(C, x, window) for x in universe}


def principal_divisor(C, g, universe, depth=None, window=DEFAULT_WINDOW, check=True, locals_=None):
    """(g) restricted to the universe, after checking the universe covers every
    σ-fixed point where g can have nonzero order."""
    g = Function.of(g)
    locs = locals_ or _locals_for(C, universe, window)
    D = Divisor({x: locs[x](g) for x in universe})
    if check:
        if depth is None:
            depth = max((x.depth for x in universe), default=DEFAULT_DEPTH)
        known = set(universe)
        for part in (g.num, g.den):
            if part.is_constant():
                continue
            for q in base_primes(C, part):
                for x in enumerate_points_over(C, q, depth, window):
                    if x in known:
                        continue
                    try:
                        v = LocalValuation(C, x, window)(part)
                    except StabilizationNotReached:
                        v = None
                    if v != 0:
                        raise UniverseIncomplete("a point outside the universe may meet the divisor",
                                                 point=x.label())
    return D


# --- approximation ------------------------------------------------------------------

def _candidates(C, x, limit):
    gens = [g for g in x.gens]
    yield from gens
    count = len(gens)
    for g in gens:
        for h in gens:
            if g is h:
                continue
            for c in (1, -1, 2, -2, 3, -3):
                count += 1
                if count > limit:
                    return
                yield g + h * c
    for g in gens:
        for h in gens:
            count += 1
            if count > limit:
                return
            yield g * h + g


def _separator(C, x, others, locs, limit):
    Lx = locs[x]
    for g in _candidates(C, x, limit):
        if C.is_zero(g):
            continue
        if Lx(g) == 1 and all(locs[o](g) == 0 for o in others):
            return g
    raise SearchExhausted("no element of the prime avoids the other points", point=x.label(), limit=limit)


@dataclass
class ApproximationResult:
    function: Function
    valuations: dict
    prescribed: dict
    verified: bool
    corrections: list = dc_field(default_factory=list)

    def to_dict(self, C):
        return {"function": self.function.render(C), "verified": self.verified,
                "valuations": [{"point": p.label(), "v": v, "prescribed": self.prescribed.get(p)}
                               for p, v in sorted(self.valuations.items(), key=lambda kv: kv[0].sort_key())],
                "corrections": list(self.corrections)}


def approximate(C, points, exponents, universe, window=DEFAULT_WINDOW, limit=200, locals_=None):
    """A function with v_{p_i} = e_i at the given points and v >= 0 on the
    rest of the universe: separators g_i with v_{p_i}(g_i) = 1 that are units
    at the other p_j, their product with the given exponents, then a
    correction by powers of separators where a pole appeared elsewhere."""
    points = list(points)
    if len(set(points)) != len(points):
        raise KernelError("points must be pairwise distinct")
    universe = list(universe)
    for p in points:
        if p not in universe:
            universe.append(p)
    locs = locals_ or _locals_for(C, universe, window)
    g = Function(1)
    for p, e in zip(points, exponents):
        if e:
            others = [q for q in points if q != p]
            g = g * Function(_separator(C, p, others, locs, limit)) ** e
    corrections = []
    for q in universe:
        if q in points:
            continue
        v = locs[q](g)
        if v >= 0:
            continue
        t = _separator(C, q, points, locs, limit)
        l = 0
        while v < 0:
            l += 1
            v = locs[q](g * Function(t) ** l)
        g = g * Function(t) ** l
        corrections.append({"point": q.label(), "power": l})
    vals = {q: locs[q](g) for q in universe}
    presc = dict(zip(points, exponents))
    ok = all(vals[p] == e for p, e in presc.items()) and \
        all(v >= 0 for q, v in vals.items() if q not in presc)
    return ApproximationResult(g, vals, presc, ok, corrections)


# --- Krull conditions --------------------------------------------------------------

def krull_check(C, universe, samples, int_samples=(), window=DEFAULT_WINDOW,
                effort=DEFAULT_EFFORT, sigma_shifts=2):
    """Pointwise (DVR), finite zero sets (FC) and bounded (INT)."""
    dvr = {}
    locs = {}
    for x in universe:
        rep = check_nonsingular(C, x, window=window)
        dvr[x.label()] = rep.verdict
        if rep.verdict == "DVRCertificate":
            locs[x] = LocalValuation(C, x, window)
    dvr_ok = all(v == "DVRCertificate" for v in dvr.values())
    fc = []
    for g in samples:
        g = _poly(g)
        zeros = [x.label() for x in universe if x in locs and locs[x](g) > 0]
        entry = {"function": C.render(g), "zeros": zeros}
        try:
            principal_divisor(C, g, [x for x in universe if x in locs], window=window, locals_=locs)
            entry["status"] = "Holds"
        except (UniverseIncomplete, StabilizationNotReached) as exc:
            entry["status"] = "Undetermined"
            entry["reason"] = str(exc)
        fc.append(entry)
    integ = []
    for a, b in int_samples:
        a, b = _poly(a), _poly(b)
        entry = {"element": Function(a, b).render(C)}
        if any(locs[x](a) < locs[x](b) for x in locs):
            entry["status"] = "NotInIntersection"
            integ.append(entry)
            continue
        levels = max(C.top_level(a), C.top_level(b)) + sigma_shifts
        gens = [b]
        for _ in range(sigma_shifts):
            gens.append(C.sigma(gens[-1]))
        gens += C.relations(levels)
        res = ideal_membership(gens, a, effort)
        entry["status"] = {Membership.IN: "Holds", Membership.NOT_IN: "Fails",
                           Membership.UNDECIDED: "Undetermined"}[res.status]
        entry["sigma_shifts"] = sigma_shifts
        integ.append(entry)

    def summary(entries):
        st = {e["status"] for e in entries}
        if not entries or st <= {"Holds", "NotInIntersection"}:
            return "Holds"
        return "Fails" if "Fails" in st else "Undetermined"

    return {"DVR": {"status": "Holds" if dvr_ok else "Fails", "points": dvr},
            "FC": {"status": summary(fc), "samples": fc},
            "INT": {"status": summary(integ), "samples": integ}}
