"""Finite field towers given by successive minimal polynomials.

A tower over a base field B is a list of steps; step k adjoins a primitive
element ``theta_k`` (polynomial variable ``(k,)``) with a minimal polynomial
monic in ``theta_k`` whose other coefficients involve only earlier
primitives.  A step may instead be marked transcendental.

Elements are polynomials in the primitives reduced modulo the triangular set,
so equality of reduced forms is equality in the tower.
"""

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property

import sympy

from ..errors import KernelError, TowerDegreeInfinite
from . import upoly
from .fields import GF, RationalField, PrimeField
from .poly import MultiPoly

INF = math.inf
SYMPY_IRREDUCIBILITY_LIMIT = 24


def theta(k):
    return (k,)


@dataclass(frozen=True)
class Step:
    name: str
    minpoly: MultiPoly = None  # None marks a transcendental step
    asserted_irreducible: bool = True

    @property
    def degree(self):
        if self.minpoly is None:
            return INF
        return self._degree

    @cached_property
    def _degree(self):
        # minpoly variables are (k,); the step's own variable is the largest
        v = max(self.minpoly.variables())
        return self.minpoly.degree_in(v)


@dataclass
class Certificate:
    verified: bool
    method: str
    warnings: list = dc_field(default_factory=list)

    def to_dict(self):
        return {"verified": self.verified, "method": self.method, "warnings": list(self.warnings)}


class FieldTower:
    def __init__(self, base, steps=()):
        self.base = base
        self.steps = []
        self._prefixes = {}
        self._primitive = None
        for st in steps:
            self._append(st)

    def _append(self, st):
        k = len(self.steps)
        if st.minpoly is not None:
            vs = st.minpoly.variables()
            if theta(k) not in vs:
                raise KernelError(f"step {st.name} does not involve its primitive")
            if any(v[0] > k for v in vs):
                raise KernelError(f"step {st.name} refers to later primitives")
            m = st.minpoly
            coeffs = m.coeffs_in(theta(k))
            d = max(coeffs)
            lc = coeffs[d]
            if not lc.is_constant():
                raise KernelError(f"minimal polynomial of {st.name} is not monic")
            if lc.constant_coeff() != 1:
                m = m * (self.base.one / lc.constant_coeff())
            # reduce lower coefficients modulo the existing tower
            sub = FieldTower(self.base, self.steps)
            m = sub.reduce(m)
            st = Step(st.name, m, st.asserted_irreducible)
        self.steps.append(st)

    def extend(self, name, minpoly, asserted_irreducible=True):
        return FieldTower(self.base, self.steps + [Step(name, minpoly, asserted_irreducible)])

    def prefix(self, n):
        if n == len(self.steps):
            return self
        if n not in self._prefixes:
            self._prefixes[n] = FieldTower(self.base, self.steps[:n])
        return self._prefixes[n]

    @property
    def depth(self):
        return len(self.steps)

    def step_degrees(self):
        return [st.degree for st in self.steps]

    def degree(self):
        d = 1
        for st in self.steps:
            d = d * st.degree
        return d

    def is_finite(self):
        return all(st.minpoly is not None for st in self.steps)

    def names(self):
        return [st.name for st in self.steps]

    # element handling
    def reduce(self, p):
        for k in range(len(self.steps) - 1, -1, -1):
            st = self.steps[k]
            if st.minpoly is None:
                continue
            v = theta(k)
            d = st.degree
            if p.degree_in(v) < d:
                continue
            cf = p.coeffs_in(v)
            rel = (MultiPoly.var(v, self.base) ** d - st.minpoly).coeffs_in(v)
            for e in range(max(cf), d - 1, -1):
                c = cf.pop(e, None)
                if c is None or not c:
                    continue
                for re, rc in rel.items():
                    tgt = e - d + re
                    cf[tgt] = cf[tgt] + c * rc if tgt in cf else c * rc
            out = MultiPoly.zero(self.base)
            for e, c in cf.items():
                out = out + c * MultiPoly.var(v, self.base, e) if e else out + c
            p = out
        return p

    def elem(self, x):
        if isinstance(x, TowerElem):
            return TowerElem(self, x.poly)
        if isinstance(x, MultiPoly):
            return TowerElem(self, self.reduce(x))
        return TowerElem(self, MultiPoly.const(x, self.base))

    def coerce(self, x):
        return self.elem(x)

    @property
    def char(self):
        return self.base.char

    @property
    def name(self):
        if not self.steps:
            return self.base.name
        return f"{self.base.name}({', '.join(self.names())})"

    def render(self, c):
        from ..parse import render_tower_elem
        return render_tower_elem(c, self)

    def gen(self, k):
        return self.elem(MultiPoly.var(theta(k), self.base))

    @property
    def zero(self):
        return TowerElem(self, MultiPoly.zero(self.base))

    @property
    def one(self):
        return TowerElem(self, MultiPoly.const(1, self.base))

    def basis_monomials(self):
        if not self.is_finite():
            raise TowerDegreeInfinite("tower has a transcendental step")
        monos = [()]
        for k, st in enumerate(self.steps):
            new = []
            for m in monos:
                for e in range(st.degree):
                    new.append(tuple(sorted(m + (((k,), e),), reverse=True)) if e else m)
            monos = new
        return monos

    def coordinates(self, a):
        return dict(a.poly.terms)

    def from_coordinates(self, coords):
        return TowerElem(self, MultiPoly(dict(coords), self.base))

    def __eq__(self, other):
        return (isinstance(other, FieldTower) and self.base == other.base
                and [(s.name, s.minpoly) for s in self.steps] == [(s.name, s.minpoly) for s in other.steps])

    def __hash__(self):
        return hash((self.base, tuple(s.name for s in self.steps)))

    def __repr__(self):
        return f"FieldTower({self.base!r}, {self.names()})"

    # primitive element and certification
    def primitive_element(self):
        """Return (element, minimal polynomial coefficient list) for an element
        whose minimal polynomial over the base has degree equal to the tower
        degree, or None when the search fails (the algebra may not be a field)."""
        if self._primitive is not None:
            return self._primitive
        n = self.depth
        N = self.degree()
        if n == 0:
            self._primitive = (self.zero, [self.base.zero, self.base.one])
            return self._primitive
        gens = [self.gen(k) for k in range(n)]
        candidates = [gens[-1]]
        for c in range(1, 6):
            acc = gens[-1]
            for k in range(n - 2, -1, -1):
                acc = acc + gens[k] * (c ** (n - 1 - k))
            candidates.append(acc)
        for a in candidates:
            mp = minpoly(a)
            if len(mp) - 1 == N:
                self._primitive = (a, mp)
                return self._primitive
        return None

    def certify(self):
        """Check that every asserted step is irreducible."""
        if not self.is_finite():
            return Certificate(False, "transcendental-step", ["tower has a transcendental step"])
        if self.depth == 0:
            return Certificate(True, "trivial")
        if any(st.degree == 1 for st in self.steps) and all(st.degree == 1 for st in self.steps):
            return Certificate(True, "linear-steps")
        prim = self.primitive_element()
        if prim is None:
            return Certificate(False, "primitive-search", ["no primitive element found; algebra may not be a field"])
        mp = prim[1]
        verdict = irreducible_over_base(mp, self.base)
        if verdict is True:
            return Certificate(True, "primitive-minpoly-irreducible")
        if verdict is False:
            return Certificate(False, "primitive-minpoly-reducible", ["tower algebra is not a field"])
        return Certificate(False, "asserted", ["UnverifiedIrreducibility: " + verdict])

    # isomorphism to a simple extension (base Q only)
    @cached_property
    def _simple(self):
        prim = self.primitive_element()
        if prim is None:
            raise KernelError("tower has no primitive element")
        a, mp = prim
        N = len(mp) - 1
        powers = [self.one]
        for _ in range(N - 1):
            powers.append(powers[-1] * a)
        monos = self.basis_monomials()
        idx = {m: i for i, m in enumerate(monos)}
        # matrix columns are powers of a
        M = [[self.base.zero] * N for _ in range(N)]
        for j, pw in enumerate(powers):
            for m, c in pw.poly.terms.items():
                M[idx[m]][j] = c
        images = []
        for k in range(self.depth):
            g = self.gen(k)
            rhs = [self.base.zero] * N
            for m, c in g.poly.terms.items():
                rhs[idx[m]] = c
            images.append(solve_linear(M, rhs))
        return a, mp, images


def solve_linear(M, rhs):
    n = len(M)
    A = [list(row) + [rhs[i]] for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            raise KernelError("singular linear system")
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col] if not isinstance(A[col][col], GF) else A[col][col].inverse()
        A[col] = [x * inv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [A[i][n] for i in range(n)]


class TowerElem:
    __slots__ = ("tower", "poly")

    def __init__(self, tower, poly):
        self.tower = tower
        self.poly = poly

    def _co(self, other):
        if isinstance(other, TowerElem):
            return other.poly
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.const(other, self.tower.base)

    def __add__(self, other):
        return TowerElem(self.tower, self.poly + self._co(other))

    __radd__ = __add__

    def __sub__(self, other):
        return TowerElem(self.tower, self.poly - self._co(other))

    def __rsub__(self, other):
        return TowerElem(self.tower, self._co(other) - self.poly)

    def __neg__(self):
        return TowerElem(self.tower, -self.poly)

    def __mul__(self, other):
        return TowerElem(self.tower, self.tower.reduce(self.poly * self._co(other)))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        out = self.tower.one
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def inverse(self):
        if not self.poly:
            raise ZeroDivisionError("inverse of zero tower element")
        t = self.tower
        # the element may not involve the top primitive; find its top level
        vs = self.poly.variables()
        if not vs:
            return TowerElem(t, MultiPoly.const(t.base.one / self.poly.constant_coeff(), t.base))
        k = max(v[0] for v in vs)
        sub = t.prefix(k)
        v = theta(k)
        a = [sub.zero] * (self.poly.degree_in(v) + 1)
        for e, c in self.poly.coeffs_in(v).items():
            a[e] = TowerElem(sub, c)
        m = [sub.zero] * (t.steps[k].degree + 1)
        for e, c in t.steps[k].minpoly.coeffs_in(v).items():
            m[e] = TowerElem(sub, c)
        g, s, _ = upoly.xgcd(upoly.trim(a), m)
        if len(g) != 1:
            raise ZeroDivisionError("element is a zero divisor: tower algebra is not a field")
        out = MultiPoly.zero(t.base)
        for e, c in enumerate(s):
            out = out + c.poly * MultiPoly.var(v, t.base, e) if e else out + c.poly
        return TowerElem(t, t.reduce(out))

    def __truediv__(self, other):
        if isinstance(other, TowerElem):
            return self * other.inverse()
        return TowerElem(self.tower, self.poly * (self.tower.base.one / self.tower.base.coerce(other)))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __bool__(self):
        return bool(self.poly)

    def __eq__(self, other):
        if isinstance(other, TowerElem):
            return self.poly == other.poly
        return self.poly == self._co(other)

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        return f"TowerElem({self.poly!r})"

    def is_base(self):
        return self.poly.is_constant()


def minpoly(a, max_degree=None):
    """Monic minimal polynomial of a over the tower base (coefficient list,
    lowest first), found by linear dependence of successive powers."""
    t = a.tower
    if not t.is_finite():
        raise TowerDegreeInfinite("minimal polynomial needs a finite tower")
    N = t.degree() if max_degree is None else max_degree
    base = t.base
    zero, one = base.zero, base.one
    pivots = {}  # monomial -> (vector, combination)
    power = t.one
    for n in range(N + 1):
        vec = dict(power.poly.terms)
        comb = {n: one}
        for m in sorted(pivots, reverse=True):
            if m in vec and vec[m]:
                pv, pc = pivots[m]
                f = vec[m]
                for mm, c in pv.items():
                    s = vec.get(mm, zero) - f * c
                    if s:
                        vec[mm] = s
                    else:
                        vec.pop(mm, None)
                for i, c in pc.items():
                    s = comb.get(i, zero) - f * c
                    if s:
                        comb[i] = s
                    else:
                        comb.pop(i, None)
        vec = {m: c for m, c in vec.items() if c}
        if not vec:
            lc = comb[n]
            return [comb.get(i, zero) / lc for i in range(n + 1)]
        m = max(vec)
        inv = one / vec[m]
        vec = {mm: c * inv for mm, c in vec.items()}
        comb = {i: c * inv for i, c in comb.items()}
        # keep pivot rows reduced against the new pivot
        for pm in list(pivots):
            pv, pc = pivots[pm]
            if m in pv and pv[m]:
                f = pv[m]
                nv = dict(pv)
                for mm, c in vec.items():
                    s = nv.get(mm, zero) - f * c
                    if s:
                        nv[mm] = s
                    else:
                        nv.pop(mm, None)
                nc = dict(pc)
                for i, c in comb.items():
                    s = nc.get(i, zero) - f * c
                    if s:
                        nc[i] = s
                    else:
                        nc.pop(i, None)
                pivots[pm] = (nv, nc)
        pivots[m] = (vec, comb)
        power = power * a
    raise KernelError("no linear dependence found up to the tower degree")


# --- irreducibility over the base field -------------------------------------

def _to_sympy_poly(coeffs, base, z):
    if isinstance(base, RationalField):
        return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], z, domain="QQ")
    if isinstance(base, PrimeField):
        return sympy.Poly([int(base.coerce(c).v) for c in reversed(coeffs)], z, modulus=base.p)
    return None


def eisenstein(coeffs):
    """Eisenstein test on a monic rational polynomial (after clearing
    denominators); returns the prime used or None."""
    den = 1
    for c in coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    lead = ints[-1]
    g = 0
    for c in ints[:-1]:
        g = math.gcd(g, abs(c))
    if g <= 1:
        return None
    p = 2
    while p <= g:
        if g % p == 0 and lead % p != 0 and ints[0] % (p * p) != 0:
            return p
        while g % p == 0:
            g //= p
        p += 1
    return None


def irreducible_over_base(coeffs, base):
    """True / False when decided, otherwise a string saying why not."""
    d = len(coeffs) - 1
    if d <= 1:
        return True
    if isinstance(base, RationalField):
        one = Fraction(1)
        for a in (0, 1, -1, 2, -2):
            shifted = upoly.compose(coeffs, [Fraction(a), one]) if a else coeffs
            if eisenstein(shifted):
                return True
        if d > SYMPY_IRREDUCIBILITY_LIMIT:
            return f"degree {d} above factorisation limit"
        return bool(_to_sympy_poly(coeffs, base, sympy.Symbol("z")).is_irreducible)
    if isinstance(base, PrimeField):
        return bool(_to_sympy_poly(coeffs, base, sympy.Symbol("z")).is_irreducible)
    return f"irreducibility over {base.name} is not decided by the kernel"


def tower_degree(t):
    """Degree of the tower with its irreducibility certificate."""
    if not t.is_finite():
        return INF, Certificate(False, "transcendental-step")
    return t.degree(), t.certify()


def minpoly_in_tower(a):
    return minpoly(a)


# --- factorisation over number-field towers (Trager) ------------------------

def _sym_of(poly, syms):
    expr = sympy.Integer(0)
    for m, c in poly.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for v, e in m:
            term = term * syms[v[0]] ** e
        expr += term
    return expr


def _norm(g, t, Tsym, shift):
    """Norm down to Q[T] of g(T - shift) where g is a list of TowerElem."""
    syms = [sympy.Symbol(f"th{k}") for k in range(t.depth)]
    expr = sympy.Integer(0)
    shifted = Tsym - _sym_of(shift.poly, syms)
    for i, c in enumerate(g):
        expr += _sym_of(c.poly, syms) * shifted ** i
    expr = sympy.expand(expr)
    for k in range(t.depth - 1, -1, -1):
        m = _sym_of(t.steps[k].minpoly, syms)
        expr = sympy.resultant(sympy.expand(m), expr, syms[k])
        expr = sympy.expand(expr)
    return sympy.Poly(expr, Tsym, domain="QQ")


def factor_over_tower(g):
    """Monic irreducible factors (with multiplicity) of a polynomial with
    coefficients in a number-field tower.  ``g`` is a coefficient list of
    TowerElem, lowest degree first."""
    g = upoly.trim(g)
    if not g:
        raise KernelError("cannot factor the zero polynomial")
    t = g[0].tower
    if not isinstance(t.base, RationalField):
        raise KernelError("factorisation over towers needs base Q")
    g = upoly.monic(g)
    if len(g) == 1:
        return []
    sqf = upoly.gcd(g, upoly.derivative(g))
    if len(sqf) > 1:
        radical = upoly.divmod_(g, sqf)[0]
        facs = factor_over_tower(radical)
        out = []
        for f, _ in facs:
            mult = 0
            rest = g
            while True:
                q, r = upoly.divmod_(rest, f)
                if r:
                    break
                rest = q
                mult += 1
            out.append((f, mult))
        return out
    if t.depth == 0 or all(st.degree == 1 for st in t.steps):
        z = sympy.Symbol("z")
        coeffs = [c.poly.constant_coeff() if c.poly.is_constant() else None for c in g]
        if any(c is None for c in coeffs):
            coeffs = [t.reduce(c.poly).constant_coeff() for c in g]
        sp = _to_sympy_poly(coeffs, t.base, z)
        out = []
        for fac, mult in sp.factor_list()[1]:
            cs = [Fraction(int(x.p), int(x.q)) for x in reversed(fac.all_coeffs())]
            out.append((upoly.monic([t.elem(c) for c in cs]), mult))
        return out
    prim = t.primitive_element()
    if prim is None:
        raise KernelError("tower is not a field")
    a = prim[0]
    T = sympy.Symbol("T")
    for s in [0, 1, -1, 2, -2, 3, -3, 5, 7]:
        shift = a * s
        N = _norm(g, t, T, shift)
        if sympy.degree(sympy.gcd(N, N.diff(T)), T) > 0:
            continue
        shifted = upoly.compose(g, [-shift, t.one])
        out = []
        for fac, _ in N.factor_list()[1]:
            cs = [t.elem(Fraction(int(x.p), int(x.q))) for x in reversed(fac.all_coeffs())]
            h = upoly.gcd(shifted, cs)
            if len(h) > 1:
                out.append((upoly.monic(upoly.compose(h, [shift, t.one])), 1))
        return out
    raise KernelError("no squarefree norm found")


# --- modular step certificates ----------------------------------------------

def _small_primes(bound):
    sieve = [True] * (bound + 1)
    out = []
    for n in range(2, bound + 1):
        if sieve[n]:
            out.append(n)
            for m in range(n * n, bound + 1, n):
                sieve[m] = False
    return out


def _coeff_mod(c, base, p, tval):
    """Image of a base-field coefficient in F_p, or None if not p-integral."""
    if isinstance(base, RationalField):
        if c.denominator % p == 0:
            return None
        return c.numerator * pow(c.denominator, -1, p) % p
    # rational functions over Q in t
    num = 0
    for a in reversed(c.num):
        r = _coeff_mod(a, base.base, p, None)
        if r is None:
            return None
        num = (num * tval + r) % p
    den = 0
    for a in reversed(c.den):
        r = _coeff_mod(a, base.base, p, None)
        if r is None:
            return None
        den = (den * tval + r) % p
    if den == 0:
        return None
    return num * pow(den, -1, p) % p


def _univariate_mod(poly, k, point, base, p, tval):
    """Coefficients (low first) over F_p of the step-k polynomial with the
    earlier primitives replaced by ``point`` values."""
    d = poly.degree_in((k,))
    out = [0] * (d + 1)
    for m, c in poly.terms.items():
        cc = _coeff_mod(c, base, p, tval)
        if cc is None:
            return None
        e_top = 0
        for v, e in m:
            if v == (k,):
                e_top = e
            else:
                cc = cc * pow(point[v[0]], e, p) % p
        out[e_top] = (out[e_top] + cc) % p
    if out[-1] == 0:
        return None
    return out


def _roots_mod(coeffs, p):
    roots = []
    for a in range(p):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * a + c) % p
        if acc == 0:
            der = 0
            for i in range(len(coeffs) - 1, 0, -1):
                der = (der * a + i * coeffs[i]) % p
            roots.append((a, der != 0))
    return roots


def _irreducible_mod(coeffs, p):
    d = len(coeffs) - 1
    if d <= 3:
        return not _roots_mod(coeffs, p)
    z = sympy.Symbol("z")
    return bool(sympy.Poly(list(reversed(coeffs)), z, modulus=p).is_irreducible)


def modular_step_certificate(t, k, prime_bound=300, node_limit=400):
    """Search a prime p, values for the transcendental steps and simple
    F_p-roots of the earlier algebraic steps such that step k stays
    irreducible mod p.  Over the regular local ring at such a point this
    forces irreducibility over the field of the earlier steps (given those
    are already fields).  Returns the witness dict or None."""
    base = t.base
    if not (isinstance(base, RationalField) or
            (getattr(base, "has_t", False) and isinstance(base.base, RationalField))):
        return None
    steps = t.steps[: k + 1]
    for p in _small_primes(prime_bound)[1:]:
        tvals = [None] if isinstance(base, RationalField) else [2 % p, 3 % p, 5 % p]
        for tval in tvals:
            budget = [node_limit]
            found = _dfs_point(steps, k, 0, {}, base, p, tval, budget)
            if found is not None:
                return {"prime": p, "t": tval, "point": [found[i] for i in range(k)]}
    return None


def _dfs_point(steps, k, i, point, base, p, tval, budget):
    if budget[0] <= 0:
        return None
    budget[0] -= 1
    if i == k:
        g = _univariate_mod(steps[k].minpoly, k, point, base, p, tval)
        if g is not None and _irreducible_mod(g, p):
            return dict(point)
        return None
    st = steps[i]
    if st.minpoly is None:
        choices = [a for a in (1, 2, 3, 5, 7, 11) if a < p]
    else:
        g = _univariate_mod(st.minpoly, i, point, base, p, tval)
        if g is None:
            return None
        choices = [a for a, simple in _roots_mod(g, p) if simple]
    for a in choices:
        point[i] = a
        out = _dfs_point(steps, k, i + 1, point, base, p, tval, budget)
        if out is not None:
            return out
        del point[i]
    return None


def certify_steps(t):
    """Per-step irreducibility certificates for a tower (transcendental
    steps allowed).  Returns a Certificate; the method lists each step."""
    notes = []
    for k, st in enumerate(t.steps):
        if st.minpoly is None or st.degree == 1:
            continue
        w = modular_step_certificate(t, k)
        if w is None:
            return Certificate(False, "modular", [f"UnverifiedIrreducibility: step {st.name} not certified"])
        notes.append(f"{st.name}: irreducible mod {w['prime']}")
    return Certificate(True, "modular", notes)
