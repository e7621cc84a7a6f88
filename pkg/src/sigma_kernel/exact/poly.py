"""Sparse multivariate polynomials with exact coefficients.

Monomials are tuples of ``(variable, exponent)`` pairs sorted by variable in
decreasing order, so plain tuple comparison is the lexicographic order with
the largest variable most significant.  Variables are arbitrary comparable
keys (the difference-ring layer uses ``(generator_index, shift)``).
"""

from ..errors import NotDivisible

ONE = ()


def mono_mul(a, b):
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items(), reverse=True))


def mono_div(a, b):
    """a / b, or None if b does not divide a."""
    d = dict(a)
    for v, e in b:
        have = d.get(v, 0)
        if have < e:
            return None
        if have == e:
            del d[v]
        else:
            d[v] = have - e
    return tuple(sorted(d.items(), reverse=True))


def mono_lcm(a, b):
    d = dict(a)
    for v, e in b:
        if e > d.get(v, 0):
            d[v] = e
    return tuple(sorted(d.items(), reverse=True))


def mono_deg(m):
    return sum(e for _, e in m)


def mono_coprime(a, b):
    va = {v for v, _ in a}
    return not any(v in va for v, _ in b)


def grlex(m):
    return (mono_deg(m), m)


def lex(m):
    return m


def block_order(*blocks):
    """Elimination order: each block (a predicate on variables) graded within
    itself; earlier blocks dominate later ones.  Variables matching no
    predicate fall into a final block."""

    def key(m):
        parts = []
        rest = m
        for pred in blocks:
            inside = tuple(p for p in rest if pred(p[0]))
            rest = tuple(p for p in rest if not pred(p[0]))
            parts.append((mono_deg(inside), inside))
        parts.append((mono_deg(rest), rest))
        return tuple(parts)

    return key


class MultiPoly:
    __slots__ = ("terms", "field", "_hash")

    def __init__(self, terms, field):
        self.terms = {m: c for m, c in terms.items() if c}
        self.field = field
        self._hash = None

    # construction
    @classmethod
    def zero(cls, field):
        return cls({}, field)

    @classmethod
    def const(cls, c, field):
        return cls({ONE: field.coerce(c)}, field)

    @classmethod
    def var(cls, v, field, exp=1):
        return cls({((v, exp),): field.one}, field)

    def _promote(self, other):
        if isinstance(other, MultiPoly):
            return other
        return MultiPoly.const(other, self.field)

    # arithmetic
    def __add__(self, other):
        other = self._promote(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            if m in out:
                s = out[m] + c
                if s:
                    out[m] = s
                else:
                    del out[m]
            else:
                out[m] = c
        return MultiPoly(out, self.field)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({m: -c for m, c in self.terms.items()}, self.field)

    def __sub__(self, other):
        return self + (-self._promote(other))

    def __rsub__(self, other):
        return self._promote(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = self.field.coerce(other)
            if not c:
                return MultiPoly({}, self.field)
            return MultiPoly({m: a * c for m, a in self.terms.items()}, self.field)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                s = out.get(m)
                out[m] = c1 * c2 if s is None else s + c1 * c2
        return MultiPoly(out, self.field)

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            raise ValueError("negative power of a polynomial")
        out = MultiPoly.const(1, self.field)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def mul_term(self, mono, coeff):
        return MultiPoly({mono_mul(m, mono): c * coeff for m, c in self.terms.items()}, self.field)

    # comparison
    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            other = self._promote(other)
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return not self.terms or set(self.terms) == {ONE}

    def constant_coeff(self):
        return self.terms.get(ONE, self.field.zero)

    # structure
    def variables(self):
        vs = set()
        for m in self.terms:
            for v, _ in m:
                vs.add(v)
        return vs

    def total_degree(self):
        if not self.terms:
            return -1
        return max(mono_deg(m) for m in self.terms)

    def degree_in(self, v):
        if not self.terms:
            return -1
        return max(dict(m).get(v, 0) for m in self.terms)

    def coeffs_in(self, v):
        """Return {exponent: coefficient polynomial} with respect to v."""
        out = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.pop(v, 0)
            rest = tuple(sorted(d.items(), reverse=True))
            out.setdefault(e, {})[rest] = c
        return {e: MultiPoly(t, self.field) for e, t in out.items()}

    def leading(self, order=grlex):
        m = max(self.terms, key=order)
        return m, self.terms[m]

    def sorted_terms(self, order=grlex):
        return sorted(self.terms.items(), key=lambda mc: order(mc[0]), reverse=True)

    def monic(self, order=grlex):
        _, c = self.leading(order)
        return self * (self.field.one / c)

    # transformation
    def map_coeffs(self, fn, field=None):
        field = field or self.field
        return MultiPoly({m: fn(c) for m, c in self.terms.items()}, field)

    def rename(self, fn):
        """Apply a variable renaming (must be injective on occurring vars)."""
        out = {}
        for m, c in self.terms.items():
            d = {}
            for v, e in m:
                w = fn(v)
                d[w] = d.get(w, 0) + e
            out[tuple(sorted(d.items(), reverse=True))] = c
        return MultiPoly(out, self.field)

    def evaluate(self, values, one=None):
        """Substitute every variable by an element of some ring.

        ``values`` maps variable -> ring element (anything supporting + and *
        with the coefficients).  Missing variables raise KeyError.
        """
        cache = {}
        acc = None
        for m, c in self.terms.items():
            term = c
            for v, e in m:
                key = (v, e)
                if key not in cache:
                    cache[key] = values[v] ** e
                term = cache[key] * term
            acc = term if acc is None else acc + term
        if acc is None:
            return (one * 0) if one is not None else self.field.zero
        return acc

    def substitute(self, mapping):
        """Substitute some variables by polynomials; others stay."""
        out = MultiPoly({}, self.field)
        cache = {}
        for m, c in self.terms.items():
            term = MultiPoly({ONE: c}, self.field)
            keep = []
            for v, e in m:
                if v in mapping:
                    key = (v, e)
                    if key not in cache:
                        cache[key] = self._promote(mapping[v]) ** e
                    term = term * cache[key]
                else:
                    keep.append((v, e))
            out = out + term.mul_term(tuple(keep), self.field.one)
        return out

    def derivative(self, v):
        out = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(v, 0)
            if e == 0:
                continue
            if e == 1:
                del d[v]
            else:
                d[v] = e - 1
            cc = c * e
            if cc:
                out[tuple(sorted(d.items(), reverse=True))] = cc
        return MultiPoly(out, self.field)

    # division
    def divide_by(self, divisors, order=grlex):
        """Multivariate division.  Returns (quotients, remainder)."""
        quots = [MultiPoly({}, self.field) for _ in divisors]
        leads = [d.leading(order) for d in divisors]
        p = dict(self.terms)
        rem = {}
        while p:
            m = max(p, key=order)
            c = p[m]
            for i, (lm, lc) in enumerate(leads):
                q = mono_div(m, lm)
                if q is None:
                    continue
                f = c / lc
                quots[i].terms[q] = quots[i].terms.get(q, self.field.zero) + f
                for dm, dc in divisors[i].terms.items():
                    mm = mono_mul(dm, q)
                    s = p.get(mm, self.field.zero) - f * dc
                    if s:
                        p[mm] = s
                    else:
                        p.pop(mm, None)
                break
            else:
                rem[m] = c
                del p[m]
        quots = [MultiPoly(q.terms, self.field) for q in quots]
        return quots, MultiPoly(rem, self.field)

    def normal_form(self, divisors, order=grlex):
        return self.divide_by(divisors, order)[1]

    def exact_div(self, other, order=grlex):
        (q,), r = self.divide_by([other], order)
        if r:
            raise NotDivisible("polynomial is not divisible", remainder=r)
        return q

    def __repr__(self):
        return f"MultiPoly({self.terms!r})"
