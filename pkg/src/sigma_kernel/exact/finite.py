"""Finite fields F_{p^m} as one-step towers over F_p, with Frobenius."""

from itertools import product

import sympy

from .fields import PrimeField
from .poly import MultiPoly
from .tower import FieldTower


def irreducible_modulus(p, m):
    """First monic irreducible polynomial of degree m over F_p in the
    order of increasing coefficient vectors (constant term first)."""
    z = sympy.Symbol("z")
    for tail in product(range(p), repeat=m):
        if tail[0] == 0 and m > 1:
            continue
        coeffs = list(tail) + [1]
        if sympy.Poly(list(reversed(coeffs)), z, modulus=p).is_irreducible:
            return coeffs
    raise ValueError(f"no irreducible polynomial of degree {m} over F_{p}")


class FiniteField:
    """F_{p^m} with elements as tower elements in one primitive ``w``."""

    def __init__(self, p, m=1):
        self.p, self.m = p, m
        self.prime = PrimeField(p)
        if m == 1:
            self.tower = FieldTower(self.prime)
            self.modulus = None
        else:
            self.modulus = irreducible_modulus(p, m)
            w = MultiPoly.var((0,), self.prime)
            mp = MultiPoly.zero(self.prime)
            for e, c in enumerate(self.modulus):
                if c:
                    mp = mp + (w ** e) * c if e else mp + c
            self.tower = FieldTower(self.prime).extend("w", mp)
        self.order = p ** m

    @property
    def name(self):
        return f"F_{self.order}"

    @property
    def zero(self):
        return self.tower.zero

    @property
    def one(self):
        return self.tower.one

    def coerce(self, x):
        return self.tower.elem(x)

    def from_vector(self, vec):
        acc = self.tower.zero
        w = self.tower.gen(0) if self.m > 1 else None
        for e, c in enumerate(vec):
            if c:
                acc = acc + (w ** e) * c if e else acc + c
        return acc

    def to_vector(self, a):
        vec = [0] * self.m
        for mono, c in a.poly.terms.items():
            e = mono[0][1] if mono else 0
            vec[e] = c.v
        return tuple(vec)

    def elements(self):
        """All elements, ordered lexicographically by coordinate vector
        (highest power of w most significant)."""
        out = []
        for vec in product(range(self.p), repeat=self.m):
            out.append(self.from_vector(tuple(reversed(vec))))
        return out

    def frobenius(self, a, r=1):
        for _ in range(r):
            a = a ** self.p
        return a

    def sort_key(self, a):
        return tuple(reversed(self.to_vector(a)))

    def render(self, a):
        from .fields import render_upoly
        return render_upoly(list(self.to_vector(a)), "w")

    def __repr__(self):
        return self.name
