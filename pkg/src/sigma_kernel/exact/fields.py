"""Coefficient fields: rationals, prime fields and rational functions in t."""

from fractions import Fraction
from functools import total_ordering

from . import upoly


def is_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


@total_ordering
class GF:
    """Residue modulo a prime p, stored in [0, p)."""

    __slots__ = ("v", "p")

    def __init__(self, v, p):
        if isinstance(v, Fraction):
            v = v.numerator * pow(v.denominator, -1, p)
        self.v = int(v) % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, GF):
            if other.p != self.p:
                raise ValueError("mixing prime fields")
            return other.v
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GF(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GF(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GF(o - self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GF(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return GF(-self.v, self.p)

    def inverse(self):
        if self.v == 0:
            raise ZeroDivisionError("inverse of 0 in GF(%d)" % self.p)
        return GF(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * GF(o, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return GF(o, self.p) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        return GF(pow(self.v, e, self.p), self.p)

    def __bool__(self):
        return self.v != 0

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return False
        return self.v == o

    def __lt__(self, other):
        return self.v < self._lift(other)

    def __hash__(self):
        return hash((self.v, self.p))

    def __repr__(self):
        return f"GF({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class RatFunc:
    """Reduced fraction num/den of univariate polynomials in t.

    The denominator is monic; num and den are coprime.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _reduced=False):
        num = upoly.trim(num)
        if den is None:
            one = num[0] / num[0] if num else None
            den = [one] if one is not None else None
        if den is None:
            self.num, self.den = [], None
            return
        den = upoly.trim(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if not num:
            self.num, self.den = [], [den[-1] / den[-1]]
            return
        if not _reduced:
            g = upoly.gcd(num, den)
            if len(g) > 1:
                num = upoly.divmod_(num, g)[0]
                den = upoly.divmod_(den, g)[0]
            lc = den[-1]
            if lc != 1:
                num = [c / lc for c in num]
                den = [c / lc for c in den]
        self.num, self.den = num, den

    @classmethod
    def const(cls, c, one):
        return cls([one * c], [one], _reduced=True) if c else cls([], [one])

    def _one(self):
        if self.den:
            return self.den[-1]
        return None

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, (int, Fraction, GF)):
            one = self._one()
            if one is None:
                one = Fraction(1) if not isinstance(other, GF) else GF(1, other.p)
            return RatFunc.const(other, one)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self.num:
            return o
        if not o.num:
            return self
        if self.den == o.den:
            return RatFunc(upoly.add(self.num, o.num), self.den)
        num = upoly.add(upoly.mul(self.num, o.den), upoly.mul(o.num, self.den))
        return RatFunc(num, upoly.mul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(upoly.neg(self.num), self.den, _reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not self.num or not o.num:
            return RatFunc([], self.den or o.den)
        return RatFunc(upoly.mul(self.num, o.num), upoly.mul(self.den, o.den))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        out = RatFunc.const(1, self._one())
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, RatFunc) else other
        if o is NotImplemented:
            return False
        return self.num == o.num and (not self.num or self.den == o.den)

    def __hash__(self):
        return hash((tuple(self.num), tuple(self.den or ())))

    def is_constant(self):
        return len(self.num) <= 1 and len(self.den) == 1

    def constant_value(self):
        return self.num[0] if self.num else self.den[0] * 0

    def substitute(self, t_image):
        """Apply t -> t_image (a RatFunc) to numerator and denominator."""
        num = _compose_rf(self.num, t_image)
        den = _compose_rf(self.den, t_image)
        return num / den

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"


def _compose_rf(coeffs, t_image):
    acc = t_image * 0
    for c in reversed(coeffs):
        acc = acc * t_image + c
    return acc


def render_upoly(coeffs, var="t", render_coeff=str):
    if not coeffs:
        return "0"
    parts = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        parts.append((c, i))
    text = ""
    for idx, (c, i) in enumerate(parts):
        s = render_coeff(c)
        negative = s.startswith("-")
        mag = s[1:] if negative else s
        if i == 0:
            term = mag
        else:
            mono = var if i == 1 else f"{var}^{i}"
            term = mono if mag == "1" else f"{mag}*{mono}"
        if idx == 0:
            text = ("-" if negative else "") + term
        else:
            text += (" - " if negative else " + ") + term
    return text or "0"


class Field:
    """Descriptor for a coefficient field."""

    name = "field"
    char = 0
    has_t = False

    def __call__(self, x):
        return self.coerce(x)

    def render(self, c):
        raise NotImplementedError


class RationalField(Field):
    name = "Q"
    char = 0

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def coerce(self, x):
        if isinstance(x, GF):
            raise TypeError("cannot coerce prime-field residue into Q")
        return Fraction(x)

    def render(self, c):
        c = Fraction(c)
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField(Field):
    def __init__(self, p):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.char = p
        self.name = f"F_{p}"

    @property
    def zero(self):
        return GF(0, self.p)

    @property
    def one(self):
        return GF(1, self.p)

    def coerce(self, x):
        return GF(x, self.p) if not isinstance(x, GF) else x

    def render(self, c):
        return str(self.coerce(c).v)

    def elements(self):
        return [GF(i, self.p) for i in range(self.p)]

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return self.name


class FunctionField(Field):
    """Rational functions k(t) over Q or a prime field."""

    has_t = True

    def __init__(self, base):
        self.base = base
        self.char = base.char
        self.name = f"{base.name}(t)"

    @property
    def zero(self):
        return RatFunc([], [self.base.one], _reduced=True)

    @property
    def one(self):
        return RatFunc([self.base.one], [self.base.one], _reduced=True)

    @property
    def t(self):
        return RatFunc([self.base.zero, self.base.one], [self.base.one], _reduced=True)

    def coerce(self, x):
        if isinstance(x, RatFunc):
            return x
        return RatFunc.const(self.base.coerce(x), self.base.one)

    def render(self, c):
        c = self.coerce(c)
        num = render_upoly(c.num, "t", self.base.render)
        if c.den == [self.base.one]:
            if len([a for a in c.num if a]) > 1:
                return f"({num})"
            return num
        den = render_upoly(c.den, "t", self.base.render)
        return f"({num})/({den})"

    def __eq__(self, other):
        return isinstance(other, FunctionField) and other.base == self.base

    def __hash__(self):
        return hash(("k(t)", self.base))

    def __repr__(self):
        return self.name


QQ = RationalField()
