"""Truncated power series κ[[u]] / (u^prec) over an exact field."""


class Series:
    """Coefficients are elements of ``field`` (anything with zero/one/coerce);
    everything from index ``prec`` on is unknown."""

    __slots__ = ("c", "field", "prec")

    def __init__(self, coeffs, field, prec):
        c = [field.coerce(x) for x in coeffs[:prec]]
        c += [field.zero] * (prec - len(c))
        self.c = c
        self.field = field
        self.prec = prec

    @classmethod
    def const(cls, a, field, prec):
        return cls([a], field, prec)

    @classmethod
    def param(cls, field, prec):
        return cls([field.zero, field.one], field, prec)

    def _co(self, other):
        if isinstance(other, Series):
            return other
        return Series([other], self.field, self.prec)

    def __add__(self, other):
        o = self._co(other)
        p = min(self.prec, o.prec)
        return Series([a + b for a, b in zip(self.c[:p], o.c[:p])], self.field, p)

    __radd__ = __add__

    def __neg__(self):
        return Series([-a for a in self.c], self.field, self.prec)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        if not isinstance(other, Series):
            a = self.field.coerce(other)
            return Series([x * a for x in self.c], self.field, self.prec)
        p = min(self.prec, other.prec)
        zero = self.field.zero
        out = [zero] * p
        for i, a in enumerate(self.c[:p]):
            if not a:
                continue
            for j in range(p - i):
                b = other.c[j]
                if b:
                    out[i + j] = out[i + j] + a * b
        return Series(out, self.field, p)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = Series.const(self.field.one, self.field, self.prec)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def valuation(self):
        """Index of the first nonzero coefficient, or None if zero to precision."""
        for i, a in enumerate(self.c):
            if a:
                return i
        return None

    def inverse(self):
        a0 = self.c[0]
        if not a0:
            raise ZeroDivisionError("series with zero constant term")
        inv0 = self.field.one / a0
        out = [inv0]
        for n in range(1, self.prec):
            s = self.field.zero
            for k in range(1, n + 1):
                if self.c[k]:
                    s = s + self.c[k] * out[n - k]
            out.append(-s * inv0)
        return Series(out, self.field, self.prec)

    def __truediv__(self, other):
        if isinstance(other, Series):
            return self * other.inverse()
        return self * (self.field.one / self.field.coerce(other))

    def compose(self, h):
        """self(h) for a series h with zero constant term."""
        if h.c[0]:
            raise ValueError("inner series must have zero constant term")
        p = min(self.prec, h.prec)
        acc = Series([], self.field, p)
        for a in reversed(self.c[:p]):
            acc = acc * h + a
        return acc

    def recast(self, field):
        return Series([field.coerce(a) for a in self.c], field, self.prec)

    def __eq__(self, other):
        return isinstance(other, Series) and self.c == other.c

    def __repr__(self):
        return f"Series({self.c!r}, prec={self.prec})"


def newton_root(coeffs, r0, field, prec):
    """Hensel lift of a simple root r0 of sum coeffs[k] T^k (coefficients are
    Series) to a Series with constant term r0."""
    T = Series.const(r0, field, prec)
    dcoeffs = [coeffs[k] * k for k in range(1, len(coeffs))]
    for _ in range(prec + 1):
        val = _horner(coeffs, T, field, prec)
        if val.valuation() is None:
            return T
        der = _horner(dcoeffs, T, field, prec)
        T = T - val / der
    return T


def _horner(coeffs, x, field, prec):
    acc = Series([], field, prec)
    for a in reversed(coeffs):
        acc = acc * x + a
    return acc
