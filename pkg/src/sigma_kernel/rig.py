"""The rig N ∪ {∞}[L] modulo ≈, where σ-degrees live.

An element is represented by its class: the leading coefficient (the limit
degree) and the exponent of L (the total dimension).  Addition keeps the
term of higher L-degree, adding coefficients when the degrees agree.
"""

import math
from dataclasses import dataclass
from enum import Enum

INF = math.inf


class Cmp(Enum):
    LT = "LT"
    EQ = "EQ"
    GT = "GT"


def _check_coeff(c):
    if c == INF:
        return INF
    if isinstance(c, bool) or not isinstance(c, int) or c < 0:
        raise ValueError(f"coefficient must be a natural number or inf, got {c!r}")
    return c


@dataclass(frozen=True, order=False)
class SigmaDegree:
    coeff: object = 0
    ldeg: int = 0

    def __post_init__(self):
        c = _check_coeff(self.coeff)
        if isinstance(self.ldeg, bool) or not isinstance(self.ldeg, int) or self.ldeg < 0:
            raise ValueError(f"L-degree must be a natural number, got {self.ldeg!r}")
        object.__setattr__(self, "coeff", c)
        if c == 0:
            object.__setattr__(self, "ldeg", 0)

    @property
    def dl(self):
        return self.coeff

    @property
    def dt(self):
        return self.ldeg

    def is_zero(self):
        return self.coeff == 0

    def __add__(self, other):
        return rig_add(self, other)

    def __mul__(self, other):
        return rig_mul(self, other)

    def __lt__(self, other):
        return rig_cmp(self, other) is Cmp.LT

    def __le__(self, other):
        return rig_cmp(self, other) is not Cmp.GT

    def __gt__(self, other):
        return rig_cmp(self, other) is Cmp.GT

    def __ge__(self, other):
        return rig_cmp(self, other) is not Cmp.LT

    def render(self):
        c = "inf" if self.coeff == INF else str(self.coeff)
        return f"{c}*L^{self.ldeg}"

    def __str__(self):
        return self.render()

    def to_dict(self):
        return {"dl": "inf" if self.coeff == INF else self.coeff, "dt": self.ldeg, "text": self.render()}


ZERO = SigmaDegree(0, 0)
ONE = SigmaDegree(1, 0)
L = SigmaDegree(1, 1)


def rig_add(a, b):
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    if a.ldeg != b.ldeg:
        return a if a.ldeg > b.ldeg else b
    return SigmaDegree(a.coeff + b.coeff, a.ldeg)


def rig_mul(a, b):
    if a.is_zero() or b.is_zero():
        return ZERO
    return SigmaDegree(a.coeff * b.coeff, a.ldeg + b.ldeg)


def rig_cmp(a, b):
    ka = (a.ldeg, a.coeff)
    kb = (b.ldeg, b.coeff)
    if ka == kb:
        return Cmp.EQ
    return Cmp.LT if ka < kb else Cmp.GT


def parse_degree(text):
    """Inverse of ``render``: "2*L^1" -> SigmaDegree(2, 1)."""
    c, _, d = text.partition("*L^")
    coeff = INF if c == "inf" else int(c)
    return SigmaDegree(coeff, int(d or 0))
