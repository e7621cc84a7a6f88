from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from sigma_kernel.errors import NotDivisible, TowerDegreeInfinite
from sigma_kernel.exact import QQ, GF, Membership, MultiPoly, PrimeField, ideal_membership
from sigma_kernel.exact.finite import FiniteField
from sigma_kernel.exact.tower import FieldTower, minpoly_in_tower, theta, tower_degree

X, Yv = (0,), (1,)
x = MultiPoly.var(X, QQ)
y = MultiPoly.var(Yv, QQ)
one = MultiPoly.const(1, QQ)
sx, sy = sympy.symbols("x y")


def to_sympy(p):
    return sum((sympy.Rational(c.numerator, c.denominator) *
                sympy.Mul(*[{X: sx, Yv: sy}[v] ** e for v, e in m]) for m, c in p.terms.items()),
               sympy.Integer(0))


monomials = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(monomials, st.integers(-4, 4), max_size=5).map(
    lambda d: sum((c * x ** i * y ** j for (i, j), c in d.items()), MultiPoly.zero(QQ)))


@settings(max_examples=60, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == MultiPoly.zero(QQ)


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_product_matches_sympy(a, b):
    assert sympy.expand(to_sympy(a * b) - to_sympy(a) * to_sympy(b)) == 0


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_exact_div_inverts_mul(a, b):
    if b:
        assert (a * b).exact_div(b) == a


def test_poly_arith_examples():
    assert not (x + (-x))
    assert (x + 1) * (x - 1) == x ** 2 - 1
    assert (x ** 3 + x ** 2 * y).exact_div(x ** 2) == x + y
    with pytest.raises(NotDivisible):
        (x ** 2 + 1).exact_div(x)


def test_rationals_stay_exact():
    p = MultiPoly.const(Fraction(1, 3), QQ) * x
    assert (p * 3) == x
    assert (p + p + p) == x


def test_prime_field_arithmetic():
    a = GF(3, 7)
    assert a * GF(5, 7) == GF(1, 7)
    assert a / GF(3, 7) == GF(1, 7)
    F = PrimeField(7)
    assert F.coerce(Fraction(1, 2)) * 2 == F.one


def test_membership_examples():
    assert ideal_membership([x], x ** 2).status is Membership.IN
    assert ideal_membership([x ** 2], x).status is Membership.NOT_IN
    res = ideal_membership([x ** 2 + y ** 2, x * y], x ** 3)
    assert res.status is Membership.IN
    gens = [x ** 2 + y ** 2, x * y]
    assert sum((c * g for c, g in zip(res.cofactors, gens)), MultiPoly.zero(QQ)) == x ** 3


@settings(max_examples=25, deadline=None)
@given(polys, polys, polys)
def test_membership_agrees_with_sympy(g1, g2, f):
    gens = [g for g in (g1, g2) if g]
    if not gens:
        return
    res = ideal_membership(gens, f)
    if res.status is Membership.UNDECIDED:
        return
    G = sympy.groebner([to_sympy(g) for g in gens], sx, sy, order="grlex")
    assert (res.status is Membership.IN) == G.contains(to_sympy(f))


def test_membership_monotone_in_effort():
    gens = [x ** 3 - y, y ** 2 - x]
    f = x ** 6 - x
    seen = [ideal_membership(gens, f, effort=e).status for e in (2, 4, 8, 24)]
    decided = [s for s in seen if s is not Membership.UNDECIDED]
    assert len(set(decided)) <= 1
    assert seen[-1] is Membership.IN
    assert all(b is Membership.IN for a, b in zip(seen, seen[1:]) if a is Membership.IN)


def T(k):
    return MultiPoly.var(theta(k), QQ)


def test_tower_degrees():
    assert tower_degree(FieldTower(QQ))[0] == 1
    t1 = FieldTower(QQ).extend("a", T(0) ** 2 - 2)
    assert tower_degree(t1)[0] == 2
    t2 = t1.extend("b", T(1) ** 2 - T(0))
    d, cert = tower_degree(t2)
    assert d == 4 and cert.verified
    assert tower_degree(FieldTower(QQ).extend("t", None))[0] == float("inf")


def _coeffs_to_sympy(cs, z):
    return sum((sympy.Rational(Fraction(c).numerator, Fraction(c).denominator) * z ** i
                for i, c in enumerate(cs)), sympy.Integer(0))


def test_minpoly_examples():
    t = FieldTower(QQ).extend("a", T(0) ** 2 - 2)
    a = t.gen(0)
    assert list(minpoly_in_tower(a)) == [-2, 0, 1]
    assert list(minpoly_in_tower(t.one)) == [-1, 1]
    assert list(minpoly_in_tower(a + 1)) == [-1, -2, 1]


def test_minpoly_matches_sympy_in_biquadratic():
    t = FieldTower(QQ).extend("a", T(0) ** 2 - 2).extend("b", T(1) ** 2 - 3)
    a, b = t.gen(0), t.gen(1)
    z = sympy.Symbol("z")
    for elem, expr in [(a + b, sympy.sqrt(2) + sympy.sqrt(3)), (a * b, sympy.sqrt(6)),
                       (a + b * b, sympy.sqrt(2) + 3)]:
        mine = _coeffs_to_sympy(minpoly_in_tower(elem), z)
        assert sympy.expand(mine - sympy.minimal_polynomial(expr, z)) == 0


def test_minpoly_annihilates_and_divides_degree():
    t = FieldTower(QQ).extend("a", T(0) ** 2 - 2).extend("b", T(1) ** 2 - T(0))
    b = t.gen(1)
    for elem in (b, b * b + b, b * b * b - 1):
        cs = minpoly_in_tower(elem)
        acc = t.zero
        for c in reversed(cs):
            acc = acc * elem + c
        assert not acc
        assert t.degree() % (len(cs) - 1) == 0


def test_minpoly_needs_finite_tower():
    t = FieldTower(QQ).extend("t", None)
    with pytest.raises(TowerDegreeInfinite):
        minpoly_in_tower(t.gen(0))


def test_finite_field_counts_and_frobenius():
    K = FiniteField(5, 2)
    elems = K.elements()
    assert len(elems) == 25
    fixed = [a for a in elems if K.frobenius(a) == a]
    assert len(fixed) == 5
