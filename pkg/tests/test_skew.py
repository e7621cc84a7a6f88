import random

import pytest
from hypothesis import given, settings, strategies as st

from sigma_kernel.diffring import DiffGroundField
from sigma_kernel.errors import SemilinearityViolation
from sigma_kernel.exact import QQ, FunctionField, PrimeField
from sigma_kernel.skew import FinDimSigmaModule, SkewPoly, nakayama_check

QT = FunctionField(QQ)
SHIFT = DiffGroundField(QT, "shift")
t = QT.t
F5 = PrimeField(5)
FROB = DiffGroundField(F5, "frobenius")


def test_defining_relation():
    x = SkewPoly.x(SHIFT)
    assert x * SkewPoly.const(t, SHIFT) == SkewPoly([QT.zero, t + 1], SHIFT)
    Q = DiffGroundField(QQ)
    xq = SkewPoly.x(Q)
    assert xq * SkewPoly.const(3, Q) == SkewPoly.const(3, Q) * xq


def test_shift_field_product():
    x = SkewPoly.x(SHIFT)
    T = SkewPoly.const(t, SHIFT)
    assert (x + T) * (x - T) == x * x - x - T * T


coeffs = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=3)


def skew(cs):
    return SkewPoly([a * t + b for a, b in cs], SHIFT)


@settings(max_examples=40, deadline=None)
@given(coeffs, coeffs, coeffs)
def test_associative_and_distributive(a, b, c):
    f, g, h = skew(a), skew(b), skew(c)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert (f + g) * h == f * h + g * h
    if f and g:
        assert (f * g).degree == f.degree + g.degree


def zero_matrix(n):
    return [[F5.zero] * n for _ in range(n)]


def identity(n):
    return [[F5.one if i == j else F5.zero for j in range(n)] for i in range(n)]


def test_zero_and_trivial_modules():
    assert nakayama_check(FinDimSigmaModule(FROB, 0, [])).verdict == "Verified"
    M = FinDimSigmaModule(FROB, 1, [zero_matrix(1)], identity(1), [{(1,): F5.one}])
    r = nakayama_check(M)
    assert r.verdict == "Verified" and r.mM_dim == 0


def test_non_semilinear_shift_rejected():
    A = [[F5.zero, F5.one], [F5.zero, F5.zero]]
    S = [[F5.one, F5.zero], [F5.zero, F5(2)]]
    M = FinDimSigmaModule(FROB, 2, [A], S, [{(1,): F5.one}])
    with pytest.raises(SemilinearityViolation):
        nakayama_check(M)


def test_invertible_action_is_caught():
    # an invertible action is not an action of a maximal ideal; the
    # implication then fails and the check must say so
    M = FinDimSigmaModule(FROB, 1, [identity(1)])
    assert nakayama_check(M).verdict == "Counterexample"


def test_random_nilpotent_instances():
    rng = random.Random(5)
    for _ in range(20):
        n = rng.randint(1, 4)
        N = [[F5(rng.randrange(5)) if j > i else F5.zero for j in range(n)] for i in range(n)]
        M = FinDimSigmaModule(FROB, n, [N], identity(n), [{(1,): F5.one}])
        assert nakayama_check(M).verdict == "Verified"
