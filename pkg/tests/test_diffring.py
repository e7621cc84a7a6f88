import itertools

import pytest
from hypothesis import given, settings, strategies as st

from sigma_kernel.diffring import (DiffGroundField, DiffPolyRing, DiffRingPresentation,
                                   SigmaIdealPresentation, SigmaRule, SigmaSet, is_fixed_prime,
                                   perfect_close, rational_points, sigma_close, truncate,
                                   well_mixed_close)
from sigma_kernel.errors import KernelError
from sigma_kernel.exact import QQ, FunctionField, Membership, PrimeField, ideal_membership
from sigma_kernel.exact.finite import FiniteField
from sigma_kernel.parse import parse_expression

QR = DiffPolyRing(DiffGroundField(QQ), ["x"])
XY = DiffPolyRing(DiffGroundField(QQ), ["x", "y"])
F5R = DiffPolyRing(DiffGroundField(PrimeField(5), "frobenius"), ["x"])


def P(s, ring=QR):
    return parse_expression(s, ring)


def ideal(ring, *gens):
    return SigmaIdealPresentation(ring, tuple(P(g, ring) for g in gens))


def pres(ring, *rels):
    return DiffRingPresentation(ring, ideal(ring, *rels))


def norm(gens):
    return {g.monic() for g in gens if g}


def contains(I, s):
    return ideal_membership(list(I.gens), P(s, I.ring)).status is Membership.IN


def test_sigma_apply_examples():
    assert XY.sigma_apply(XY.var(1, 0)) == XY.var(1, 1)
    assert QR.sigma_apply(P("x@0^2 + 2")) == P("x@1^2 + 2")
    assert F5R.sigma_apply(P("2*x@0", F5R)) == P("2*x@1", F5R)


def test_sigma_apply_moves_coefficients():
    ring = DiffPolyRing(DiffGroundField(FunctionField(QQ), "shift"), ["x"])
    assert ring.sigma_apply(P("t*x@0", ring)) == P("(t + 1)*x@1", ring)


QT = DiffPolyRing(DiffGroundField(FunctionField(QQ), "scale", q=2), ["x", "y"])
atoms = st.sampled_from(["x@0", "x@1", "y@0", "t", "1", "t*y@2", "2"])
exprs = st.lists(st.tuples(atoms, atoms, st.integers(-2, 2)), min_size=1, max_size=3).map(
    lambda ts: " + ".join(f"({c})*{a}*{b}" for a, b, c in ts))


@settings(max_examples=40, deadline=None)
@given(exprs, exprs)
def test_sigma_is_a_ring_homomorphism(a, b):
    f, g = P(a, QT), P(b, QT)
    s = QT.sigma_apply
    assert s(f + g) == s(f) + s(g)
    assert s(f * g) == s(f) * s(g)


def test_sigma_close_examples():
    assert norm(sigma_close(ideal(QR, "x@0"), 2).gens) == norm([P("x@0"), P("x@1"), P("x@2")])
    got = norm(sigma_close(ideal(QR, "x@1 - x@0^2"), 1).gens)
    assert got == norm([P("x@1 - x@0^2"), P("x@2 - x@1^2")])
    assert sigma_close(SigmaIdealPresentation(QR, ()), 3).gens == ()


def test_well_mixed_examples():
    W = well_mixed_close(ideal(XY, "x@0*y@0"), 1)
    assert contains(W, "x@0*y@1") and contains(W, "x@1*y@0")
    assert contains(well_mixed_close(ideal(QR, "x@0^2"), 1), "x@0*x@1")
    W = well_mixed_close(ideal(QR, "x@1 - x@0^2"), 1)
    assert norm(W.gens) == norm(sigma_close(ideal(QR, "x@1 - x@0^2"), 1).gens)


def test_perfect_examples():
    assert contains(perfect_close(ideal(QR, "x@0^2"), 1), "x@0")
    assert contains(perfect_close(ideal(QR, "x@0*x@1"), 1), "x@0")
    C = perfect_close(ideal(QR, "x@1 - x@0^2"), 2)
    assert not contains(C, "x@0")
    # x = 1 solves σx = x² and every generator of the closure
    ones = {v: 1 for v in QR.variables_upto(6)}
    assert all(g.evaluate(ones) == 0 for g in C.gens)


def test_closures_are_monotone_and_idempotent():
    for close in (lambda I: sigma_close(I, 2), lambda I: well_mixed_close(I, 2),
                  lambda I: perfect_close(I, 2)):
        I = ideal(QR, "x@0*x@1", "x@1 - x@0^2")
        C = close(I)
        assert norm(I.gens) <= norm(C.gens)
        assert norm(close(C).gens) == norm(C.gens)


def test_fixed_primes_under_negation():
    R = pres(QR, "x@1 + x@0")
    assert is_fixed_prime(ideal(QR, "x@0"), R)[0] == "Fixed"
    assert is_fixed_prime(ideal(QR, "x@0 - 1"), R)[0] == "NotFixed"
    assert is_fixed_prime(ideal(QR, "x@0^2 - 2"), R)[0] == "Fixed"


def brute_points(rels, K, n=1):
    """Exhaustive search using the field's own power map."""
    sols = []
    for tup in itertools.product(K.elements(), repeat=n):
        vals = {}
        for j, a in enumerate(tup):
            b = a
            for i in range(3):
                vals[(j, i)] = b
                b = b ** K.p
        if all(not g.map_coeffs(K.prime.coerce, K.prime).evaluate(vals, K.one) for g in rels):
            sols.append(tup)
    return sols


def test_rational_points_examples():
    R = pres(QR, "x@1 - x@0^2")
    F5 = FiniteField(5)
    pts = rational_points(R, F5)
    assert [F5.render(a) for (a,) in pts] == ["0", "1"]
    assert len(rational_points(R, FiniteField(5, 2))) == 4
    assert len(rational_points(pres(QR), F5)) == 5
    assert len(brute_points(R.relations, FiniteField(5, 2))) == 4


def test_perfect_containment_implies_solution_containment():
    # {x0^2} and {x@1 - x@0^2} close to something containing x0
    I = ideal(QR, "x@1 - x@0^2", "x@0^2")
    C = perfect_close(I, 2)
    assert contains(C, "x@0")
    K = FiniteField(5, 2)
    sols_I = set(rational_points(DiffRingPresentation(QR, I), K))
    sols_J = set(rational_points(pres(QR, "x@1 - x@0^2", "x@0"), K))
    assert sols_I <= sols_J


def test_truncate_examples():
    R = pres(QR, "x@1 - x@0^2")
    T = truncate(R, 2)
    assert norm(T.gens) == norm([P("x@1 - x@0^2"), P("x@2 - x@1^2")])
    assert norm(truncate(pres(QR, "x@0^2 - 2", "x@1 - x@0"), 0).gens) == norm([P("x@0^2 - 2")])
    assert norm(truncate(R, 3).gens) >= norm(T.gens)


def test_sigma_set_axioms_checked():
    ring = QR
    ident = SigmaRule("id", (P("x@0"),))
    neg = SigmaRule("neg", (P("-x@0"),))
    table = {(i, j): i for i in range(2) for j in range(2)}
    R = DiffRingPresentation(ring, ideal(ring, "x@0^2 - 2"), SigmaSet([ident, neg], table))
    assert R.sigma_set.checked
    with pytest.raises(KernelError):
        DiffRingPresentation(ring, ideal(ring, "x@0^2 - 2"), SigmaSet([ident, neg], {(0, 0): 0}))
