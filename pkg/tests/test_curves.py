import pytest
import sympy
from hypothesis import given, settings, strategies as st

from sigma_kernel.curves import (A, CLOSED, CurvePresentation, CurveRule, Divisor, Function,
                                 LocalValuation, Y, approximate, check_nonsingular,
                                 divisor_degree, enumerate_points_over, etale_localize,
                                 krull_check, principal_divisor, residue_limit_degree,
                                 sigma_quotient_bounded)
from sigma_kernel.errors import (InseparableMinimalPolynomial, InvalidPresentation,
                                 UniverseIncomplete, ZeroFunction)
from sigma_kernel.exact import QQ, MultiPoly

y = MultiPoly.var(Y, QQ)
a0 = MultiPoly.var(A(0), QQ)
PHI = {1: y - 1, 3: y ** 2 + y + 1, 5: y ** 4 + y ** 3 + y ** 2 + y + 1}

# x0^2 = y with σy = x0: every level is Q(s) for s the newest α
ROOTS = etale_localize(a0 ** 2 - y, a0, label="roots")
# x0^2 = y + 1 over σy = y^2
BENIGN = etale_localize(a0 ** 2 - y - 1, y ** 2, label="benign")


@pytest.fixture(scope="module")
def roots_universe():
    pts = [enumerate_points_over(ROOTS, PHI[n], depth=4)[0] for n in (1, 3, 5)]
    return pts, {x: LocalValuation(ROOTS, x) for x in pts}


def test_etale_localization_inverts_derivative():
    assert ROOTS.inverted == (2 * a0,)
    with pytest.raises(InseparableMinimalPolynomial):
        etale_localize(a0 ** 2, y)
    with pytest.raises(InvalidPresentation):
        CurvePresentation(2 * a0 ** 2 - y, y)


def test_fibers_of_the_roots_curve():
    assert len(enumerate_points_over(ROOTS, y - 1, depth=5)) == 1
    assert enumerate_points_over(ROOTS, y - 2, depth=5) == []
    for n in (3, 5):
        assert len(enumerate_points_over(ROOTS, PHI[n], depth=5)) == 1
    (zero,) = enumerate_points_over(ROOTS, y, depth=5)
    assert list(zero.choices) == [f"x@{i} = 0" for i in range(5)]


def test_point_ordering_is_canonical():
    a = enumerate_points_over(BENIGN, y, depth=4)
    b = enumerate_points_over(BENIGN, y, depth=4)
    assert [p.key for p in a] == [p.key for p in b]
    assert [p.sort_key() for p in a] == sorted(p.sort_key() for p in a)


def test_nonsingularity_verdicts():
    (zero,) = enumerate_points_over(ROOTS, y, depth=5)
    rep = check_nonsingular(ROOTS, zero)
    assert rep.verdict == "Singular" and rep.e_steps == [2] * 5
    assert rep.witness["value_group"] == "Z[1/2]"
    (one,) = enumerate_points_over(ROOTS, y - 1, depth=5)
    rep = check_nonsingular(ROOTS, one)
    assert rep.verdict == "DVRCertificate" and rep.e_steps == [1] * 5
    cusp = CurvePresentation(a0 ** 2 - y ** 3, y, mode=CLOSED, sigma_alpha=a0)
    (c,) = enumerate_points_over(cusp, y)
    assert check_nonsingular(cusp, c).verdict == "Singular"


def test_benign_fibers():
    for q in (y, y - 1, PHI[3]):
        pts = enumerate_points_over(BENIGN, q, depth=5)
        assert len(pts) == 2
        for x in pts:
            assert check_nonsingular(BENIGN, x).verdict == "DVRCertificate"
            assert LocalValuation(BENIGN, x)(q) == 1
            assert residue_limit_degree(x) == 1


def _oracle_valuation(g, n):
    s = sympy.Symbol("s")
    expr = sympy.expand(sum((sympy.Rational(c.numerator, c.denominator) *
                             sympy.Mul(*[(s ** 2 if v == Y else s) ** e for v, e in m])
                             for m, c in g.terms.items()), sympy.Integer(0)))
    factor = sympy.cyclotomic_poly(n, s)
    v = 0
    while sympy.rem(expr, factor, s) == 0:
        expr = sympy.quo(expr, factor, s)
        v += 1
    return v


small = st.dictionaries(st.tuples(st.integers(0, 2), st.integers(0, 1)), st.integers(-3, 3),
                        min_size=1, max_size=4)


@settings(max_examples=30, deadline=None)
@given(small, st.sampled_from([1, 3, 5]), st.integers(0, 2))
def test_valuation_matches_oracle(roots_universe, coeffs, n, k):
    g = sum((c * y ** i * a0 ** j for (i, j), c in coeffs.items()), MultiPoly.zero(QQ))
    g = g * PHI[n] ** k
    if not g:
        return
    pts, locs = roots_universe
    x = pts[[1, 3, 5].index(n)]
    assert locs[x](g) == _oracle_valuation(g, n)


def test_valuation_of_zero_raises(roots_universe):
    pts, locs = roots_universe
    with pytest.raises(ZeroFunction):
        locs[pts[0]](a0 ** 2 - y)


def test_sigma_quotient_is_integral(roots_universe):
    pts, locs = roots_universe
    for x in pts:
        for g in (a0 - 1, (y - 1) ** 2, y ** 2 + y + 1, a0 + y):
            assert sigma_quotient_bounded(ROOTS, locs[x], g)["holds"]


def test_principal_divisor_and_degree(roots_universe):
    pts, locs = roots_universe
    D = principal_divisor(ROOTS, Function(y - 1, PHI[3]), pts, locals_=locs)
    assert dict((p.key, n) for p, n in D.items()) == {pts[0].key: 1, pts[1].key: -1}
    assert divisor_degree(D) == 0
    with pytest.raises(UniverseIncomplete):
        principal_divisor(ROOTS, PHI[3], pts[:1])


def test_divisor_group(roots_universe):
    pts, _ = roots_universe
    D = Divisor({pts[0]: 2, pts[1]: -1})
    E = Divisor({pts[1]: 1})
    assert (D + E).support() == [pts[0]]
    assert D - D == Divisor()
    assert (2 * E).is_effective() and not D.is_effective()
    assert divisor_degree(D + E) == divisor_degree(D) + divisor_degree(E)


def test_approximation_small(roots_universe):
    pts, locs = roots_universe
    res = approximate(ROOTS, pts[:2], [2, -1], pts, locals_=locs)
    assert res.verified
    assert res.valuations[pts[0]] == 2 and res.valuations[pts[1]] == -1
    assert res.valuations[pts[2]] >= 0


def test_krull_conditions(roots_universe):
    pts, _ = roots_universe
    rep = krull_check(ROOTS, pts, [y - 1, PHI[3] * (y - 1)], [((y - 1) * a0, y - 1)])
    assert rep["DVR"]["status"] == "Holds"
    assert rep["FC"]["status"] == "Holds"
    assert rep["INT"]["status"] == "Holds"


def test_closed_presentations():
    neg = CurvePresentation(a0 ** 2 - y, y, mode=CLOSED, sigma_alpha=-a0)
    assert enumerate_points_over(neg, y - 1) == []
    assert enumerate_points_over(neg, y - 4) == []
    (z,) = enumerate_points_over(neg, y)
    assert list(z.fixed_by) == ["sigma"]
    two = CurvePresentation(a0 ** 2 - y, y, mode=CLOSED,
                            rules=[CurveRule("id", y, a0), CurveRule("neg", y, -a0)])
    pts = enumerate_points_over(two, y - 4)
    assert len(pts) == 2 and all(list(p.fixed_by) == ["id"] for p in pts)
    (z,) = enumerate_points_over(two, y)
    assert sorted(z.fixed_by) == ["id", "neg"]
    assert LocalValuation(two, z)(y) == 2
    with pytest.raises(InvalidPresentation):
        CurvePresentation(a0 ** 2 - y, y, mode=CLOSED, sigma_alpha=a0 + 1)
