import pytest

import oracles
from sigma_kernel.diffring import DiffGroundField, DiffPolyRing, SigmaIdealPresentation, perfect_close
from sigma_kernel.errors import BaseMismatch, MonotonicityViolation, PositiveSigmaDimension
from sigma_kernel.exact import QQ, FunctionField, PrimeField
from sigma_kernel.extensions import (ExtensionTower, component_degree_sum, compose_towers,
                                     degree_sequence, from_ideal, is_sigma_separable, limit_degree,
                                     sigma_degree, transcendence_profile, trivial_over)
from sigma_kernel.parse import parse_expression
from sigma_kernel.rig import SigmaDegree

G = DiffGroundField(QQ)
R1 = DiffPolyRing(G, ["x"])
R2 = DiffPolyRing(G, ["x", "y"])


def tower(ring, *rels, base=0):
    return ExtensionTower(ring, [parse_expression(r, ring) for r in rels], base)


CASES = [
    ("x@1^2 - x@0", {"x_0"}, 2, SigmaDegree(2, 1)),
    ("x@1 - x@0^2", {"x_0"}, 1, SigmaDegree(1, 1)),
    ("x@2 - x@0", {"x_0", "x_1"}, 1, SigmaDegree(1, 2)),
]


@pytest.mark.parametrize("rel,trans,dl,dd", CASES)
def test_degree_sequence_matches_oracle(rel, trans, dl, dd):
    E = tower(R1, rel)
    seq = degree_sequence(E, 4)
    assert seq.values == oracles.degree_sequence([rel], ["x"], 4, trans)
    assert limit_degree(E, 4)[0] == dl
    assert sigma_degree(E, 5).dd == dd


def test_transcendence_profiles():
    assert transcendence_profile(tower(R1, "x@1 - x@0^2"), 4)[:2] == (1, 0)
    assert transcendence_profile(tower(R1, "x@2 - x@0"), 4)[:2] == (2, 0)
    free = ExtensionTower(R1, [])
    trdeg, sigma_trdeg, incs = transcendence_profile(free, 4)
    assert sigma_trdeg == 1 and set(incs) == {1}
    with pytest.raises(PositiveSigmaDimension):
        sigma_degree(free, 4)


def test_stabilization_window_reported():
    seq = degree_sequence(tower(R1, "x@1^2 - x@0"), 4)
    assert seq.window == (1, 4)
    assert degree_sequence(tower(R1, "x@2 - x@0"), 4).window == (2, 4)


def test_increasing_sequence_is_rejected():
    E = tower(R1, "x@1 - x@0^2")
    E.level_degree = lambda k: {1: 1, 2: 2}.get(k, 2)
    with pytest.raises(MonotonicityViolation):
        degree_sequence(E, 3)


COMPOSITES = [
    ("x@1^2 - x@0", "y@1^2 - y@0*x@0"),
    ("x@1 - x@0^2", "y@1^2 - y@0"),
    ("x@1^2 - x@0", "y@1 - y@0^2 - x@0"),
    ("x@2 - x@0", "y@1^2 - y@0"),
]


@pytest.mark.parametrize("lower,upper", COMPOSITES)
def test_dd_is_multiplicative_in_towers(lower, upper):
    E1 = tower(R1, lower)
    E2 = tower(R2, lower, upper, base=1)
    whole = compose_towers(E1, E2)
    assert sigma_degree(whole, 5).dd == sigma_degree(E1, 5).dd * sigma_degree(E2, 5).dd


def test_compose_with_trivial():
    E = tower(R1, "x@1^2 - x@0")
    dd = sigma_degree(E, 5).dd
    assert sigma_degree(compose_towers(E, trivial_over(E)), 5).dd == dd
    with pytest.raises(BaseMismatch):
        compose_towers(E, tower(R2, "y@1^2 - y@0", base=1))


def test_generator_independence():
    # z = x + 1 generates the same extension as x with (σx)^2 = x
    assert limit_degree(tower(R1, "(x@1 - 1)^2 - (x@0 - 1)"), 5)[0] == 2
    assert limit_degree(tower(R1, "x@1^2 - x@0"), 5)[0] == 2


def test_component_degree_sum():
    L = SigmaDegree(1, 1)
    assert component_degree_sum([L, L]) == SigmaDegree(2, 1)
    assert component_degree_sum([SigmaDegree(2, 1), SigmaDegree(3, 0)]) == SigmaDegree(2, 1)
    assert component_degree_sum([]) == SigmaDegree(0, 0)


def test_separability_flags():
    assert is_sigma_separable(tower(R1, "x@1^2 - x@0")) == "Yes"
    E = trivial_over(tower(R1, "x@1 - x@0^2"))
    assert is_sigma_separable(E) == "Yes"
    # t -> t^p is given here by a ring relation over F_p(t), with no inverse
    Fp = DiffPolyRing(DiffGroundField(FunctionField(PrimeField(3))), ["t", "x"])
    E = ExtensionTower(Fp, [parse_expression("t@1 - t@0^3", Fp), parse_expression("x@1 - x@0", Fp)], 1)
    assert is_sigma_separable(E) == "Unsupported"


def test_dimension_drops_in_perfect_quotient():
    rel = parse_expression("x@1 - x@0^2", R1)
    assert sigma_degree(ExtensionTower(R1, [rel]), 4).dt == 1
    C = perfect_close(SigmaIdealPresentation(R1, (rel, parse_expression("x@0", R1))), 3)
    quotient = sigma_degree(from_ideal(R1, list(C.gens)), 4)
    assert quotient.dt == 0 and quotient.dt < 1

