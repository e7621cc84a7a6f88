import itertools
import math

import pytest

from sigma_kernel.rig import Cmp, SigmaDegree, parse_degree, rig_add, rig_cmp, rig_mul

INF = math.inf
D = SigmaDegree


def test_add_examples():
    assert rig_add(D(2, 1), D(3, 1)) == D(5, 1)
    assert rig_add(D(2, 1), D(5, 0)) == D(2, 1)
    assert rig_add(D(INF, 0), D(1, 0)) == D(INF, 0)


def test_mul_examples():
    assert rig_mul(D(2, 1), D(3, 2)) == D(6, 3)
    assert rig_mul(D(0, 0), D(7, 4)) == D(0, 0)
    assert rig_mul(D(2, 0), D(2, 0)) == D(4, 0)


def test_cmp_examples():
    assert rig_cmp(D(5, 0), D(1, 1)) is Cmp.LT
    assert rig_cmp(D(2, 1), D(2, 1)) is Cmp.EQ
    assert rig_cmp(D(INF, 0), D(1, 1)) is Cmp.LT


def test_zero_is_canonical():
    assert D(0, 3) == D(0, 0)
    with pytest.raises(ValueError):
        D(-1, 0)
    with pytest.raises(ValueError):
        D(1, -2)


def test_render_round_trip():
    for c, d in [(1, 0), (2, 1), (INF, 3), (0, 0)]:
        assert parse_degree(D(c, d).render()) == D(c, d)


GRID = [D(c, d) for c in [0, 1, 2, 3, 4, 5, INF] for d in range(4)]


def test_total_order_on_representatives():
    reps = sorted(set(GRID), key=lambda a: (a.ldeg, a.coeff))
    for a, b in itertools.combinations(reps, 2):
        assert rig_cmp(a, b) is Cmp.LT and rig_cmp(b, a) is Cmp.GT
    for a, b, c in itertools.product(reps[::3], repeat=3):
        if a <= b and b <= c:
            assert a <= c


def test_distributivity_on_grid():
    for a, b, c in itertools.product(GRID, repeat=3):
        assert a * (b + c) == a * b + a * c
