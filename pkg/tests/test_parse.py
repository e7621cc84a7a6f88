import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from sigma_kernel.cli import load_ring
from sigma_kernel.diffring import DiffGroundField, DiffPolyRing
from sigma_kernel.errors import ParseError, UndeclaredName
from sigma_kernel.exact import QQ, FunctionField, PrimeField
from sigma_kernel.parse import parse_expression

INSTANCES = Path(__file__).resolve().parent.parent / "instances"
NOT_EXPRESSIONS = {"label", "field", "rule", "closure", "mode", "name", "generators"}

QX = DiffPolyRing(DiffGroundField(QQ), ["x"])
RINGS = {
    "Q": DiffPolyRing(DiffGroundField(QQ), ["x", "y"]),
    "F5": DiffPolyRing(DiffGroundField(PrimeField(5), "frobenius"), ["x", "y"]),
    "Q(t)": DiffPolyRing(DiffGroundField(FunctionField(QQ), "shift"), ["x", "y"]),
}


def round_trips(s, ring):
    f = parse_expression(s, ring)
    text = ring.render(f)
    return parse_expression(text, ring) == f and ring.render(parse_expression(text, ring)) == text


def test_examples():
    assert QX.render(parse_expression("x@1 - x@0^2", QX)) == "x@1 - x@0^2"
    assert QX.render(parse_expression("(x@0+1)*(x@0-1)", QX)) == "x@0^2 - 1"
    assert QX.render(parse_expression("x@0 - x@0", QX)) == "0"
    assert RINGS["Q(t)"].render(parse_expression("t*x@0/(t+1)", RINGS["Q(t)"])) == "(t)/(t + 1)*x@0"


@pytest.mark.parametrize("text,column", [("x@0^", 5), ("x@-1", 3), ("x@0 +* 1", 6), ("2^x@0", 3)])
def test_parse_errors_report_a_column(text, column):
    with pytest.raises(ParseError) as info:
        parse_expression(text, QX)
    assert info.value.position == column


def test_undeclared_generator():
    with pytest.raises(UndeclaredName):
        parse_expression("z@0", QX)


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4).map(lambda c: f"({c})")
atom = st.tuples(st.sampled_from(["x", "y"]), st.integers(0, 3), st.integers(1, 3)).map(
    lambda a: f"{a[0]}@{a[1]}^{a[2]}")
term = st.tuples(coeff, st.lists(atom, max_size=3)).map(lambda t: "*".join([t[0], *t[1]]))
expression = st.lists(term, min_size=1, max_size=5).map(" + ".join)


@settings(max_examples=60, deadline=None)
@given(expression, st.sampled_from(sorted(RINGS)))
def test_render_parse_round_trip(s, field):
    assert round_trips(s, RINGS[field])


@settings(max_examples=30, deadline=None)
@given(expression, st.sampled_from(["t", "(t + 1)", "(t^2 - 1)/(t + 2)", "1/t"]))
def test_round_trip_with_rational_coefficients(s, c):
    assert round_trips(f"{c}*({s})", RINGS["Q(t)"])


def _strings(node, key=None):
    if isinstance(node, dict):
        for k, v in node.items():
            if k not in NOT_EXPRESSIONS:
                yield from _strings(v, k)
    elif isinstance(node, list):
        for v in node:
            yield from _strings(v, key)
    elif isinstance(node, str):
        yield node


def corpus():
    for path in sorted(INSTANCES.glob("*.json")):
        doc = json.loads(path.read_text())
        if "ring" in doc:
            ring = load_ring(doc).ring
        else:
            names = doc.get("tower", {}).get("names", ["y", "x"])
            ring = DiffPolyRing(DiffGroundField(QQ), list(names))
        for s in _strings(doc):
            yield path.stem, s, ring


CORPUS = list(corpus())


def test_corpus_is_nontrivial():
    assert len(CORPUS) >= 30
    # every instance but the module-only Nakayama one carries expressions
    assert len({name for name, _, _ in CORPUS}) == len(list(INSTANCES.glob("*.json"))) - 1


@pytest.mark.parametrize("name,s,ring", CORPUS, ids=[f"{n}:{s}" for n, s, _ in CORPUS])
def test_corpus_round_trip(name, s, ring):
    assert round_trips(s, ring)
