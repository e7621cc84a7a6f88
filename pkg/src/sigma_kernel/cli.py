"""Command-line frontend.

    sigma-kernel <command> <instance.json> [--depth N] [--effort N] [--window N] [--out FILE]

An instance is a JSON document with optional sections ``ground``, ``ring``,
``sigma_set``, ``tower``, ``morphism`` and ``query``; expressions are strings
in the syntax of :mod:`sigma_kernel.parse`.  The report goes to stdout as
JSON with sorted keys, so identical inputs give byte-identical output.
"""

import argparse
import json
import sys
from fractions import Fraction

from . import curves, morphisms
from .diffring import (DiffGroundField, DiffPolyRing, DiffRingPresentation, SigmaIdealPresentation,
                       SigmaRule, SigmaSet, perfect_close, rational_points, sigma_close,
                       well_mixed_close)
from .errors import KernelError, SchemaError
from .exact.fields import QQ, FunctionField, PrimeField
from .exact.finite import FiniteField
from .exact.groebner import DEFAULT_EFFORT
from .extensions import ExtensionTower, limit_degree, sigma_degree
from .parse import parse_expression
from .skew import FinDimSigmaModule, nakayama_check

SCHEMA = "sigma-kernel/report/1"
DEFAULTS = {"depth": curves.DEFAULT_DEPTH, "effort": DEFAULT_EFFORT, "window": curves.DEFAULT_WINDOW}


def _need(doc, key, where="document"):
    if key not in doc:
        raise SchemaError(f"missing {key!r} in {where}")
    return doc[key]


# --- document sections ----------------------------------------------------------

def load_ground(doc):
    g = doc.get("ground", {})
    kind = g.get("field", "Q")
    if kind == "Q":
        field = QQ
    elif kind == "GF":
        field = PrimeField(_need(g, "p", "ground"))
    elif kind == "Q(t)":
        field = FunctionField(QQ)
    elif kind == "GF(t)":
        field = FunctionField(PrimeField(_need(g, "p", "ground")))
    else:
        raise SchemaError(f"unknown ground field {kind!r}")
    q = g.get("q")
    return DiffGroundField(field, g.get("rule", "identity"),
                           q=Fraction(q) if isinstance(q, str) else q)


def load_ring(doc):
    r = _need(doc, "ring")
    ring = DiffPolyRing(load_ground(doc), list(_need(r, "generators", "ring")))
    rels = tuple(parse_expression(s, ring) for s in r.get("relations", []))
    sset = None
    if "sigma_set" in doc:
        s = doc["sigma_set"]
        rules = [SigmaRule(e["name"], tuple(parse_expression(x, ring) for x in e["images"]),
                           e.get("ground_power", 1)) for e in s["rules"]]
        table = {(i, j): k for i, j, k in s["table"]}
        sset = SigmaSet(rules, table)
    return DiffRingPresentation(ring, SigmaIdealPresentation(ring, rels), sset)


def load_curve(section):
    names = tuple(section.get("names", ("y", "x")))
    ring = DiffPolyRing(DiffGroundField(QQ), list(names))

    def P(s):
        return parse_expression(s, ring)

    mode = section.get("mode", curves.TOWER)
    if mode == curves.BASE:
        return curves.CurvePresentation(None, P(_need(section, "sigma_y", "tower")), mode=mode,
                                        names=names, label=section.get("label", ""))
    rules = None
    if "rules" in section:
        rules = [curves.CurveRule(e["name"], P(e["sigma_y"]), P(e["sigma_alpha"])) for e in section["rules"]]
        sigma_y = rules[0].sigma_y
    else:
        sigma_y = P(_need(section, "sigma_y", "tower"))
    alpha = P(section["sigma_alpha"]) if "sigma_alpha" in section else None
    return curves.etale_localize(P(_need(section, "f", "tower")), sigma_y, mode, alpha, rules,
                                 names, section.get("label", ""))


def load_morphism(doc):
    X = load_curve(_need(doc, "tower"))
    m = _need(doc, "morphism")
    target = dict(_need(m, "target", "morphism"))
    target.setdefault("mode", curves.BASE)
    target.setdefault("names", list(X.names))
    return morphisms.SigmaFiniteMorphism(X, load_curve(target), m.get("label", ""))


def _base_prime(C, s):
    return parse_expression(s, C.ring)


def _universe(C, primes, depth, window):
    out = []
    for s in primes:
        out.extend(curves.enumerate_points_over(C, _base_prime(C, s), depth, window))
    return out


def _point(C, entry, depth, window):
    pts = curves.enumerate_points_over(C, _base_prime(C, entry["over"]), depth, window)
    i = entry.get("index", 0)
    if not 0 <= i < len(pts):
        raise SchemaError(f"no point with index {i} over {entry['over']}")
    return pts[i]


def _function(C, entry):
    if isinstance(entry, str):
        return curves.Function(_base_prime(C, entry))
    den = entry.get("den")
    return curves.Function(_base_prime(C, entry["num"]), _base_prime(C, den) if den else None)


def _ground_value(field, v):
    return field.coerce(Fraction(v) if isinstance(v, str) else v)


# --- commands -------------------------------------------------------------------

def cmd_parse_check(doc, b):
    out = {}
    if "ring" in doc:
        R = load_ring(doc)
        exprs = list(doc["ring"].get("relations", [])) + list(doc.get("query", {}).get("expressions", []))
        items = []
        for s in exprs:
            f = parse_expression(s, R.ring)
            canon = R.ring.render(f)
            items.append({"input": s, "canonical": canon,
                          "round_trip": parse_expression(canon, R.ring) == f})
        out["expressions"] = items
    if "tower" in doc:
        out["curve"] = load_curve(doc["tower"]).describe()
    return out


def cmd_closure(doc, b):
    R = load_ring(doc)
    q = doc.get("query", {})
    gens = tuple(parse_expression(s, R.ring) for s in q["ideal"]) if "ideal" in q else R.ideal.gens
    I = SigmaIdealPresentation(R.ring, gens)
    kind = q.get("closure", "perfect")
    if kind == "sigma":
        C = sigma_close(I, b["depth"])
    elif kind == "well-mixed":
        C = well_mixed_close(I, b["depth"], b["effort"])
    elif kind == "perfect":
        C = perfect_close(I, b["depth"], b["effort"])
    else:
        raise SchemaError(f"unknown closure kind {kind!r}")
    return {"closure": kind, "generators": [R.ring.render(g) for g in C.gens],
            "flags": _plain(C.flags()), "warnings": [str(w) for w in C.warnings]}


def cmd_points(doc, b):
    q = doc.get("query", {})
    if "tower" in doc:
        C = load_curve(doc["tower"])
        return {"fibers": [{"over": s, "points": [x.to_dict() for x in
                                                  curves.enumerate_points_over(C, _base_prime(C, s), b["depth"], b["window"])]}
                           for s in _need(q, "points", "query")]}
    R = load_ring(doc)
    fd = _need(q, "field", "query")
    K = FiniteField(fd["p"], fd.get("m", 1))
    pts = rational_points(R, K, fd.get("phi_power", 1))
    return {"field": K.name, "phi_power": fd.get("phi_power", 1), "count": len(pts),
            "points": [[K.render(a) for a in tup] for tup in pts]}


def _tower(doc):
    R = load_ring(doc)
    return ExtensionTower(R.ring, [g for g in R.relations if g],
                          doc.get("query", {}).get("base_gens", 0), doc.get("label", ""))


def cmd_limit_degree(doc, b):
    dl, seq = limit_degree(_tower(doc), b["depth"], b["window"])
    return {"dl": "inf" if dl == float("inf") else dl, "sequence": seq.to_dict(),
            "certificates": list(seq.certificates)}


def cmd_sigma_degree(doc, b):
    return sigma_degree(_tower(doc), b["depth"], b["window"]).to_dict()


def cmd_nonsingular(doc, b):
    C = load_curve(_need(doc, "tower"))
    out = []
    for s in _need(doc.get("query", {}), "points", "query"):
        for x in curves.enumerate_points_over(C, _base_prime(C, s), b["depth"], b["window"]):
            out.append({"point": x.label(), "report": curves.check_nonsingular(C, x, window=b["window"]).to_dict()})
    return {"points": out}


def cmd_divisor(doc, b):
    C = load_curve(_need(doc, "tower"))
    q = doc.get("query", {})
    U = _universe(C, _need(q, "universe", "query"), b["depth"], b["window"])
    g = _function(C, _need(q, "function", "query"))
    D = curves.principal_divisor(C, g, U, b["depth"], b["window"])
    return {"function": g.render(C), "divisor": D.to_dict(),
            "degree": curves.divisor_degree(D, b["window"])}


def cmd_approx(doc, b):
    C = load_curve(_need(doc, "tower"))
    q = doc.get("query", {})
    U = _universe(C, _need(q, "universe", "query"), b["depth"], b["window"])
    pts = [_point(C, s, b["depth"], b["window"]) for s in _need(q, "points", "query")]
    res = curves.approximate(C, pts, list(_need(q, "exponents", "query")), U, b["window"])
    return res.to_dict(C)


def cmd_fiber(doc, b):
    m = load_morphism(doc)
    return {"fibers": [morphisms.fiber(m, _base_prime(m.X, s), b["depth"], b["window"]).to_dict()
                       for s in _need(doc.get("query", {}), "points", "query")]}


def cmd_verify_multiplicity(doc, b):
    m = load_morphism(doc)
    reports = []
    for s in _need(doc.get("query", {}), "points", "query"):
        r = morphisms.verify_multiplicity(m, _base_prime(m.X, s), b["depth"], b["window"]).to_dict()
        r["base_point"] = s
        reports.append(r)
    return {"reports": reports}


def cmd_sigma_free_rank(doc, b):
    m = load_morphism(doc)
    return {"ranks": [dict(morphisms.sigma_free_rank(m, _base_prime(m.X, s), b["depth"], b["window"]), over=s)
                      for s in _need(doc.get("query", {}), "points", "query")]}


def cmd_crt_check(doc, b):
    R = load_ring(doc)
    ideals = [[parse_expression(s, R.ring) for s in p] for p in _need(doc.get("query", {}), "ideals", "query")]
    return morphisms.crt_check(R, ideals, b["depth"], b["effort"]).to_dict()


def cmd_nakayama_check(doc, b):
    ground = load_ground(doc)
    m = _need(doc.get("query", {}), "module", "query")
    f = ground.field

    def mat(rows):
        return [[_ground_value(f, v) for v in row] for row in rows]

    images = None
    if "sigma_images" in m:
        images = [{tuple(t["exps"]): _ground_value(f, t["coeff"]) for t in poly} for poly in m["sigma_images"]]
    M = FinDimSigmaModule(ground, m["dim"], [mat(a) for a in m.get("actions", [])],
                          mat(m["shift"]) if "shift" in m else None, images)
    return nakayama_check(M).to_dict()


COMMANDS = {
    "parse-check": cmd_parse_check,
    "closure": cmd_closure,
    "points": cmd_points,
    "limit-degree": cmd_limit_degree,
    "sigma-degree": cmd_sigma_degree,
    "nonsingular": cmd_nonsingular,
    "divisor": cmd_divisor,
    "approx": cmd_approx,
    "fiber": cmd_fiber,
    "verify-multiplicity": cmd_verify_multiplicity,
    "sigma-free-rank": cmd_sigma_free_rank,
    "crt-check": cmd_crt_check,
    "nakayama-check": cmd_nakayama_check,
}


# --- reports --------------------------------------------------------------------

def _plain(x):
    """Make a payload JSON-safe with exact numbers."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return "inf" if x == float("inf") else str(Fraction(x))
    if x is None or isinstance(x, (bool, int, str)):
        return x
    return str(x)


def bounds(doc, depth=None, effort=None, window=None):
    q = doc.get("query", {})
    given = {"depth": depth, "effort": effort, "window": window}
    return {k: given[k] if given[k] is not None else q.get(k, DEFAULTS[k]) for k in DEFAULTS}


def run(command, doc, depth=None, effort=None, window=None):
    """Report dict for ``command`` on the instance ``doc``; errors from the
    kernel are returned inside the report under ``error``."""
    if command not in COMMANDS:
        raise SchemaError(f"unknown command {command!r}")
    b = bounds(doc, depth, effort, window)
    report = {"schema": SCHEMA, "command": command, "instance": doc.get("label", ""), "bounds": b}
    try:
        report["result"] = _plain(COMMANDS[command](doc, b))
    except KernelError as e:
        report["error"] = e.to_dict()
    return report


def render_report(report):
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def main(argv=None):
    ap = argparse.ArgumentParser(prog="sigma-kernel", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("instance")
    ap.add_argument("--depth", type=int)
    ap.add_argument("--effort", type=int)
    ap.add_argument("--window", type=int)
    ap.add_argument("--out")
    args = ap.parse_args(argv)
    try:
        with open(args.instance, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        print(f"sigma-kernel: cannot read instance: {e}", file=sys.stderr)
        return 2
    try:
        report = run(args.command, doc, args.depth, args.effort, args.window)
    except KernelError as e:
        report = {"schema": SCHEMA, "command": args.command, "error": e.to_dict()}
    text = render_report(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    sys.stdout.write(text)
    if "error" in report:
        print(f"sigma-kernel: {report['error']['code']}: {report['error']['message']}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
