"""Expression syntax for difference polynomials, and canonical printing.

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := atom ('^' nat)?
    atom   := rational | 't' | var | '(' expr ')'
    var    := name '@' nat

Division is only allowed by nonzero ground constants.  Columns in error
messages are 1-based.
"""

import re
from fractions import Fraction

from .errors import ParseError, UndeclaredName
from .exact.fields import FunctionField
from .exact.poly import MultiPoly

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.))")


def _tokenize(s):
    toks = []
    pos = 0
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if m.end() == pos or not s[pos:].strip():
            break
        col = m.start(m.lastindex) + 1
        if m.group(1) is not None:
            toks.append(("int", int(m.group(1)), col))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), col))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()@":
                raise ParseError(f"unexpected character {ch!r}", col)
            toks.append((ch, ch, col))
        pos = m.end()
    toks.append(("end", None, len(s) + 1))
    return toks


class _Parser:
    def __init__(self, s, ring):
        self.toks = _tokenize(s)
        self.i = 0
        self.ring = ring
        self.field = ring.field

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None, what=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {what or kind}", tok[2])
        self.i += 1
        return tok

    def expr(self):
        acc = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek()[0] in ("*", "/"):
            op, _, col = self.take()
            rhs = self.unary()
            if op == "*":
                acc = acc * rhs
            else:
                if not rhs.is_constant() or not rhs:
                    raise ParseError("division is only allowed by a nonzero constant", col)
                acc = acc * (self.field.one / rhs.constant_coeff())
        return acc

    def unary(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.unary()
        return self.factor()

    def factor(self):
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            e = self.take("int", "exponent")[1]
            return base ** e
        return base

    def atom(self):
        kind, val, col = self.peek()
        if kind == "int":
            self.take()
            return MultiPoly.const(Fraction(val), self.field)
        if kind == "(":
            self.take()
            e = self.expr()
            self.take(")", "')'")
            return e
        if kind == "name":
            self.take()
            if self.peek()[0] != "@":
                if val == "t":
                    if not isinstance(self.field, FunctionField):
                        raise UndeclaredName("'t' needs a rational function ground field", position=col)
                    return MultiPoly.const(self.field.t, self.field)
                self.take("@", "'@'")
            self.take("@")
            k = self.take("int", "shift index")[1]
            if val not in self.ring.names:
                raise UndeclaredName(f"undeclared generator {val!r}", position=col)
            return self.ring.var(val, k)
        if kind == "end":
            raise ParseError("unexpected end of input", col)
        raise ParseError(f"unexpected {val!r}", col)


def parse_expression(s, ring):
    """Parse ``s`` into a polynomial of ``ring`` (a DiffPolyRing)."""
    p = _Parser(s, ring)
    out = p.expr()
    kind, val, col = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected {val!r}", col)
    return out


# --- printing ---------------------------------------------------------------

def _var_key(v):
    # higher shifts first, then generator index
    return (v[1], -v[0]) if len(v) == 2 else (v[0],)


def _mono_key(m):
    exps = {}
    for v, e in m:
        exps[v] = e
    return tuple(sorted(((_var_key(v), e) for v, e in exps.items()), reverse=True))


def render_terms(poly, name_of, render_coeff):
    if not poly.terms:
        return "0"
    items = sorted(poly.terms.items(), key=lambda kv: _mono_key(kv[0]), reverse=True)
    text = ""
    for idx, (m, c) in enumerate(items):
        s = render_coeff(c)
        neg = s.startswith("-") and not s.startswith("-(")
        mag = s[1:] if neg else s
        vs = sorted(m, key=lambda ve: _var_key(ve[0]), reverse=True)
        mono = "*".join(name_of(v) if e == 1 else f"{name_of(v)}^{e}" for v, e in vs)
        if not mono:
            term = mag
        elif mag == "1":
            term = mono
        else:
            term = f"{mag}*{mono}"
        if idx == 0:
            text = ("-" if neg else "") + term
        else:
            text += (" - " if neg else " + ") + term
    return text


def render_poly(f, ring):
    # compound ground coefficients come back parenthesised from the field
    return render_terms(f, ring.var_name, ring.field.render)


def render_tower_elem(c, tower):
    names = tower.names()
    return render_terms(c.poly, lambda v: names[v[0]], tower.base.render)
