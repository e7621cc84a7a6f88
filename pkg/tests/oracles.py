"""Reference computations that share no code with the kernel.

They work on plain strings and sympy objects, or on Python integers modulo p.
"""

import itertools
import math
import re

import sympy


def _sym(name, k):
    return sympy.Symbol(f"{name}_{k}")


def _to_sympy(expr, names):
    text = re.sub(r"([A-Za-z_]\w*)@(\d+)", lambda m: f"{m.group(1)}_{m.group(2)}", expr)
    text = text.replace("^", "**")
    return sympy.sympify(text, locals={f"{n}_{k}": _sym(n, k) for n in names for k in range(20)})


def _shift(e, names, k):
    return e.subs({_sym(n, i): _sym(n, i + k) for n in names for i in range(19, -1, -1)}, simultaneous=True)


def level_dimension(relations, names, k, transcendental):
    """dim of Q(trans)[x_{j,i} : i <= k] / (shifted relations) over Q(trans),
    or inf if a variable of the level is free."""
    rels = [_to_sympy(r, names) for r in relations]
    order = lambda e: max((int(str(s).rsplit("_", 1)[1]) for s in e.free_symbols), default=0)  # noqa: E731
    level = []
    for r in rels:
        for s in range(0, k - order(r) + 1):
            level.append(sympy.expand(_shift(r, names, s)))
    vs = [_sym(n, i) for i in range(k + 1) for n in names]
    trans = [v for v in vs if str(v) in transcendental]
    rest = [v for v in reversed(vs) if v not in trans]
    if not rest:
        return 1
    if not level:
        return math.inf
    dom = sympy.QQ.frac_field(*trans) if trans else sympy.QQ
    G = sympy.groebner(level, *rest, order="lex", domain=dom)
    leads = [sympy.Poly(g, *rest).monoms(order="lex")[0] for g in G.exprs]
    bound = []
    for i in range(len(rest)):
        pure = [m[i] for m in leads if all(e == 0 for j, e in enumerate(m) if j != i)]
        if not pure:
            return math.inf
        bound.append(min(pure))
    count = 0
    for mono in itertools.product(*[range(b) for b in bound]):
        if not any(all(a >= b for a, b in zip(mono, m)) for m in leads):
            count += 1
    return count


def degree_sequence(relations, names, depth, transcendental):
    """d_k = dim_k / dim_{k-1} for k = 1..depth, with ∞ for a new free variable."""
    dims = [level_dimension(relations, names, k, transcendental) for k in range(depth + 1)]
    out = []
    for k in range(1, depth + 1):
        new_free = any(f"{n}_{k}" in transcendental for n in names)
        out.append(math.inf if new_free else dims[k] // dims[k - 1])
    return out


# --- finite fields by hand ----------------------------------------------------

def gf_p2(p, nonresidue):
    """F_{p^2} = F_p[w]/(w^2 - nonresidue) as pairs (a, b) meaning a + b*w."""
    def mul(u, v):
        return ((u[0] * v[0] + nonresidue * u[1] * v[1]) % p, (u[0] * v[1] + u[1] * v[0]) % p)

    def power(u, e):
        out = (1, 0)
        for _ in range(e):
            out = mul(out, u)
        return out

    elems = [(a, b) for a in range(p) for b in range(p)]
    return elems, mul, power


def square_map_points(p, m):
    """Solutions of a^p = a^2 (σx = x² with σ = Frobenius) in F_{p^m}."""
    if m == 1:
        return sorted(a for a in range(p) if pow(a, p, p) == pow(a, 2, p))
    nonres = next(c for c in range(2, p) if pow(c, (p - 1) // 2, p) == p - 1)
    elems, mul, power = gf_p2(p, nonres)
    return [u for u in elems if power(u, p) == mul(u, u)]


def span_mod_p(vectors, p, dim):
    """All vectors of the F_p-span, by closing under addition and scaling."""
    span = {tuple([0] * dim)}
    for v in vectors:
        new = set()
        for s in span:
            for c in range(p):
                new.add(tuple((a + c * b) % p for a, b in zip(s, v)))
        span = new
    return span


# --- valuations on the square-root tower x0^2 = y, σy = x0 -----------------------

def roots_tower_valuation(text, n, level):
    """Order of vanishing along the odd-order cyclotomic chain over Φ_n.

    Level k of the tower is Q[s] with y = s^(2^(k+1)) and x_i = s^(2^(k-i)),
    and for odd n the σ-fixed chain above Φ_n(y) is cut out by Φ_n(s)."""
    s = sympy.Symbol("s")
    subs = {"y_0": s ** (2 ** (level + 1))}
    subs.update({f"x_{i}": s ** (2 ** (level - i)) for i in range(level + 1)})
    expr = _to_sympy(text, ["x", "y"]).subs({sympy.Symbol(k): v for k, v in subs.items()})
    num, den = sympy.fraction(sympy.together(expr))
    if expr.free_symbols - {s}:
        raise ValueError(f"{text!r} is above level {level}")
    factor = sympy.cyclotomic_poly(n, s)

    def order(p):
        p, v = sympy.Poly(p, s), 0
        while not p.is_zero and p.rem(sympy.Poly(factor, s)).is_zero:
            p, v = p.quo(sympy.Poly(factor, s)), v + 1
        return v

    return order(num) - order(den)
