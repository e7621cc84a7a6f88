"""Dense univariate polynomials over any exact field.

A polynomial is a list of coefficients, lowest degree first, with no
trailing zeros (the zero polynomial is ``[]``).  Coefficients only need the
arithmetic operators, so the same code runs over Fraction, prime-field
residues, rational functions and tower elements.
"""


def trim(p):
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def deg(p):
    return len(p) - 1


def add(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for i, c in enumerate(q):
        out[i] = out[i] + c
    return trim(out)


def neg(p):
    return [-c for c in p]


def sub(p, q):
    return add(p, neg(q))


def scale(p, c):
    return trim([a * c for a in p])


def mul(p, q):
    if not p or not q:
        return []
    zero = p[0] * 0
    out = [zero] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return trim(out)


def divmod_(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = list(p)
    lc = q[-1]
    dq = len(q) - 1
    if len(p) <= dq:
        return [], trim(p)
    quot = [q[0] * 0] * (len(p) - dq)
    for i in range(len(p) - 1, dq - 1, -1):
        c = p[i]
        if not c:
            continue
        c = c / lc
        quot[i - dq] = c
        for j in range(dq + 1):
            p[i - dq + j] = p[i - dq + j] - c * q[j]
    return trim(quot), trim(p[:dq])


def rem(p, q):
    return divmod_(p, q)[1]


def monic(p):
    if not p:
        return []
    lc = p[-1]
    return [c / lc for c in p]


def gcd(p, q):
    p, q = trim(p), trim(q)
    while q:
        p, q = q, rem(p, q)
    return monic(p)


def xgcd(p, q):
    """Return (g, s, t) with s*p + t*q = g monic."""
    r0, r1 = trim(p), trim(q)
    s0, s1 = [r0[-1] / r0[-1]] if r0 else [], []
    t0, t1 = [], [r1[-1] / r1[-1]] if r1 else []
    if not r0:
        if not r1:
            return [], [], []
        lc = r1[-1]
        return monic(r1), [], [lc / lc / lc]
    while r1:
        quo, r2 = divmod_(r0, r1)
        r0, r1 = r1, r2
        s0, s1 = s1, sub(s0, mul(quo, s1))
        t0, t1 = t1, sub(t0, mul(quo, t1))
    lc = r0[-1]
    return monic(r0), scale(s0, lc / lc / lc), scale(t0, lc / lc / lc)


def evaluate(p, x):
    acc = None
    for c in reversed(p):
        acc = c if acc is None else acc * x + c
    return acc


def compose(p, q):
    """p(q(T))."""
    acc = []
    for c in reversed(p):
        acc = add(mul(acc, q), [c])
    return acc


def derivative(p):
    return trim([c * i for i, c in enumerate(p)][1:])


def powmod(p, e, m):
    result = [m[-1] / m[-1]]
    base = rem(p, m)
    while e:
        if e & 1:
            result = rem(mul(result, base), m)
        base = rem(mul(base, base), m)
        e >>= 1
    return result
