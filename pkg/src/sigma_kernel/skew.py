"""Twisted polynomials k[x; σ] and finite-dimensional Nakayama checks."""

from dataclasses import dataclass

from .errors import SemilinearityViolation
from .exact import upoly


class SkewPoly:
    """Coefficient list (lowest degree first) with x·a = σ(a)·x."""

    __slots__ = ("coeffs", "ground")

    def __init__(self, coeffs, ground):
        self.ground = ground
        self.coeffs = upoly.trim([ground.field.coerce(c) for c in coeffs])

    @classmethod
    def x(cls, ground):
        f = ground.field
        return cls([f.zero, f.one], ground)

    @classmethod
    def const(cls, c, ground):
        return cls([c], ground)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def _co(self, other):
        if isinstance(other, SkewPoly):
            return other
        return SkewPoly([other], self.ground)

    def __add__(self, other):
        return SkewPoly(upoly.add(self.coeffs, self._co(other).coeffs), self.ground)

    __radd__ = __add__

    def __neg__(self):
        return SkewPoly(upoly.neg(self.coeffs), self.ground)

    def __sub__(self, other):
        return self + (-self._co(other))

    def __rsub__(self, other):
        return self._co(other) - self

    def __mul__(self, other):
        return skew_mul(self, self._co(other))

    def __rmul__(self, other):
        return skew_mul(self._co(other), self)

    def __eq__(self, other):
        return isinstance(other, SkewPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __bool__(self):
        return bool(self.coeffs)

    def render(self):
        f = self.ground.field
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            s = f.render(c)
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            if not mono:
                parts.append(s)
            elif s == "1":
                parts.append(mono)
            elif s == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{s}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"SkewPoly({self.render()})"


def skew_mul(f, g):
    """(Σ a_i x^i)(Σ b_j x^j) = Σ a_i σ^i(b_j) x^(i+j)."""
    if not f.coeffs or not g.coeffs:
        return SkewPoly([], f.ground)
    ground = f.ground
    zero = ground.field.zero
    out = [zero] * (len(f.coeffs) + len(g.coeffs) - 1)
    shifted = {0: g.coeffs}
    for i, a in enumerate(f.coeffs):
        if not a:
            continue
        if i not in shifted:
            shifted[i] = [ground.apply(b, i) for b in g.coeffs]
        for j, b in enumerate(shifted[i]):
            out[i + j] = out[i + j] + a * b
    return SkewPoly(out, ground)


# --- linear algebra over a finite field -------------------------------------

def mat_mul(A, B):
    if not A:
        return []
    n, m, p = len(A), len(B), len(B[0]) if B else 0
    zero = A[0][0] * 0 if A[0] else 0
    return [[sum((A[i][k] * B[k][j] for k in range(m)), zero) for j in range(p)] for i in range(n)]


def rank(rows, zero):
    rows = [list(r) for r in rows]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return r


@dataclass
class FinDimSigmaModule:
    """A module of finite dimension n over the ground field k.

    ``actions`` maps each generator of the local ring's maximal ideal to
    its n×n matrix (column convention: action(v) = A v).  ``shift`` is the
    σ-semilinear map v -> S·σ₀(v), and ``sigma_images`` gives, for each
    generator, σ(generator) as a polynomial in the generators (a dict from
    exponent tuples to ground elements) so semilinearity can be checked.
    """

    ground: object
    dim: int
    actions: list
    shift: list = None
    sigma_images: list = None

    def apply_shift(self, v):
        sv = [self.ground.apply(c) for c in v]
        return [sum((self.shift[i][j] * sv[j] for j in range(self.dim)), self.ground.field.zero)
                for i in range(self.dim)]

    def _poly_matrix(self, poly):
        f = self.ground.field
        n = self.dim
        acc = [[f.zero] * n for _ in range(n)]
        for exps, c in poly.items():
            M = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
            for g, e in enumerate(exps):
                for _ in range(e):
                    M = mat_mul(self.actions[g], M)
            acc = [[acc[i][j] + c * M[i][j] for j in range(n)] for i in range(n)]
        return acc

    def verify(self):
        """Check the actions commute and the shift is σ-semilinear:
        S σ₀(A_g v) = A_{σ(g)} S σ₀(v) on every basis vector."""
        f = self.ground.field
        n = self.dim
        for A in self.actions:
            for B in self.actions:
                if mat_mul(A, B) != mat_mul(B, A):
                    raise SemilinearityViolation("generator actions do not commute")
        if self.shift is None:
            return True
        for g, A in enumerate(self.actions):
            Ag = self._poly_matrix(self.sigma_images[g])
            for b in range(n):
                e = [f.one if i == b else f.zero for i in range(n)]
                Av = [sum((A[i][j] * e[j] for j in range(n)), f.zero) for i in range(n)]
                lhs = self.apply_shift(Av)
                se = self.apply_shift(e)
                rhs = [sum((Ag[i][j] * se[j] for j in range(n)), f.zero) for i in range(n)]
                if lhs != rhs:
                    raise SemilinearityViolation(f"shift is not semilinear for generator {g}",
                                                 generator=g, basis_vector=b)
            # additivity on a pair of basis vectors
            if n >= 2:
                e0 = [f.one if i == 0 else f.zero for i in range(n)]
                e1 = [f.one if i == 1 else f.zero for i in range(n)]
                s = [a + b for a, b in zip(e0, e1)]
                if self.apply_shift(s) != [a + b for a, b in zip(self.apply_shift(e0), self.apply_shift(e1))]:
                    raise SemilinearityViolation("shift is not additive")
        return True


@dataclass
class NakayamaResult:
    verdict: str
    dim: int
    mM_dim: int
    witness: object = None

    def to_dict(self):
        return {"verdict": self.verdict, "dim": self.dim, "mM_dim": self.mM_dim}


def nakayama_check(M):
    """Compute 𝔐M = Σ_g image(A_g) and test '𝔐M = M implies M = 0'."""
    M.verify()
    f = M.ground.field
    if M.dim == 0:
        return NakayamaResult("Verified", 0, 0)
    cols = []
    for A in M.actions:
        for j in range(M.dim):
            cols.append([A[i][j] for i in range(M.dim)])
    r = rank(cols, f.zero) if cols else 0
    if r == M.dim:
        return NakayamaResult("Counterexample", M.dim, r, witness="mM spans M with M nonzero")
    return NakayamaResult("Verified", M.dim, r)
