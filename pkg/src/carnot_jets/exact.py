"""Exact rational linear algebra and sparse multivariate polynomials.

Scalars are :class:`fractions.Fraction`.  Nothing in the package uses floats.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product as _iproduct

Rat = Fraction


def rat(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-1/12"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def rat_str(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


# ---------------------------------------------------------------------------
# matrices


class RatMatrix:
    """Sparse rational matrix; ``entries`` maps (row, col) to a nonzero Fraction."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries=None):
        self.rows = rows
        self.cols = cols
        self.entries = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise IndexError(f"entry ({i},{j}) outside {rows}x{cols}")
            v = rat(v)
            if v:
                self.entries[i, j] = v

    @classmethod
    def from_rows(cls, rows, cols=None):
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        ent = {(i, j): v for i, r in enumerate(rows) for j, v in enumerate(r) if v}
        return cls(len(rows), cols, ent)

    @classmethod
    def identity(cls, n):
        return cls(n, n, {(i, i): 1 for i in range(n)})

    def row_dicts(self):
        out = [dict() for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def to_rows(self):
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self):
        return RatMatrix(self.cols, self.rows, {(j, i): v for (i, j), v in self.entries.items()})

    def matvec(self, x):
        if len(x) != self.cols:
            raise ValueError("dimension mismatch")
        out = [Fraction(0)] * self.rows
        for (i, j), v in self.entries.items():
            out[i] += v * x[j]
        return out

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        right = other.row_dicts()
        acc = {}
        for (i, k), v in self.entries.items():
            for j, w in right[k].items():
                acc[i, j] = acc.get((i, j), 0) + v * w
        return RatMatrix(self.rows, other.cols, acc)

    def __eq__(self, other):
        return (isinstance(other, RatMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __repr__(self):
        return f"RatMatrix({self.rows}x{self.cols}, nnz={len(self.entries)})"


def _as_matrix(A) -> RatMatrix:
    return A if isinstance(A, RatMatrix) else RatMatrix.from_rows(A)


def rref(A):
    """Reduced row echelon form with leftmost-column pivoting.

    Returns ``(rows, pivots)`` where ``rows`` are sparse dicts of the nonzero
    reduced rows and ``pivots[i]`` is the pivot column of ``rows[i]``.
    """
    A = _as_matrix(A)
    pending = [r for r in A.row_dicts() if r]
    done, pivots = [], []
    for col in range(A.cols):
        idx = next((i for i, r in enumerate(pending) if col in r), None)
        if idx is None:
            continue
        prow = pending.pop(idx)
        inv = 1 / prow[col]
        prow = {j: v * inv for j, v in prow.items()}
        for group in (pending, done):
            for i, r in enumerate(group):
                c = r.get(col)
                if c:
                    for j, v in prow.items():
                        nv = r.get(j, 0) - c * v
                        if nv:
                            r[j] = nv
                        else:
                            r.pop(j, None)
        pending = [r for r in pending if r]
        done.append(prow)
        pivots.append(col)
    return done, pivots


def rank(A) -> int:
    return len(rref(A)[1])


def solve_linear(A, b):
    """Exact solution of ``A x = b`` or ``None`` when inconsistent.

    Underdetermined systems get their free variables set to zero.
    """
    A = _as_matrix(A)
    if len(b) != A.rows:
        raise ValueError("right-hand side length must equal the row count")
    aug = RatMatrix(A.rows, A.cols + 1, dict(A.entries))
    for i, v in enumerate(b):
        v = rat(v)
        if v:
            aug.entries[i, A.cols] = v
    rows, pivots = rref(aug)
    x = [Fraction(0)] * A.cols
    for r, p in zip(rows, pivots):
        if p == A.cols:
            return None
        x[p] = r.get(A.cols, Fraction(0))
    return x


def kernel_basis(A):
    """Basis of the null space, one free variable set to 1 per vector."""
    A = _as_matrix(A)
    rows, pivots = rref(A)
    pivset = set(pivots)
    basis = []
    for free in range(A.cols):
        if free in pivset:
            continue
        v = [Fraction(0)] * A.cols
        v[free] = Fraction(1)
        for r, p in zip(rows, pivots):
            c = r.get(free)
            if c:
                v[p] = -c
        basis.append(v)
    return basis


def inverse(A) -> RatMatrix:
    A = _as_matrix(A)
    n = A.rows
    if A.cols != n:
        raise ValueError("inverse of a non-square matrix")
    aug = RatMatrix(n, 2 * n, dict(A.entries))
    for i in range(n):
        aug.entries[i, n + i] = Fraction(1)
    rows, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("singular matrix")
    ent = {}
    for i, r in enumerate(rows[:n]):
        for j, v in r.items():
            if j >= n:
                ent[i, j - n] = v
    return RatMatrix(n, n, ent)


def left_inverse_rows(A):
    """Return ``(row_indices, Minv)`` with ``Minv @ A[row_indices] = I``.

    ``A`` must have full column rank; the selected rows form an invertible
    square submatrix.  Used to read coordinates of a vector known to lie in
    the column span.
    """
    A = _as_matrix(A)
    _, piv = rref(A.transpose())
    if len(piv) != A.cols:
        raise ValueError("matrix does not have full column rank")
    sub = RatMatrix.from_rows([[A.entries.get((i, j), 0) for j in range(A.cols)] for i in piv], A.cols)
    return piv, inverse(sub)


# ---------------------------------------------------------------------------
# polynomials


class MPoly:
    """Sparse polynomial over named variables with exact coefficients.

    ``terms`` maps exponent tuples (one entry per variable) to nonzero
    coefficients.  Coefficients are Fractions.
    """

    __slots__ = ("vars", "terms")

    def __init__(self, vars, terms=None):
        self.vars = tuple(vars)
        n = len(self.vars)
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != n:
                raise ValueError("exponent length does not match variables")
            if c:
                clean[tuple(e)] = c
        self.terms = clean

    @classmethod
    def _raw(cls, vars, terms):
        p = object.__new__(cls)
        p.vars = vars
        p.terms = terms
        return p

    @classmethod
    def const(cls, vars, c):
        vars = tuple(vars)
        c = rat(c)
        return cls._raw(vars, {(0,) * len(vars): c} if c else {})

    @classmethod
    def zero(cls, vars):
        return cls._raw(tuple(vars), {})

    @classmethod
    def var(cls, vars, which):
        vars = tuple(vars)
        i = vars.index(which) if isinstance(which, str) else which
        e = [0] * len(vars)
        e[i] = 1
        return cls._raw(vars, {tuple(e): Fraction(1)})

    @classmethod
    def monomial(cls, vars, exps, c=1):
        return cls(vars, {tuple(exps): rat(c)})

    def gens(self):
        return [MPoly.var(self.vars, i) for i in range(len(self.vars))]

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MPoly):
            if other.vars != self.vars:
                raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")
            return other
        return MPoly.const(self.vars, other)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return MPoly._raw(self.vars, t)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c):
        if not c:
            return MPoly._raw(self.vars, {})
        return MPoly._raw(self.vars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            return self.scale(rat(other))
        other = self._coerce(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e, 0) + c1 * c2
                if v:
                    t[e] = v
                else:
                    t.pop(e, None)
        return MPoly._raw(self.vars, t)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self.scale(1 / rat(c))

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = MPoly.const(self.vars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == MPoly.const(self.vars, other).terms
        return NotImplemented

    __hash__ = None

    # -- calculus and evaluation -------------------------------------------
    def diff(self, which):
        i = self.vars.index(which) if isinstance(which, str) else which
        t = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = e[:i] + (k - 1,) + e[i + 1:]
                t[ne] = c * k
        return MPoly._raw(self.vars, t)

    def evaluate(self, point):
        """Evaluate at a full point (sequence aligned with ``vars``)."""
        if len(point) != len(self.vars):
            raise ValueError("point dimension mismatch")
        total = Fraction(0)
        pts = [rat(p) if not isinstance(p, MPoly) else p for p in point]
        for e, c in self.terms.items():
            term = c
            for x, k in zip(pts, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def weighted_degrees(self, weights):
        return {sum(w * k for w, k in zip(weights, e)) for e in self.terms}

    def is_homogeneous(self, weights, deg) -> bool:
        return all(sum(w * k for w, k in zip(weights, e)) == deg for e in self.terms)

    def weighted_part(self, weights, deg):
        return MPoly._raw(self.vars, {e: c for e, c in self.terms.items()
                                      if sum(w * k for w, k in zip(weights, e)) == deg})

    def truncate(self, max_degree: int):
        return MPoly._raw(self.vars, {e: c for e, c in self.terms.items() if sum(e) <= max_degree})

    def depends_on(self, which) -> bool:
        i = self.vars.index(which) if isinstance(which, str) else which
        return any(e[i] for e in self.terms)

    def coefficient(self, which, power: int):
        """Coefficient of ``var**power`` as a polynomial in the same variables."""
        i = self.vars.index(which) if isinstance(which, str) else which
        t = {}
        for e, c in self.terms.items():
            if e[i] == power:
                t[e[:i] + (0,) + e[i + 1:]] = c
        return MPoly._raw(self.vars, t)

    def rebase(self, new_vars):
        """Re-express over ``new_vars`` (must contain every variable used)."""
        new_vars = tuple(new_vars)
        pos = {v: i for i, v in enumerate(new_vars)}
        used = [i for i in range(len(self.vars)) if any(e[i] for e in self.terms)]
        for i in used:
            if self.vars[i] not in pos:
                raise ValueError(f"variable {self.vars[i]} missing from target")
        t = {}
        for e, c in self.terms.items():
            ne = [0] * len(new_vars)
            for i in used:
                ne[pos[self.vars[i]]] = e[i]
            t[tuple(ne)] = c
        return MPoly._raw(new_vars, t)

    def __repr__(self):
        return f"MPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k)
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def mpoly_compose(p: MPoly, substitution) -> MPoly:
    """Substitute polynomials for the variables of ``p``.

    ``substitution`` is a mapping var-name -> MPoly (or a sequence aligned
    with ``p.vars``).  Every variable of ``p`` needs an image, and all images
    must share one variable tuple.
    """
    if isinstance(substitution, dict):
        missing = [v for v in p.vars if v not in substitution]
        if missing:
            raise KeyError(f"no substitution for variables {missing}")
        images = [substitution[v] for v in p.vars]
    else:
        images = list(substitution)
        if len(images) != len(p.vars):
            raise KeyError("substitution length does not match variables")
    target = next((q.vars for q in images if isinstance(q, MPoly)), None)
    if target is None:
        return MPoly.const((), p.evaluate(images))
    images = [q if isinstance(q, MPoly) else MPoly.const(target, q) for q in images]
    cache = [{0: MPoly.const(target, 1), 1: q} for q in images]

    def power(i, k):
        c = cache[i]
        if k not in c:
            c[k] = power(i, k - 1) * images[i]
        return c[k]

    out = MPoly.zero(target)
    for e, c in p.terms.items():
        term = MPoly.const(target, c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
        out = out + term
    return out


def jacobian(polys, vars=None):
    """Matrix of partial derivatives ``J[i][j] = d polys[i] / d vars[j]``."""
    if vars is None:
        vars = polys[0].vars
    return [[p.diff(v) for v in vars] for p in polys]


def truncated_inverse(polys, point, degree: int):
    """Taylor polynomial of the local inverse of a polynomial map.

    ``polys`` maps R^n -> R^n (all over the same n variables).  Returns
    polynomials ``u_1..u_n`` in variables ``w_1..w_n`` such that
    ``polys(point + u(w)) = polys(point) + w`` up to total degree ``degree``
    in ``w``; i.e. ``point + u(w)`` is the inverse expanded around the image.
    """
    n = len(polys)
    vars = polys[0].vars
    wvars = tuple(f"w{i + 1}" for i in range(n))
    point = [rat(p) for p in point]
    J = [[p.diff(v).evaluate(point) for v in vars] for p in polys]
    Jinv = inverse(RatMatrix.from_rows(J)).to_rows()
    base = [p.evaluate(point) for p in polys]
    shifted_vars = [MPoly.var(vars, i) + point[i] for i in range(n)]
    # polys(point + u) - base - J u : purely nonlinear in u
    shifted = [mpoly_compose(p, shifted_vars) - b for p, b in zip(polys, base)]
    nonlinear = []
    for i, q in enumerate(shifted):
        lin = MPoly(vars, {tuple(1 if k == j else 0 for k in range(n)): J[i][j]
                           for j in range(n) if J[i][j]})
        nonlinear.append(q - lin)
    w = [MPoly.var(wvars, i) for i in range(n)]
    u = [sum((w[j] * Jinv[i][j] for j in range(n) if Jinv[i][j]), MPoly.zero(wvars)) for i in range(n)]
    for _ in range(degree):
        nl = [mpoly_compose(q, u).truncate(degree) for q in nonlinear]
        u = [sum(((w[j] - nl[j]) * Jinv[i][j] for j in range(n) if Jinv[i][j]), MPoly.zero(wvars)).truncate(degree)
             for i in range(n)]
    return u


def monomials_of_weight(weights, m):
    """All exponent tuples ``I`` with ``sum(w_j I_j) == m``."""
    weights = list(weights)
    n = len(weights)
    out = []

    def rec(i, rem, acc):
        if i == n:
            if rem == 0:
                out.append(tuple(acc))
            return
        w = weights[i]
        for k in range(rem // w + 1):
            acc.append(k)
            rec(i + 1, rem - k * w, acc)
            acc.pop()

    rec(0, m, [])
    return out


def words(alphabet_size: int, length: int):
    """Words over ``range(alphabet_size)`` in base-n numeric order."""
    return list(_iproduct(range(alphabet_size), repeat=length))
