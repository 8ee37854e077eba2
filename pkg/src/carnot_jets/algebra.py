"""Stratified Lie algebras given by an adapted basis and structure constants.

Group elements are stored as algebra elements (exponential coordinates), so
the group law is the BCH product.  Basis indices are 0-based internally and
1-based in JSON.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from math import factorial

from .exact import MPoly, RatMatrix, rat, rat_str, solve_linear


class AlgebraError(ValueError):
    pass


class StratAlg:
    """Adapted basis with weights ``w_1 <= ... <= w_n`` and brackets.

    ``structure`` maps ``(i, j)`` with ``i < j`` to ``{k: c}`` meaning
    ``[b_i, b_j] = sum_k c b_k``.
    """

    def __init__(self, name, weights, structure, labels=None, decomp=None):
        self.name = name
        self.weights = tuple(int(w) for w in weights)
        self.n = len(self.weights)
        if any(w < 1 for w in self.weights):
            raise AlgebraError("weights must be positive")
        if list(self.weights) != sorted(self.weights):
            raise AlgebraError("weights must be non-decreasing (adapted basis)")
        self.step = max(self.weights, default=0)
        if labels is None:
            labels = [f"E{i + 1}" for i in range(self.n)]
        self.labels = tuple(labels)
        if len(self.labels) != self.n or len(set(self.labels)) != self.n:
            raise AlgebraError("labels must be distinct, one per basis vector")
        self.coord_names = tuple(l.lower() for l in self.labels)
        self.structure = {}
        for (i, j), out in structure.items():
            if not (0 <= i < j < self.n):
                raise AlgebraError(f"bracket key ({i},{j}) must satisfy 0 <= i < j < n")
            clean = {k: rat(c) for k, c in out.items() if rat(c)}
            if any(not 0 <= k < self.n for k in clean):
                raise AlgebraError("bracket output index out of range")
            if clean:
                self.structure[i, j] = clean
        # full table including antisymmetric entries
        self._table = {}
        for (i, j), out in self.structure.items():
            self._table[i, j] = out
            self._table[j, i] = {k: -c for k, c in out.items()}
        self.r = sum(1 for w in self.weights if w == 1)
        self.layers = {}
        for i, w in enumerate(self.weights):
            self.layers.setdefault(w, []).append(i)
        self._user_decomp = decomp
        self._decomp = None
        self._report = None
        self._cache = {}

    # -- basic ------------------------------------------------------------
    def layer_dims(self):
        return tuple(len(self.layers.get(k, [])) for k in range(1, self.step + 1))

    def layer(self, k):
        return list(self.layers.get(k, []))

    def bracket_basis(self, i, j):
        return self._table.get((i, j), {})

    def br(self, x, y):
        """Bracket of coordinate lists; coefficients may be Fractions or MPolys."""
        out = [0] * self.n
        nzx = [(i, a) for i, a in enumerate(x) if a]
        nzy = [(j, b) for j, b in enumerate(y) if b]
        for i, a in nzx:
            for j, b in nzy:
                t = self._table.get((i, j))
                if t:
                    ab = a * b
                    for k, c in t.items():
                        out[k] = out[k] + ab * c
        return [o if isinstance(o, MPoly) else Fraction(o) for o in out]

    def ad_power_series(self, x, v, coeffs):
        """``sum_k coeffs[k] * ad_x^k v`` for a finite coefficient list."""
        out = [c * coeffs[0] for c in v]
        term = list(v)
        for k in range(1, len(coeffs)):
            term = self.br(x, term)
            if not any(term):
                break
            if coeffs[k]:
                out = [o + t * coeffs[k] for o, t in zip(out, term)]
        return out

    def basis_vector(self, i):
        return AlgElem(self, [1 if k == i else 0 for k in range(self.n)])

    def element(self, coords):
        return AlgElem(self, coords)

    def zero(self):
        return AlgElem(self, [0] * self.n)

    def project(self, x, k):
        """Pi_k: keep only layer-k coordinates."""
        return [c if self.weights[i] == k else 0 for i, c in enumerate(x)]

    # -- validation -------------------------------------------------------
    def validate(self):
        """Report ``{check: (ok, message)}``; usable iff every check passes."""
        if self._report is not None:
            return self._report
        rep = {}
        bad = None
        for i in range(self.n):
            for j in range(i + 1, self.n):
                for k in range(j + 1, self.n):
                    e = [self.basis_vector(t).coords for t in (i, j, k)]
                    s = [a + b + c for a, b, c in zip(
                        self.br(e[0], self.br(e[1], e[2])),
                        self.br(e[1], self.br(e[2], e[0])),
                        self.br(e[2], self.br(e[0], e[1])))]
                    if any(s) and bad is None:
                        bad = (i, j, k)
        rep["jacobi"] = (bad is None, "ok" if bad is None else
                         f"Jacobi fails on {[self.labels[t] for t in bad]}")
        bad = None
        for (i, j), out in self.structure.items():
            for k in out:
                if self.weights[k] != self.weights[i] + self.weights[j]:
                    bad = (i, j, k)
        rep["grading"] = (bad is None, "ok" if bad is None else
                          f"[{self.labels[bad[0]]},{self.labels[bad[1]]}] has a {self.labels[bad[2]]} component of the wrong weight")
        decomp, missing = self._compute_decomp()
        rep["bracket_generating"] = (not missing, "ok" if not missing else
                                     f"not in [V1, V_(k-1)]: {[self.labels[u] for u in missing]}")
        ok, msg = True, "ok"
        if self._user_decomp is not None:
            decomp = self._user_decomp
        for u, terms in decomp.items():
            acc = [Fraction(0)] * self.n
            for a, i, j in terms:
                if self.weights[i] != 1 or self.weights[j] != self.weights[u] - 1:
                    ok, msg = False, f"decomposition of {self.labels[u]} uses wrong layers"
                for k, c in self.bracket_basis(i, j).items():
                    acc[k] += a * c
            if acc != self.basis_vector(u).coords:
                ok, msg = False, f"decomposition of {self.labels[u]} does not reproduce it"
        rep["bracket_decomp"] = (ok and not missing, msg if not missing else "incomplete")
        self._decomp = decomp
        self._report = rep
        return rep

    def is_valid(self):
        return all(ok for ok, _ in self.validate().values())

    def require_valid(self):
        rep = self.validate()
        bad = [f"{k}: {m}" for k, (ok, m) in rep.items() if not ok]
        if bad:
            raise AlgebraError(f"{self.name} is not a stratified algebra: " + "; ".join(bad))
        return self

    def _compute_decomp(self):
        decomp, missing = {}, []
        for u in range(self.n):
            w = self.weights[u]
            if w == 1:
                continue
            pairs = [(i, j) for i in self.layer(1) for j in self.layer(w - 1)]
            A = RatMatrix(self.n, len(pairs), {(k, c): v for c, (i, j) in enumerate(pairs)
                                               for k, v in self.bracket_basis(i, j).items()})
            sol = solve_linear(A, self.basis_vector(u).coords)
            if sol is None:
                missing.append(u)
                continue
            decomp[u] = [(a, i, j) for a, (i, j) in zip(sol, pairs) if a]
        return decomp, missing

    @property
    def bracket_decomp(self):
        """Map u -> [(alpha, i, j)] with b_u = sum alpha [b_i, b_j], w_i = 1."""
        if self._decomp is None:
            self.validate()
        return self._decomp

    # -- io ---------------------------------------------------------------
    def to_json(self):
        br = {}
        for (i, j), out in sorted(self.structure.items()):
            br[f"{i + 1},{j + 1}"] = [{"k": k + 1, "c": rat_str(c)} for k, c in sorted(out.items())]
        return {"name": self.name, "labels": list(self.labels), "weights": list(self.weights), "brackets": br}

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        try:
            weights = data["weights"]
            structure = {}
            for key, outs in data.get("brackets", {}).items():
                i, j = (int(t) - 1 for t in key.split(","))
                out = {}
                for term in outs:
                    out[int(term["k"]) - 1] = out.get(int(term["k"]) - 1, 0) + rat(term["c"])
                if i > j:
                    i, j = j, i
                    out = {k: -c for k, c in out.items()}
                if i == j:
                    if any(out.values()):
                        raise AlgebraError(f"[b{i + 1},b{i + 1}] must vanish")
                    continue
                structure[i, j] = out
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, AlgebraError):
                raise
            raise AlgebraError(f"malformed algebra JSON: {exc}") from None
        return cls(data.get("name", "custom"), weights, structure, data.get("labels"))

    def __repr__(self):
        return f"StratAlg({self.name}, dims={self.layer_dims()})"


class AlgElem:
    __slots__ = ("alg", "coords")

    def __init__(self, alg: StratAlg, coords):
        coords = [rat(c) for c in coords]
        if len(coords) != alg.n:
            raise AlgebraError(f"expected {alg.n} coordinates, got {len(coords)}")
        self.alg = alg
        self.coords = coords

    def _check(self, other):
        if not isinstance(other, AlgElem) or other.alg is not self.alg:
            raise AlgebraError("algebra mismatch")

    def __add__(self, other):
        self._check(other)
        return AlgElem(self.alg, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        self._check(other)
        return AlgElem(self.alg, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return AlgElem(self.alg, [-a for a in self.coords])

    def __mul__(self, c):
        c = rat(c)
        return AlgElem(self.alg, [a * c for a in self.coords])

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, AlgElem) and other.alg is self.alg and other.coords == self.coords

    __hash__ = None

    def __bool__(self):
        return any(self.coords)

    def __str__(self):
        parts = [f"{c}*{l}" if c != 1 else l for c, l in zip(self.coords, self.alg.labels) if c]
        return " + ".join(parts) or "0"

    __repr__ = __str__


def _pair(x, y):
    if not isinstance(x, AlgElem) or not isinstance(y, AlgElem) or x.alg is not y.alg:
        raise AlgebraError("algebra mismatch")
    return x.alg


def bracket(x: AlgElem, y: AlgElem) -> AlgElem:
    alg = _pair(x, y)
    return AlgElem(alg, alg.br(x.coords, y.coords))


def dilate(x: AlgElem, lam) -> AlgElem:
    lam = rat(lam)
    if lam <= 0:
        raise AlgebraError("dilation factor must be positive")
    return AlgElem(x.alg, [c * lam ** w for c, w in zip(x.coords, x.alg.weights)])


def adjoint(p: AlgElem, x: AlgElem) -> AlgElem:
    """Ad_{exp p} x = e^{ad_p} x."""
    alg = _pair(p, x)
    coeffs = [Fraction(1, factorial(k)) for k in range(alg.step + 1)]
    return AlgElem(alg, alg.ad_power_series(p.coords, x.coords, coeffs))


def bch(x: AlgElem, y: AlgElem) -> AlgElem:
    """log(exp x exp y), evaluated from the cached symbolic table."""
    alg = _pair(x, y)
    return AlgElem(alg, bch_table(alg).evaluate(x.coords, y.coords))


def group_inverse(x: AlgElem) -> AlgElem:
    return -x


class BCHTable:
    """``polys[k]`` is the k-th coordinate of ``bch(x, y)`` in variables x_i, y_i."""

    def __init__(self, alg, polys, vars):
        self.alg = alg
        self.polys = polys
        self.vars = vars

    def evaluate(self, x, y):
        pt = list(x) + list(y)
        return [p.evaluate(pt) for p in self.polys]

    def eta(self):
        """Top-layer defect Pi_{s}(xy) - x_s - y_s, one polynomial per top index."""
        s = self.alg.step
        n = self.alg.n
        out = {}
        for k in self.alg.layer(s):
            out[k] = self.polys[k] - MPoly.var(self.vars, k) - MPoly.var(self.vars, n + k)
        return out


def bch_vars(alg):
    return tuple(f"{c}_x" for c in alg.coord_names) + tuple(f"{c}_y" for c in alg.coord_names)


def bch_table(alg: StratAlg) -> BCHTable:
    tab = alg._cache.get("bch")
    if tab is None:
        from .pbw import symbolic_bch
        vars = bch_vars(alg)
        tab = BCHTable(alg, symbolic_bch(alg, vars), vars)
        alg._cache["bch"] = tab
    return tab


def bernoulli_numbers(N):
    """B_0..B_N with B_1 = -1/2."""
    B = [Fraction(0)] * (N + 1)
    B[0] = Fraction(1)
    for m in range(1, N + 1):
        B[m] = -sum(Fraction(factorial(m + 1), factorial(k) * factorial(m + 1 - k)) * B[k]
                    for k in range(m)) / (m + 1)
    return B


def dexp_series(N, sign=1):
    """Coefficients of ``z / (1 - e^{-z})`` (sign=+1) or ``z / (e^z - 1)`` (sign=-1)."""
    B = bernoulli_numbers(N)
    return [b / factorial(k) * (-sign if k == 1 else 1) for k, b in enumerate(B)]


# ---------------------------------------------------------------------------
# catalog


def _heisenberg(k):
    if k == 1:
        return StratAlg("heisenberg(1)", [1, 1, 2], {(0, 1): {2: 1}}, ["X", "Y", "Z"])
    labels = [f"X{i + 1}" for i in range(k)] + [f"Y{i + 1}" for i in range(k)] + ["Z"]
    return StratAlg(f"heisenberg({k})", [1] * (2 * k) + [2],
                    {(i, k + i): {2 * k: 1} for i in range(k)}, labels)


def _engel():
    return StratAlg("engel", [1, 1, 2, 3], {(0, 1): {2: 1}, (0, 2): {3: 1}},
                    ["X1", "X2", "X3", "X4"])


def _cartan():
    return StratAlg("cartan_n23", [1, 1, 2, 3, 3], {(0, 1): {2: 1}, (0, 2): {3: 1}, (1, 2): {4: 1}},
                    ["X1", "X2", "X3", "X4", "X5"])


def _abelian(n):
    return StratAlg(f"abelian({n})", [1] * n, {}, [f"E{i + 1}" for i in range(n)])


def product_with_line(base: StratAlg, label="T", name=None) -> StratAlg:
    """``base x R`` with the new weight-one vector placed right after V1."""
    r = base.r
    old_to_new = [i if i < r else i + 1 for i in range(base.n)]
    weights = list(base.weights[:r]) + [1] + list(base.weights[r:])
    labels = list(base.labels[:r]) + [label] + list(base.labels[r:])
    structure = {}
    for (i, j), out in base.structure.items():
        structure[old_to_new[i], old_to_new[j]] = {old_to_new[k]: c for k, c in out.items()}
    return StratAlg(name or f"jet_counterexample({base.name})", weights, structure, labels)


def catalog(name: str) -> StratAlg:
    key = name.strip().replace(" ", "")
    m = re.fullmatch(r"(\w+)(?:\((.*)\))?", key)
    if not m:
        raise AlgebraError(f"unknown algebra {name!r}")
    head, arg = m.group(1), m.group(2)
    if head == "heisenberg":
        k = int(arg) if arg else 1
        if k < 1:
            raise AlgebraError("heisenberg(k) needs k >= 1")
        alg = _heisenberg(k)
    elif head == "abelian":
        if not arg or int(arg) < 1:
            raise AlgebraError("abelian(n) needs n >= 1")
        alg = _abelian(int(arg))
    elif head in ("R", "reals") and arg is None:
        alg = _abelian(1)
    elif head == "engel" and arg is None:
        alg = _engel()
    elif head == "cartan_n23" and arg is None:
        alg = _cartan()
    elif head == "jet_counterexample":
        alg = product_with_line(catalog(arg or "abelian(1)"))
    else:
        raise AlgebraError(f"unknown algebra {name!r}")
    return alg.require_valid()


CATALOG_NAMES = ("abelian(2)", "heisenberg(1)", "heisenberg(2)", "engel", "cartan_n23",
                 "jet_counterexample(abelian(1))")


def load_algebra(source: str) -> StratAlg:
    """Catalog name or path to an algebra JSON file."""
    try:
        return catalog(source)
    except AlgebraError:
        pass
    try:
        with open(source) as fh:
            data = json.load(fh)
    except OSError:
        raise AlgebraError(f"unknown algebra {source!r} (not a catalog name or readable file)") from None
    except json.JSONDecodeError as exc:
        raise AlgebraError(f"{source}: invalid JSON ({exc})") from None
    return StratAlg.from_json(data)
