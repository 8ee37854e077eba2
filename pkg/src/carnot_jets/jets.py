"""Jet algebras j^m(g; W) and jet groups J^m(G; W) = G ⋉ HD^{<=m}(g; W).

Points are stored in the product chart ``(a, A)``: ``a`` in exponential
coordinates of G and ``A`` as A_I-coordinates per degree.  Tangent vectors are
left-trivialized ``(x, X)`` with ``x = dL_a^{-1}(a')`` and ``X = A'``.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .algebra import StratAlg, bch_table, dexp_series
from .exact import MPoly, mpoly_compose, rat
from .hd import HDElem, HDSpace
from .polyjet import as_wpoly, horizontal_derivatives, left_field


class JetError(ValueError):
    pass


class JetSpace:
    """Coordinates and group structure of J^m(G; R^wdim)."""

    def __init__(self, alg: StratAlg, wdim: int, m: int):
        if m < 0 or wdim < 1:
            raise JetError("need m >= 0 and dim W >= 1")
        alg.require_valid()
        self.alg = alg
        self.wdim = wdim
        self.m = m
        self.hd = HDSpace.of(alg, wdim)
        self.dims = [self.hd.dim(k) for k in range(m + 1)]
        self.stack_vars = {k: tuple(f"A{k}_{j + 1}" for j in range(self.dims[k])) for k in range(m + 1)}
        self.vars = tuple(alg.coord_names) + tuple(v for k in range(m + 1) for v in self.stack_vars[k])
        self.N = len(self.vars)
        self._offsets = {}
        off = alg.n
        for k in range(m + 1):
            self._offsets[k] = off
            off += self.dims[k]
        self._cache = {}

    def __repr__(self):
        return f"J^{self.m}({self.alg.name}; R^{self.wdim})"

    def same(self, other):
        if other.wdim != self.wdim or other.m != self.m:
            return False
        return other.alg is self.alg or other.alg.to_json() == self.alg.to_json()

    def offset(self, k):
        return self._offsets[k]

    def higher(self, extra=1):
        return jet_space(self.alg, self.wdim, self.m + extra)

    def lower(self):
        return jet_space(self.alg, self.wdim, self.m - 1)

    # -- points -------------------------------------------------------------
    def point(self, base, stack=None):
        return JetPoint(self, base, stack)

    def identity(self):
        return JetPoint(self, [0] * self.alg.n)

    def flat(self, p):
        return list(p.base) + [c for k in range(self.m + 1) for c in p.stack[k]]

    def unflat(self, vals):
        n = self.alg.n
        stack = {k: list(vals[self._offsets[k]:self._offsets[k] + self.dims[k]]) for k in range(self.m + 1)}
        return JetPoint(self, list(vals[:n]), stack)

    def symbolic_point(self):
        """The generic point: coordinate polynomials over ``self.vars``."""
        gens = [MPoly.var(self.vars, i) for i in range(self.N)]
        return gens[:self.alg.n], {k: gens[self._offsets[k]:self._offsets[k] + self.dims[k]]
                                   for k in range(self.m + 1)}

    # -- group law ----------------------------------------------------------
    def contract(self, x, stack):
        """x ⌐ stack on coordinate stacks (entries may be polynomials)."""
        out = self.hd.contract_coords(x, stack)
        return {k: v for k, v in out.items() if k <= self.m}

    def contract_exp(self, x, stack, coeffs=None):
        """sum_k c_k (x⌐)^k stack with c_k = 1/k! by default."""
        top = max(self.m, self.alg.step) + 1
        if coeffs is None:
            coeffs = [Fraction(1, factorial(k)) for k in range(top + 1)]
        out = {k: [c * coeffs[0] for c in v] for k, v in stack.items()}
        term = stack
        for j in range(1, len(coeffs)):
            term = self.contract(x, term)
            if not any(any(v) for v in term.values()):
                break
            if coeffs[j]:
                for k, v in term.items():
                    tgt = out.setdefault(k, [0] * self.dims[k])
                    out[k] = [a + coeffs[j] * b for a, b in zip(tgt, v)]
        return {k: out.get(k, [0] * self.dims[k]) for k in range(self.m + 1)}

    def multiply(self, p, q):
        """(a, A)(b, B) = (ab, B + e^{b⌐} A)."""
        if not (self.same(p.space) and self.same(q.space)):
            raise JetError("jet space mismatch")
        tab = bch_table(self.alg)
        base = tab.evaluate(p.base, q.base)
        eA = self.contract_exp(q.base, p.stack)
        return JetPoint(self, base, {k: [x + y for x, y in zip(q.stack[k], eA[k])] for k in range(self.m + 1)})

    def inverse(self, p):
        neg = [-c for c in p.base]
        e = self.contract_exp(neg, p.stack)
        return JetPoint(self, neg, {k: [-c for c in e[k]] for k in range(self.m + 1)})

    def exp(self, x, X):
        """exp_J(x, X) = (x, sum_k (x⌐)^k X / (k+1)!)."""
        top = max(self.m, self.alg.step) + 2
        coeffs = [Fraction(1, factorial(k + 1)) for k in range(top)]
        X = self._full(X)
        return JetPoint(self, list(x), self.contract_exp(list(x), X, coeffs))

    def log(self, p):
        """Inverse of exp: ``(x, X)`` with X = (N / (e^N - 1)) A, N = a⌐."""
        top = max(self.m, self.alg.step) + 2
        coeffs = dexp_series(top, sign=-1)
        return list(p.base), self.contract_exp(list(p.base), p.stack, coeffs)

    def _full(self, X):
        return {k: list(X.get(k, [0] * self.dims[k])) for k in range(self.m + 1)}

    def dilate(self, p, lam, d=None):
        """(delta_lam a, lam^{d-k} A^k); d defaults to m+1 (the graded dilation)."""
        lam = rat(lam)
        if lam <= 0:
            raise JetError("dilation factor must be positive")
        d = self.m + 1 if d is None else d
        base = [c * lam ** w for c, w in zip(p.base, self.alg.weights)]
        return JetPoint(self, base, {k: [c * lam ** (d - k) for c in p.stack[k]] for k in range(self.m + 1)})

    def project(self, p, m):
        """pi_m: drop stack degrees above m."""
        low = jet_space(self.alg, self.wdim, m)
        return JetPoint(low, list(p.base), {k: list(p.stack[k]) for k in range(m + 1)})

    # -- algebra ------------------------------------------------------------
    def algebra(self):
        if "alg" not in self._cache:
            self._cache["alg"] = build_jet_algebra(self)
        return self._cache["alg"]

    def layer_spec(self):
        """Basis of j^m in weight order: list of (weight, ('g', u) | ('hd', k, idx))."""
        alg, m = self.alg, self.m
        out = []
        for ell in range(1, max(alg.step, m + 1) + 1):
            for u in alg.layer(ell):
                out.append((ell, ("g", u)))
            k = m + 1 - ell
            if 0 <= k <= m:
                for j in range(self.dims[k]):
                    out.append((ell, ("hd", k, j)))
        return out

    def split(self, vec):
        """Jet-algebra coordinates -> (x, X)."""
        x = [Fraction(0)] * self.alg.n
        X = {k: [Fraction(0)] * self.dims[k] for k in range(self.m + 1)}
        for c, (_, tag) in zip(vec, self.layer_spec()):
            if tag[0] == "g":
                x[tag[1]] = c
            else:
                X[tag[1]][tag[2]] = c
        return x, X

    def join(self, x, X):
        out = []
        for _, tag in self.layer_spec():
            out.append(x[tag[1]] if tag[0] == "g" else X.get(tag[1], [0] * self.dims[tag[1]])[tag[2]])
        return out

    def jet_bracket(self, x, X, y, Y):
        """[(x,X),(y,Y)] = ([x,y], y⌐X - x⌐Y)."""
        z = self.alg.br(x, y)
        a = self.contract(y, X)
        b = self.contract(x, Y)
        Z = {}
        for k in range(self.m + 1):
            va = a.get(k, [0] * self.dims[k])
            vb = b.get(k, [0] * self.dims[k])
            Z[k] = [p - q for p, q in zip(va, vb)]
        return z, Z

    # -- contact structure -------------------------------------------------
    def coframe(self, p, x, X):
        """``(omega, theta)``: omega[l] = X^l - x_1⌐A^{l+1}, theta[j] = Pi_j x."""
        alg = self.alg
        x1 = [c if alg.weights[i] == 1 else 0 for i, c in enumerate(x)]
        omega = {}
        for ell in range(self.m):
            c = self.contract(x1, {ell + 1: p.stack[ell + 1]}).get(ell, [0] * self.dims[ell])
            omega[ell] = [a - b for a, b in zip(X.get(ell, [0] * self.dims[ell]), c)]
        theta = {j: [x[i] for i in alg.layer(j)] for j in range(2, alg.step + 1)}
        return omega, theta

    def horizontal_frame(self, p):
        """Left-trivialized frame of H^m at p: r vectors X_j then dim HD^m vectors Y_k."""
        alg = self.alg
        out = []
        for j in range(alg.r):
            v = alg.basis_vector(j).coords
            c = self.contract(v, p.stack)
            out.append((v, {k: c.get(k, [0] * self.dims[k]) for k in range(self.m + 1)}))
        for j in range(self.dims[self.m]):
            X = {k: [0] * self.dims[k] for k in range(self.m + 1)}
            X[self.m][j] = Fraction(1)
            out.append(([Fraction(0)] * alg.n, X))
        return out

    def left_field_coords(self, x, X):
        """Coordinate expression (polynomials over ``self.vars``) of the left-invariant
        field generated by (x, X): base a' = x~(a), stack A' = X + x⌐A."""
        alg = self.alg
        a, A = self.symbolic_point()
        zero = MPoly.zero(self.vars)
        base = [zero] * alg.n
        for i, c in enumerate(x):
            if c:
                for k, q in enumerate(left_field(alg, i)):
                    if q:
                        base[k] = base[k] + q.rebase(self.vars) * c
        cA = self.contract(x, A)
        stack = []
        for k in range(self.m + 1):
            ck = cA.get(k, [zero] * self.dims[k])
            Xk = X.get(k, [0] * self.dims[k])
            stack.extend(MPoly.const(self.vars, xx) + cc for xx, cc in zip(Xk, ck))
        return base + stack

    def frame_fields(self):
        """Coordinate fields of the jet-algebra basis, in ``layer_spec`` order."""
        if "frame" not in self._cache:
            out = []
            for _, tag in self.layer_spec():
                x = [0] * self.alg.n
                X = {}
                if tag[0] == "g":
                    x[tag[1]] = 1
                else:
                    X = {tag[1]: [1 if j == tag[2] else 0 for j in range(self.dims[tag[1]])]}
                out.append(self.left_field_coords(x, X))
            self._cache["frame"] = out
        return self._cache["frame"]

    def dL_inverse(self):
        """Q with (dL_b^{-1} b')_k = sum_i b'_i Q[i][k](b), polynomials in g-coordinates."""
        key = "dLinv"
        if key not in self._cache:
            alg = self.alg
            tab = bch_table(alg)
            cv = alg.coord_names
            gens = [MPoly.var(cv, i) for i in range(alg.n)]
            sub = [-g for g in gens] + gens
            n = alg.n
            self._cache[key] = [[mpoly_compose(tab.polys[k].diff(n + i), sub) for k in range(n)]
                                for i in range(n)]
        return self._cache[key]

    # -- jets of functions ---------------------------------------------------
    def jet_of(self, f, p):
        from .polyjet import horizontal_stack
        f = as_wpoly(f)
        if len(f) != self.wdim:
            raise JetError("function has the wrong number of W components")
        st = horizontal_stack(self.alg, f, p, self.m)
        return JetPoint(self, list(p), {k: self.hd.coords(st[k]) for k in range(self.m + 1)})

    def jet_polys(self, f):
        """Stack coordinates of J^m f as polynomials in the g-coordinates."""
        f = as_wpoly(f)
        if len(f) != self.wdim:
            raise JetError("function has the wrong number of W components")
        ders = [horizontal_derivatives(self.alg, g, self.m) for g in f]
        out = {}
        for k in range(self.m + 1):
            tensor = {w: [d[w] for d in ders] for w in ders[0] if len(w) == k}
            out[k] = self.poly_coords(k, tensor)
        return out

    def poly_coords(self, k, tensor):
        """A_I-coordinates of a tensor with polynomial entries; checks membership."""
        d = self.hd._degree_data(k)
        nI = len(d["indices"])
        wd = self.wdim
        sample = next(iter(tensor.values()))[0]
        zero = MPoly.zero(sample.vars)
        out = [zero] * (nI * wd)
        for a in range(nI):
            for c in range(wd):
                acc = zero
                for mval, w in zip(d["Minv"][a], d["rows"]):
                    if mval:
                        acc = acc + tensor[w][c] * mval
                out[a * wd + c] = acc
        for w, vals in tensor.items():
            for c in range(wd):
                back = zero
                for a, tens in enumerate(d["tensors"]):
                    v = tens.get(w)
                    if v:
                        back = back + out[a * wd + c] * v
                if back != vals[c]:
                    raise JetError(f"tensor entry at word {w} is not a horizontal derivative")
        return out

    def is_jet_section(self, gamma):
        """``gamma = {k: [polys in g-coords]}``.  Returns ``(True, f)`` or
        ``(False, (l, j, witness_poly))``."""
        alg = self.alg
        cv = alg.coord_names
        from .polyjet import left_basis_derive
        for ell in range(self.m):
            for j in range(alg.r):
                v = alg.basis_vector(j).coords
                lhs = [left_basis_derive(alg, j, g) for g in gamma[ell]]
                rhs = self.contract(v, {ell + 1: gamma[ell + 1]}).get(ell, [MPoly.zero(cv)] * self.dims[ell])
                for a, b in zip(lhs, rhs):
                    diff = a - b
                    if diff:
                        return False, (ell, j, diff)
        f = [g for g in gamma[0]]
        rebuilt = self.jet_polys(f)
        for k in range(self.m + 1):
            if [p for p in rebuilt[k]] != [p for p in gamma[k]]:
                raise JetError("jet reconstruction failed although all contact forms vanish")
        return True, f


class JetPoint:
    __slots__ = ("space", "base", "stack")

    def __init__(self, space: JetSpace, base, stack=None):
        if len(base) != space.alg.n:
            raise JetError("base point has the wrong dimension")
        self.space = space
        self.base = [rat(c) for c in base]
        stack = stack or {}
        self.stack = {}
        for k in range(space.m + 1):
            v = stack.get(k, [0] * space.dims[k])
            if isinstance(v, HDElem):
                v = space.hd.coords(v)
            if len(v) != space.dims[k]:
                raise JetError(f"stack degree {k} has the wrong dimension")
            self.stack[k] = [rat(c) for c in v]
        extra = [k for k in stack if not 0 <= k <= space.m]
        if extra:
            raise JetError(f"stack degrees {extra} exceed the order {space.m}")

    def tensors(self):
        return {k: self.space.hd.to_elem(k, v) for k, v in self.stack.items()}

    def __mul__(self, other):
        return self.space.multiply(self, other)

    def __eq__(self, other):
        return (isinstance(other, JetPoint) and self.space.same(other.space)
                and self.base == other.base and self.stack == other.stack)

    __hash__ = None

    def __repr__(self):
        return f"JetPoint({self.base}, {self.stack})"


def jet_space(alg, wdim, m) -> JetSpace:
    cache = alg._cache.setdefault("jetspace", {})
    key = (wdim, m)
    if key not in cache:
        cache[key] = JetSpace(alg, wdim, m)
    return cache[key]


def build_jet_algebra(js: JetSpace) -> StratAlg:
    """Structure constants of j^m(g; W) in the adapted basis of ``layer_spec``."""
    spec = js.layer_spec()
    alg = js.alg
    labels = []
    hd_labels = {k: js.hd.labels(k) for k in range(js.m + 1)}
    for _, tag in spec:
        labels.append(alg.labels[tag[1]] if tag[0] == "g" else f"{hd_labels[tag[1]][tag[2]]}")
    structure = {}
    n = len(spec)
    for a in range(n):
        for b in range(a + 1, n):
            ta, tb = spec[a][1], spec[b][1]
            if ta[0] == "hd" and tb[0] == "hd":
                continue
            xa, Xa = js.split([1 if i == a else 0 for i in range(n)])
            xb, Xb = js.split([1 if i == b else 0 for i in range(n)])
            z, Z = js.jet_bracket(xa, Xa, xb, Xb)
            vec = js.join(z, Z)
            out = {i: c for i, c in enumerate(vec) if c}
            if out:
                structure[a, b] = out
    name = f"j^{js.m}({alg.name};R^{js.wdim})"
    ja = StratAlg(name, [w for w, _ in spec], structure, labels)
    ja.provenance = [("base", alg.labels[t[1]]) if t[0] == "g" else ("hd", t[1], js.hd.indices(t[1])[t[2] // js.wdim], t[2] % js.wdim)
                     for _, t in spec]
    return ja


def jet_multiply(p: JetPoint, q: JetPoint) -> JetPoint:
    return p.space.multiply(p, q)


def jet_exp(js: JetSpace, x, X) -> JetPoint:
    return js.exp(x, X)


def jet_of(js: JetSpace, f, p) -> JetPoint:
    return js.jet_of(f, p)


def coframe(p: JetPoint, x, X):
    return p.space.coframe(p, x, X)


def horizontal_frame(p: JetPoint):
    return p.space.horizontal_frame(p)

