"""Contact maps between jet spaces: certification, prolongation, de-prolongation,
characteristic fields and the rigidity examples.

Maps are polynomial in the product chart of the source jet space.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import bch_table, dexp_series
from .exact import (MPoly, RatMatrix, inverse, kernel_basis, mpoly_compose, rank, rat, rref,
                    truncated_inverse)
from .hd import HDElem
from .jets import JetError, JetPoint, JetSpace, jet_space
from .polyjet import as_wpoly, left_field


class Obstruction(Exception):
    """A mathematical obstruction (not a bug): non-contact, outside Omega-hat, no factoring."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class PolyMap:
    """``comps`` lists the target product coordinates as polynomials in ``src.vars``."""

    def __init__(self, src: JetSpace, comps, tgt: JetSpace | None = None, name="map"):
        self.src = src
        self.tgt = tgt or src
        if len(comps) != self.tgt.N:
            raise JetError(f"map needs {self.tgt.N} components, got {len(comps)}")
        self.comps = [c.rebase(src.vars) if c.vars != src.vars else c for c in comps]
        self.name = name
        self.certificate = None
        self._jac = None

    @property
    def F_G(self):
        return self.comps[:self.src.alg.n]

    def stack_comps(self, k):
        off = self.tgt.offset(k)
        return self.comps[off:off + self.tgt.dims[k]]

    def __call__(self, p: JetPoint) -> JetPoint:
        if not self.src.same(p.space):
            raise JetError("point is not in the source jet space")
        vals = self.src.flat(p)
        return self.tgt.unflat([c.evaluate(vals) for c in self.comps])

    def jacobian(self):
        if self._jac is None:
            self._jac = [[c.diff(v) for v in self.src.vars] for c in self.comps]
        return self._jac

    def compose(self, other: "PolyMap") -> "PolyMap":
        """self o other."""
        if not self.src.same(other.tgt):
            raise JetError("cannot compose: spaces differ")
        return PolyMap(other.src, [mpoly_compose(c, other.comps) for c in self.comps], self.tgt,
                       f"{self.name}∘{other.name}")

    def equals(self, other: "PolyMap"):
        return self.src.same(other.src) and self.tgt.same(other.tgt) and self.comps == other.comps


# ---------------------------------------------------------------------------
# structured maps


def identity_map(js):
    return PolyMap(js, [MPoly.var(js.vars, i) for i in range(js.N)], name="id")


def constant_map(js, q: JetPoint):
    return PolyMap(js, [MPoly.const(js.vars, c) for c in js.flat(q)], name="const")


def dilation_map(js, lam, d=None):
    """(delta_lam a, lam^{d-k} A^k); ``d`` is the weight of W (default m+1)."""
    lam = rat(lam)
    if lam <= 0:
        raise JetError("dilation factor must be positive")
    d = js.m + 1 if d is None else d
    comps = [MPoly.var(js.vars, i) * lam ** w for i, w in enumerate(js.alg.weights)]
    for k in range(js.m + 1):
        for v in js.stack_vars[k]:
            comps.append(MPoly.var(js.vars, v) * lam ** (d - k))
    return PolyMap(js, comps, name=f"dil({lam},{d})")


def translation_map(js, q: JetPoint):
    """L_q(a, A) = q (a, A) = (qa, A + e^{a⌐} B)."""
    if not js.same(q.space):
        raise JetError("translation point lives in another jet space")
    a, A = js.symbolic_point()
    tab = bch_table(js.alg)
    sub = [MPoly.const(js.vars, c) for c in q.base] + a
    base = [mpoly_compose(p, sub) for p in tab.polys]
    Bconst = {k: [MPoly.const(js.vars, c) for c in q.stack[k]] for k in range(js.m + 1)}
    eB = js.contract_exp(a, Bconst)
    comps = list(base)
    for k in range(js.m + 1):
        comps.extend(x + y for x, y in zip(A[k], eB[k]))
    return PolyMap(js, comps, name="L")


def deprolonged_translation(js, qhat: JetPoint):
    """The map on J^m induced by L_qhat on J^{m+1}: (qa, A + (e^{a⌐} B̂)^{<=m})."""
    hi = qhat.space
    if hi.m != js.m + 1 or hi.alg is not js.alg or hi.wdim != js.wdim:
        raise JetError("translation point must live one order higher")
    a, A = js.symbolic_point()
    tab = bch_table(js.alg)
    sub = [MPoly.const(js.vars, c) for c in qhat.base] + a
    base = [mpoly_compose(p, sub) for p in tab.polys]
    Bconst = {k: [MPoly.const(js.vars, c) for c in qhat.stack[k]] for k in range(hi.m + 1)}
    eB = hi.contract_exp(a, Bconst)
    comps = list(base)
    for k in range(js.m + 1):
        comps.extend(x + y for x, y in zip(A[k], eB[k]))
    return PolyMap(js, comps, name="L'")


def translation_inverse_point(q: JetPoint):
    return q.space.inverse(q)


# ---------------------------------------------------------------------------
# contact certification


def _apply_field(field, P, vars):
    out = MPoly.zero(vars)
    for v, c in zip(vars, field):
        if c:
            d = P.diff(v)
            if d:
                out = out + c * d
    return out


def _trivialize(F: PolyMap, vel):
    """Left-trivialize a target velocity (coordinate polys) at F(p)."""
    tgt = F.tgt
    n = tgt.alg.n
    Q = tgt.dL_inverse()
    FG = F.F_G
    x = [MPoly.zero(F.src.vars)] * n
    for i in range(n):
        if not vel[i]:
            continue
        for k in range(n):
            if Q[i][k]:
                x[k] = x[k] + vel[i] * mpoly_compose(Q[i][k], FG)
    X = {k: vel[tgt.offset(k):tgt.offset(k) + tgt.dims[k]] for k in range(tgt.m + 1)}
    return x, X


def _coframe_symbolic(F: PolyMap, x, X):
    tgt = F.tgt
    alg = tgt.alg
    stack = {k: F.stack_comps(k) for k in range(tgt.m + 1)}
    x1 = [c if alg.weights[i] == 1 else 0 for i, c in enumerate(x)]
    omega = {}
    zero = MPoly.zero(F.src.vars)
    for ell in range(tgt.m):
        c = tgt.contract(x1, {ell + 1: stack[ell + 1]}).get(ell, [zero] * tgt.dims[ell])
        omega[ell] = [a - b for a, b in zip(X[ell], c)]
    theta = {j: [x[i] for i in alg.layer(j)] for j in range(2, alg.step + 1)}
    return omega, theta


def _frame_coords(js):
    """Coordinate fields of the horizontal frame (X_j then Y_k)."""
    key = "hframe"
    if key not in js._cache:
        alg = js.alg
        out = []
        for j in range(alg.r):
            out.append((f"X{j + 1}", js.left_field_coords(alg.basis_vector(j).coords, {})))
        for j in range(js.dims[js.m]):
            X = {js.m: [1 if t == j else 0 for t in range(js.dims[js.m])]}
            out.append((f"Y{j + 1}", js.left_field_coords([0] * alg.n, X)))
        js._cache[key] = out
    return js._cache[key]


def is_contact(F: PolyMap):
    """Check omega^l(dF V) = 0 and theta^j(dF V) = 0 for every horizontal frame vector V.

    Returns ``(True, certificate)`` or ``(False, witness)``; the witness names the
    form, the frame vector and the nonzero polynomial.
    """
    src = F.src
    cert = []
    for name, field in _frame_coords(src):
        vel = [_apply_field(field, P, src.vars) for P in F.comps]
        x, X = _trivialize(F, vel)
        omega, theta = _coframe_symbolic(F, x, X)
        for ell, vals in omega.items():
            for c, v in enumerate(vals):
                if v:
                    return False, {"form": f"omega^{ell}", "component": c, "frame": name, "poly": v}
            cert.append(f"omega^{ell}(dF {name}) = 0")
        for j, vals in theta.items():
            for c, v in enumerate(vals):
                if v:
                    return False, {"form": f"theta^{j}", "component": c, "frame": name, "poly": v}
            cert.append(f"theta^{j}(dF {name}) = 0")
    F.certificate = cert
    return True, cert


# ---------------------------------------------------------------------------
# prolongation


def _lifted_frame_velocity(phat: JetPoint, j):
    """Coordinates (in J^m) of d pi_m X̂_j at p̂."""
    hi = phat.space
    alg = hi.alg
    m = hi.m - 1
    v = alg.basis_vector(j).coords
    base = [q.evaluate(phat.base) for q in left_field(alg, j)]
    c = hi.contract(v, phat.stack)
    stack = []
    for k in range(m + 1):
        stack.extend(c.get(k, [0] * hi.dims[k]))
    return base + stack


def frame_transport(F: PolyMap, phat: JetPoint):
    """``(Ñ, N, independent)`` for the lifted horizontal frame at p̂."""
    hi = phat.space
    src = F.src
    if hi.alg is not src.alg or hi.wdim != src.wdim or hi.m != src.m + 1:
        raise JetError("p̂ must lie in J^{m+1} over the source of F")
    p = hi.project(phat, src.m)
    pt = src.flat(p)
    J = [[d.evaluate(pt) for d in row] for row in F.jacobian()]
    n = src.alg.n
    FG = [c.evaluate(pt) for c in F.F_G]
    Q = F.tgt.dL_inverse()
    Qv = [[q.evaluate(FG) for q in row] for row in Q]
    Ntil, N, C = [], [], []
    for j in range(src.alg.r):
        vel = _lifted_frame_velocity(phat, j)
        img = [sum((a * b for a, b in zip(row, vel) if a and b), Fraction(0)) for row in J]
        Ntil.append(img[:n])
        N.append([sum((img[i] * Qv[i][k] for i in range(n)), Fraction(0)) for k in range(n)])
        off = F.tgt.offset(F.tgt.m)
        C.append(img[off:off + F.tgt.dims[F.tgt.m]])
    r = src.alg.r
    Nmat = [[row[i] for i in range(r)] for row in N]
    horizontal = all(not row[i] for row in N for i in range(r, n))
    indep = horizontal and rank(Nmat) == r
    return Ntil, N, indep, C


def prolong_point(F: PolyMap, phat: JetPoint) -> JetPoint:
    """F̂(p̂): the unique contact lift evaluated at p̂ in J^{m+1}."""
    src = F.src
    hi = phat.space
    Ntil, N, indep, C = frame_transport(F, phat)
    if not indep:
        raise Obstruction("p̂ is outside Omega-hat: transported frame is dependent", N)
    r = src.alg.r
    m = F.tgt.m
    tgt_hi = jet_space(F.tgt.alg, F.tgt.wdim, m + 1)
    Ninv = inverse(RatMatrix.from_rows([row[:r] for row in N])).to_rows()
    hd = F.tgt.hd
    Ctens = [hd.to_elem(m, c) for c in C]
    # N_j ⌐ T = C_j  <=>  T(., v_i) = sum_j Ninv[i][j] C_j
    T = {}
    for i in range(r):
        for j in range(r):
            a = Ninv[i][j]
            if not a:
                continue
            for w, vec in Ctens[j].tensor.items():
                acc = T.setdefault(w + (i,), [Fraction(0)] * F.tgt.wdim)
                for c, x in enumerate(vec):
                    acc[c] += a * x
    Telem = HDElem(F.tgt.alg, F.tgt.wdim, m + 1, T)
    try:
        top = tgt_hi.hd.coords(Telem)
    except Exception as exc:
        raise AssertionError(f"prolonged top component is not a horizontal derivative: {exc}") from None
    low = F(hi.project(phat, src.m))
    stack = dict(low.stack)
    stack[m + 1] = top
    return JetPoint(tgt_hi, low.base, stack)


def jet_polymap(js: JetSpace, f):
    """J^m f as a map G -> J^m: (base polys, stack polys), over g-coordinates."""
    f = as_wpoly(f)
    cv = js.alg.coord_names
    base = [MPoly.var(cv, i) for i in range(js.alg.n)]
    st = js.jet_polys(f)
    return base + [c for k in range(js.m + 1) for c in st[k]]


def prolong_jet_consistency(F: PolyMap, f, a):
    """Check F̂(J^{m+1}f(a)) = (F(J^m f(a)), (J^{m+1}h)^{m+1}(b)) with h defined by
    F o J^m f = J^m h o F_G o J^m f near a.  Returns a report dict."""
    src = F.src
    alg = src.alg
    m = src.m
    f = as_wpoly(f)
    a = [rat(c) for c in a]
    hi = jet_space(alg, src.wdim, m + 1)
    phat = hi.jet_of(f, a)
    lifted = prolong_point(F, phat)
    jm = jet_polymap(src, f)
    comp = [mpoly_compose(c, jm) for c in F.comps]
    phi = comp[:alg.n]
    b = [q.evaluate(a) for q in phi]
    u = truncated_inverse(phi, a, m + 1)
    wv = u[0].vars
    cv = alg.coord_names
    # phi^{-1}(b + w) = a + u(w); h~(w) = F^0(J^m f)(a + u(w))
    sub = [MPoly.const(wv, ai) + ui for ai, ui in zip(a, u)]
    F0 = comp[F.tgt.offset(0):F.tgt.offset(0) + F.tgt.wdim]
    htil = [mpoly_compose(g, sub).truncate(m + 1) for g in F0]
    back = [MPoly.var(cv, i) - bi for i, bi in enumerate(b)]
    h = [mpoly_compose(g, back) for g in htil]
    tgt_hi = jet_space(F.tgt.alg, F.tgt.wdim, m + 1)
    expected = tgt_hi.jet_of(h, b)
    low_image = F(src.jet_of(f, a))
    ok_low = all(expected.stack[k] == low_image.stack[k] for k in range(m + 1)) and expected.base == low_image.base
    ok_top = expected == lifted
    return {"consistent": ok_low and ok_top, "lower_orders_agree": ok_low, "top_order_agrees": ok_top,
            "prolonged": lifted, "expected": expected, "h": h}


# ---------------------------------------------------------------------------
# de-prolongation


def v1_nondegenerate(alg):
    """Every nonzero v in V1 has some v' in V1 with [v, v'] != 0."""
    r = alg.r
    rows = []
    for j in range(r):
        for k in range(alg.n):
            rows.append([alg.bracket_basis(i, j).get(k, 0) for i in range(r)])
    return not kernel_basis(RatMatrix.from_rows(rows, r))


def deprolong(F: PolyMap):
    """Factor pi_m o F = F' o pi_m for F on J^{m+1}; returns (F', report)."""
    hi = F.src
    if not hi.same(F.tgt):
        raise JetError("de-prolongation needs a self-map of a jet space")
    if hi.m < 1:
        raise JetError("de-prolongation needs a map on J^{m+1} with m >= 0")
    low = hi.lower()
    report = {"m": low.m}
    if low.m == 0:
        report["hypotheses"] = {"dim_W_gt_1": hi.wdim > 1, "V1_nondegenerate": v1_nondegenerate(hi.alg)}
    top = hi.stack_vars[hi.m]
    keep = F.comps[:low.N]
    for idx, c in enumerate(keep):
        for v in top:
            d = c.diff(v)
            if d:
                report["obstruction"] = {"component": hi.vars[idx], "variable": v, "derivative": d}
                raise Obstruction(f"pi_{low.m} o F depends on {v} through {hi.vars[idx]}", report)
    Fp = PolyMap(low, [c.rebase(low.vars) for c in keep], name=f"{F.name}'")
    ok, cert = is_contact(Fp)
    if not ok:
        raise AssertionError(f"de-prolonged map is not contact: {cert}")
    report["certificate"] = cert
    return Fp, report


# ---------------------------------------------------------------------------
# characteristic fields on J^m, m >= 2


class HorizField:
    """X = sum_alpha f_alpha E_alpha over the first layer of j^m (frame of left-invariant fields)."""

    def __init__(self, js: JetSpace, coeffs):
        self.js = js
        ja = js.algebra()
        coeffs = list(coeffs)
        if len(coeffs) != ja.n:
            raise JetError("field needs one coefficient per jet-algebra basis vector")
        zero = MPoly.zero(js.vars)
        self.coeffs = [c if isinstance(c, MPoly) else MPoly.const(js.vars, c) for c in coeffs]
        self.coeffs = [c.rebase(js.vars) if c.vars != js.vars else c for c in self.coeffs]
        if any(c and ja.weights[i] != 1 for i, c in enumerate(self.coeffs)):
            raise JetError("horizontal fields only use first-layer frame vectors")
        self._zero = zero

    def v_part(self):
        return [self.coeffs[i] for i, (_, t) in enumerate(self.js.layer_spec()) if t[0] == "g"]


def field_bracket(js, f, g, want=None):
    """Frame coefficients of [sum f_a E_a, sum g_b E_b] (``want`` limits output indices)."""
    ja = js.algebra()
    frame = js.frame_fields()
    vars = js.vars
    n = ja.n
    zero = MPoly.zero(vars)
    want = range(n) if want is None else want
    out = {}
    nzf = [(a, c) for a, c in enumerate(f) if c]
    nzg = [(b, c) for b, c in enumerate(g) if c]
    for gam in want:
        acc = zero
        if g[gam]:
            for a, c in nzf:
                acc = acc + c * _apply_field(frame[a], g[gam], vars)
        if f[gam]:
            for b, c in nzg:
                acc = acc - c * _apply_field(frame[b], f[gam], vars)
        for a, c in nzf:
            for b, d in nzg:
                s = ja.bracket_basis(a, b).get(gam)
                if s:
                    acc = acc + c * d * s
        out[gam] = acc
    return [out.get(i, zero) for i in range(n)]


def characteristic_family(js, degree=2):
    """Y fields: each first-layer frame vector times each monomial of degree <= ``degree``."""
    from .exact import monomials_of_weight
    ja = js.algebra()
    first = [i for i, w in enumerate(ja.weights) if w == 1]
    mons = []
    for d in range(degree + 1):
        mons.extend(monomials_of_weight([1] * js.N, d))
    for beta in first:
        for e in mons:
            coeffs = [MPoly.zero(js.vars)] * ja.n
            coeffs[beta] = MPoly.monomial(js.vars, e)
            yield beta, e, coeffs


def characteristic_test(X: HorizField, degree=2):
    """Verdicts of v^X == 0 and of the brute-force Pi_3([X,[X,Y]]) == 0 test."""
    js = X.js
    if js.m < 2:
        raise JetError("characteristic classification needs m >= 2")
    ja = js.algebra()
    third = [i for i, w in enumerate(ja.weights) if w == 3]
    verdict_v = not any(X.v_part())
    witness = None
    for beta, e, Y in characteristic_family(js, degree):
        inner = field_bracket(js, X.coeffs, Y)
        outer = field_bracket(js, X.coeffs, inner, third)
        bad = [(i, outer[i]) for i in third if outer[i]]
        if bad:
            witness = {"Y_frame": ja.labels[beta], "Y_monomial": e, "component": ja.labels[bad[0][0]],
                       "poly": bad[0][1]}
            break
    verdict_b = witness is None
    return {"v_zero": verdict_v, "brute_force": verdict_b, "agree": verdict_v == verdict_b, "witness": witness}


# ---------------------------------------------------------------------------
# rigidity of abelian subalgebras of the first layer of j^1


def abelian_rigidity_check(js: JetSpace, spanning):
    """R = span(spanning) inside the first layer of j^1 (jet-algebra coordinates).

    If R is abelian of dimension dim V1 * dim W, check that R = HD^1.
    """
    if js.m != 1:
        raise JetError("rigidity is stated for j^1")
    ja = js.algebra()
    first = [i for i, w in enumerate(ja.weights) if w == 1]
    for v in spanning:
        if any(c and ja.weights[i] != 1 for i, c in enumerate(v)):
            raise JetError("spanning vectors must lie in the first layer")
    rows, _ = rref(RatMatrix.from_rows([[rat(c) for c in v] for v in spanning], ja.n)) if spanning else ([], [])
    basis = [[row.get(i, Fraction(0)) for i in range(ja.n)] for row in rows]
    report = {"dim_W_gt_1": js.wdim > 1, "dim": len(basis), "required_dim": js.alg.r * js.wdim}
    abelian = True
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            if any(ja.br(basis[i], basis[j])):
                abelian = False
    report["abelian"] = abelian
    pre = report["dim_W_gt_1"] and abelian and report["dim"] == report["required_dim"]
    report["preconditions"] = pre
    gpos = [i for i in first if ja.provenance[i][0] == "base"]
    v_zero = all(not row[i] for row in basis for i in gpos)
    report["equals_HD1"] = v_zero and report["dim"] == report["required_dim"]
    report["pass"] = (not pre) or report["equals_HD1"]
    return report


def abelian_with_direction(js: JetSpace, v, alpha=None):
    """span{(v, alpha)} + {B in HD^1 : v⌐B = 0}: abelian, dimension (r-1) dim W + 1."""
    ja = js.algebra()
    r = js.alg.r
    spec = js.layer_spec()
    hd1 = [i for i, (_, t) in enumerate(spec) if t[0] == "hd" and t[1] == 1]
    M = []
    for i in hd1:
        x, X = js.split([1 if t == i else 0 for t in range(ja.n)])
        c = js.contract(v, X).get(0, [0] * js.dims[0])
        M.append(c)
    K = kernel_basis(RatMatrix.from_rows(M).transpose()) if M else []
    out = []
    for kv in K:
        vec = [Fraction(0)] * ja.n
        for coef, i in zip(kv, hd1):
            vec[i] = coef
        out.append(vec)
    lead = [Fraction(0)] * ja.n
    for i, (_, t) in enumerate(spec):
        if t[0] == "g" and t[1] < r:
            lead[i] = rat(v[t[1]])
    if alpha is not None:
        for coef, i in zip(alpha, hd1):
            lead[i] += rat(coef)
    out.append(lead)
    return out


# ---------------------------------------------------------------------------
# the sharpness counterexample on J^1(g' x R; R)


def counterexample_phi(js: JetSpace):
    """Matrix (list of images of basis vectors) of ((v,x),z,(a,y)) -> ((v,-y),z,(a,x))."""
    ja = js.algebra()
    spec = js.layer_spec()
    r = js.alg.r
    t_index = r - 1  # the added line sits at the end of V1
    gT = next(i for i, (_, t) in enumerate(spec) if t == ("g", t_index))
    hd_idx = js.hd.indices(1)
    eT = tuple(1 if i == t_index else 0 for i in range(js.alg.n))
    hT = next(i for i, (_, t) in enumerate(spec) if t[0] == "hd" and t[1] == 1 and hd_idx[t[2]] == eT)
    images = []
    for i in range(ja.n):
        img = [Fraction(0)] * ja.n
        if i == gT:
            img[hT] = Fraction(1)
        elif i == hT:
            img[gT] = Fraction(-1)
        else:
            img[i] = Fraction(1)
        images.append(img)
    return images


def _apply_linear(images, vec):
    n = len(images)
    out = [0] * n
    for i, c in enumerate(vec):
        if c:
            for k, a in enumerate(images[i]):
                if a:
                    out[k] = out[k] + c * a
    return out


def is_lie_automorphism(ja, images):
    """phi[e_a, e_b] = [phi e_a, phi e_b] on all basis pairs, and phi invertible."""
    for a in range(ja.n):
        for b in range(a + 1, ja.n):
            ea = [1 if i == a else 0 for i in range(ja.n)]
            eb = [1 if i == b else 0 for i in range(ja.n)]
            if _apply_linear(images, ja.br(ea, eb)) != ja.br(images[a], images[b]):
                return False
    return rank(RatMatrix.from_rows(images)) == ja.n


def group_automorphism(js: JetSpace, images, name="Phi"):
    """exp_J o phi o log_J as a polynomial map of the product chart."""
    a, A = js.symbolic_point()
    top = max(js.m, js.alg.step) + 2
    X = js.contract_exp(a, A, dexp_series(top, sign=-1))
    vec = js.join(a, X)
    img = _apply_linear(images, vec)
    x2 = [MPoly.zero(js.vars)] * js.alg.n
    X2 = {k: [MPoly.zero(js.vars)] * js.dims[k] for k in range(js.m + 1)}
    for c, (_, t) in zip(img, js.layer_spec()):
        c = c if isinstance(c, MPoly) else MPoly.const(js.vars, c)
        if t[0] == "g":
            x2[t[1]] = c
        else:
            X2[t[1]][t[2]] = c
    from math import factorial
    coeffs = [Fraction(1, factorial(k + 1)) for k in range(top)]
    st = js.contract_exp(x2, X2, coeffs)
    comps = list(x2) + [c for k in range(js.m + 1) for c in st[k]]
    comps = [c if isinstance(c, MPoly) else MPoly.const(js.vars, c) for c in comps]
    return PolyMap(js, comps, name=name)


def counterexample_automorphism(gprime):
    """Build the contact automorphism of J^1(g' x R; R) that has no de-prolongation."""
    from .algebra import product_with_line
    g = product_with_line(gprime).require_valid()
    js = jet_space(g, 1, 1)
    ja = js.algebra()
    images = counterexample_phi(js)
    report = {"algebra": g.name}
    report["phi_is_automorphism"] = is_lie_automorphism(ja, images)
    first = [i for i, w in enumerate(ja.weights) if w == 1]
    report["phi_preserves_first_layer"] = all(
        all(not c or ja.weights[k] == 1 for k, c in enumerate(images[i])) for i in first)
    F = group_automorphism(js, images)
    ok, cert = is_contact(F)
    report["contact"] = ok
    try:
        deprolong(F)
        report["deprolong"] = "factored"
    except Obstruction as ob:
        report["deprolong"] = "obstruction"
        report["obstruction"] = ob.witness.get("obstruction")
        report["hypotheses"] = ob.witness.get("hypotheses")
    return F, report
