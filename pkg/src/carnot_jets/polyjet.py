"""Polynomials in exponential coordinates: invariant derivatives, jets, Taylor.

A W-valued polynomial is a list of MPolys (one per W component) over the
algebra's coordinate names.  Weighted degree gives ``x_i`` the weight of
``b_i``.
"""

from __future__ import annotations

from fractions import Fraction

from .algebra import bch_table
from .exact import MPoly, RatMatrix, inverse, mpoly_compose, rat
from .hd import HDElem, HDSpace
from .pbw import index_to_word, indices_of_weight


def coord_vars(alg):
    return alg.coord_names


def coord_poly(alg, name_or_index):
    return MPoly.var(alg.coord_names, name_or_index)


def as_wpoly(f):
    return [f] if isinstance(f, MPoly) else list(f)


def _table_coeffs(alg, slot):
    """d bch_k / d(slot)_i at the other slot = 0, over the coordinate variables.

    slot 'y' gives left-invariant fields, slot 'x' right-invariant ones.
    """
    key = ("fields", slot)
    hit = alg._cache.get(key)
    if hit is not None:
        return hit
    tab = bch_table(alg)
    n = alg.n
    cv = coord_vars(alg)
    gens = [MPoly.var(cv, i) for i in range(n)]
    zero = MPoly.zero(cv)
    if slot == "y":
        sub = gens + [zero] * n
        off = n
    else:
        sub = [zero] * n + gens
        off = 0
    out = [[mpoly_compose(tab.polys[k].diff(off + i), sub) for k in range(n)] for i in range(n)]
    alg._cache[key] = out
    return out


def left_field(alg, i):
    """Coefficients of b~_i on the coordinate partials."""
    return _table_coeffs(alg, "y")[i]


def right_field(alg, i):
    return _table_coeffs(alg, "x")[i]


def _derive(coeffs, v, f):
    out = MPoly.zero(f.vars)
    cv = coeffs[0][0].vars if coeffs and coeffs[0] else f.vars
    for i, c in enumerate(v):
        if not c:
            continue
        for k, a in enumerate(coeffs[i]):
            if a:
                d = f.diff(cv[k])
                if d:
                    out = out + (a.rebase(f.vars) if a.vars != f.vars else a) * d * c
    return out


def left_inv_derive(alg, v, f):
    """v~ f(p) = d/dt f(p exp(tv)) at t = 0."""
    if isinstance(f, MPoly):
        return _derive(_table_coeffs(alg, "y"), [rat(c) for c in v], f)
    return [left_inv_derive(alg, v, g) for g in f]


def right_inv_derive(alg, v, f):
    """v† f(p) = d/dt f(exp(tv) p) at t = 0."""
    if isinstance(f, MPoly):
        return _derive(_table_coeffs(alg, "x"), [rat(c) for c in v], f)
    return [right_inv_derive(alg, v, g) for g in f]


def left_basis_derive(alg, i, f):
    return _derive(_table_coeffs(alg, "y"), [1 if k == i else 0 for k in range(alg.n)], f)


def horizontal_derivatives(alg, f, m):
    """``{word: polynomial}`` for all first-layer words of length <= m.

    The entry for ``(v1, ..., vk)`` is ``v~k ... v~1 f`` (v1 applied first).
    """
    out = {(): f}
    frontier = [()]
    for _ in range(m):
        nxt = []
        for w in frontier:
            g = out[w]
            for i in range(alg.r):
                w2 = w + (i,)
                out[w2] = left_basis_derive(alg, i, g) if g else g
                nxt.append(w2)
        frontier = nxt
    return out


def horizontal_stack(alg, f, p, m, check=True):
    """``{k: A^k_{f,p}}`` for k = 0..m; f is a W-valued polynomial."""
    f = as_wpoly(f)
    p = [rat(c) for c in p]
    wd = len(f)
    ders = [horizontal_derivatives(alg, g, m) for g in f]
    stack = {}
    for k in range(m + 1):
        t = {}
        for w in ders[0]:
            if len(w) == k:
                t[w] = tuple(d[w].evaluate(p) for d in ders)
        stack[k] = HDElem(alg, wd, k, t)
        if check:
            HDSpace.of(alg, wd).coords(stack[k])
    return stack


def apply_pbw(alg, I, f):
    """b~^I f = b~_1^{I_1} ... b~_n^{I_n} f (rightmost factor acts first)."""
    for i in reversed(index_to_word(I)):
        f = left_basis_derive(alg, i, f)
        if not f:
            break
    return f


def pairing(alg, D, f, p):
    """<D | f>_p = (D f)(p) for ``D = {I: coeff}`` or a UEAElem; f W-valued."""
    D = getattr(D, "terms", D)
    f = as_wpoly(f)
    p = [rat(c) for c in p]
    out = [Fraction(0)] * len(f)
    for I, c in D.items():
        for j, g in enumerate(f):
            out[j] += c * apply_pbw(alg, I, g).evaluate(p)
    return out


def monomial(alg, J):
    return MPoly.monomial(coord_vars(alg), J)


def pairing_matrix(alg, m):
    """``M[a][b] = (b~^{I_a} x^{I_b})(e)`` over the weight-m indices in table order."""
    key = ("pairing", m)
    hit = alg._cache.get(key)
    if hit is None:
        idx = indices_of_weight(alg, m)
        e = [0] * alg.n
        hit = (idx, [[apply_pbw(alg, I, monomial(alg, J)).evaluate(e) for J in idx] for I in idx])
        alg._cache[key] = hit
    return hit


def translate_left_inverse(alg, p):
    """Coordinates of p^{-1} x as polynomials in x."""
    tab = bch_table(alg)
    cv = coord_vars(alg)
    sub = [MPoly.const(cv, -rat(c)) for c in p] + [MPoly.var(cv, i) for i in range(alg.n)]
    return [mpoly_compose(q, sub) for q in tab.polys]


def translate_left(alg, p):
    """Coordinates of p x as polynomials in x."""
    tab = bch_table(alg)
    cv = coord_vars(alg)
    sub = [MPoly.const(cv, rat(c)) for c in p] + [MPoly.var(cv, i) for i in range(alg.n)]
    return [mpoly_compose(q, sub) for q in tab.polys]


def dual_poly_basis(alg, p, m):
    """``[(I, P_{p,I})]`` with b~^I P_{p,J}(p) = delta_IJ, all homogeneous at p."""
    p = [rat(c) for c in p]
    key = ("dual", tuple(p), m)
    hit = alg._cache.get(key)
    if hit is not None:
        return hit
    idx, M = pairing_matrix(alg, m)
    C = inverse(RatMatrix.from_rows(M).transpose()).to_rows()
    if any(p):
        shifted = translate_left_inverse(alg, p)
        mons = [mpoly_compose(monomial(alg, J), shifted) for J in idx]
    else:
        mons = [monomial(alg, J) for J in idx]
    cv = coord_vars(alg)
    out = []
    for a, I in enumerate(idx):
        P = MPoly.zero(cv)
        for b, c in enumerate(C[a]):
            if c:
                P = P + mons[b] * c
        out.append((I, P))
    alg._cache[key] = out
    return out


def taylor(alg, f, p, m):
    """Homogeneous Taylor components ``[P^0, ..., P^m]`` of f at p (W-valued)."""
    f = as_wpoly(f)
    p = [rat(c) for c in p]
    comps = []
    for k in range(m + 1):
        basis = dual_poly_basis(alg, p, k)
        comp = []
        for g in f:
            P = MPoly.zero(coord_vars(alg))
            for I, Q in basis:
                c = apply_pbw(alg, I, g).evaluate(p)
                if c:
                    P = P + Q * c
            comp.append(P)
        comps.append(comp)
    return comps


def centered_dilation(alg, p, lam_name="lam"):
    """delta_{p,lam} = L_p o delta_lam o L_{p^{-1}} with lam a formal variable.

    Returns polynomials over ``coord_vars + (lam,)``.
    """
    cv = coord_vars(alg)
    vars = tuple(cv) + (lam_name,)
    lam = MPoly.var(vars, lam_name)
    q = [t.rebase(vars) for t in translate_left_inverse(alg, p)]
    dq = [t * lam ** w for t, w in zip(q, alg.weights)]
    back = translate_left(alg, p)
    return [mpoly_compose(t, dq) for t in back]


def is_homogeneous_at(alg, f, p, m):
    """Formal-lambda test of f o delta_{p,lam} = lam^m f."""
    d = centered_dilation(alg, p)
    vars = d[0].vars
    lam = MPoly.var(vars, len(vars) - 1)
    for g in as_wpoly(f):
        if mpoly_compose(g, d) != g.rebase(vars) * lam ** m:
            return False
    return True


def sigma_p(alg, f, p, m):
    """sigma_p(f) = A^m_{f,p}."""
    return horizontal_stack(alg, f, p, m, check=False)[m]


def sigma_p_inverse(alg, A: HDElem, p):
    """The homogeneous polynomial at p whose top horizontal derivative is A."""
    sp = HDSpace.of(alg, A.wdim)
    x = sp.coords(A)
    basis = dual_poly_basis(alg, p, A.degree)
    cv = coord_vars(alg)
    out = [MPoly.zero(cv) for _ in range(A.wdim)]
    for a, (I, P) in enumerate(basis):
        for c in range(A.wdim):
            v = x[a * A.wdim + c]
            if v:
                out[c] = out[c] + P * v
    return out


def sigma_change_of_basis(alg, m):
    """Matrix whose column J is sigma_e(x^J) in A_I coordinates."""
    sp = HDSpace.of(alg, 1)
    idx = indices_of_weight(alg, m)
    cols = [sp.coords(sigma_p(alg, monomial(alg, J), [0] * alg.n, m)) for J in idx]
    return [[cols[j][i] for j in range(len(idx))] for i in range(len(idx))]


def poly_jet_bracket(alg, v, P, w, Q):
    """[(v, P), (w, Q)] = ([v, w], w†P - v†Q) in the polynomial jet algebra."""
    P, Q = as_wpoly(P), as_wpoly(Q)
    R = [a - b for a, b in zip(right_inv_derive(alg, w, P), right_inv_derive(alg, v, Q))]
    return alg.br(v, w), R


def sigma(alg, v, P, m):
    """sigma(v, P) = (v, A^{<=m}_{P,e}) with the stack in A_I coordinates."""
    P = as_wpoly(P)
    sp = HDSpace.of(alg, len(P))
    st = horizontal_stack(alg, P, [0] * alg.n, m)
    return list(v), {k: sp.coords(A) for k, A in st.items()}
