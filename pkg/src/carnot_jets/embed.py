"""Embedding a step-(s+1) algebra g into j^s(g'; V_{s+1}) through the BCH cocycle eta."""

from __future__ import annotations

from fractions import Fraction

from .algebra import AlgebraError, StratAlg, bch_table
from .exact import MPoly, RatMatrix, mpoly_compose, rank, solve_linear
from .hd import HDElem, HDSpace
from .jets import jet_space
from .polyjet import horizontal_stack, is_homogeneous_at, right_inv_derive


class CertificateError(AssertionError):
    pass


def quotient_algebra(g: StratAlg) -> StratAlg:
    """g' = g / V_{s+1} with the top layer deleted."""
    g.require_valid()
    if g.step < 2:
        raise AlgebraError("quotient needs step >= 2")
    keep = [i for i, w in enumerate(g.weights) if w < g.step]
    structure = {}
    for (i, j), out in g.structure.items():
        if i in keep and j in keep:
            o = {k: c for k, c in out.items() if k in keep}
            if o:
                structure[i, j] = o
    q = StratAlg(f"{g.name}'", [g.weights[i] for i in keep], structure, [g.labels[i] for i in keep])
    return q.require_valid()


def eta_polys(g: StratAlg):
    """eta_k for k in the top layer, as polynomials in (x, y) coordinates of g."""
    return bch_table(g).eta()


def eta(g: StratAlg, x, y):
    """Top-layer coordinates of eta(x, y)."""
    pt = list(x) + list(y)
    return [p.evaluate(pt) for p in eta_polys(g).values()]


class EmbeddingResult:
    def __init__(self, g, gq, js, polys, stacks, certificates):
        self.g = g
        self.quotient = gq
        self.target = js
        self.polys = polys          # u -> W-valued polynomial part P_u over g' coordinates
        self.stacks = stacks        # u -> HD element of degree s+1-w_u (multilinear form)
        self.certificates = certificates

    def image(self, u):
        """(Pi' b_u, P_u) in the polynomial model."""
        v = [1 if i == u else 0 for i in range(self.g.n)]
        return self._proj(v), self.polys[u]

    def _proj(self, v):
        keep = [i for i, w in enumerate(self.g.weights) if w < self.g.step]
        return [v[i] for i in keep]


def _top(g):
    return g.layer(g.step)


def embed(g: StratAlg) -> EmbeddingResult:
    g.require_valid()
    gq = quotient_algebra(g)
    s = gq.step
    top = _top(g)
    wdim = len(top)
    js = jet_space(gq, wdim, s)
    n = g.n
    keep = [i for i, w in enumerate(g.weights) if w < g.step]
    etas = [eta_polys(g)[k] for k in top]
    cq = gq.coord_names
    vars_xy = etas[0].vars
    # substitute x = 0 and y' = coordinates of g' (top y coordinates do not occur)
    zero = MPoly.zero(cq)
    sub = [zero] * n + [MPoly.var(cq, keep.index(i)) if i in keep else zero for i in range(n)]
    polys = {}
    for u in range(n):
        P = [mpoly_compose(e.diff(vars_xy[u]), sub) for e in etas]
        if g.weights[u] == g.step:
            P = [p + (1 if top[c] == u else 0) for c, p in enumerate(P)]
        polys[u] = P
    certs = {}
    # (a) homogeneity: P_u is homogeneous of degree s+1-w_u at e
    e = [0] * gq.n
    certs["homogeneity"] = all(is_homogeneous_at(gq, polys[u], e, g.step - g.weights[u]) for u in range(n))
    # multilinear form via sigma_e
    stacks = {}
    hd = HDSpace.of(gq, wdim)
    for u in range(n):
        k = g.step - g.weights[u]
        stacks[u] = horizontal_stack(gq, polys[u], e, k)[k]
    # (b) morphism, polynomial bracket ([v,w]', w†P - v†Q) = (Pi'[v,w], P_[v,w])
    certs["morphism"] = _morphism_poly(g, gq, keep, polys)
    certs["morphism_hd"] = _morphism_hd(g, gq, keep, stacks, hd, s)
    # (c) injectivity
    rows = []
    for u in range(n):
        row = [1 if i == u else 0 for i in keep]
        for k in range(s + 1):
            row.extend(hd.coords(stacks[u]) if k == stacks[u].degree else [0] * hd.dim(k))
        rows.append(row)
    certs["injectivity"] = rank(RatMatrix.from_rows(rows)) == n
    # (d) strata: V_k goes to V'_k + HD^{s+1-k}
    certs["strata"] = all(stacks[u].degree == g.step - g.weights[u] for u in range(n)) and all(
        gq.weights[keep.index(u)] == g.weights[u] for u in keep)
    res = EmbeddingResult(g, gq, js, polys, stacks, certs)
    failed = [k for k, ok in certs.items() if not ok]
    if failed:
        raise CertificateError(f"embedding certificates failed: {failed}")
    return res


def _combine_polys(g, polys, vec, vars):
    out = [MPoly.zero(vars) for _ in polys[0]]
    for u, c in enumerate(vec):
        if c:
            out = [a + b * c for a, b in zip(out, polys[u])]
    return out


def _morphism_poly(g, gq, keep, polys):
    n = g.n
    vars = gq.coord_names
    for a in range(n):
        for b in range(a + 1, n):
            va = [1 if i == a else 0 for i in range(n)]
            vb = [1 if i == b else 0 for i in range(n)]
            br = g.br(va, vb)
            qa = [va[i] for i in keep]
            qb = [vb[i] for i in keep]
            lhs_g = gq.br(qa, qb)
            if lhs_g != [br[i] for i in keep]:
                return False
            lhs_p = [x - y for x, y in zip(right_inv_derive(gq, qb, polys[a]), right_inv_derive(gq, qa, polys[b]))]
            rhs_p = _combine_polys(g, polys, br, vars)
            if lhs_p != rhs_p:
                return False
    return True


def _morphism_hd(g, gq, keep, stacks, hd, s):
    n = g.n
    for a in range(n):
        for b in range(a + 1, n):
            va = [1 if i == a else 0 for i in range(n)]
            vb = [1 if i == b else 0 for i in range(n)]
            br = g.br(va, vb)
            qa = [va[i] for i in keep]
            qb = [vb[i] for i in keep]
            lhs = {}
            for k, B in hd.contract(qb, stacks[a]).items():
                lhs[k] = lhs[k] + B if k in lhs else B
            for k, B in hd.contract(qa, stacks[b]).items():
                lhs[k] = lhs[k] - B if k in lhs else -B
            rhs = {}
            for u, c in enumerate(br):
                if c:
                    k = stacks[u].degree
                    rhs[k] = rhs[k] + stacks[u].scale(c) if k in rhs else stacks[u].scale(c)
            keys = set(lhs) | set(rhs)
            for k in keys:
                L = lhs.get(k, HDElem.zero(gq, hd.wdim, k))
                R = rhs.get(k, HDElem.zero(gq, hd.wdim, k))
                if L != R:
                    return False
    return True


def embed_multilinear(res: EmbeddingResult):
    """``{u: HD element}``: the image of b_u in HD^{s+1-w_u}(g'; V_{s+1})."""
    return dict(res.stacks)


def image_subalgebra_constants(res: EmbeddingResult):
    """Structure constants of the image of phi expressed back in the basis of g."""
    g = res.g
    gq = res.quotient
    hd = HDSpace.of(gq, len(_top(g)))
    keep = [i for i, w in enumerate(g.weights) if w < g.step]
    s = gq.step

    def flat(qv, stack_by_deg):
        row = list(qv)
        for k in range(s + 1):
            row.extend(hd.coords(stack_by_deg[k]) if k in stack_by_deg else [Fraction(0)] * hd.dim(k))
        return row

    images = []
    for u in range(g.n):
        qv = [1 if i == u else 0 for i in keep]
        images.append(flat(qv, {res.stacks[u].degree: res.stacks[u]}))
    M = RatMatrix.from_rows(images).transpose()
    out = {}
    for a in range(g.n):
        for b in range(a + 1, g.n):
            qa = [1 if i == a else 0 for i in keep]
            qb = [1 if i == b else 0 for i in keep]
            z = gq.br(qa, qb)
            st = {}
            for k, B in hd.contract(qb, res.stacks[a]).items():
                st[k] = st[k] + B if k in st else B
            for k, B in hd.contract(qa, res.stacks[b]).items():
                st[k] = st[k] - B if k in st else -B
            sol = solve_linear(M, flat(z, st))
            if sol is None:
                raise CertificateError("image of phi is not closed under brackets")
            o = {k: c for k, c in enumerate(sol) if c}
            if o:
                out[a, b] = o
    return out
