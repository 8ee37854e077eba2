"""Horizontal-derivative spaces HD^k(g; W).

An element of degree k is a W-valued k-linear map on V1, stored densely-ish
as ``{word: W-vector}`` where a word ``(i1, ..., ik)`` of first-layer indices
stands for the argument list ``(b_{i1}, ..., b_{ik})``.  The basis ``A_I`` is
dual to the PBW monomials: ``<A_I | xi> = tau_I(xi)``.
"""

from __future__ import annotations

from fractions import Fraction

from .exact import RatMatrix, kernel_basis, left_inverse_rows, rat, words
from .pbw import tau_coefficients


class NotMember(Exception):
    def __init__(self, witness, pairing):
        super().__init__("tensor is not a horizontal derivative")
        self.witness = witness
        self.pairing = pairing


def _clean(tensor):
    return {w: tuple(v) for w, v in tensor.items() if any(v)}


class HDElem:
    """W-valued k-linear map on V1 (``wdim`` = dim W)."""

    __slots__ = ("alg", "wdim", "degree", "tensor")

    def __init__(self, alg, wdim, degree, tensor=None):
        self.alg = alg
        self.wdim = wdim
        self.degree = degree
        t = {}
        for w, v in (tensor or {}).items():
            w = tuple(w)
            if len(w) != degree or any(alg.weights[i] != 1 for i in w):
                raise ValueError(f"bad word {w} for degree {degree}")
            if not isinstance(v, (list, tuple)):
                v = (v,)
            if len(v) != wdim:
                raise ValueError("W-vector has the wrong length")
            v = tuple(rat(c) for c in v)
            if any(v):
                t[w] = v
        self.tensor = t

    @classmethod
    def zero(cls, alg, wdim, degree):
        return cls(alg, wdim, degree)

    def value(self, word):
        return self.tensor.get(tuple(word), (Fraction(0),) * self.wdim)

    def _lin(self, other, a, b):
        if (other.alg is not self.alg or other.wdim != self.wdim or other.degree != self.degree):
            raise ValueError("HD element mismatch")
        t = {}
        for w in set(self.tensor) | set(other.tensor):
            x, y = self.value(w), other.value(w)
            t[w] = tuple(a * p + b * q for p, q in zip(x, y))
        return HDElem(self.alg, self.wdim, self.degree, _clean(t))

    def __add__(self, other):
        return self._lin(other, 1, 1)

    def __sub__(self, other):
        return self._lin(other, 1, -1)

    def scale(self, c):
        c = rat(c)
        return HDElem(self.alg, self.wdim, self.degree,
                      {w: tuple(c * x for x in v) for w, v in self.tensor.items()})

    def __neg__(self):
        return self.scale(-1)

    def __eq__(self, other):
        return (isinstance(other, HDElem) and other.alg is self.alg and other.wdim == self.wdim
                and other.degree == self.degree and other.tensor == self.tensor)

    __hash__ = None

    def __bool__(self):
        return bool(self.tensor)

    def __repr__(self):
        return f"HDElem(deg={self.degree}, {format_tensor(self.alg, self)})"


def word_label(alg, word):
    labs = [alg.labels[i] for i in word]
    if all(len(l) == 1 for l in alg.labels[:alg.r]):
        return "".join(labs)
    return ",".join(labs)


def parse_word(alg, text):
    text = text.strip()
    if not text:
        return ()
    pos = {l: i for i, l in enumerate(alg.labels[:alg.r])}
    if "," in text or not all(len(l) == 1 for l in alg.labels[:alg.r]):
        parts = [p.strip() for p in text.split(",")]
    else:
        parts = list(text)
    try:
        return tuple(pos[p] for p in parts)
    except KeyError as exc:
        raise ValueError(f"unknown first-layer label {exc} in word {text!r}") from None


def format_tensor(alg, A: HDElem):
    """Human-readable form like ``-2X*⊗X*⊗Y* - X*⊗Y*⊗X*`` (scalar W only)."""
    if not A.tensor:
        return "0"
    parts = []
    for w in sorted(A.tensor):
        v = A.tensor[w]
        name = "⊗".join(alg.labels[i] + "*" for i in w) or "1"
        if A.wdim == 1:
            c = v[0]
            if c == 1:
                parts.append(f"+ {name}" if w else "+ 1")
            elif c == -1:
                parts.append(f"- {name}" if w else "- 1")
            else:
                sign = "-" if c < 0 else "+"
                parts.append(f"{sign} {abs(c)}{name}" if w else f"{sign} {abs(c)}")
        else:
            parts.append("+ " + name + "⊗(" + ",".join(str(x) for x in v) + ")")
    s = " ".join(parts)
    return s[2:] if s.startswith("+ ") else "-" + s[2:]


class HDSpace:
    """Bases, coordinates and contraction matrices for HD^k(g; W), k <= kmax."""

    def __init__(self, alg, wdim=1):
        alg.require_valid()
        self.alg = alg
        self.wdim = wdim
        self._deg = {}
        self._contr = {}

    @classmethod
    def of(cls, alg, wdim=1):
        cache = alg._cache.setdefault("hdspace", {})
        if wdim not in cache:
            cache[wdim] = cls(alg, wdim)
        return cache[wdim]

    def _degree_data(self, k):
        d = self._deg.get(k)
        if d is None:
            ws, idx, table = tau_coefficients(self.alg, k)
            col = {I: c for c, I in enumerate(idx)}
            row = {w: i for i, w in enumerate(ws)}
            T = RatMatrix(len(ws), len(idx), {(row[w], col[I]): v for w, t in table.items()
                                               for I, v in t.items()})
            rows, Minv = left_inverse_rows(T)
            tensors = [{} for _ in idx]
            for w, t in table.items():
                for I, v in t.items():
                    tensors[col[I]][w] = v
            d = {"words": ws, "indices": idx, "T": T, "rows": [ws[i] for i in rows],
                 "Minv": Minv.to_rows(), "tensors": tensors, "row": row}
            self._deg[k] = d
        return d

    def indices(self, k):
        return list(self._degree_data(k)["indices"]) if k >= 0 else []

    def scalar_dim(self, k):
        return len(self.indices(k))

    def dim(self, k):
        return self.scalar_dim(k) * self.wdim

    def labels(self, k):
        """Provenance labels, I-major then W-basis index."""
        out = []
        for I in self.indices(k):
            for c in range(self.wdim):
                tag = "(" + ",".join(str(i) for i in I) + ")"
                out.append(f"A[{tag}]⊗w{c + 1}")
        return out

    def basis(self, k):
        """``[(I, c, HDElem)]`` for the basis A_I ⊗ w_c."""
        d = self._degree_data(k)
        out = []
        for I, t in zip(d["indices"], d["tensors"]):
            for c in range(self.wdim):
                e = [0] * self.wdim
                e[c] = 1
                out.append((I, c, HDElem(self.alg, self.wdim, k,
                                         {w: tuple(v * x for x in e) for w, v in t.items()})))
        return out

    def scalar_basis_tensors(self, k):
        return self._degree_data(k)["tensors"]

    # -- coordinates ------------------------------------------------------
    def to_elem(self, k, coords):
        if len(coords) != self.dim(k):
            raise ValueError("coordinate vector has the wrong length")
        d = self._degree_data(k)
        t = {}
        for a, tens in enumerate(d["tensors"]):
            for c in range(self.wdim):
                x = coords[a * self.wdim + c]
                if not x:
                    continue
                for w, v in tens.items():
                    vec = t.setdefault(w, [0] * self.wdim)
                    vec[c] += x * v
        return HDElem(self.alg, self.wdim, k, {w: v for w, v in t.items()})

    def coords(self, A: HDElem):
        """Coordinates in the A_I ⊗ w_c basis; raises NotMember otherwise."""
        k = A.degree
        d = self._degree_data(k)
        nI = len(d["indices"])
        out = [Fraction(0)] * (nI * self.wdim)
        for c in range(self.wdim):
            rhs = [A.value(w)[c] for w in d["rows"]]
            for a in range(nI):
                out[a * self.wdim + c] = sum((m * r for m, r in zip(d["Minv"][a], rhs) if m), Fraction(0))
        back = self.to_elem(k, out)
        if back.tensor != A.tensor:
            raise NotMember(*self._witness(A))
        return out

    def _witness(self, A):
        d = self._degree_data(A.degree)
        ws = d["words"]
        for z in kernel_basis(d["T"].transpose()):
            pair = [sum((z[i] * A.value(w)[c] for i, w in enumerate(ws) if z[i]), Fraction(0))
                    for c in range(self.wdim)]
            if any(pair):
                return {ws[i]: z[i] for i in range(len(ws)) if z[i]}, pair
        raise AssertionError("membership failed without a kernel witness")

    def membership(self, A: HDElem):
        """``(True, {(I, c): coeff})`` or ``(False, (witness, pairing))``."""
        try:
            x = self.coords(A)
        except NotMember as nm:
            return False, (nm.witness, nm.pairing)
        d = self._degree_data(A.degree)
        exp = {}
        for a, I in enumerate(d["indices"]):
            for c in range(self.wdim):
                v = x[a * self.wdim + c]
                if v:
                    exp[I, c] = v
        return True, exp

    # -- contraction on tensors ------------------------------------------
    def contract_v1(self, v, A: HDElem) -> HDElem:
        """(v ⌐ A)(v_1..v_{k-1}) = A(v_1..v_{k-1}, v) for v in V1."""
        alg = self.alg
        v = [rat(c) for c in v]
        if any(c and alg.weights[i] != 1 for i, c in enumerate(v)):
            raise ValueError("contraction argument must lie in the first layer")
        if A.degree == 0:
            return HDElem.zero(alg, A.wdim, 0)
        t = {}
        for w, vec in A.tensor.items():
            c = v[w[-1]]
            if c:
                acc = t.setdefault(w[:-1], [0] * A.wdim)
                for j, x in enumerate(vec):
                    acc[j] += c * x
        return HDElem(alg, A.wdim, A.degree - 1, t)

    def contract_basis(self, u, A: HDElem, decomp=None) -> HDElem:
        """b_u ⌐ A for any basis vector, recursively through bracket decompositions."""
        alg = self.alg
        wu = alg.weights[u]
        if A.degree < wu:
            return HDElem.zero(alg, A.wdim, max(A.degree - wu, 0))
        if wu == 1:
            return self.contract_v1(alg.basis_vector(u).coords, A)
        decomp = decomp or alg.bracket_decomp
        out = HDElem.zero(alg, A.wdim, A.degree - wu)
        for a, i, j in decomp[u]:
            # [v, w] ⌐ A = w⌐(v⌐A) - v⌐(w⌐A)
            t1 = self.contract_basis(j, self.contract_v1(alg.basis_vector(i).coords, A))
            t2 = self.contract_v1(alg.basis_vector(i).coords, self.contract_basis(j, A))
            out = out + (t1 - t2).scale(a)
        return out

    def contract(self, x, A: HDElem) -> dict:
        """x ⌐ A for a general x; returns ``{degree: HDElem}`` (mixed weights shift differently)."""
        out = {}
        for u, c in enumerate(x):
            if not c:
                continue
            k = A.degree - self.alg.weights[u]
            if k < 0:
                continue
            term = self.contract_basis(u, A).scale(c)
            out[k] = out[k] + term if k in out else term
        return out

    # -- contraction in coordinates --------------------------------------
    def contraction_matrix(self, u, k):
        """Scalar matrix of b_u ⌐ : HD^k -> HD^{k-w_u} in A_I coordinates (list of row dicts)."""
        key = (u, k)
        M = self._contr.get(key)
        if M is None:
            alg = self.alg
            k2 = k - alg.weights[u]
            if k2 < 0:
                M = []
            else:
                scal = HDSpace.of(alg, 1)
                n2 = scal.scalar_dim(k2)
                M = [dict() for _ in range(n2)]
                for col, tens in enumerate(scal.scalar_basis_tensors(k)):
                    A = HDElem(alg, 1, k, {w: (v,) for w, v in tens.items()})
                    img = scal.coords(scal.contract_basis(u, A))
                    for row, val in enumerate(img):
                        if val:
                            M[row][col] = val
            self._contr[key] = M
        return M

    def contract_coords(self, x, stack):
        """x ⌐ (stack) where stack is ``{k: coords}``; returns ``{k: coords}``."""
        out = {}
        wd = self.wdim
        for u, c in enumerate(x):
            if not c:
                continue
            ell = self.alg.weights[u]
            for k, vec in stack.items():
                if k < ell:
                    continue
                M = self.contraction_matrix(u, k)
                tgt = out.setdefault(k - ell, [0] * (len(M) * wd))
                for row, entries in enumerate(M):
                    for col, val in entries.items():
                        cv = c * val
                        for j in range(wd):
                            x_ = vec[col * wd + j]
                            if x_:
                                tgt[row * wd + j] = tgt[row * wd + j] + cv * x_
        return out


# ---------------------------------------------------------------------------
# functional interface


def hd_basis(alg, m, wdim=1):
    """``[(I, c, A_I ⊗ w_c)]`` for HD^m(g; R^wdim)."""
    return HDSpace.of(alg, wdim).basis(m)


def hd_membership(alg, A: HDElem):
    return HDSpace.of(alg, A.wdim).membership(A)


def contract_v1(v, A: HDElem) -> HDElem:
    return HDSpace.of(A.alg, A.wdim).contract_v1(v, A)


def contract_full(x, stack):
    """x ⌐ stack where ``stack`` maps degree -> HDElem."""
    elems = [A for A in stack.values()]
    if not elems:
        return {}
    sp = HDSpace.of(elems[0].alg, elems[0].wdim)
    out = {}
    for A in elems:
        for k, B in sp.contract(x, A).items():
            out[k] = out[k] + B if k in out else B
    return out


def contract_exp(x, stack):
    """e^{x⌐} stack = sum_k (x⌐)^k stack / k!."""
    out = dict(stack)
    term = dict(stack)
    k = 0
    while term:
        k += 1
        term = {d: B.scale(Fraction(1, k)) for d, B in contract_full(x, term).items() if B}
        for d, B in term.items():
            out[d] = out[d] + B if d in out else B
    return out


def stack_zero(alg, wdim, m):
    return {k: HDElem.zero(alg, wdim, k) for k in range(m + 1)}


def all_words(alg, k):
    return words(alg.r, k)
