"""Graded enveloping algebra in PBW normal form.

A word ``(i1, ..., ik)`` stands for the operator composition
``b~_{i1} o ... o b~_{ik}`` of left-invariant fields.  Normal forms are sums
of ordered monomials ``b~_1^{I_1} ... b~_n^{I_n}`` keyed by the exponent tuple.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

from .exact import MPoly, monomials_of_weight, words


def weight(alg, I):
    return sum(w * k for w, k in zip(alg.weights, I))


def word_weight(alg, word):
    return sum(alg.weights[i] for i in word)


def index_to_word(I):
    out = []
    for i, k in enumerate(I):
        out.extend([i] * k)
    return tuple(out)


def word_to_index(alg, word):
    I = [0] * alg.n
    for i in word:
        I[i] += 1
    return tuple(I)


def index_sort_key(alg, I):
    """Order used for multi-indices in tables: higher layers first, then V1 descending.

    For Heisenberg this gives (2,0,0), (1,1,0), (0,2,0), (0,0,1).
    """
    r = alg.r
    return tuple(I[k] for k in range(alg.n - 1, r - 1, -1)) + tuple(-I[k] for k in range(r))


def indices_of_weight(alg, m):
    return sorted(monomials_of_weight(alg.weights, m), key=lambda I: index_sort_key(alg, I))


def _add_into(acc, key, c):
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def _rewrite(alg, word, pos):
    """One rewrite at ``pos`` (word[pos] > word[pos+1]); returns [(coef, word)]."""
    a, b = word[pos], word[pos + 1]
    out = [(Fraction(1), word[:pos] + (b, a) + word[pos + 2:])]
    # b~_a b~_b = b~_b b~_a + [b_a, b_b]~
    for k, c in alg.bracket_basis(a, b).items():
        out.append((c, word[:pos] + (k,) + word[pos + 2:]))
    return out


def _normalize_cached(alg, word):
    memo = alg._cache.setdefault("pbw", {})
    hit = memo.get(word)
    if hit is not None:
        return hit
    pos = next((i for i in range(len(word) - 1) if word[i] > word[i + 1]), None)
    if pos is None:
        res = {word_to_index(alg, word): Fraction(1)}
    else:
        res = {}
        for c, w in _rewrite(alg, word, pos):
            for I, d in _normalize_cached(alg, w).items():
                _add_into(res, I, c * d)
    memo[word] = res
    return res


def pbw_normalize(alg, word, bound=None, strategy=None):
    """Normal form of a word as ``{multi-index: coefficient}``.

    Rewriting always reduces the leftmost descent unless ``strategy`` (a
    callable picking one position from the list of descents) is given.
    Monomials of weight above ``bound`` are dropped; since rewriting keeps
    the weight, that means the whole word when it is too heavy.
    """
    word = tuple(word)
    if any(not 0 <= i < alg.n for i in word):
        raise IndexError("generator index out of range")
    if bound is not None and word_weight(alg, word) > bound:
        return {}
    if strategy is None:
        return dict(_normalize_cached(alg, word))
    res = {}
    stack = [(Fraction(1), word)]
    while stack:
        c, w = stack.pop()
        desc = [i for i in range(len(w) - 1) if w[i] > w[i + 1]]
        if not desc:
            _add_into(res, word_to_index(alg, w), c)
            continue
        for d, w2 in _rewrite(alg, w, strategy(desc)):
            stack.append((c * d, w2))
    return res


class UEAElem:
    """Truncated element ``sum terms[I] b~^I`` with ``w(I) <= bound``.

    Coefficients may be Fractions or MPolys (for symbolic BCH).
    """

    __slots__ = ("alg", "bound", "terms")

    def __init__(self, alg, bound, terms=None):
        self.alg = alg
        self.bound = bound
        self.terms = {}
        for I, c in (terms or {}).items():
            if c and weight(alg, I) <= bound:
                self.terms[tuple(I)] = c

    @classmethod
    def one(cls, alg, bound):
        return cls(alg, bound, {(0,) * alg.n: Fraction(1)})

    @classmethod
    def from_lie(cls, alg, coords, bound):
        t = {}
        for i, c in enumerate(coords):
            if c:
                e = [0] * alg.n
                e[i] = 1
                t[tuple(e)] = c
        return cls(alg, bound, t)

    @classmethod
    def from_word(cls, alg, word, bound):
        return cls(alg, bound, pbw_normalize(alg, word, bound))

    def _check(self, other):
        if other.alg is not self.alg or other.bound != self.bound:
            raise ValueError("enveloping algebra mismatch")

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for I, c in other.terms.items():
            _add_into(t, I, c)
        return UEAElem(self.alg, self.bound, t)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, c):
        return UEAElem(self.alg, self.bound, {I: v * c for I, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, UEAElem):
            return self.scale(other)
        self._check(other)
        alg, bound = self.alg, self.bound
        t = {}
        for I, a in self.terms.items():
            wI = weight(alg, I)
            wordI = index_to_word(I)
            for J, b in other.terms.items():
                if wI + weight(alg, J) > bound:
                    continue
                ab = a * b
                for K, c in _normalize_cached(alg, wordI + index_to_word(J)).items():
                    _add_into(t, K, ab * c)
        return UEAElem(alg, bound, t)

    def constant_term(self):
        return self.terms.get((0,) * self.alg.n, 0)

    def __eq__(self, other):
        return (isinstance(other, UEAElem) and other.alg is self.alg
                and other.bound == self.bound and other.terms == self.terms)

    __hash__ = None

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for I in sorted(self.terms, key=lambda I: index_sort_key(self.alg, I)):
            mono = "".join(self.alg.labels[i] + (f"^{k}" if k > 1 else "") for i, k in enumerate(I) if k)
            parts.append(f"{self.terms[I]}*{mono or '1'}")
        return " + ".join(parts)


def uea_multiply(a: UEAElem, b: UEAElem) -> UEAElem:
    return a * b


def uea_exp(alg, coords, bound) -> UEAElem:
    x = UEAElem.from_lie(alg, coords, bound)
    out = UEAElem.one(alg, bound)
    term = UEAElem.one(alg, bound)
    for k in range(1, bound + 1):
        term = (term * x).scale(Fraction(1, k))
        if not term.terms:
            break
        out = out + term
    return out


def uea_log(u: UEAElem):
    """Truncated log of a group-like element; returns Lie coordinates."""
    alg, bound = u.alg, u.bound
    if u.constant_term() != 1:
        raise ValueError("log needs an element with constant term 1")
    v = u - UEAElem.one(alg, bound)
    out = UEAElem(alg, bound)
    power = UEAElem.one(alg, bound)
    for k in range(1, bound + 1):
        power = power * v
        if not power.terms:
            break
        out = out + power.scale(Fraction((-1) ** (k + 1), k))
    coords = [0] * alg.n
    for I, c in out.terms.items():
        if sum(I) != 1:
            raise ArithmeticError("log of the product is not a Lie element")
        coords[I.index(1)] = c
    return coords


def bch_uea(alg, x, y):
    """log(exp x exp y) on coordinate lists via the enveloping algebra."""
    s = alg.step
    return uea_log(uea_exp(alg, x, s) * uea_exp(alg, y, s))


def symbolic_bch(alg, vars):
    n = alg.n
    X = [MPoly.var(vars, i) for i in range(n)]
    Y = [MPoly.var(vars, n + i) for i in range(n)]
    out = bch_uea(alg, X, Y) if n else []
    return [c if isinstance(c, MPoly) else MPoly.const(vars, c) for c in out]


def tau(alg, word, m=None):
    """tau(v1 x ... x vk) = v~k ... v~1, in normal form."""
    word = tuple(word)
    if any(alg.weights[i] != 1 for i in word):
        raise ValueError("tensor words use first-layer letters only")
    if m is not None and len(word) != m:
        raise ValueError("word length must equal the degree")
    return pbw_normalize(alg, word[::-1])


def tau_coefficients(alg, m):
    """``(words, indices, table)`` with ``table[word][I] = tau_I(word)``.

    Words run over the first layer in base-r numeric order; indices are the
    multi-indices of weight m in table order.
    """
    key = ("tau", m)
    hit = alg._cache.get(key)
    if hit is None:
        ws = words(alg.r, m)
        idx = indices_of_weight(alg, m)
        table = {w: tau(alg, w) for w in ws}
        hit = (ws, idx, table)
        alg._cache[key] = hit
    return hit


def factorial_frac(k):
    return Fraction(factorial(k))
