from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from carnot_jets.algebra import AlgebraError, AlgElem, bch
from carnot_jets.embed import (_morphism_hd, embed, eta, eta_polys, image_subalgebra_constants,
                               quotient_algebra)
from carnot_jets.hd import HDElem, HDSpace

from conftest import alg, positive, rats

STEP2PLUS = ["heisenberg(1)", "heisenberg(2)", "engel", "cartan_n23"]


def vecs(a):
    return st.lists(rats, min_size=a.n, max_size=a.n)


@pytest.mark.parametrize("name", STEP2PLUS)
@given(data=st.data())
def test_eta_is_a_cocycle(name, data):
    g = alg(name)
    x, y, z = (data.draw(vecs(g)) for _ in range(3))
    xy = bch(AlgElem(g, x), AlgElem(g, y)).coords
    yz = bch(AlgElem(g, y), AlgElem(g, z)).coords
    lhs = [a + b for a, b in zip(eta(g, x, y), eta(g, xy, z))]
    rhs = [a + b for a, b in zip(eta(g, x, yz), eta(g, y, z))]
    assert lhs == rhs


@pytest.mark.parametrize("name", STEP2PLUS)
@given(data=st.data(), lam=positive)
def test_eta_is_homogeneous(name, data, lam):
    g = alg(name)
    x, y = data.draw(vecs(g)), data.draw(vecs(g))
    d = lambda v: [c * lam ** w for c, w in zip(v, g.weights)]
    assert eta(g, d(x), d(y)) == [c * lam ** g.step for c in eta(g, x, y)]


@pytest.mark.parametrize("name", STEP2PLUS)
def test_eta_ignores_the_top_layer(name):
    g = alg(name)
    top = g.layer(g.step)
    for p in eta_polys(g).values():
        for k in top:
            assert not p.depends_on(k) and not p.depends_on(g.n + k)


@pytest.mark.parametrize("name", STEP2PLUS)
def test_embedding_certificates(name):
    g = alg(name)
    res = embed(g)
    assert all(res.certificates.values())
    assert image_subalgebra_constants(res) == g.structure


def test_quotient_needs_step_two():
    with pytest.raises(AlgebraError):
        quotient_algebra(alg("abelian(2)"))


def test_heisenberg_embedding():
    res = embed(alg("heisenberg(1)"))
    X, Y, Z = res.stacks[0], res.stacks[1], res.stacks[2]
    assert X.tensor == {(1,): (Fraction(1, 2),)}
    assert Y.tensor == {(0,): (Fraction(-1, 2),)}
    assert Z.degree == 0 and Z.tensor == {(): (1,)}


def _vec(g, i):
    return g.basis_vector(i).coords


def _top(g, v):
    return [v[k] for k in g.layer(g.step)]


def _form(g, v, coef):
    """coef [v,[y,x]] + 1/12([x,[y,v]] + [y,[x,v]]) on first-layer pairs."""
    t = {}
    for x in g.layer(1):
        for y in g.layer(1):
            X, Y = _vec(g, x), _vec(g, y)
            a = g.br(v, g.br(Y, X))
            b = g.br(X, g.br(Y, v))
            c = g.br(Y, g.br(X, v))
            t[x, y] = tuple(_top(g, [coef * p + Fraction(1, 12) * (q + r) for p, q, r in zip(a, b, c)]))
    return t


@pytest.mark.parametrize("name", ["engel", "cartan_n23"])
def test_step_three_forms(name):
    g = alg(name)
    res = embed(g)
    gq = res.quotient
    wd = len(g.layer(g.step))
    for u in g.layer(2):
        for x in g.layer(1):
            expect = tuple(Fraction(1, 2) * c for c in _top(g, g.br(_vec(g, u), _vec(g, x))))
            assert res.stacks[u].value((x,)) == expect
    for u in g.layer(1):
        quarter = HDElem(gq, wd, 2, _form(g, _vec(g, u), Fraction(1, 4)))
        assert res.stacks[u] == quarter


@pytest.mark.parametrize("name", ["engel", "cartan_n23"])
def test_half_coefficient_breaks_the_morphism(name):
    g = alg(name)
    res = embed(g)
    gq = res.quotient
    wd = len(g.layer(g.step))
    keep = [i for i, w in enumerate(g.weights) if w < g.step]
    stacks = dict(res.stacks)
    for u in g.layer(1):
        stacks[u] = HDElem(gq, wd, 2, _form(g, _vec(g, u), Fraction(1, 2)))
    assert _morphism_hd(g, gq, keep, res.stacks, HDSpace.of(gq, wd), gq.step)
    assert not _morphism_hd(g, gq, keep, stacks, HDSpace.of(gq, wd), gq.step)
