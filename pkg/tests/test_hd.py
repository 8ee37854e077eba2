from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from carnot_jets.algebra import adjoint, AlgElem
from carnot_jets.hd import (HDElem, HDSpace, NotMember, contract_exp, contract_full, format_tensor, hd_basis,
                            hd_membership, parse_word, word_label)
from carnot_jets.pbw import indices_of_weight
from carnot_jets.polyjet import horizontal_stack

from conftest import alg, rand_poly, rats

NAMES = ["heisenberg(1)", "engel", "cartan_n23", "heisenberg(2)"]


@pytest.mark.parametrize("name", NAMES)
@pytest.mark.parametrize("k", [0, 1, 2, 3])
def test_dimension_matches_pbw(name, k):
    a = alg(name)
    assert HDSpace.of(a, 1).dim(k) == len(indices_of_weight(a, k))
    assert HDSpace.of(a, 2).dim(k) == 2 * len(indices_of_weight(a, k))


def test_abelian_hd_is_symmetric_tensors():
    a = alg("abelian(2)")
    for I, _, A in hd_basis(a, 2):
        for w, v in A.tensor.items():
            assert A.value(w[::-1]) == v


def test_non_member_has_witness():
    a = alg("heisenberg(1)")
    A = HDElem(a, 1, 3, {(0, 0, 1): 1})
    ok, (witness, pairing) = hd_membership(a, A)
    assert not ok
    s = sum(c * A.value(w)[0] for w, c in witness.items())
    assert s != 0
    with pytest.raises(NotMember):
        HDSpace.of(a, 1).coords(A)


@pytest.mark.parametrize("name", NAMES[:3])
def test_basis_round_trip(name):
    a = alg(name)
    sp = HDSpace.of(a, 2)
    for k in range(4):
        for pos, (I, c, A) in enumerate(sp.basis(k)):
            x = sp.coords(A)
            assert x == [1 if i == pos else 0 for i in range(sp.dim(k))]
            assert sp.to_elem(k, x) == A


@pytest.mark.parametrize("name", ["heisenberg(1)", "engel", "cartan_n23"])
@given(data=st.data())
def test_contraction_is_an_anti_morphism(name, data):
    a = alg(name)
    sp = HDSpace.of(a, 1)
    k = 4
    coeffs = data.draw(st.lists(rats, min_size=sp.dim(k), max_size=sp.dim(k)))
    A = sp.to_elem(k, coeffs)
    v = data.draw(st.lists(rats, min_size=a.n, max_size=a.n))
    w = data.draw(st.lists(rats, min_size=a.n, max_size=a.n))
    lhs = contract_full(a.br(v, w), {k: A})
    inner_w = contract_full(w, contract_full(v, {k: A}))
    inner_v = contract_full(v, contract_full(w, {k: A}))
    for d in set(lhs) | set(inner_w) | set(inner_v):
        z = HDElem.zero(a, 1, d)
        assert lhs.get(d, z) == inner_w.get(d, z) - inner_v.get(d, z)


@pytest.mark.parametrize("name", ["heisenberg(1)", "engel"])
@given(data=st.data())
def test_contraction_preserves_membership(name, data):
    a = alg(name)
    sp = HDSpace.of(a, 1)
    for k in (2, 3):
        A = sp.to_elem(k, data.draw(st.lists(rats, min_size=sp.dim(k), max_size=sp.dim(k))))
        for u in range(a.n):
            for d, B in sp.contract(a.basis_vector(u).coords, A).items():
                assert hd_membership(a, B)[0]


@pytest.mark.parametrize("name", ["heisenberg(1)", "engel"])
@given(data=st.data())
def test_coordinate_contraction_matches_tensors(name, data):
    a = alg(name)
    sp = HDSpace.of(a, 1)
    k = 3
    x = data.draw(st.lists(rats, min_size=sp.dim(k), max_size=sp.dim(k)))
    v = data.draw(st.lists(rats, min_size=a.n, max_size=a.n))
    by_tensor = contract_full(v, {k: sp.to_elem(k, x)})
    by_coords = sp.contract_coords(v, {k: x})
    for d, vec in by_coords.items():
        B = by_tensor.get(d, HDElem.zero(a, 1, d))
        assert sp.coords(B) == vec


def test_contract_exp_inverse():
    a = alg("engel")
    sp = HDSpace.of(a, 1)
    stack = {k: sp.to_elem(k, [Fraction(i + k, 3) for i in range(sp.dim(k))]) for k in range(4)}
    x = [1, Fraction(-2), Fraction(1, 2), 3]
    there = contract_exp(x, stack)
    back = contract_exp([-c for c in x], there)
    for k in range(4):
        assert back.get(k, HDElem.zero(a, 1, k)) == stack[k]


def test_ad_equivariance_of_stacks(rng):
    # A_{x† f, p} = (Ad_p^{-1} x) ⌐ A_{f, p} in each degree
    from carnot_jets.polyjet import right_inv_derive
    a = alg("heisenberg(1)")
    for _ in range(5):
        f = rand_poly(rng, a.coord_names)
        p = [Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for _ in range(a.n)]
        x = [rng.randint(-2, 2) for _ in range(a.n)]
        xp = adjoint(AlgElem(a, [-c for c in p]), AlgElem(a, x)).coords
        m = 2
        lhs = horizontal_stack(a, right_inv_derive(a, x, f), p, m)
        full = horizontal_stack(a, f, p, m + a.step)
        rhs = contract_full(xp, full)
        for k in range(m + 1):
            assert lhs[k] == rhs.get(k, HDElem.zero(a, 1, k))


def test_word_labels():
    a = alg("heisenberg(1)")
    assert word_label(a, (0, 1)) == "XY"
    assert parse_word(a, "XY") == (0, 1)
    e = alg("engel")
    assert word_label(e, (0, 1)) == "X1,X2"
    assert parse_word(e, "X1,X2") == (0, 1)
    with pytest.raises(ValueError):
        parse_word(a, "XQ")


def test_format_tensor():
    a = alg("heisenberg(1)")
    A = HDElem(a, 1, 3, {(0, 0, 1): -2, (0, 1, 0): -1})
    assert format_tensor(a, A) == "-2X*⊗X*⊗Y* - X*⊗Y*⊗X*"
    assert format_tensor(a, HDElem.zero(a, 1, 2)) == "0"


def test_bad_words_rejected():
    a = alg("heisenberg(1)")
    with pytest.raises(ValueError):
        HDElem(a, 1, 1, {(2,): 1})
    with pytest.raises(ValueError):
        HDElem(a, 1, 2, {(0,): 1})
