from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from carnot_jets.algebra import AlgElem, adjoint, dexp_series
from carnot_jets.exact import MPoly, RatMatrix, rank
from carnot_jets.hd import HDSpace, contract_full
from carnot_jets.pbw import UEAElem
from carnot_jets.polyjet import (apply_pbw, centered_dilation, coord_poly, dual_poly_basis, horizontal_stack,
                                 is_homogeneous_at, left_field, left_inv_derive, pairing, right_field,
                                 right_inv_derive, sigma_change_of_basis, sigma_p, sigma_p_inverse, taylor)

from conftest import alg, rand_poly, rand_vec, rats



def xyz():
    a = alg("heisenberg(1)")
    return a, [coord_poly(a, c) for c in "xyz"]


def test_heisenberg_fields():
    a, (x, y, z) = xyz()
    assert left_inv_derive(a, [1, 0, 0], z) == -y / 2
    assert left_inv_derive(a, [0, 1, 0], z) == x / 2
    assert right_inv_derive(a, [1, 0, 0], z) == y / 2
    assert left_inv_derive(a, [1, 0, 0], MPoly.const(x.vars, 7)) == MPoly.zero(x.vars)


def test_abelian_left_equals_right():
    a = alg("abelian(2)")
    f = coord_poly(a, 0) ** 3 * coord_poly(a, 1)
    for i in range(2):
        assert left_inv_derive(a, a.basis_vector(i).coords, f) == right_inv_derive(a, a.basis_vector(i).coords, f)


@pytest.mark.parametrize("name", ["heisenberg(1)", "engel", "cartan_n23"])
@given(data=st.data())
def test_fields_match_bernoulli_series(name, data):
    a = alg(name)
    p = data.draw(st.lists(rats, min_size=a.n, max_size=a.n))
    left = dexp_series(a.step, 1)
    right = dexp_series(a.step, -1)
    for i in range(a.n):
        v = a.basis_vector(i).coords
        assert [q.evaluate(p) for q in left_field(a, i)] == a.ad_power_series(p, v, left)
        assert [q.evaluate(p) for q in right_field(a, i)] == a.ad_power_series(p, v, right)


@pytest.mark.parametrize("name", ["heisenberg(1)", "engel"])
def test_field_commutators(name, rng):
    a = alg(name)
    for _ in range(4):
        f = rand_poly(rng, a.coord_names, terms=5, max_exp=2)
        v = rand_vec(rng, a.n)
        w = rand_vec(rng, a.n)
        vw = a.br(v, w)
        L = lambda u, g: left_inv_derive(a, u, g)
        R = lambda u, g: right_inv_derive(a, u, g)
        assert L(v, L(w, f)) - L(w, L(v, f)) == L(vw, f)
        assert R(v, R(w, f)) - R(w, R(v, f)) == -R(vw, f)
        assert L(v, R(w, f)) == R(w, L(v, f))


def test_stack_examples():
    a, (x, y, z) = xyz()
    st_ = horizontal_stack(a, z - x * y / 2, [0, 0, 0], 2)
    assert not st_[0] and not st_[1]
    assert HDSpace.of(a, 1).coords(st_[2]) == [0, 0, 0, 1]
    c = horizontal_stack(a, MPoly.const(x.vars, 5), [1, 2, 3], 3)
    assert c[0].value(())[0] == 5 and not c[1] and not c[2] and not c[3]


def test_first_order_stack_is_derivative(rng):
    a = alg("engel")
    for _ in range(10):
        f = rand_poly(rng, a.coord_names)
        p = rand_vec(rng, a.n)
        A1 = horizontal_stack(a, f, p, 1)[1]
        for i in range(a.r):
            assert A1.value((i,))[0] == left_inv_derive(a, a.basis_vector(i).coords, f).evaluate(p)


def test_pairing_examples():
    a, (x, y, z) = xyz()
    e = [0, 0, 0]
    assert pairing(a, UEAElem(a, 2, {(1, 1, 0): 1}), z, e) == [Fraction(1, 2)]
    assert pairing(a, UEAElem(a, 2, {(0, 0, 1): 1}), z, e) == [1]
    assert pairing(a, UEAElem(a, 2, {(2, 0, 0): 1}), x * x, e) == [2]


@pytest.mark.parametrize("name", ["heisenberg(1)", "engel"])
@pytest.mark.parametrize("m", [1, 2, 3])
def test_dual_basis_duality_and_homogeneity(name, m):
    a = alg(name)
    p = [Fraction(1, 2), -1] + [Fraction(k, 3) for k in range(a.n - 2)]
    basis = dual_poly_basis(a, p, m)
    for I, P in basis:
        assert is_homogeneous_at(a, P, p, m)
        for J, _ in basis:
            assert apply_pbw(a, J, P).evaluate(p) == (1 if I == J else 0)


def test_centered_dilation_fixes_center():
    a = alg("heisenberg(1)")
    p = [1, 2, 3]
    d = centered_dilation(a, p)
    assert d[0].vars[-1] == "lam"
    for val in (2, Fraction(1, 3)):
        pt = list(p) + [val]
        assert [q.evaluate(pt) for q in d] == p


@pytest.mark.parametrize("name", ["heisenberg(1)", "engel"])
def test_taylor_reproduces_polynomials(name, rng):
    a = alg(name)
    for _ in range(3):
        f = rand_poly(rng, a.coord_names, terms=4, max_exp=1)
        m = max(f.weighted_degrees(a.weights), default=0)
        p = rand_vec(rng, a.n)
        comps = taylor(a, f, p, m)
        total = MPoly.zero(a.coord_names)
        for k, (P,) in enumerate(comps):
            assert is_homogeneous_at(a, P, p, k)
            total = total + P
        assert total == f


def test_taylor_of_homogeneous():
    a, (x, y, z) = xyz()
    comps = taylor(a, z, [0, 0, 0], 2)
    assert comps[2] == [z] and not comps[0][0] and not comps[1][0]


def test_sigma_examples():
    a, (x, y, z) = xyz()
    sp = HDSpace.of(a, 1)
    assert sp.coords(sigma_p(a, [z - x * y / 2], [0, 0, 0], 2)) == [0, 0, 0, 1]
    assert sp.coords(sigma_p(a, [x], [0, 0, 0], 1)) == [1, 0]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_sigma_round_trip(m):
    a = alg("heisenberg(1)")
    p = [2, Fraction(-1, 3), 1]
    for I, c, A in HDSpace.of(a, 1).basis(m):
        P = sigma_p_inverse(a, A, p)
        assert is_homogeneous_at(a, P, p, m)
        assert sigma_p(a, P, p, m) == A


def test_sigma_equivariance(rng):
    # sigma_p(v† f) = Ad_p^{-1}(v) ⌐ sigma_p(f) for f homogeneous at p
    a = alg("heisenberg(1)")
    m = 3
    for _ in range(4):
        p = rand_vec(rng, a.n)
        f = MPoly.zero(a.coord_names)
        for I, P in dual_poly_basis(a, p, m):
            f = f + P * rng.randint(-3, 3)
        for u in range(a.n):
            v = a.basis_vector(u).coords
            k = m - a.weights[u]
            lhs = sigma_p(a, [right_inv_derive(a, v, f)], p, k)
            vp = adjoint(AlgElem(a, [-c for c in p]), AlgElem(a, v)).coords
            rhs = contract_full(vp, {m: sigma_p(a, [f], p, m)})
            assert lhs == rhs[k]


def test_two_bases_differ():
    a = alg("heisenberg(1)")
    M = sigma_change_of_basis(a, 2)
    assert rank(RatMatrix.from_rows(M)) == 4
    assert M != [[1 if i == j else 0 for j in range(4)] for i in range(4)]
