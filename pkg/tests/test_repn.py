from fractions import Fraction
from math import comb

import pytest

from affklr.linalg import SparseMat, rank
from affklr.repn import (
    affinize, check_defining_relations, dominant_label, evaluate,
    fundamental_module, hom_space, tensor, twist, weyl_orbit_stable,
)
from affklr.scalars import QMono, RatFun


def test_vector_rep_sl2_conventions():
    M = fundamental_module(2, 1)
    u1, u2 = M.index_of((1,)), M.index_of((2,))
    assert M.dim == 2
    assert M.F[1].get(u2, u1) == M.ring.one          # f_1 u_1 = u_2
    assert M.E[1].get(u1, u2) == M.ring.one          # e_1 u_2 = u_1
    assert M.weights[u1][1] == 1                     # K_1 u_1 = q u_1
    assert M.weights[u1][0] == -1                    # level zero


def test_fundamental_dimensions_and_weights():
    for N, k in [(2, 1), (3, 1), (3, 2), (4, 2), (5, 3)]:
        M = fundamental_module(N, k)
        assert M.dim == comb(N, k)
        # all weight multiplicities are 1
        assert len(set(M.weights)) == M.dim
        assert weyl_orbit_stable(M)


def test_dominant_weight_space_is_one_dimensional():
    M = fundamental_module(3, 1)
    dom = M.weights[M.index_of(dominant_label(3, 1))]
    assert sum(1 for w in M.weights if w == dom) == 1


def test_defining_relations_fundamentals():
    for N, k in [(2, 1), (3, 1), (3, 2), (4, 2)]:
        rep = check_defining_relations(fundamental_module(N, k))
        assert rep.ok, str(rep)


def test_defining_relations_negative_control():
    M = fundamental_module(3, 1)
    M.E[1].set(0, 0, M.ring.one)  # corrupt an entry
    rep = check_defining_relations(M)
    assert not rep.ok


def test_relations_after_affinization_and_tensor():
    M = fundamental_module(2, 1)
    Ma = affinize(M)
    assert check_defining_relations(Ma).ok
    T = tensor(M, twist(M, QMono(1, 3)))
    assert check_defining_relations(T).ok


def test_twist_laws():
    M = fundamental_module(3, 1)
    x = QMono(Fraction(2), 1)
    y = QMono(1, -2)
    assert twist(M, QMono(1, 0)).E[0] == M.E[0]
    t1 = twist(twist(M, x), y)
    t2 = twist(M, x * y)
    assert t1.E[0] == t2.E[0] and t1.F[0] == t2.F[0]
    # twist distributes over tensor
    a = tensor(twist(M, x), twist(M, x))
    b = twist(tensor(M, M), x)
    # on the tensor, e_0 twisting by x on both factors scales E_0 by x once
    assert a.E[0] == b.E[0] and a.F[0] == b.F[0]


def test_evaluate_affinize_is_twist():
    M = fundamental_module(3, 2)
    for a in (QMono(1, 0), QMono(1, 2), QMono(Fraction(3, 2), -1)):
        ev = evaluate(affinize(M), a)
        tw = twist(M, a)
        assert ev.E == tw.E and ev.F == tw.F


def test_affinized_e0_carries_z():
    M = affinize(fundamental_module(2, 1))
    zvar = RatFun.var(M.ctx, "z")
    entries = list(M.E[0].data.values())
    assert entries and all(v == zvar for v in entries)


def test_tensor_dim_and_weights():
    M = fundamental_module(4, 1)
    T = tensor(M, M)
    assert T.dim == M.dim ** 2
    i = T.basis.index(((1,), (2,)))
    w1 = M.weights[M.index_of((1,))]
    w2 = M.weights[M.index_of((2,))]
    assert T.weights[i] == tuple(a + b for a, b in zip(w1, w2))


def test_hom_contains_identity():
    M = fundamental_module(3, 1)
    homs = hom_space(M, M)
    assert len(homs) == 1
    m = homs[0]
    # multiple of the identity
    d = m.get(0, 0)
    assert m == SparseMat.identity(M.dim, M.ring).scale(d)


def test_hom_between_different_fundamentals_is_zero():
    V1 = fundamental_module(3, 1)
    V2 = fundamental_module(3, 2)
    assert hom_space(V1, V2) == []


def test_generic_tensor_irreducible():
    # V_x (x) V_y has a one-dimensional endomorphism ring at generic ratio
    M = fundamental_module(2, 1)
    T = tensor(twist(M, QMono(1, 5)), M)
    homs = hom_space(T, T)
    assert len(homs) == 1


def test_hom_between_tensor_orders_generic():
    # dim hom(V_x (x) V_y, V_y (x) V_x) = 1 at a generic anchor ratio
    M = fundamental_module(2, 1)
    Mx = twist(M, QMono(1, 5))
    homs = hom_space(tensor(Mx, M), tensor(M, Mx))
    assert len(homs) == 1
