import random
from fractions import Fraction

from affklr.linalg import SparseMat, inverse, nullspace, rank, reduce_vector, rref
from affklr.scalars import FractionRing, ScalarRing

FR = FractionRing


def rand_mat(rng, rows, cols, density=0.6):
    m = SparseMat(rows, cols, FR)
    for r in range(rows):
        for c in range(cols):
            if rng.random() < density:
                m.set(r, c, Fraction(rng.randint(-4, 4)))
    return m


def test_identity_and_product():
    rng = random.Random(1)
    a = rand_mat(rng, 4, 4)
    i4 = SparseMat.identity(4, FR)
    assert a @ i4 == a
    assert i4 @ a == a


def test_rank_and_nullspace_consistency():
    rng = random.Random(2)
    for _ in range(20):
        m = rand_mat(rng, rng.randint(1, 5), rng.randint(1, 5))
        r = rank(m)
        ns = nullspace(m)
        assert r + len(ns) == m.cols
        for v in ns:
            assert m.apply(v) == {}


def test_inverse_random():
    rng = random.Random(3)
    tries = 0
    done = 0
    while done < 10 and tries < 100:
        tries += 1
        m = rand_mat(rng, 4, 4, density=0.8)
        if rank(m) < 4:
            continue
        inv = inverse(m)
        assert m @ inv == SparseMat.identity(4, FR)
        assert inv @ m == SparseMat.identity(4, FR)
        done += 1
    assert done == 10


def test_reduce_vector_idempotent():
    rng = random.Random(4)
    m = rand_mat(rng, 3, 6)
    pivots, ech = rref(m.to_rows(), 6, FR)
    v = {c: Fraction(rng.randint(-3, 3)) for c in range(6)}
    red = reduce_vector(v, pivots, ech, FR)
    assert not set(red) & set(pivots)
    assert reduce_vector(red, pivots, ech, FR) == red


def test_kron_dimensions():
    rng = random.Random(5)
    a = rand_mat(rng, 2, 3)
    b = rand_mat(rng, 3, 2)
    k = a.kron(b)
    assert (k.rows, k.cols) == (6, 6)
    # (a kron b)(x kron y) = ax kron by on basis vectors
    x = {1: Fraction(1)}
    y = {0: Fraction(2)}
    xy = {1 * b.cols + 0: Fraction(2)}
    ax = a.apply(x)
    by = b.apply(y)
    lhs = k.apply(xy)
    rhs = {}
    for r1, v1 in ax.items():
        for r2, v2 in by.items():
            rhs[r1 * b.rows + r2] = v1 * v2
    assert lhs == {k_: v for k_, v in rhs.items() if v}


def test_rref_over_ratfun():
    ring = ScalarRing(("q",))
    qv = ring.var("q")
    m = SparseMat(2, 3, ring)
    m.set(0, 0, qv)
    m.set(0, 1, ring.one)
    m.set(1, 0, qv * qv)
    m.set(1, 1, qv)
    m.set(1, 2, ring.one)
    assert rank(m) == 2
    ns = nullspace(m)
    assert len(ns) == 1
    assert m.apply(ns[0]) == {}
