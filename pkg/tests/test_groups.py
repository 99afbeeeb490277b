import itertools
import random

import pytest
from hypothesis import given, strategies as st

from folnerlab.groups import (
    COORD_BOUND,
    CoordinateOverflowError,
    DescriptorMismatchError,
    GroupElement,
    GroupError,
    INFINITE,
    Kind,
    RankExceededError,
    ZdEmbedding,
    commutes,
    finite_by_free,
    free_abelian,
    identity,
    inverse,
    lamplighter,
    law,
    multiply,
    random_element,
    standard_embedding,
    wreath_zz,
)

GROUPS = [free_abelian(2), finite_by_free([4, 6], 2), finite_by_free([2, 3], 0), lamplighter(), wreath_zz()]


def dense_wreath_mul(g, h, modulus=None):
    """Law (n,u)(m,v) = (n+m, u^m + v) with (u^m)_i = u_{i+m}, on explicit windows."""
    (n, u), (m, v) = g, h
    u, v = dict(u), dict(v)
    window = range(min(list(u) + list(v) + [0]) - abs(m) - 1, max(list(u) + list(v) + [0]) + abs(m) + 2)
    out = {}
    for i in window:
        x = u.get(i + m, 0) + v.get(i, 0)
        if modulus:
            x %= modulus
        if x:
            out[i] = x
    return n + m, out


def as_dict(g, kind):
    shift, cfg = g
    return shift, ({p: 1 for p in cfg} if kind is Kind.LAMPLIGHTER else dict(cfg))


def test_descriptor_ranks():
    assert free_abelian(3).declared_rank == 3
    assert finite_by_free([5], 2).declared_rank == 2
    assert lamplighter().declared_rank == 1
    assert wreath_zz().declared_rank == INFINITE
    assert finite_by_free([], 2) == free_abelian(2)
    with pytest.raises(GroupError):
        finite_by_free([1], 2)
    with pytest.raises(GroupError):
        free_abelian(0)


def test_multiply_examples():
    G = free_abelian(2)
    assert multiply(G.element((1, 2)), G.element((3, -2))).data == (4, 0)
    L = lamplighter()
    g = L.element((1, [0]))
    assert (g * g).data == (2, (-1, 0))
    assert dense_wreath_mul((1, {0: 1}), (1, {0: 1}), 2) == (2, {-1: 1, 0: 1})
    for G in GROUPS:
        rng = random.Random(3)
        g = random_element(G, rng)
        assert g * identity(G) == g == identity(G) * g


def test_inverse_examples():
    G = free_abelian(2)
    assert inverse(G.element((1, 2))).data == (-1, -2)
    L = lamplighter()
    assert inverse(L.element((1, [0]))).data == (-1, (1,))
    for G in GROUPS:
        assert inverse(identity(G)) == identity(G)


def test_identity_examples():
    assert identity(free_abelian(3)).data == (0, 0, 0)
    assert identity(lamplighter()).data == (0, ())
    assert identity(wreath_zz()).data == (0, ())


@pytest.mark.parametrize("G", GROUPS, ids=str)
def test_group_laws_seeded(G):
    rng = random.Random(20240611)
    e = identity(G)
    for _ in range(1000):
        g, h, k = (random_element(G, rng) for _ in range(3))
        assert (g * h) * k == g * (h * k)
        assert g * g.inverse() == e == g.inverse() * g


@pytest.mark.parametrize("G", [lamplighter(), wreath_zz()], ids=str)
def test_law_matches_dense_oracle(G):
    rng = random.Random(7)
    modulus = 2 if G.kind is Kind.LAMPLIGHTER else None
    for _ in range(300):
        g, h = random_element(G, rng), random_element(G, rng)
        n, cfg = dense_wreath_mul(as_dict(g.data, G.kind), as_dict(h.data, G.kind), modulus)
        assert (g * h).data[0] == n
        assert as_dict((g * h).data, G.kind)[1] == cfg


@pytest.mark.parametrize("G", GROUPS, ids=str)
def test_results_are_canonical(G):
    rng = random.Random(11)
    canon = law(G).canonical
    for _ in range(200):
        g, h = random_element(G, rng), random_element(G, rng)
        for x in (g * h, g.inverse()):
            assert canon(x.data) == x.data


def test_canonical_forms():
    G = finite_by_free([4], 1)
    assert G.element((7, 3)).data == (3, 3)
    assert G.element((-1, 3)).data == (3, 3)
    W = wreath_zz()
    assert W.element((0, {3: 0, 1: 2})).data == (0, ((1, 2),))
    assert lamplighter().element((0, [3, -1])).data == (0, (-1, 3))
    with pytest.raises(GroupError):
        lamplighter().element((0, [1, 1]))
    with pytest.raises(GroupError):
        free_abelian(2).element((1, 2, 3))


def test_mismatch_and_overflow():
    with pytest.raises(DescriptorMismatchError):
        multiply(free_abelian(2).element((0, 0)), free_abelian(3).element((0, 0, 0)))
    big = free_abelian(1).element((COORD_BOUND,))
    with pytest.raises(CoordinateOverflowError):
        big * big
    with pytest.raises(CoordinateOverflowError):
        free_abelian(1).element((COORD_BOUND + 1,))


def test_standard_embeddings():
    emb = standard_embedding(free_abelian(2), 2)
    assert [e.data for e in emb.images] == [(1, 0), (0, 1)]
    assert [e.data for e in standard_embedding(lamplighter(), 1).images] == [(1, ())]
    W = wreath_zz()
    emb = standard_embedding(W, 3)
    assert [e.data for e in emb.images] == [(0, ((0, 1),)), (0, ((1, 1),)), (0, ((2, 1),))]
    # brute-force relation check over [-3, 3]^3
    for coeffs in itertools.product(range(-3, 4), repeat=3):
        assert emb.combine(coeffs).is_identity == (not any(coeffs))
    for a, b in itertools.combinations(emb.images, 2):
        assert commutes(a, b)
    assert standard_embedding(finite_by_free([6], 2), 1).images[0].data == (0, 1, 0)
    with pytest.raises(RankExceededError):
        standard_embedding(lamplighter(), 2)
    with pytest.raises(RankExceededError):
        standard_embedding(finite_by_free([2], 1), 2)


def test_embedding_rejects_bad_images():
    L = lamplighter()
    with pytest.raises(GroupError):
        ZdEmbedding(L, (L.element((0, [0])),))  # order 2
    with pytest.raises(GroupError):
        ZdEmbedding(L, (L.element((1, ())), L.element((0, [0]))))  # do not commute
    G = free_abelian(2)
    with pytest.raises(GroupError):
        ZdEmbedding(G, (G.element((1, 1)), G.element((2, 2))))


def test_embedding_coordinates():
    G = finite_by_free([5], 2)
    emb = ZdEmbedding(G, (G.element((1, 1, 0)), G.element((0, 0, 2))))
    assert emb.coordinates(G.element((3, 3, 4))) == (3, 2)
    assert emb.coordinates(G.element((0, 3, 4))) is None
    assert emb.coordinates(G.element((0, 0, 3))) is None
    L = lamplighter()
    emb = ZdEmbedding(L, (L.element((2, [0])),))
    g = emb.combine((-3,))
    assert emb.coordinates(g) == (-3,)
    assert emb.coordinates(L.element((2, ()))) is None
    W = wreath_zz()
    emb = standard_embedding(W, 2)
    assert emb.coordinates(W.element((0, {0: 4, 1: -2}))) == (4, -2)
    assert emb.coordinates(W.element((0, {2: 1}))) is None
    assert emb.coordinates(W.element((1, ()))) is None


ints = st.integers(-50, 50)


@st.composite
def wreath_elements(draw):
    cfg = draw(st.dictionaries(st.integers(-8, 8), st.integers(-3, 3).filter(bool), max_size=5))
    return GroupElement(wreath_zz(), (draw(ints), cfg))


@given(wreath_elements(), wreath_elements(), wreath_elements())
def test_wreath_associativity_property(g, h, k):
    assert (g * h) * k == g * (h * k)
    assert (g * h).inverse() == h.inverse() * g.inverse()


@given(st.lists(ints, min_size=3, max_size=3), st.lists(ints, min_size=3, max_size=3))
def test_finite_by_free_is_abelian(x, y):
    G = finite_by_free([3], 2)
    g, h = G.element(x), G.element(y)
    assert g * h == h * g
    assert all(0 <= r < 3 for r in (g * h).data[:1])
