import itertools
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qgraphs.errors import FoulserConditionError, ValidationError
from qgraphs.finite_field import extension_embedding, field_create, gf
from qgraphs.semilinear import (
    Flag,
    GroupSpec,
    SemilinearMap,
    SymplecticStructure,
    apply,
    enumerate_group,
    field_reduction_map,
    foulser_triples,
    gamma_l1_subgroup,
    gamma_l_generators,
    group_order,
    orbit,
    reduce_group,
    sl_generators,
    sp_generators,
)
from qgraphs.subspaces import Subspace, ambient, enumerate_subspaces, rref


def _random_map(F, n, rng):
    while True:
        M = [[rng.randrange(F.q) for _ in range(n)] for _ in range(n)]
        if rref(M, F)[1] == n:
            return SemilinearMap.from_matrix(F, M, rng.randrange(F.t))


def _apply_by_hand(g, v):
    F, A = g.field, ambient(g.field, g.n)
    x = [F.frobenius(c, g.s) for c in A.unpack(v)]
    out = [0] * g.n
    for i, c in enumerate(x):
        for j, m in enumerate(g.matrix[i]):
            out[j] = F.add(out[j], F.mul(c, m))
    return A.pack(out)


@given(st.sampled_from([(2, 4), (3, 3), (4, 3), (8, 2), (9, 2)]), st.integers(0, 2**32))
def test_action_associativity_and_inverse(qn, seed):
    q, n = qn
    F = gf(q)
    rng = random.Random(seed)
    g, h = _random_map(F, n, rng), _random_map(F, n, rng)
    A = ambient(F, n)
    for v in range(A.size):
        assert g.apply_vector(v) == _apply_by_hand(g, v)
        assert (g * h).apply_vector(v) == h.apply_vector(g.apply_vector(v))
        assert g.inverse().apply_vector(g.apply_vector(v)) == v
    assert (g * g.inverse()).is_identity()
    assert np.array_equal(g.table, [g.apply_vector(v) for v in range(A.size)])


@given(st.sampled_from([(4, 3), (9, 2)]), st.integers(0, 2**32))
def test_action_on_subspaces_is_a_right_action(qn, seed):
    q, n = qn
    F = gf(q)
    rng = random.Random(seed)
    g, h = _random_map(F, n, rng), _random_map(F, n, rng)
    for S in enumerate_subspaces(F, n, 1)[:10]:
        assert apply(h, apply(g, S)) == apply(g * h, S)


def test_singular_matrix_rejected():
    with pytest.raises(ValidationError):
        SemilinearMap.from_matrix(gf(2), [[1, 1], [1, 1]])


@pytest.mark.parametrize("n,q,order", [(4, 2, 720), (4, 3, 51840), (2, 4, 60), (2, 8, 504), (2, 9, 720)])
def test_symplectic_orders(n, q, order):
    G = sp_generators(n, gf(q))
    assert G.order == order
    assert group_order(G) == order
    J = SymplecticStructure.standard(gf(q), n)
    assert all(J.preserved_by(g) for g in G.generators)


def test_sp6_2_order():
    assert group_order(sp_generators(6, gf(2))) == 1451520


@pytest.mark.parametrize("a,q", [(2, 2), (2, 3), (3, 2), (2, 4), (2, 5)])
def test_sl_orders(a, q):
    G = sl_generators(a, gf(q))
    assert group_order(G) == G.order


@pytest.mark.parametrize("a,q", [(2, 4), (2, 8), (2, 3)])
def test_gamma_l_orders(a, q):
    G = gamma_l_generators(a, gf(q))
    assert group_order(G) == G.order


def test_symplectic_structure_validation():
    F = gf(3)
    with pytest.raises(ValidationError):
        SymplecticStructure(F, ((0, 1), (1, 0)))  # symmetric, not alternating in odd characteristic
    with pytest.raises(ValidationError):
        SymplecticStructure(F, ((0, 0), (0, 0)))
    with pytest.raises(ValidationError):
        SymplecticStructure.standard(F, 3)


# -- one-dimensional semilinear groups ---------------------------------------

def _foulser_valid(q, n, p, t, d, e, s):
    """Independent restatement of the normal-form conditions."""
    N = q**n - 1
    if not (d >= 1 and N % d == 0):
        return False
    if not (s >= 1 and (n * t) % s == 0):
        return False
    return 0 <= e < d and (e * ((q**n - 1) // (p**s - 1))) % d == 0


def _closure_order(F, n, d, e, s):
    """Order of <x -> w^d x, x -> w^e x^(p^s)> computed on pairs (log a, j) for x -> a x^(p^j)."""
    K = field_create(F.p, F.t * n)
    N, m = K.q - 1, K.t
    gens = [(d % N, 0), (e % N, s % m)]
    seen = {(0, 0)}
    frontier = [(0, 0)]
    while frontier:
        new = []
        for la, j in frontier:
            for lb, k in gens:
                # x -> a x^(p^j), then x -> b x^(p^k): b a^(p^k) x^(p^(j+k))
                img = ((lb + la * F.p**k) % N, (j + k) % m)
                if img not in seen:
                    seen.add(img)
                    new.append(img)
        frontier = new
    return len(seen)


@pytest.mark.parametrize("n", [5, 6])
def test_foulser_rejects_exactly_the_invalid_triples(n):
    F = gf(2)
    N = 2**n - 1
    accepted = []
    for d in range(0, N + 1):
        for s in range(0, n + 2):
            for e in range(0, max(d, 1) + 1):
                valid = _foulser_valid(2, n, 2, 1, d, e, s)
                if valid:
                    gamma_l1_subgroup(F, n, d, e, s)
                    accepted.append((d, e, s))
                else:
                    with pytest.raises(FoulserConditionError):
                        gamma_l1_subgroup(F, n, d, e, s)
    assert sorted(accepted) == sorted(foulser_triples(F, n))


@pytest.mark.parametrize("n", [5, 6])
def test_foulser_orders_match_bfs(n):
    F = gf(2)
    for d, e, s in foulser_triples(F, n):
        G = gamma_l1_subgroup(F, n, d, e, s)
        bfs = group_order(G)
        assert bfs == G.order, (d, e, s)
        assert bfs == _closure_order(F, n, d, e, s), (d, e, s)


def test_foulser_condition_numbers():
    F = gf(2)
    with pytest.raises(FoulserConditionError) as exc:
        gamma_l1_subgroup(F, 6, 5, 0, 1)
    assert exc.value.condition == 1
    with pytest.raises(FoulserConditionError) as exc:
        gamma_l1_subgroup(F, 6, 1, 0, 4)
    assert exc.value.condition == 2
    with pytest.raises(FoulserConditionError) as exc:
        gamma_l1_subgroup(F, 6, 9, 1, 2)
    assert exc.value.condition == 3


@pytest.mark.parametrize("q,n,order", [(2, 5, 155), (8, 1, 21), (4, 2, 60), (2, 3, 21)])
def test_full_gamma_l1_orders(q, n, order):
    assert group_order(gamma_l1_subgroup(gf(q), n, 1, 0, 1)) == order


def test_singer_cycle():
    G = gamma_l1_subgroup(gf(2), 5, 1, 0, 5)
    assert group_order(G) == 31


# -- field reduction ---------------------------------------------------------

@pytest.mark.parametrize("p,t,b,a", [(2, 1, 2, 2), (2, 1, 3, 2), (3, 1, 2, 2), (2, 1, 2, 3)])
def test_field_reduction_commutes_with_coordinates(p, t, b, a):
    F = field_create(p, t)
    emb = extension_embedding(F, b)
    K = emb.ext
    rng = random.Random(7)
    AK, AF = ambient(K, a), ambient(F, a * b)
    for _ in range(5):
        g = _random_map(K, a, rng)
        big = field_reduction_map(g, emb)
        for v in range(0, AK.size, max(1, AK.size // 200)):
            coords = AK.unpack(v)
            expanded = AF.pack([c for x in coords for c in emb.forward(x)])
            img = AK.unpack(g.apply_vector(v))
            assert big.apply_vector(expanded) == AF.pack([c for x in img for c in emb.forward(x)])


def test_reduced_group_order_preserved():
    K = gf(4)
    G = reduce_group(gamma_l_generators(2, K), gf(2))
    assert G.n == 4
    assert group_order(G) == gamma_l_generators(2, K).order == 360


def test_reduce_to_non_subfield():
    with pytest.raises(ValidationError):
        reduce_group(sp_generators(2, gf(8)), gf(4))


# -- orbits ------------------------------------------------------------------

def test_orbit_on_each_kind():
    F = gf(2)
    G = sp_generators(4, F)
    X = Subspace(F, 4, (1,))
    assert len(orbit(G, X)) == 15
    assert len(orbit(G, Subspace.from_rows(F, 4, [1, 2]))) == 15  # isotropic lines
    assert len(orbit(G, Subspace.from_rows(F, 4, [1, 8]))) == 20  # hyperbolic lines
    E = Subspace.from_rows(F, 4, [1, 2])
    assert len(orbit(G, Flag(Subspace(F, 4, (1,)), E))) == 45
    assert len(orbit(G, (Subspace(F, 4, (1,)), Subspace(F, 4, (2,))))) == 90


def test_flag_validation():
    F = gf(2)
    E = Subspace.from_rows(F, 4, [1, 2])
    with pytest.raises(ValidationError):
        Flag(Subspace(F, 4, (4,)), E)
    with pytest.raises(ValidationError):
        Flag(E, E)


def test_group_json_roundtrip():
    G = sp_generators(4, gf(3))
    back = GroupSpec.from_json(G.to_json(), gf(3))
    assert back == G and back.order == G.order


def test_element_list_entries_are_group_elements():
    G = sp_generators(4, gf(2))
    els = enumerate_group(G)
    J = SymplecticStructure.standard(gf(2), 4)
    assert len({(tuple(r), f) for r, f in zip(els.rows.tolist(), els.frob.tolist())}) == 720
    assert all(J.preserved_by(els.element(i)) for i in range(0, 720, 37))
