import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qgraphs.constructions import complete_qgraph, empty_qgraph, symplectic_polar_qgraph
from qgraphs.errors import AmbientMismatchError, NotAutomorphismError, ValidationError
from qgraphs.finite_field import gf
from qgraphs.qgraph import (
    ClassicalGraph,
    QGraph,
    check_automorphisms,
    classical_counterpart,
    flags,
    is_automorphism,
    is_edge_transitive,
    is_flag_transitive,
    is_k_regular,
    is_symmetric,
    is_vertex_transitive,
    neighbourhood,
    partial_linear_space_check,
    regularity,
    vertex_degrees,
)
from qgraphs.semilinear import gamma_l1_subgroup, sp_generators
from qgraphs.subspaces import Subspace, ambient


def brute_degree(G, v):
    """q-degree of vertex v from the definition, or None."""
    A = ambient(G.field, G.n)
    through = [E for E in G.edges if v in E.points()]
    N = {0} | set(A.span_vectors([v]))
    for E in through:
        N |= set(E.vectors())
    closed = all(A.add(a, b) in N for a in N for b in N) and all(A.scale(c, a) in N for a in N for c in range(G.q))
    if not closed:
        return None
    r = len(A.rref(list(N)))
    planes = {A.rref([v, w]) for w in N if len(A.rref([v, w])) == 2}
    if {E.rows for E in through} != planes:
        return None
    return r - 1


def brute_regularity(G):
    degs = {brute_degree(G, v) for v in ambient(G.field, G.n).points()}
    if None in degs or len(degs) != 1:
        return None
    return degs.pop()


@st.composite
def random_qgraphs(draw):
    q, n = draw(st.sampled_from([(2, 3), (2, 4), (3, 3)]))
    F = gf(q)
    full = complete_qgraph(F, n).edge_keys
    mask = draw(st.lists(st.booleans(), min_size=len(full), max_size=len(full)))
    return QGraph(F, n, full[np.array(mask, bool)])


@settings(max_examples=60)
@given(random_qgraphs())
def test_regularity_matches_definition(G):
    assert is_k_regular(G) == brute_regularity(G)


@pytest.mark.parametrize("q,n,k", [(2, 4, 2), (3, 4, 2), (2, 6, 4), (4, 4, 2)])
def test_regularity_of_polar_graphs(q, n, k):
    G = symplectic_polar_qgraph(gf(q), n)
    assert is_k_regular(G) == k
    assert regularity(G, sp_generators(n, gf(q))).k == k


def test_complete_and_empty_degrees():
    F = gf(3)
    assert is_k_regular(complete_qgraph(F, 4)) == 3
    assert is_k_regular(empty_qgraph(F, 4)) == 0
    assert set(vertex_degrees(complete_qgraph(F, 3)).tolist()) == {2}


def test_regularity_witness_on_irregular_graph():
    F = gf(2)
    E = Subspace.from_rows(F, 3, [1, 2])
    G = QGraph.from_subspaces(F, 3, [E])
    reg = regularity(G)
    assert reg.k is None and not reg
    assert reg.witness is not None


def test_neighbourhood_is_union_of_edges():
    F = gf(2)
    G = symplectic_polar_qgraph(F, 4)
    X = Subspace(F, 4, (1,))
    N = neighbourhood(G, X)
    A = ambient(F, 4)
    assert len(N) == 8  # a 3-space: X^perp
    assert all(A.add(a, b) in N for a in N for b in N)
    iso = empty_qgraph(F, 4)
    assert neighbourhood(iso, X) == frozenset({0, 1})


def test_flags_match_flag_keys():
    G = symplectic_polar_qgraph(gf(3), 4)
    fl = flags(G)
    assert len(fl) == len(G.flag_keys()) == 160
    assert len(set(fl)) == 160


def test_edge_key_validation():
    F = gf(2)
    with pytest.raises(ValidationError):
        QGraph(F, 3, [3 * 8 + 1])  # rows (3, 1) are not in RREF
    with pytest.raises(ValidationError):
        QGraph(F, 1, [])


def test_json_roundtrip():
    G = symplectic_polar_qgraph(gf(3), 4)
    assert QGraph.from_json(G.to_json()) == G


# -- automorphisms and transitivity ------------------------------------------

def test_non_automorphism_names_the_generator():
    F = gf(2)
    G = symplectic_polar_qgraph(F, 4)
    H = gamma_l1_subgroup(F, 4, 1, 0, 1)
    assert not all(is_automorphism(g, G) for g in H.generators)
    with pytest.raises(NotAutomorphismError) as exc:
        check_automorphisms(G, H)
    assert exc.value.generator_index in (0, 1)


def test_group_and_graph_must_share_ambient():
    with pytest.raises(AmbientMismatchError):
        check_automorphisms(symplectic_polar_qgraph(gf(2), 4), sp_generators(6, gf(2)))


INSTANCES = [
    ("polar-2-4", lambda: symplectic_polar_qgraph(gf(2), 4), lambda: sp_generators(4, gf(2))),
    ("polar-3-4", lambda: symplectic_polar_qgraph(gf(3), 4), lambda: sp_generators(4, gf(3))),
    ("complete-2-5", lambda: complete_qgraph(gf(2), 5), lambda: gamma_l1_subgroup(gf(2), 5, 1, 0, 1)),
    ("complete-2-3", lambda: complete_qgraph(gf(2), 3), lambda: gamma_l1_subgroup(gf(2), 3, 1, 0, 1)),
    ("complete-3-3", lambda: complete_qgraph(gf(3), 3), lambda: gamma_l1_subgroup(gf(3), 3, 1, 0, 1)),
]


@pytest.mark.parametrize("name,graph,group", INSTANCES, ids=[i[0] for i in INSTANCES])
def test_transitivity_implication_chain(name, graph, group):
    G, H = graph(), group()
    vt, et, ft, sym = (f(G, H) for f in (is_vertex_transitive, is_edge_transitive, is_flag_transitive, is_symmetric))
    if sym:
        assert ft
    if ft:
        assert et and vt  # every vertex of these graphs lies on an edge
    assert ft.orbit_size <= ft.total and sym.total == ft.total * G.q


def _arc_orbit(graph, perms, seed):
    seen = {seed}
    todo = [seed]
    while todo:
        a, b = todo.pop()
        for p in perms:
            img = (p[a], p[b])
            if img not in seen:
                seen.add(img)
                todo.append(img)
    return seen


@pytest.mark.parametrize("name,graph,group", INSTANCES[:2], ids=[i[0] for i in INSTANCES[:2]])
def test_counterpart_of_symmetric_instance_is_arc_transitive(name, graph, group):
    G, H = graph(), group()
    assert is_symmetric(G, H)
    C = classical_counterpart(G)
    vk = G.vertex_keys
    A = ambient(G.field, G.n)
    perms = [[int(np.searchsorted(vk, A.normalize(g.apply_vector(int(v))))) for v in vk] for g in H.generators]
    arcs = {(i, j) for i, j in C.edges} | {(j, i) for i, j in C.edges}
    assert _arc_orbit(C, perms, next(iter(arcs))) == arcs


# -- classical counterpart ------------------------------------------------------

@pytest.mark.parametrize("q,n", [(2, 4), (3, 4), (2, 6)])
def test_graph6_matches_networkx(q, n):
    C = classical_counterpart(symplectic_polar_qgraph(gf(q), n))
    ref = nx.Graph()
    ref.add_nodes_from(range(C.order))
    ref.add_edges_from(C.edges)
    assert C.to_graph6() == nx.to_graph6_bytes(ref, header=False).decode().strip()


@given(st.integers(0, 70), st.data())
def test_graph6_matches_networkx_on_random_graphs(n, data):
    pairs = list(itertools.combinations(range(n), 2))
    chosen = data.draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    C = ClassicalGraph(n, tuple(sorted(chosen)))
    ref = nx.Graph()
    ref.add_nodes_from(range(n))
    ref.add_edges_from(chosen)
    assert C.to_graph6() == nx.to_graph6_bytes(ref, header=False).decode().strip()


def test_counterpart_degrees():
    G = symplectic_polar_qgraph(gf(2), 4)
    C = classical_counterpart(G)
    assert C.order == 15 and len(C.edges) == 15 * 3
    assert {len(a) for a in C.adjacency()} == {6}
    assert C.to_edgelist().count("\n") == 45


def test_partial_linear_space():
    assert partial_linear_space_check(complete_qgraph(gf(3), 3))
    assert partial_linear_space_check(empty_qgraph(gf(2), 3))
