import random

import pytest
from hypothesis import given, settings, strategies as st

from qgraphs.catalog import default_catalog, extended_catalog, resolve_group
from qgraphs.constructions import (
    complete_qgraph,
    desarguesian_spread,
    hexagon_qgraph,
    spread_interior_qgraph,
    spread_partition_qgraph,
    symplectic_polar_qgraph,
)
from qgraphs.errors import BudgetExceededError, ValidationError
from qgraphs.finite_field import gf
from qgraphs.orbit_scan import (
    alternating_form_for,
    classification_crosscheck,
    classify,
    generalized_polygon,
    orbit_decomposition,
    single_orbit_scan,
)
from qgraphs.qgraph import is_k_regular
from qgraphs.semilinear import GroupSpec, SemilinearMap, apply, sp_generators
from qgraphs.subspaces import enumerate_subspaces, gaussian_binomial, rref


def _union_find_orbits(G):
    """Orbits on 2-spaces by union-find over generator images."""
    subs = enumerate_subspaces(G.field, G.n, 2)
    index = {S: i for i, S in enumerate(subs)}
    parent = list(range(len(subs)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for S in subs:
        for g in G.generators:
            a, b = find(index[S]), find(index[apply(g, S)])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for S in subs:
        groups.setdefault(find(index[S]), set()).add(S.rows)
    return sorted(groups.values(), key=min)


@st.composite
def small_groups(draw):
    q, n = draw(st.sampled_from([(2, 4), (3, 3), (2, 5)]))
    F = gf(q)
    rng = random.Random(draw(st.integers(0, 2**32)))
    gens = []
    for _ in range(draw(st.integers(0, 2))):
        while True:
            M = [[rng.randrange(q) for _ in range(n)] for _ in range(n)]
            if rref(M, F)[1] == n:
                break
        gens.append(SemilinearMap.from_matrix(F, M))
    return GroupSpec("random", F, n, tuple(gens))


@settings(max_examples=25)
@given(small_groups())
def test_orbit_decomposition_is_the_orbit_partition(G):
    orbits = orbit_decomposition(G)
    Q = G.field.q**G.n
    got = [{divmod(int(k), Q) for k in o} for o in orbits]
    assert got == _union_find_orbits(G)
    assert sum(len(o) for o in orbits) == gaussian_binomial(G.n, 2, G.field.q)


def test_scan_budget():
    with pytest.raises(BudgetExceededError):
        single_orbit_scan(sp_generators(14, gf(2)))


def test_polar_detection():
    for q, n in [(2, 4), (3, 4), (2, 6)]:
        assert alternating_form_for(symplectic_polar_qgraph(gf(q), n)) is not None
    assert alternating_form_for(complete_qgraph(gf(2), 4)) is None
    assert alternating_form_for(hexagon_qgraph(1)) is None


def test_generalised_polygons():
    assert generalized_polygon(hexagon_qgraph(1)) == 6
    assert generalized_polygon(symplectic_polar_qgraph(gf(2), 4)) == 4
    assert generalized_polygon(complete_qgraph(gf(2), 3)) == 3
    assert generalized_polygon(symplectic_polar_qgraph(gf(2), 6)) is None


def test_labels():
    F = gf(2)
    assert classify(hexagon_qgraph(1), 2)[0] == "hexagon"
    assert classify(symplectic_polar_qgraph(F, 6), 4)[0] == "polar"
    G = spread_interior_qgraph(desarguesian_spread(F, 6, 3))
    assert classify(G, is_k_regular(G))[0] == "spread-interior"
    P = spread_partition_qgraph(desarguesian_spread(F, 4, 2))
    assert classify(P, 1)[0] == "spread-partition"
    assert classify(complete_qgraph(F, 4), 3)[0] == "complete"


def test_sp4_2_scan():
    rep = single_orbit_scan(sp_generators(4, gf(2)))
    assert [o.size for o in rep.orbits] == [15, 20]
    labels = sorted(o.label for o in rep.orbits)
    assert labels == ["none", "polar"]
    polar = next(o for o in rep.orbits if o.label == "polar")
    assert polar.k == 2 and polar.flag_orbit == 45 and polar.symmetric


def test_gamma_l1_scan_finds_the_interior_spread():
    rep = single_orbit_scan(resolve_group("gammal1", 2, 6, 1, 0, 1))
    row = next(o for o in rep.orbits if o.size == 63)
    assert row.label == "spread-interior" and row.k == 2 and row.flag_transitive


def test_scan_is_deterministic():
    G = resolve_group("gammal-reduced", 3, 4, b=2)
    assert single_orbit_scan(G).to_json() == single_orbit_scan(G).to_json()


def test_g2_scan_labels_the_hexagon():
    rep = single_orbit_scan(resolve_group("g2", 2, 6))
    hexrow = next(o for o in rep.orbits if o.size == 63)
    assert hexrow.label == "hexagon" and hexrow.flag_orbit == 189 and hexrow.k == 2


def test_extended_catalog_has_no_novel_rows():
    res = classification_crosscheck(extended_catalog(), symmetric_iff_q2=False)
    assert res.ok, (res.novel, res.violations)


def test_proper_subgroups_break_the_converse():
    """Reduced Sp_4(4) has a flag-transitive but non-symmetric spread partition at q = 2."""
    res = classification_crosscheck([resolve_group("sp-reduced", 2, 8, b=2)], symmetric_iff_q2=True)
    assert any("not symmetric" in v for v in res.violations)
    assert not res.novel


def test_resolve_group_validation():
    with pytest.raises(ValidationError):
        resolve_group("nonsense", 2, 4)
    with pytest.raises(ValidationError):
        resolve_group("gammal-reduced", 2, 5, b=2)
    with pytest.raises(ValidationError):
        resolve_group("g2", 2, 4)
    assert len(default_catalog()) == 10
