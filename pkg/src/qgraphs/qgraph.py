"""q-graphs: a set of 2-spaces of F_q^n, with every 1-space as a vertex.

Edges are stored as a sorted int64 array of keys ``r1 * q^n + r2`` where
``(r1, r2)`` are the packed RREF rows. The symmetry predicates all take a
group given by generators; they first check the generators preserve the
edge set and then compare a single orbit against the full set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable

import numpy as np

from . import _engine
from .errors import AmbientMismatchError, NotAutomorphismError, ValidationError
from .finite_field import Field
from .semilinear import Flag, GroupSpec, SemilinearMap
from .subspaces import Subspace, ambient, gaussian_binomial


class QGraph:
    """Vertices are all 1-spaces of F^n; ``edge_keys`` selects the 2-spaces."""

    def __init__(self, field: Field, n: int, edge_keys: Iterable[int] | np.ndarray, check: bool = True):
        if n < 2:
            raise ValidationError("a q-graph needs ambient dimension at least 2")
        self.field = field
        self.n = n
        keys = np.unique(np.asarray(list(edge_keys) if not isinstance(edge_keys, np.ndarray) else edge_keys, np.int64))
        if check and len(keys):
            eng = self.engine
            r1, r2 = np.divmod(keys, eng.Q)
            if keys.min() < 0 or r1.max() >= eng.Q:
                raise ValidationError("edge key out of range")
            a, b = eng.rref2(r1, r2)
            if not (np.array_equal(a, r1) and np.array_equal(b, r2)):
                raise ValidationError("edge keys are not canonical 2-spaces")
        keys.setflags(write=False)
        self.edge_keys = keys

    @classmethod
    def from_subspaces(cls, field: Field, n: int, edges: Iterable[Subspace]) -> "QGraph":
        Q = field.q**n
        keys = []
        for E in edges:
            if E.field != field or E.n != n:
                raise AmbientMismatchError(f"edge {E!r} is not in {field!r}^{n}")
            if E.dim != 2:
                raise ValidationError("edges must be 2-spaces")
            keys.append(E.rows[0] * Q + E.rows[1])
        return cls(field, n, keys, check=False)

    @property
    def engine(self) -> _engine.VectorEngine:
        return _engine.engine(self.field, self.n)

    @property
    def q(self) -> int:
        return self.field.q

    def __len__(self) -> int:
        return len(self.edge_keys)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, QGraph)
            and self.field == other.field
            and self.n == other.n
            and np.array_equal(self.edge_keys, other.edge_keys)
        )

    def __hash__(self) -> int:
        return hash((self.field, self.n, self.edge_keys.tobytes()))

    def __repr__(self) -> str:
        return f"QGraph({self.field!r}^{self.n}, {len(self)} edges)"

    @cached_property
    def vertex_keys(self) -> np.ndarray:
        return np.unique(self.engine.norm_table[1:])

    @property
    def num_vertices(self) -> int:
        return gaussian_binomial(self.n, 1, self.q)

    def vertices(self) -> list[Subspace]:
        return [Subspace(self.field, self.n, (int(v),)) for v in self.vertex_keys]

    @property
    def edges(self) -> frozenset[Subspace]:
        Q = self.engine.Q
        return frozenset(Subspace(self.field, self.n, divmod(int(k), Q)) for k in self.edge_keys)

    def has_edge(self, E: Subspace) -> bool:
        key = E.rows[0] * self.engine.Q + E.rows[1]
        i = np.searchsorted(self.edge_keys, key)
        return bool(i < len(self.edge_keys) and self.edge_keys[i] == key)

    def edge_points(self) -> np.ndarray:
        """(|E|, q+1) array of the canonical vertices on each edge."""
        r1, r2 = np.divmod(self.edge_keys, self.engine.Q)
        return self.engine.edge_points(r1, r2)

    @cached_property
    def _incidence(self) -> tuple[np.ndarray, np.ndarray]:
        """Edge indices grouped by vertex: (order, offsets over vertex_keys)."""
        pts = self.edge_points().ravel()
        order = np.argsort(pts, kind="stable")
        offsets = np.searchsorted(pts[order], self.vertex_keys, side="left")
        offsets = np.append(offsets, len(pts))
        return order // (self.q + 1), offsets

    def edges_through(self, v: int) -> np.ndarray:
        """Indices into ``edge_keys`` of the edges containing vertex key v."""
        edge_idx, offsets = self._incidence
        i = int(np.searchsorted(self.vertex_keys, v))
        return edge_idx[offsets[i] : offsets[i + 1]]

    def flag_keys(self) -> np.ndarray:
        q1 = self.q + 1
        return (self.edge_keys[:, None] * q1 + np.arange(q1)).ravel()

    def to_json(self) -> dict:
        A = ambient(self.field, self.n)
        Q = A.size
        return {
            "field": self.field.to_dict(),
            "n": self.n,
            "edges": [[list(A.unpack(r)) for r in divmod(int(k), Q)] for k in self.edge_keys],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "QGraph":
        from .finite_field import field_create

        F = field_create(doc["field"]["p"], doc["field"]["t"])
        n = doc["n"]
        A = ambient(F, n)
        keys = []
        for rows in doc["edges"]:
            S = Subspace.from_matrix(F, rows)
            if S.dim != 2:
                raise ValidationError("edge rows must span a 2-space")
            keys.append(S.rows[0] * A.size + S.rows[1])
        return cls(F, n, keys)


def _vertex_key(G: QGraph, X: Subspace | int) -> int:
    if isinstance(X, Subspace):
        if X.field != G.field or X.n != G.n:
            raise AmbientMismatchError("vertex is not in the graph's ambient space")
        if X.dim != 1:
            raise ValidationError("vertices are 1-spaces")
        return X.rows[0]
    return ambient(G.field, G.n).normalize(int(X))


def neighbourhood(G: QGraph, X: Subspace | int) -> frozenset[int]:
    """Union of the edges through X as packed vectors (X itself if isolated)."""
    v = _vertex_key(G, X)
    A = ambient(G.field, G.n)
    idx = G.edges_through(v)
    if len(idx) == 0:
        return frozenset(A.span_vectors([v]))
    out: set[int] = set()
    Q = A.size
    for k in G.edge_keys[idx]:
        out.update(A.span_vectors(divmod(int(k), Q)))
    return frozenset(out)


def flags(G: QGraph) -> list[Flag]:
    pts = G.edge_points()
    Q = G.engine.Q
    out = []
    for k, row in zip(G.edge_keys, pts):
        E = Subspace(G.field, G.n, divmod(int(k), Q))
        out.extend(Flag(Subspace(G.field, G.n, (int(v),)), E) for v in row)
    return out


# -- regularity ----------------------------------------------------------

def _batched_rank(eng: _engine.VectorEngine, vecs: np.ndarray) -> np.ndarray:
    """Rank of each row-set in ``vecs`` (shape (B, C), packed, zero padded)."""
    B = len(vecs)
    rank = np.zeros(B, np.int64)
    if eng.binary:
        work = vecs.copy()
        for bit in range(eng.n - 1, -1, -1):
            has = ((work >> bit) & 1).astype(bool)
            any_ = has.any(1)
            piv = np.argmax(has, 1)
            prow = work[np.arange(B), piv]
            prow = np.where(any_, prow, 0)
            work = np.where(has, work ^ prow[:, None], work)
            rank += any_
        return rank
    d = eng.digits(vecs)  # (B, C, n)
    for col in range(eng.n):
        has = d[:, :, col] != 0
        any_ = has.any(1)
        piv = np.argmax(has, 1)
        prow = d[np.arange(B), piv]  # (B, n)
        inv = eng.finv(np.where(any_, prow[:, col], 1))
        prow = eng.fmul(inv[:, None], prow)
        prow = np.where(any_[:, None], prow, 0)
        factor = d[:, :, col]
        d = eng.fadd(d, eng.fneg(eng.fmul(factor[:, :, None], prow[:, None, :])))
        rank += any_
    return rank


def _vertex_profile(G: QGraph, vkeys: np.ndarray, chunk_cells: int = 2**24) -> tuple[np.ndarray, np.ndarray]:
    """(edges through X, rank of span N(X)) for each vertex key."""
    edge_idx, offsets = G._incidence
    pos = np.searchsorted(G.vertex_keys, vkeys)
    counts = offsets[pos + 1] - offsets[pos]
    ranks = np.ones(len(vkeys), np.int64)
    cmax = int(counts.max()) if len(counts) else 0
    if cmax == 0:
        return counts, ranks
    pts = G.edge_points()
    per = max(1, chunk_cells // ((cmax + 1) * G.n))
    for lo in range(0, len(vkeys), per):
        sl = slice(lo, lo + per)
        vs, ps, cs = vkeys[sl], pos[sl], counts[sl]
        mat = np.zeros((len(vs), cmax + 1), np.int64)
        mat[:, 0] = vs
        j = np.arange(cmax)
        valid = j[None, :] < cs[:, None]
        gather = np.where(valid, offsets[ps][:, None] + j[None, :], 0)
        eidx = edge_idx[gather]
        # any point of the edge other than X: positions 0 and 1 cannot both be X
        p0, p1 = pts[eidx, 0], pts[eidx, 1]
        other = np.where(p0 == vs[:, None], p1, p0)
        mat[:, 1:] = np.where(valid, other, 0)
        ranks[sl] = _batched_rank(G.engine, mat)
    return counts, ranks


@dataclass(frozen=True)
class Regularity:
    """k if every checked vertex has q-degree k; else a witness vertex."""

    k: int | None
    witness: int | None = None
    reason: str = ""
    checked: int = 0

    def __bool__(self) -> bool:
        return self.k is not None

    def to_json(self) -> dict:
        return {"k": self.k, "witness": self.witness, "reason": self.reason, "vertices_checked": self.checked}


def vertex_degrees(G: QGraph, vkeys: np.ndarray | None = None) -> np.ndarray:
    """q-degree of each vertex, or -1 where the degree is undefined."""
    vkeys = G.vertex_keys if vkeys is None else np.asarray(vkeys, np.int64)
    counts, ranks = _vertex_profile(G, vkeys)
    q = G.q
    full = (q ** (ranks - 1) - 1) // (q - 1)
    return np.where(counts == full, ranks - 1, -1)


def regularity(G: QGraph, group: GroupSpec | None = None) -> Regularity:
    """Decide k-regularity.

    With a group of automorphisms, only one vertex per vertex orbit is
    examined; the degree is invariant under automorphisms.
    """
    if group is not None:
        check_automorphisms(G, group)
        vkeys = _orbit_representatives(G, group, "vertex", G.vertex_keys)
    else:
        vkeys = G.vertex_keys
    deg = vertex_degrees(G, vkeys)
    bad = np.nonzero(deg < 0)[0]
    if len(bad):
        return Regularity(None, int(vkeys[bad[0]]), "neighbourhood is not a subspace with all its lines", len(vkeys))
    ks = np.unique(deg)
    if len(ks) > 1:
        w = int(vkeys[np.nonzero(deg != ks[0])[0][0]])
        return Regularity(None, w, f"vertex degrees differ: {sorted(int(k) for k in ks)}", len(vkeys))
    return Regularity(int(ks[0]), None, "", len(vkeys))


def is_k_regular(G: QGraph, group: GroupSpec | None = None) -> int | None:
    return regularity(G, group).k


# -- automorphisms and transitivity -------------------------------------------

def _edge_images(G: QGraph, g: SemilinearMap) -> np.ndarray:
    return G.engine.image("edge", g.table, G.edge_keys)


def is_automorphism(g: SemilinearMap, G: QGraph) -> bool:
    if g.field != G.field or g.n != G.n:
        raise AmbientMismatchError("map and graph live in different spaces")
    if len(G) == 0:
        return True
    imgs = _edge_images(G, g)
    return bool(np.isin(imgs, G.edge_keys, assume_unique=False).all())


def check_automorphisms(G: QGraph, group: GroupSpec) -> None:
    if group.field != G.field or group.n != G.n:
        raise AmbientMismatchError(f"group on {group.field!r}^{group.n}, graph on {G.field!r}^{G.n}")
    for i, g in enumerate(group.generators):
        if not is_automorphism(g, G):
            raise NotAutomorphismError(i, group.name)


@dataclass(frozen=True)
class Transitivity:
    """Certificate: the orbit of ``seed`` has ``orbit_size`` of ``total`` points."""

    kind: str
    orbit_size: int
    total: int
    seed: int | None

    def __bool__(self) -> bool:
        return self.orbit_size == self.total

    @property
    def holds(self) -> bool:
        return bool(self)

    def to_json(self) -> dict:
        return {"holds": self.holds, "orbit_size": self.orbit_size, "total": self.total, "seed": self.seed}


def _transitivity(G: QGraph, group: GroupSpec, kind: str, seed: int | None, total: int,
                  checked: bool = False) -> Transitivity:
    if not checked:
        check_automorphisms(G, group)
    if total == 0 or seed is None:
        return Transitivity(kind, 0, total, None)
    orb = _engine.bfs(G.engine, kind, group.tables(), np.array([seed], np.int64))
    return Transitivity(kind, len(orb), total, seed)


def is_vertex_transitive(G: QGraph, group: GroupSpec, checked: bool = False) -> Transitivity:
    return _transitivity(G, group, "vertex", int(G.vertex_keys[0]), G.num_vertices, checked)


def is_edge_transitive(G: QGraph, group: GroupSpec, checked: bool = False) -> Transitivity:
    seed = int(G.edge_keys[0]) if len(G) else None
    return _transitivity(G, group, "edge", seed, len(G), checked)


def is_flag_transitive(G: QGraph, group: GroupSpec, checked: bool = False) -> Transitivity:
    seed = int(G.edge_keys[0]) * (G.q + 1) if len(G) else None
    return _transitivity(G, group, "flag", seed, len(G) * (G.q + 1), checked)


def is_symmetric(G: QGraph, group: GroupSpec, checked: bool = False) -> Transitivity:
    """Transitivity on ordered pairs (X, Y) of distinct vertices with <X, Y> an edge."""
    seed = None
    if len(G):
        r1, r2 = divmod(int(G.edge_keys[0]), G.engine.Q)
        seed = r2 * G.engine.Q + r1
    return _transitivity(G, group, "pair", seed, len(G) * (G.q + 1) * G.q, checked)


def _orbit_representatives(G: QGraph, group: GroupSpec, kind: str, domain: np.ndarray) -> np.ndarray:
    """Minimum element of each orbit of ``group`` on the sorted ``domain``."""
    orbits = _engine.orbit_partition(G.engine, kind, group.tables(), domain)
    return np.array([o[0] for o in orbits], np.int64)


# -- classical counterpart ------------------------------------------------------

@dataclass(frozen=True)
class ClassicalGraph:
    """Simple graph on vertices 0..order-1 with edges (i, j), i < j, sorted."""

    order: int
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for i, j in self.edges:
            if not (0 <= i < j < self.order):
                raise ValidationError(f"bad classical edge {(i, j)}")

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.order)]
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj

    def to_graph6(self) -> str:
        n = self.order
        if n < 63:
            head = [n]
        elif n < 258048:
            head = [63, (n >> 12) & 63, (n >> 6) & 63, n & 63]
        else:
            head = [63, 63] + [(n >> s) & 63 for s in (30, 24, 18, 12, 6, 0)]
        # bits of the upper triangle, column by column: (0,1), (0,2), (1,2), ...
        nbits = n * (n - 1) // 2
        bits = np.zeros(((nbits + 5) // 6) * 6, np.uint8)
        if self.edges:
            e = np.array(self.edges, np.int64)
            bits[e[:, 1] * (e[:, 1] - 1) // 2 + e[:, 0]] = 1
        groups = bits.reshape(-1, 6) @ (1 << np.arange(5, -1, -1))
        return "".join(chr(63 + c) for c in head) + "".join(chr(63 + int(c)) for c in groups)

    def to_edgelist(self) -> str:
        return "".join(f"{i} {j}\n" for i, j in self.edges)


def classical_counterpart(G: QGraph) -> ClassicalGraph:
    vk = G.vertex_keys
    if len(G) == 0:
        return ClassicalGraph(len(vk), ())
    idx = np.searchsorted(vk, G.edge_points())
    iu, ju = np.triu_indices(G.q + 1, 1)
    pairs = np.stack([idx[:, iu].ravel(), idx[:, ju].ravel()], 1)
    pairs.sort(1)
    pairs = np.unique(pairs, axis=0)
    return ClassicalGraph(len(vk), tuple((int(a), int(b)) for a, b in pairs))


def partial_linear_space_check(G: QGraph) -> bool:
    """Every pair of distinct vertices lies on at most one edge."""
    if len(G) == 0:
        return True
    pts = G.edge_points()
    iu, ju = np.triu_indices(G.q + 1, 1)
    Q = G.engine.Q
    pair_keys = np.minimum(pts[:, iu], pts[:, ju]) * Q + np.maximum(pts[:, iu], pts[:, ju])
    return len(np.unique(pair_keys)) == pair_keys.size
