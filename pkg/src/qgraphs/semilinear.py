"""Semilinear maps, groups given by generators, and their orbits.

A semilinear map is a pair ``(M, s)`` acting on row vectors by
``x -> sigma^s(x) M`` where ``sigma`` is the Frobenius ``c -> c^p`` applied
to each coordinate. Maps act on the right, so ``g * h`` means "first g,
then h" and equals ``(sigma^{s_h}(M_g) M_h, s_g + s_h)``. The Frobenius
exponent is kept modulo the degree ``t`` of the coordinate field over its
prime field, which makes equal maps compare equal.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _engine
from .errors import (
    AmbientMismatchError,
    BudgetExceededError,
    FoulserConditionError,
    ValidationError,
)
from .finite_field import ExtensionEmbedding, Field, extension_embedding, field_create, prime_factors
from .subspaces import Subspace, ambient, _rref_lists

GROUP_CAP = 5_000_000
ORBIT_CAP = 20_000_000


@dataclass(frozen=True)
class SemilinearMap:
    """x -> sigma^s(x) M on F^n; ``rows`` are the packed rows of M."""

    field: Field
    n: int
    rows: tuple[int, ...]
    s: int = 0

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise AmbientMismatchError(f"{len(self.rows)} rows for dimension {self.n}")
        object.__setattr__(self, "s", self.s % self.field.t)

    @classmethod
    def from_matrix(cls, field: Field, matrix: Sequence[Sequence[int]], s: int = 0) -> "SemilinearMap":
        n = len(matrix)
        A = ambient(field, n)
        g = cls(field, n, tuple(A.pack(r) for r in matrix), s)
        if len(A.rref(g.rows)) != n:
            raise ValidationError("matrix is singular")
        return g

    @classmethod
    def identity(cls, field: Field, n: int) -> "SemilinearMap":
        A = ambient(field, n)
        return cls(field, n, A.place)

    @classmethod
    def scalar(cls, field: Field, n: int, c: int) -> "SemilinearMap":
        A = ambient(field, n)
        return cls(field, n, tuple(A.scale(c, e) for e in A.place))

    @property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        A = ambient(self.field, self.n)
        return tuple(A.unpack(r) for r in self.rows)

    def apply_vector(self, v: int) -> int:
        A = ambient(self.field, self.n)
        if A.binary:
            out = 0
            for i, r in enumerate(self.rows):
                if (v >> (self.n - 1 - i)) & 1:
                    out ^= r
            return out
        coords = A.unpack(v)
        if self.s:
            coords = tuple(self.field.frobenius(c, self.s) for c in coords)
        return A.combine(coords, self.rows)

    def __mul__(self, other: "SemilinearMap") -> "SemilinearMap":
        """First self, then other."""
        _same_ambient(self, other)
        return SemilinearMap(self.field, self.n, tuple(other.apply_vector(r) for r in self.rows), self.s + other.s)

    def inverse(self) -> "SemilinearMap":
        F, n = self.field, self.n
        A = ambient(F, n)
        aug = [list(A.unpack(r)) + [int(i == j) for j in range(n)] for i, r in enumerate(self.rows)]
        red = _rref_lists(F, aug, 2 * n)
        if len(red) != n or any(red[i][i] != 1 for i in range(n)):
            raise ValidationError("map is not invertible")
        inv_rows = [row[n:] for row in red]
        if self.s:
            inv_rows = [[F.frobenius(c, -self.s) for c in row] for row in inv_rows]
        return SemilinearMap(F, n, tuple(A.pack(r) for r in inv_rows), -self.s)

    def is_identity(self) -> bool:
        return self == SemilinearMap.identity(self.field, self.n)

    @cached_property
    def table(self) -> np.ndarray:
        """Images of all q^n packed vectors (numpy)."""
        return _engine.engine(self.field, self.n).vector_table(self.rows, self.s)

    def to_json(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix], "frobenius": self.s}


def _same_ambient(g: SemilinearMap, h) -> None:
    if g.field != h.field or g.n != h.n:
        raise AmbientMismatchError(f"{g.field!r}^{g.n} vs {h.field!r}^{h.n}")


@dataclass(frozen=True)
class GroupSpec:
    """A subgroup of the semilinear group given by generators."""

    name: str
    field: Field
    n: int
    generators: tuple[SemilinearMap, ...]
    order: int | None = dc_field(default=None, compare=False)

    def __post_init__(self):
        for g in self.generators:
            _same_ambient(g, self)

    @classmethod
    def trivial(cls, field: Field, n: int) -> "GroupSpec":
        return cls("trivial", field, n, (), 1)

    def tables(self) -> list[np.ndarray]:
        return [g.table for g in self.generators]

    def to_json(self) -> dict:
        out = {"name": self.name, "generators": [g.to_json() for g in self.generators]}
        if self.order is not None:
            out["order"] = self.order
        return out

    @classmethod
    def from_json(cls, doc: dict, field: Field) -> "GroupSpec":
        gens = tuple(SemilinearMap.from_matrix(field, g["matrix"], g.get("frobenius", 0)) for g in doc["generators"])
        if not gens:
            raise ValidationError("group needs at least one generator or use the trivial group")
        return cls(doc["name"], field, len(gens[0].rows), gens, doc.get("order"))


# -- action on subspaces ---------------------------------------------------

def apply(g: SemilinearMap, S: Subspace) -> Subspace:
    if g.field != S.field or g.n != S.n:
        raise AmbientMismatchError(f"map on {g.field!r}^{g.n} applied to subspace of {S.field!r}^{S.n}")
    A = ambient(S.field, S.n)
    return Subspace(S.field, S.n, A.rref([g.apply_vector(r) for r in S.rows]))


@dataclass(frozen=True, order=True)
class Flag:
    """An incident (vertex, edge) pair."""

    vertex: Subspace
    edge: Subspace

    def __post_init__(self):
        if self.vertex.dim != 1 or self.edge.dim != 2:
            raise ValidationError("a flag pairs a 1-space with a 2-space")
        A = self.edge.ambient
        if A.rref(self.edge.rows + self.vertex.rows) != self.edge.rows:
            raise ValidationError("flag vertex does not lie on the edge")


def _point_key(pt, kind: str) -> int:
    if kind == "vertex":
        return pt.rows[0]
    if kind == "edge":
        return pt.rows[0] * pt.ambient.size + pt.rows[1]
    if kind == "flag":
        E = pt.edge
        eng = _engine.engine(E.field, E.n)
        r1, r2 = np.int64(E.rows[0]), np.int64(E.rows[1])
        pos = int(eng.point_position(r1, r2, np.int64(pt.vertex.rows[0])))
        return (E.rows[0] * E.ambient.size + E.rows[1]) * (E.field.q + 1) + pos
    X, Y = pt
    return X.rows[0] * X.ambient.size + Y.rows[0]


def _point_from_key(field: Field, n: int, kind: str, key: int):
    Q = field.q**n
    if kind == "vertex":
        return Subspace(field, n, (key,))
    if kind == "edge":
        return Subspace(field, n, divmod(key, Q))
    if kind == "flag":
        e, pos = divmod(key, field.q + 1)
        r1, r2 = divmod(e, Q)
        v = int(_engine.engine(field, n).edge_point(np.int64(r1), np.int64(r2), np.int64(pos)))
        return Flag(Subspace(field, n, (v,)), Subspace(field, n, (r1, r2)))
    x, y = divmod(key, Q)
    return (Subspace(field, n, (x,)), Subspace(field, n, (y,)))


def point_kind(pt) -> str:
    if isinstance(pt, Flag):
        return "flag"
    if isinstance(pt, tuple):
        if len(pt) != 2 or any(not isinstance(x, Subspace) or x.dim != 1 for x in pt):
            raise ValidationError("an ordered pair must hold two 1-spaces")
        return "pair"
    if isinstance(pt, Subspace) and pt.dim in (1, 2):
        return "vertex" if pt.dim == 1 else "edge"
    raise ValidationError(f"cannot act on {pt!r}")


def orbit_keys(G: GroupSpec, kind: str, seeds: Iterable[int], cap: int = ORBIT_CAP) -> np.ndarray:
    eng = _engine.engine(G.field, G.n)
    return _engine.bfs(eng, kind, G.tables(), np.fromiter(seeds, np.int64), cap)


def orbit(G: GroupSpec, seed, cap: int = ORBIT_CAP) -> set:
    """The G-orbit of a 1-space, 2-space, Flag or ordered pair of 1-spaces."""
    kind = point_kind(seed)
    ref = seed.edge if kind == "flag" else seed[0] if kind == "pair" else seed
    if ref.field != G.field or ref.n != G.n:
        raise AmbientMismatchError("seed and group live in different spaces")
    keys = orbit_keys(G, kind, [_point_key(seed, kind)], cap)
    return {_point_from_key(G.field, G.n, kind, int(k)) for k in keys}


# -- element enumeration ------------------------------------------------------

@dataclass
class ElementList:
    """All elements of a group as an (N, n) array of packed rows plus exponents."""

    field: Field
    n: int
    rows: np.ndarray
    frob: np.ndarray

    def __len__(self) -> int:
        return len(self.rows)

    def element(self, i: int) -> SemilinearMap:
        return SemilinearMap(self.field, self.n, tuple(int(x) for x in self.rows[i]), int(self.frob[i]))

    def __iter__(self):
        return (self.element(i) for i in range(len(self)))


def _element_keys(rows: np.ndarray, frob: np.ndarray, Q: int, t: int) -> np.ndarray | list:
    n = rows.shape[1]
    if Q**n * t < 2**62:
        key = np.zeros(len(rows), np.int64)
        for i in range(n):
            key = key * Q + rows[:, i]
        return key * t + frob
    return [tuple(r) + (int(f),) for r, f in zip(rows.tolist(), frob.tolist())]


def enumerate_group(G: GroupSpec, cap: int = GROUP_CAP) -> ElementList:
    """Every element of G, found by breadth-first search on (M, s)."""
    F, n = G.field, G.n
    Q, t = F.q**n, F.t
    ident = np.array([ambient(F, n).place], np.int64)
    tabs = [(g.table, g.s) for g in G.generators]
    rows_all = [ident]
    frob_all = [np.zeros(1, np.int64)]
    keyed = Q**n * t < 2**62
    seen_keys = _element_keys(ident, frob_all[0], Q, t)
    seen_set = None if keyed else set(seen_keys)
    frontier, ffrob = ident, frob_all[0]
    total = 1
    while len(frontier) and tabs:
        nr = np.concatenate([tab[frontier] for tab, _ in tabs])
        nf = np.concatenate([(ffrob + s) % t for _, s in tabs])
        if keyed:
            keys = _element_keys(nr, nf, Q, t)
            keys, idx = np.unique(keys, return_index=True)
            fresh = ~np.isin(keys, seen_keys, assume_unique=True)
            idx = idx[fresh]
            seen_keys = np.union1d(seen_keys, keys[fresh])
        else:
            idx = []
            for i, k in enumerate(_element_keys(nr, nf, Q, t)):
                if k not in seen_set:
                    seen_set.add(k)
                    idx.append(i)
            idx = np.array(idx, np.int64)
        frontier, ffrob = nr[idx], nf[idx]
        total += len(idx)
        if total > cap:
            raise BudgetExceededError(f"enumerate {G.name}", total, cap)
        rows_all.append(frontier)
        frob_all.append(ffrob)
    rows = np.concatenate(rows_all)
    frob = np.concatenate(frob_all)
    return ElementList(F, n, rows, frob)


def group_order(G: GroupSpec, cap: int = GROUP_CAP) -> int:
    return len(enumerate_group(G, cap))


# -- classical generating sets ------------------------------------------------

def _prime_basis(F: Field) -> list[int]:
    """An F_p-basis of F: powers 1, w, ..., w^(t-1) of the primitive element."""
    return [F.exp(i) for i in range(F.t)]


def sl_generators(a: int, K: Field) -> GroupSpec:
    """Elementary transvections I + c E_{i,i+1}, I + c E_{i+1,i}; they generate SL_a."""
    if a < 2:
        raise ValidationError("SL needs dimension at least 2")
    gens = []
    for i in range(a - 1):
        for c in _prime_basis(K):
            for r, col in ((i, i + 1), (i + 1, i)):
                M = [[int(x == y) for y in range(a)] for x in range(a)]
                M[r][col] = c
                gens.append(SemilinearMap.from_matrix(K, M))
    return GroupSpec(f"SL({a},{K.q})", K, a, tuple(gens), _sl_order(a, K.q))


def _sl_order(a: int, q: int) -> int:
    order = q ** (a * (a - 1) // 2)
    for i in range(2, a + 1):
        order *= q**i - 1
    return order


def _sp_order(n: int, q: int) -> int:
    m = n // 2
    order = q ** (m * m)
    for i in range(1, m + 1):
        order *= q ** (2 * i) - 1
    return order


@dataclass(frozen=True)
class SymplecticStructure:
    """Alternating form f(x, y) = x J y^T on F^{2m}.

    The standard J pairs basis positions i and 2m-1-i, so with the basis
    ordered e_1..e_m, f_m..f_1 we get f(e_i, f_i) = 1.
    """

    field: Field
    J: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        F = self.field
        n = len(self.J)
        if n == 0 or n % 2 or any(len(r) != n for r in self.J):
            raise ValidationError("Gram matrix must be square of even size")
        for i in range(n):
            if self.J[i][i] != 0:
                raise ValidationError("alternating form needs a zero diagonal")
            for j in range(n):
                if self.J[i][j] != F.neg(self.J[j][i]):
                    raise ValidationError("Gram matrix is not antisymmetric")
        if len(_rref_lists(F, [list(r) for r in self.J], n)) != n:
            raise ValidationError("symplectic form is degenerate")

    @classmethod
    def standard(cls, field: Field, n: int) -> "SymplecticStructure":
        if n % 2 or n < 2:
            raise ValidationError("symplectic space needs even dimension")
        m = n // 2
        J = [[0] * n for _ in range(n)]
        for i in range(n):
            J[i][n - 1 - i] = 1 if i < m else field.neg(1)
        return cls(field, tuple(tuple(r) for r in J))

    @property
    def n(self) -> int:
        return len(self.J)

    def form(self, x: int, y: int) -> int:
        """f(x, y) on packed vectors."""
        F = self.field
        A = ambient(F, self.n)
        xs, ys = A.unpack(x), A.unpack(y)
        acc = 0
        for i, a in enumerate(xs):
            if a:
                for j, b in enumerate(ys):
                    if b and self.J[i][j]:
                        acc = F.add(acc, F.mul(F.mul(a, self.J[i][j]), b))
        return acc

    def preserved_by(self, g: SemilinearMap) -> bool:
        """f(xg, yg) = sigma^s(f(x, y)) for all basis vectors x, y."""
        A = ambient(self.field, self.n)
        basis = A.place
        for i, x in enumerate(basis):
            for j, y in enumerate(basis):
                want = self.field.frobenius(self.J[i][j], g.s)
                if self.form(g.apply_vector(x), g.apply_vector(y)) != want:
                    return False
        return True

    def transvection(self, v: int, c: int = 1) -> SemilinearMap:
        """x -> x + c f(x, v) v."""
        F, n = self.field, self.n
        A = ambient(F, n)
        rows = [A.add(e, A.scale(F.mul(c, self.form(e, v)), v)) for e in A.place]
        return SemilinearMap(F, n, tuple(rows))

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.J]


def sp_generators(n: int, K: Field, J: SymplecticStructure | None = None) -> GroupSpec:
    """Symplectic transvections generating Sp_n(K).

    The centres are the basis vectors and the sums of adjacent basis
    vectors, each with scalars running over an F_p-basis of K.
    """
    S = J if J is not None else SymplecticStructure.standard(K, n)
    if S.field != K or S.n != n:
        raise AmbientMismatchError("Gram matrix does not match the requested space")
    A = ambient(K, n)
    centres = list(A.place) + [A.add(A.place[i], A.place[i + 1]) for i in range(n - 1)]
    gens = []
    for v in centres:
        for c in _prime_basis(K):
            g = S.transvection(v, c)
            if not S.preserved_by(g):
                raise ValidationError("transvection does not preserve the form")
            gens.append(g)
    return GroupSpec(f"Sp({n},{K.q})", K, n, tuple(gens), _sp_order(n, K.q))


# -- one-dimensional semilinear groups ----------------------------------------

def foulser_check(q: int, n: int, p: int, t: int, d: int, e: int, s: int) -> None:
    """Raise FoulserConditionError unless (d, e, s) is a valid normal form."""
    N = q**n - 1
    if d <= 0 or N % d:
        raise FoulserConditionError(1, f"need d > 0 dividing {N}, got d={d}")
    if s <= 0 or (n * t) % s:
        raise FoulserConditionError(2, f"need s > 0 dividing {n * t}, got s={s}")
    if not (0 <= e < d) or (e * N // (p**s - 1)) % d:
        raise FoulserConditionError(3, f"need 0 <= e < d and d | e(q^n-1)/(p^s-1), got d={d}, e={e}, s={s}")


def foulser_order(q: int, n: int, t: int, d: int, s: int) -> int:
    return ((q**n - 1) // d) * (n * t // s)


def _mult_matrix(emb: ExtensionEmbedding, c: int, frob: int = 0) -> list[list[int]]:
    """F-matrix of x -> x^(p^frob) * c on K, in the basis theta^i."""
    K = emb.ext
    return [list(emb.forward(K.mul(K.frobenius(th, frob), c))) for th in emb.basis]


def gamma_l1_subgroup(F: Field, n: int, d: int, e: int, s: int) -> GroupSpec:
    """<w^d, alpha^s w^e> inside GammaL_1(q^n), acting on K = GF(q^n) = F^n.

    ``w`` is the primitive element of K and ``alpha`` is x -> x^p; the second
    generator is x -> x^(p^s) w^e.
    """
    p, t, q = F.p, F.t, F.q
    foulser_check(q, n, p, t, d, e, s)
    emb = extension_embedding(F, n)
    K = emb.ext
    g1 = SemilinearMap.from_matrix(F, _mult_matrix(emb, K.exp(d)))
    g2 = SemilinearMap.from_matrix(F, _mult_matrix(emb, K.exp(e), s), s)
    name = f"GammaL1({q}^{n};d={d},e={e},s={s})"
    return GroupSpec(name, F, n, (g1, g2), foulser_order(q, n, t, d, s))


def foulser_triples(F: Field, n: int) -> list[tuple[int, int, int]]:
    """Every valid (d, e, s)."""
    q, p, t = F.q, F.p, F.t
    N = q**n - 1
    out = []
    for d in range(1, N + 1):
        if N % d:
            continue
        for s in range(1, n * t + 1):
            if (n * t) % s:
                continue
            for e in range(d):
                if (e * N // (p**s - 1)) % d == 0:
                    out.append((d, e, s))
    return out


# -- field reduction -----------------------------------------------------

def _frob_matrix(emb: ExtensionEmbedding, s: int) -> list[list[int]]:
    K = emb.ext
    return [list(emb.forward(K.frobenius(th, s))) for th in emb.basis]


def field_reduction_map(g: SemilinearMap, emb: ExtensionEmbedding) -> SemilinearMap:
    """The F-semilinear map induced on F^{ab} by a K-semilinear map on K^a.

    K-coordinates are expanded blockwise with ``emb.forward``.
    """
    K, F, b = emb.ext, emb.base, emb.degree
    if g.field != K:
        raise AmbientMismatchError(f"map over {g.field!r} but embedding extends to {K!r}")
    a = g.n
    M = g.matrix
    big = [[0] * (a * b) for _ in range(a * b)]
    for i in range(a):
        for j in range(a):
            blk = _mult_matrix(emb, M[i][j])
            for r in range(b):
                big[i * b + r][j * b : (j + 1) * b] = blk[r]
    if g.s:
        D = _frob_matrix(emb, g.s)
        mixed = [[0] * (a * b) for _ in range(a * b)]
        for blk in range(a):
            for r in range(b):
                row = [0] * (a * b)
                for k in range(b):
                    c = D[r][k]
                    if c:
                        src = big[blk * b + k]
                        row = [F.add(x, F.mul(c, y)) for x, y in zip(row, src)]
                mixed[blk * b + r] = row
        big = mixed
    return SemilinearMap.from_matrix(F, big, g.s)


def reduce_group(G: GroupSpec, F: Field, name: str | None = None) -> GroupSpec:
    K = G.field
    if K.p != F.p or K.t % F.t:
        raise ValidationError(f"{F!r} is not a subfield of {K!r}")
    emb = extension_embedding(F, K.t // F.t)
    gens = tuple(field_reduction_map(g, emb) for g in G.generators)
    return GroupSpec(name or f"{G.name}/{F.q}", F, G.n * emb.degree, gens, G.order)


def gamma_l_generators(a: int, K: Field) -> GroupSpec:
    """GL_a(K) extended by the coordinatewise Frobenius."""
    gens = list(sl_generators(a, K).generators)
    diag = [[0] * a for _ in range(a)]
    for i in range(a):
        diag[i][i] = K.primitive if i == 0 else 1
    gens.append(SemilinearMap.from_matrix(K, diag))
    if K.t > 1:
        gens.append(SemilinearMap.from_matrix(K, [[int(i == j) for j in range(a)] for i in range(a)], 1))
    order = _sl_order(a, K.q) * (K.q - 1) * K.t
    return GroupSpec(f"GammaL({a},{K.q})", K, a, tuple(gens), order)


# -- stabilisers ---------------------------------------------------------

def stabiliser_of_trilinear_form(elements: ElementList, T: np.ndarray, name: str = "G2") -> GroupSpec:
    """Elements g with T(xg, yg, zg) = T(x, y, z) on all basis triples.

    ``T`` is a lookup table indexed by three packed vectors. The result
    carries a small generating set picked greedily from the stabiliser.
    """
    F, n = elements.field, elements.n
    if F.q != 2:
        raise ValidationError("trilinear-form stabilisers are computed over GF(2) only")
    basis = ambient(F, n).place
    rows = elements.rows
    keep = np.ones(len(rows), bool)
    for i, j, k in itertools.product(range(n), repeat=3):
        idx = np.nonzero(keep)[0]
        ok = T[rows[idx, i], rows[idx, j], rows[idx, k]] == T[basis[i], basis[j], basis[k]]
        keep[idx[~ok]] = False
    members = ElementList(F, n, rows[keep], elements.frob[keep])
    gens = _greedy_generators(members)
    return GroupSpec(name, F, n, tuple(gens), len(members))


def _greedy_generators(members: ElementList) -> list[SemilinearMap]:
    F, n = members.field, members.n
    Q, t = F.q**n, F.t
    target = len(members)
    keys = _element_keys(members.rows, members.frob, Q, t)
    order = np.argsort(keys)
    gens: list[SemilinearMap] = []
    span = np.zeros(0, np.int64)
    size = 1
    # walk from the largest key down: large keys are "far" from the identity
    for i in order[::-1]:
        if size == target:
            break
        if len(span) and np.isin(keys[i], span):
            continue
        gens.append(members.element(int(i)))
        sub = enumerate_group(GroupSpec("sub", F, n, tuple(gens)))
        span = np.sort(_element_keys(sub.rows, sub.frob, Q, t))
        size = len(span)
    return gens
