"""Constructors for the standard families of q-graphs."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _engine
from .errors import ValidationError, InvariantViolation, AmbientMismatchError
from .finite_field import Field, extension_embedding, field_create
from .octonion import hexagon_edge_keys
from .qgraph import QGraph
from .semilinear import GroupSpec, SemilinearMap, SymplecticStructure
from .subspaces import Subspace, ambient, gaussian_binomial


def complete_qgraph(F: Field, n: int) -> QGraph:
    return QGraph(F, n, _engine.engine(F, n).all_edges(), check=False)


def empty_qgraph(F: Field, n: int) -> QGraph:
    return QGraph(F, n, np.zeros(0, np.int64), check=False)


@dataclass(frozen=True)
class Spread:
    """A partition of the nonzero vectors of F^n into t-spaces."""

    field: Field
    n: int
    t: int
    elements: tuple[Subspace, ...]

    def __post_init__(self):
        if self.t < 1 or self.n % self.t:
            raise ValidationError(f"spread element dimension {self.t} must divide {self.n}")
        want = (self.field.q**self.n - 1) // (self.field.q**self.t - 1)
        if len(self.elements) != want:
            raise InvariantViolation(f"spread has {len(self.elements)} elements, expected {want}")
        if self.element_of[0] != -1 or (self.element_of[1:] < 0).any():
            raise InvariantViolation("spread does not cover every nonzero vector")
        counts = np.bincount(self.element_of[1:], minlength=len(self.elements))
        if (counts != self.field.q**self.t - 1).any():
            raise InvariantViolation("spread elements overlap")

    @cached_property
    def element_of(self) -> np.ndarray:
        """Index of the element containing each packed vector (-1 for 0)."""
        A = ambient(self.field, self.n)
        out = np.full(A.size, -1, np.int64)
        for i, S in enumerate(self.elements):
            if S.dim != self.t:
                raise InvariantViolation("spread element of the wrong dimension")
            vs = np.array(S.vectors()[1:], np.int64)
            if (out[vs] >= 0).any():
                raise InvariantViolation("spread elements overlap")
            out[vs] = i
        return out


def _blow_up_vector(emb, coords) -> list[int]:
    out: list[int] = []
    for x in coords:
        out.extend(emb.forward(x))
    return out


def desarguesian_spread(F: Field, n: int, t: int, model: str = "blocks") -> Spread:
    """The spread of 1-dimensional GF(q^t)-subspaces, written over F.

    ``model="blocks"`` writes GF(q^t)^(n/t) blockwise, so reduced GammaL_(n/t)(q^t)
    preserves it. ``model="field"`` uses GF(q^n) in the power basis of its
    primitive element, the coordinates of :func:`gamma_l1_subgroup`; the
    elements are then the cosets x GF(q^t). :func:`block_to_field_map`
    carries one onto the other.
    """
    if t < 1 or n % t:
        raise ValidationError(f"spread element dimension {t} must divide {n}")
    AF = ambient(F, n)
    if model == "blocks":
        emb = extension_embedding(F, t)
        K = emb.ext
        AK = ambient(K, n // t)
        elements = []
        for v in AK.points():
            coords = AK.unpack(v)
            rows = [AF.pack(_blow_up_vector(emb, [K.mul(th, x) for x in coords])) for th in emb.basis]
            elements.append(Subspace(F, n, AF.rref(rows)))
    elif model == "field":
        big = extension_embedding(F, n)
        sub = extension_embedding(field_create(F.p, F.t * t), n // t)
        L = big.ext
        sub_basis = [sub.include(emb_b) for emb_b in extension_embedding(F, t).basis]
        seen: set[int] = set()
        elements = []
        for x in range(1, L.q):
            if x in seen:
                continue
            rows = [AF.pack(big.forward(L.mul(x, c))) for c in sub_basis]
            S = Subspace(F, n, AF.rref(rows))
            seen.update(big.inverse(AF.unpack(v)) for v in S.vectors())
            elements.append(S)
    else:
        raise ValidationError(f"unknown spread model {model!r}")
    elements.sort()
    return Spread(F, n, t, tuple(elements))


def block_to_field_map(F: Field, n: int, t: int) -> SemilinearMap:
    """F-linear map from block coordinates of GF(q^t)^(n/t) to GF(q^n) coordinates.

    (y_0, ..., y_(a-1)) goes to sum y_j theta^j with theta primitive in GF(q^n).
    """
    if t < 1 or n % t:
        raise ValidationError(f"spread element dimension {t} must divide {n}")
    a = n // t
    small = extension_embedding(F, t)
    mid = extension_embedding(small.ext, a)
    big = extension_embedding(F, n)
    L = big.ext
    rows = []
    for j in range(a):
        for th in small.basis:
            rows.append(list(big.forward(L.mul(mid.include(th), mid.basis[j]))))
    return SemilinearMap.from_matrix(F, rows)


def conjugate_group(G: GroupSpec, P: SemilinearMap, name: str | None = None) -> GroupSpec:
    """P g P^-1 for each generator: G moved along the coordinate change P^-1."""
    Pi = P.inverse()
    gens = tuple(P * g * Pi for g in G.generators)
    return GroupSpec(name or G.name, G.field, G.n, gens, G.order)


def _edges_split_by_spread(S: Spread) -> tuple[np.ndarray, np.ndarray]:
    eng = _engine.engine(S.field, S.n)
    keys = eng.all_edges()
    r1, r2 = np.divmod(keys, eng.Q)
    inside = S.element_of[r1] == S.element_of[r2]
    return keys[inside], keys[~inside]


def spread_partition_qgraph(S: Spread) -> QGraph:
    """The spread elements themselves as edges (needs t = 2)."""
    if S.t != 2:
        raise ValidationError(f"a spread partition q-graph needs 2-dimensional elements, got t={S.t}")
    Q = S.field.q**S.n
    return QGraph(S.field, S.n, [E.rows[0] * Q + E.rows[1] for E in S.elements], check=False)


def spread_interior_qgraph(S: Spread) -> QGraph:
    """Every 2-space lying inside a spread element.

    A 2-space meets exactly one element nontrivially iff it lies in that
    element: its q+1 points each sit in some element.
    """
    if S.t < 2:
        raise ValidationError("interior spread graphs need elements of dimension at least 2")
    return QGraph(S.field, S.n, _edges_split_by_spread(S)[0], check=False)


def spread_complement_qgraph(S: Spread) -> QGraph:
    """Every 2-space meeting at least two spread elements."""
    if S.t < 2:
        raise ValidationError("spread complement graphs need elements of dimension at least 2")
    return QGraph(S.field, S.n, _edges_split_by_spread(S)[1], check=False)


def isotropic_mask(eng: _engine.VectorEngine, J, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
    d1, d2 = eng.digits(r1), eng.digits(r2)
    acc = np.zeros(len(r1), np.int64)
    for i, row in enumerate(J):
        for j, c in enumerate(row):
            if c:
                acc = eng.fadd(acc, eng.fmul(eng.fmul(d1[:, i], c), d2[:, j]))
    return acc == 0


def symplectic_polar_qgraph(F: Field, n: int, J: SymplecticStructure | None = None) -> QGraph:
    """The totally isotropic 2-spaces of a nondegenerate alternating form."""
    S = J if J is not None else SymplecticStructure.standard(F, n)
    if S.field != F or S.n != n:
        raise AmbientMismatchError("Gram matrix does not match the requested space")
    eng = _engine.engine(F, n)
    keys = eng.all_edges()
    r1, r2 = np.divmod(keys, eng.Q)
    return QGraph(F, n, keys[isotropic_mask(eng, S.J, r1, r2)], check=False)


def hexagon_qgraph(b: int = 1) -> QGraph:
    return QGraph(field_create(2, b), 6, hexagon_edge_keys(b), check=False)


def field_reduce_qgraph(G: QGraph, F: Field) -> QGraph:
    """The F-2-spaces contained in some edge of G (G lives over an extension of F)."""
    K = G.field
    if K.p != F.p or K.t % F.t:
        raise ValidationError(f"{F!r} is not a subfield of {K!r}")
    b = K.t // F.t
    emb = extension_embedding(F, b)
    a = G.n
    N = a * b
    eng = _engine.engine(F, N)
    if len(G) == 0:
        return QGraph(F, N, np.zeros(0, np.int64), check=False)
    # F-basis of each K-edge: theta^k r1, theta^k r2 blown up to F^N
    AK = ambient(K, a)
    r1, r2 = np.divmod(G.edge_keys, AK.size)
    kd1 = _engine.engine(K, a).digits(r1)
    kd2 = _engine.engine(K, a).digits(r2)
    kmul = _engine.engine(K, a)
    fwd = np.array([emb.forward(x) for x in range(K.q)], np.int64)  # (K.q, b)
    basis = []
    for kd in (kd1, kd2):
        for th in emb.basis:
            img = kmul.fmul(kd, th)  # (E, a)
            basis.append(eng.pack(fwd[img].reshape(len(G), N)))
    basis = np.stack(basis, 1)  # (E, 2b) packed F^N vectors
    # every 2-space of F^(2b), mapped through each edge's basis
    small = _engine.engine(F, 2 * b)
    sk = small.all_edges()
    s1, s2 = np.divmod(sk, small.Q)
    c1, c2 = small.digits(s1), small.digits(s2)  # (S, 2b)
    out = []
    chunk = max(1, 2**22 // max(1, len(sk)))
    for lo in range(0, len(G), chunk):
        B = basis[lo : lo + chunk]  # (e, 2b)
        v1 = _combine(eng, c1, B)
        v2 = _combine(eng, c2, B)
        x, y = eng.rref2(v1.ravel(), v2.ravel())
        out.append(np.unique(x * eng.Q + y))
    return QGraph(F, N, np.unique(np.concatenate(out)), check=False)


def _combine(eng: _engine.VectorEngine, coeffs: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """sum_j coeffs[s, j] * rows[e, j] for every (e, s); shape (E, S)."""
    E, m = rows.shape
    if eng.binary:
        acc = np.zeros((E, len(coeffs)), np.int64)
        for j in range(m):
            acc ^= rows[:, j : j + 1] * coeffs[None, :, j]
        return acc
    rd = eng.digits(rows)  # (E, m, N)
    acc = np.zeros((E, len(coeffs), eng.n), np.int64)
    for j in range(m):
        acc = eng.fadd(acc, eng.fmul(coeffs[None, :, j, None], rd[:, None, j, :]))
    return eng.pack(acc)
