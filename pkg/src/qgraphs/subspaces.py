"""Vectors and subspaces of F_q^n with canonical (RREF) representatives.

Vectors are packed into integers in base q with coordinate 0 as the most
significant digit, so integer order is the lexicographic order of
coordinate tuples. A subspace is the tuple of its packed RREF rows. Over
GF(2) the packing is a bit-vector and most operations reduce to XOR.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import AmbientMismatchError, BudgetExceededError, ValidationError
from .finite_field import Field

ENUMERATION_CAP = 5_000_000
_TABLE_LIMIT = 2**16


def gaussian_binomial(n: int, d: int, q: int) -> int:
    """Number of d-dimensional subspaces of an n-dimensional space over GF(q)."""
    if d < 0 or d > n:
        return 0
    num = den = 1
    for i in range(d):
        num *= q ** (n - i) - 1
        den *= q ** (d - i) - 1
    return num // den


class Ambient:
    """The vector space F^n, with helpers on packed vectors."""

    def __init__(self, field: Field, n: int):
        if n < 1:
            raise ValidationError("ambient dimension must be positive")
        self.field = field
        self.n = n
        self.q = field.q
        self.size = self.q**n
        self.place = tuple(self.q ** (n - 1 - i) for i in range(n))
        self.binary = field.q == 2
        self._unpack: list[tuple[int, ...]] | None = None
        self._norm: list[int] | None = None

    def __repr__(self) -> str:
        return f"{self.field!r}^{self.n}"

    # -- packing ------------------------------------------------------
    def pack(self, coords: Sequence[int]) -> int:
        if len(coords) != self.n:
            raise AmbientMismatchError(f"expected {self.n} coordinates, got {len(coords)}")
        v = 0
        q = self.q
        for c in coords:
            v = v * q + c
        return v

    def unpack(self, v: int) -> tuple[int, ...]:
        if self.size <= _TABLE_LIMIT:
            if self._unpack is None:
                self._unpack = [self._unpack_slow(x) for x in range(self.size)]
            return self._unpack[v]
        return self._unpack_slow(v)

    def _unpack_slow(self, v: int) -> tuple[int, ...]:
        q = self.q
        out = [0] * self.n
        for i in range(self.n - 1, -1, -1):
            v, out[i] = divmod(v, q)
        return tuple(out)

    # -- linear operations on packed vectors --------------------------
    def add(self, a: int, b: int) -> int:
        if self.binary:
            return a ^ b
        F = self.field
        return self.pack([F.add(x, y) for x, y in zip(self.unpack(a), self.unpack(b))])

    def scale(self, c: int, a: int) -> int:
        if c == 1:
            return a
        if c == 0:
            return 0
        F = self.field
        return self.pack([F.mul(c, x) for x in self.unpack(a)])

    def combine(self, coeffs: Sequence[int], vectors: Sequence[int]) -> int:
        """Linear combination sum(coeffs[i] * vectors[i])."""
        if self.binary:
            acc = 0
            for c, v in zip(coeffs, vectors):
                if c:
                    acc ^= v
            return acc
        F = self.field
        acc = [0] * self.n
        for c, v in zip(coeffs, vectors):
            if c:
                for i, x in enumerate(self.unpack(v)):
                    if x:
                        acc[i] = F.add(acc[i], F.mul(c, x))
        return self.pack(acc)

    def leading(self, v: int) -> int:
        """Index of the first nonzero coordinate of a nonzero vector."""
        if self.binary:
            return self.n - v.bit_length()
        for i, x in enumerate(self.unpack(v)):
            if x:
                return i
        raise ValueError("zero vector has no leading coordinate")

    def normalize(self, v: int) -> int:
        """Canonical spanning vector of <v>: first nonzero coordinate equal to 1."""
        if self.binary or v == 0:
            return v
        if self.size <= _TABLE_LIMIT:
            if self._norm is None:
                self._norm = [self._normalize_slow(x) for x in range(self.size)]
            return self._norm[v]
        return self._normalize_slow(v)

    def _normalize_slow(self, v: int) -> int:
        if v == 0:
            return 0
        coords = self._unpack_slow(v)
        lead = next(x for x in coords if x)
        if lead == 1:
            return v
        inv = self.field.inv(lead)
        F = self.field
        return self.pack([F.mul(inv, x) for x in coords])

    # -- reduction ----------------------------------------------------
    def rref(self, rows: Iterable[int]) -> tuple[int, ...]:
        """Packed RREF rows (pivot order) of the span of ``rows``."""
        if self.binary:
            return self._rref_binary(rows)
        F = self.field
        mat = [list(self.unpack(r)) for r in rows if r]
        reduced = _rref_lists(F, mat, self.n)
        return tuple(self.pack(r) for r in reduced)

    def _rref_binary(self, rows: Iterable[int]) -> tuple[int, ...]:
        basis: dict[int, int] = {}  # pivot bit -> row
        for r in rows:
            for bit in sorted(basis, reverse=True):
                if (r >> bit) & 1:
                    r ^= basis[bit]
            if r:
                top = r.bit_length() - 1
                for bit in list(basis):
                    if (basis[bit] >> top) & 1:
                        basis[bit] ^= r
                basis[top] = r
        return tuple(basis[b] for b in sorted(basis, reverse=True))

    def rref2(self, a: int, b: int) -> tuple[int, int]:
        """RREF rows of the 2-space <a, b>; raises if a, b are dependent."""
        if self.binary:
            c = a ^ b
            if a == 0 or b == 0 or c == 0:
                raise ValidationError("vectors do not span a 2-space")
            # the lower-pivot row is the smallest of the three nonzero
            # vectors; the other RREF row is the middle one
            if a > b:
                a, b = b, a
            if c < a:
                return a, c
            if c < b:
                return c, a
            return b, a
        rows = self.rref((a, b))
        if len(rows) != 2:
            raise ValidationError("vectors do not span a 2-space")
        return rows[0], rows[1]

    def span_vectors(self, rows: Sequence[int]) -> list[int]:
        """Every vector of the span of ``rows`` (q^len(rows) of them)."""
        if self.binary:
            out = [0]
            for r in rows:
                out += [x ^ r for x in out]
            return out
        out = [0]
        for r in rows:
            multiples = [self.scale(c, r) for c in range(1, self.q)]
            out = out + [self.add(x, m) for m in multiples for x in out]
        return out

    def points_of(self, rows: Sequence[int]) -> list[int]:
        """Canonical vectors of the 1-spaces inside span(rows), sorted."""
        if self.binary:
            return sorted(v for v in self.span_vectors(rows) if v)
        return sorted({self.normalize(v) for v in self.span_vectors(rows) if v})

    def points(self) -> list[int]:
        """All canonical vertex vectors, ascending."""
        if self.binary:
            return list(range(1, self.size))
        out = []
        for lead in range(self.n):
            base = self.place[lead]
            for tail in range(self.place[lead]):
                out.append(base + tail)
        out.sort()
        return out

    # -- subspace enumeration -----------------------------------------
    def rref_rows_iter(self, d: int) -> Iterable[tuple[int, ...]]:
        """All RREF row tuples of d-subspaces (unsorted)."""
        n, q = self.n, self.q
        for pivots in itertools.combinations(range(n), d):
            free = []  # (row, column) positions that carry free entries
            for r, pc in enumerate(pivots):
                for col in range(pc + 1, n):
                    if col not in pivots:
                        free.append((r, col))
            base = [self.place[pc] for pc in pivots]
            for vals in itertools.product(range(q), repeat=len(free)):
                rows = list(base)
                for (r, col), v in zip(free, vals):
                    if v:
                        rows[r] += v * self.place[col]
                yield tuple(rows)


@lru_cache(maxsize=None)
def ambient(field: Field, n: int) -> Ambient:
    return Ambient(field, n)


def _rref_lists(F: Field, mat: list[list[int]], n: int) -> list[list[int]]:
    rows = [r[:] for r in mat]
    out: list[list[int]] = []
    col = 0
    for col in range(n):
        piv = next((i for i, r in enumerate(rows) if r[col]), None)
        if piv is None:
            continue
        r = rows.pop(piv)
        inv = F.inv(r[col])
        r = [F.mul(inv, x) for x in r]
        for others in (rows, out):
            for i, s in enumerate(others):
                c = s[col]
                if c:
                    others[i] = [F.sub(x, F.mul(c, y)) for x, y in zip(s, r)]
        out.append(r)
        rows = [s for s in rows if any(s)]
        if not rows:
            break
    return out


def rref(matrix: Sequence[Sequence[int]], field: Field) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Reduced row echelon form of a matrix over ``field`` and its rank."""
    mat = [list(r) for r in matrix]
    if not mat:
        return (), 0
    n = len(mat[0])
    for r in mat:
        if len(r) != n:
            raise ValidationError("ragged matrix")
        if any(not (0 <= x < field.q) for x in r):
            raise ValidationError(f"matrix entries must be elements of {field!r}")
    reduced = _rref_lists(field, [r for r in mat if any(r)], n)
    return tuple(tuple(r) for r in reduced), len(reduced)


@dataclass(frozen=True)
class Subspace:
    """A subspace of F^n held as its packed RREF basis."""

    field: Field
    n: int
    rows: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def ambient(self) -> Ambient:
        return ambient(self.field, self.n)

    @property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        A = self.ambient
        return tuple(A.unpack(r) for r in self.rows)

    def vectors(self) -> list[int]:
        return self.ambient.span_vectors(self.rows)

    def points(self) -> list[int]:
        return self.ambient.points_of(self.rows)

    def sort_key(self) -> tuple:
        return (self.dim, self.rows)

    def __lt__(self, other: "Subspace") -> bool:
        return self.sort_key() < other.sort_key()

    def to_json(self) -> list[list[int]]:
        return [list(r) for r in self.matrix]

    @classmethod
    def from_rows(cls, field: Field, n: int, rows: Iterable[int]) -> "Subspace":
        return cls(field, n, ambient(field, n).rref(rows))

    @classmethod
    def from_matrix(cls, field: Field, matrix: Sequence[Sequence[int]]) -> "Subspace":
        n = len(matrix[0])
        A = ambient(field, n)
        return cls(field, n, A.rref([A.pack(r) for r in matrix]))

    def __repr__(self) -> str:
        return f"Subspace({self.field!r}^{self.n}, {[list(r) for r in self.matrix]})"


def _check_same(U: Subspace, W: Subspace) -> None:
    if U.field != W.field or U.n != W.n:
        raise AmbientMismatchError(f"{U.field!r}^{U.n} vs {W.field!r}^{W.n}")


def span(field: Field, n: int, vectors: Iterable[Sequence[int] | int]) -> Subspace:
    A = ambient(field, n)
    packed = [v if isinstance(v, int) else A.pack(v) for v in vectors]
    return Subspace(field, n, A.rref(packed))


def subspace_sum(U: Subspace, W: Subspace) -> Subspace:
    _check_same(U, W)
    return Subspace(U.field, U.n, U.ambient.rref(U.rows + W.rows))


def annihilator(U: Subspace) -> Subspace:
    """{x : u . x = 0 for all u in U} under the standard dot product."""
    F, n = U.field, U.n
    A = U.ambient
    mat = [list(A.unpack(r)) for r in U.rows]
    pivots = [next(i for i, x in enumerate(r) if x) for r in mat]
    basis = []
    for free in range(n):
        if free in pivots:
            continue
        x = [0] * n
        x[free] = 1
        for r, pc in zip(mat, pivots):
            x[pc] = F.neg(r[free])
        basis.append(A.pack(x))
    return Subspace(F, n, A.rref(basis))


def intersect(U: Subspace, W: Subspace) -> Subspace:
    _check_same(U, W)
    return annihilator(subspace_sum(annihilator(U), annihilator(W)))


def contains(U: Subspace, W: Subspace) -> bool:
    """True iff W <= U."""
    _check_same(U, W)
    return U.ambient.rref(U.rows + W.rows) == U.rows


def enumerate_subspaces(field: Field, n: int, d: int, cap: int = ENUMERATION_CAP) -> list[Subspace]:
    """All d-subspaces of F^n, in lexicographic order of their RREF matrices."""
    count = gaussian_binomial(n, d, field.q)
    if count > cap:
        raise BudgetExceededError(f"enumerate {d}-subspaces of {field!r}^{n}", count, cap)
    A = ambient(field, n)
    return [Subspace(field, n, rows) for rows in sorted(A.rref_rows_iter(d))]
