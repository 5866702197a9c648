"""Split octonions in characteristic 2 and the generalised hexagon.

The algebra has basis x1..x8 with the multiplication table below (blank
products are zero) and identity x4 + x5. The hexagon lives in the
6-space spanned by x1, x2, x3, x6, x7, x8, carrying the symplectic form
f(u, v) = Tr(uv) and the trilinear form T(x, y, z) = Tr((xy)z).

T depends on how a hex-space vector is lifted into the algebra. The
zero lift (coefficients of x4, x5 both 0) gives the printed values of T.
The hexagon lines, however, are cut out with the singular lift, which
adds sqrt(Q(u)) (x4 + x5) with Q(u) = l1 l8 + l2 l7 + l3 l6: this is the
unique lift of trace zero and norm zero, and a 2-space is a line exactly
when it is totally isotropic and the singular lifts of its vectors
multiply to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from ._engine import engine
from .errors import AmbientMismatchError, BudgetExceededError, ValidationError
from .finite_field import Field, field_create
from .subspaces import Subspace, ambient

# (left, right) -> product, 1-indexed basis labels
MULT_TABLE: dict[tuple[int, int], int] = {
    (1, 5): 1, (1, 6): 2, (1, 7): 3, (1, 8): 4,
    (2, 3): 1, (2, 4): 2, (2, 7): 5, (2, 8): 6,
    (3, 2): 1, (3, 4): 3, (3, 6): 5, (3, 8): 7,
    (4, 1): 1, (4, 4): 4, (4, 6): 6, (4, 7): 7,
    (5, 2): 2, (5, 3): 3, (5, 5): 5, (5, 8): 8,
    (6, 1): 2, (6, 3): 4, (6, 5): 6, (6, 7): 8,
    (7, 1): 3, (7, 2): 4, (7, 5): 7, (7, 6): 8,
    (8, 1): 5, (8, 2): 6, (8, 3): 7, (8, 4): 8,
}

HEX_BASIS = (1, 2, 3, 6, 7, 8)


def _check_char2(field: Field) -> None:
    if field.p != 2:
        raise ValidationError(f"the split octonion table is for characteristic 2, got {field!r}")


@dataclass(frozen=True)
class AlgebraElement:
    field: Field
    coeffs: tuple[int, ...]

    def __post_init__(self):
        _check_char2(self.field)
        if len(self.coeffs) != 8:
            raise ValidationError("an algebra element has 8 coefficients")

    @classmethod
    def basis(cls, field: Field, i: int) -> "AlgebraElement":
        return cls(field, tuple(int(j == i) for j in range(1, 9)))

    @classmethod
    def one(cls, field: Field) -> "AlgebraElement":
        return cls(field, (0, 0, 0, 1, 1, 0, 0, 0))

    def __add__(self, other: "AlgebraElement") -> "AlgebraElement":
        if self.field != other.field:
            raise AmbientMismatchError("elements over different fields")
        return AlgebraElement(self.field, tuple(a ^ b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: "AlgebraElement") -> "AlgebraElement":
        return algebra_multiply(self, other)

    def scale(self, c: int) -> "AlgebraElement":
        return AlgebraElement(self.field, tuple(self.field.mul(c, a) for a in self.coeffs))


def algebra_multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    if x.field != y.field:
        raise AmbientMismatchError("elements over different fields")
    F = x.field
    out = [0] * 8
    for (i, j), k in MULT_TABLE.items():
        a, b = x.coeffs[i - 1], y.coeffs[j - 1]
        if a and b:
            out[k - 1] ^= F.mul(a, b)
    return AlgebraElement(F, tuple(out))


def trace8(x: AlgebraElement) -> int:
    return x.coeffs[3] ^ x.coeffs[4]


@dataclass(frozen=True)
class HexSpaceVector:
    """Coordinates over the basis x1, x2, x3, x6, x7, x8."""

    field: Field
    coeffs: tuple[int, ...]

    def __post_init__(self):
        _check_char2(self.field)
        if len(self.coeffs) != 6:
            raise ValidationError("a hex-space vector has 6 coefficients")

    @classmethod
    def basis(cls, field: Field, label: int) -> "HexSpaceVector":
        return cls(field, tuple(int(b == label) for b in HEX_BASIS))

    @classmethod
    def from_packed(cls, field: Field, v: int) -> "HexSpaceVector":
        return cls(field, ambient(field, 6).unpack(v))

    def packed(self) -> int:
        return ambient(self.field, 6).pack(self.coeffs)

    def quadratic(self) -> int:
        """l1 l8 + l2 l7 + l3 l6."""
        F, c = self.field, self.coeffs
        return F.mul(c[0], c[5]) ^ F.mul(c[1], c[4]) ^ F.mul(c[2], c[3])

    def lift(self, singular: bool = False) -> AlgebraElement:
        out = [0] * 8
        for label, c in zip(HEX_BASIS, self.coeffs):
            out[label - 1] = c
        if singular:
            r = self.field.sqrt(self.quadratic())
            out[3] = out[4] = r
        return AlgebraElement(self.field, tuple(out))


def singular_lift(u: HexSpaceVector) -> AlgebraElement:
    return u.lift(singular=True)


def _same(*vs: HexSpaceVector) -> None:
    if len({v.field for v in vs}) != 1:
        raise AmbientMismatchError("vectors over different fields")


def hex_symplectic_form(u: HexSpaceVector, v: HexSpaceVector) -> int:
    _same(u, v)
    return trace8(u.lift() * v.lift())


def trilinear_T(x: HexSpaceVector, y: HexSpaceVector, z: HexSpaceVector, singular: bool = False) -> int:
    """Tr((xy)z) on lifted vectors."""
    _same(x, y, z)
    return trace8((x.lift(singular) * y.lift(singular)) * z.lift(singular))


# -- vectorised forms -------------------------------------------------------

def _lift_table(field: Field, singular: bool) -> np.ndarray:
    """Algebra coordinates of the lift of every packed hex vector, shape (Q, 8)."""
    eng = engine(field, 6)
    d = eng.digits(np.arange(eng.Q, dtype=np.int64))
    out = np.zeros((eng.Q, 8), np.int64)
    for col, label in enumerate(HEX_BASIS):
        out[:, label - 1] = d[:, col]
    if singular:
        qf = eng.fmul(d[:, 0], d[:, 5]) ^ eng.fmul(d[:, 1], d[:, 4]) ^ eng.fmul(d[:, 2], d[:, 3])
        r = eng.ffrob(qf, field.t - 1)  # square root is the inverse Frobenius
        out[:, 3] = out[:, 4] = r
    return out


def _multiply_arrays(field: Field, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    eng = engine(field, 6)
    out = np.zeros(np.broadcast_shapes(X.shape, Y.shape), np.int64)
    for (i, j), k in MULT_TABLE.items():
        out[..., k - 1] ^= eng.fmul(X[..., i - 1], Y[..., j - 1])
    return out


@lru_cache(maxsize=4)
def trilinear_table(b: int = 1, singular: bool = True) -> np.ndarray:
    """T(a, b, c) for all packed a, b, c in GF(2^b)^6 (GF(2) only by default budget)."""
    F = field_create(2, b)
    if F.q**18 > 2**18:
        raise BudgetExceededError("trilinear form table", F.q**18, 2**18)
    L = _lift_table(F, singular)
    P = _multiply_arrays(F, L[:, None, :], L[None, :, :])  # (Q, Q, 8)
    R = _multiply_arrays(F, P[:, :, None, :], L[None, None, :, :])  # (Q, Q, Q, 8)
    return (R[..., 3] ^ R[..., 4]).astype(np.uint8 if F.q == 2 else np.int64)


def hexagon_edge_keys(b: int) -> np.ndarray:
    """Sorted edge keys (r1 * Q + r2) of the hexagon lines over GF(2^b)."""
    if b not in (1, 2, 3):
        raise BudgetExceededError("hexagon over GF(2^b)", 2**b, 8)
    F = field_create(2, b)
    eng = engine(F, 6)
    keys = eng.all_edges()
    r1, r2 = np.divmod(keys, eng.Q)
    d1, d2 = eng.digits(r1), eng.digits(r2)
    # f(u, v) pairs coordinates (0, 5), (1, 4), (2, 3)
    f = np.zeros(len(keys), np.int64)
    for i in range(6):
        f ^= eng.fmul(d1[:, i], d2[:, 5 - i])
    keys, r1, r2 = keys[f == 0], r1[f == 0], r2[f == 0]
    L = _lift_table(F, singular=True)
    prod = _multiply_arrays(F, L[r1], L[r2])
    return keys[~prod.any(-1)]


def hexagon_edges(b: int) -> set[Subspace]:
    F = field_create(2, b)
    Q = F.q**6
    return {Subspace(F, 6, divmod(int(k), Q)) for k in hexagon_edge_keys(b)}
