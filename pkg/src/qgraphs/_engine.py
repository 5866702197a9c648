"""Vectorised arithmetic on packed vectors of F_q^n.

Everything here works on int64 numpy arrays of packed vectors (see
:mod:`qgraphs.subspaces`) so orbit searches never loop in Python over
individual points. Point kinds and their integer keys:

* vertex  ``v``                      (canonical spanning vector)
* edge    ``r1 * Q + r2``            (packed RREF rows)
* flag    ``edge * (q + 1) + pos``   (``pos`` indexes the vertex on the edge)
* pair    ``x * Q + y``              (ordered pair of vertices)

with ``Q = q^n``. The points of an edge ``(r1, r2)`` are ordered as
``r2, r1, r1 + c_1 r2, ...``, which is ascending integer order, so over
GF(2) positions 0, 1, 2 are the min, median and max of ``{r1, r2, r1^r2}``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import BudgetExceededError, ValidationError
from .finite_field import Field

KINDS = ("vertex", "edge", "flag", "pair")
MAX_AMBIENT = 2**22


class VectorEngine:
    def __init__(self, field: Field, n: int):
        q = field.q
        if q > 2**16:
            raise BudgetExceededError("vectorised arithmetic over the field", q, 2**16)
        if q**n > MAX_AMBIENT:
            raise BudgetExceededError(f"vectorised ambient {field!r}^{n}", q**n, MAX_AMBIENT)
        self.field = field
        self.n = n
        self.q = q
        self.p = field.p
        self.Q = q**n
        self.binary = q == 2
        self.place = np.array([q ** (n - 1 - i) for i in range(n)], dtype=np.int64)
        self._exp = np.array(field._exp, dtype=np.int64)
        self._log = np.array(field._log, dtype=np.int64)
        self._pdigits = np.array([field.p**j for j in range(field.t)], dtype=np.int64)
        self.norm_table = self._build_norm()

    # -- scalar field arithmetic on arrays ------------------------------
    def fmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        a, b = np.broadcast_arrays(np.asarray(a, np.int64), np.asarray(b, np.int64))
        out = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)] if self.q > 2 else a & b
        return np.where((a == 0) | (b == 0), 0, out)

    def finv(self, a: np.ndarray) -> np.ndarray:
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def fadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return np.bitwise_xor(a, b)
        p, P = self.p, self._pdigits
        da = (a[..., None] // P) % p
        db = (b[..., None] // P) % p
        return (((da + db) % p) * P).sum(-1)

    def fneg(self, a: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return a
        p, P = self.p, self._pdigits
        da = (a[..., None] // P) % p
        return (((p - da) % p) * P).sum(-1)

    def ffrob(self, a: np.ndarray, s: int) -> np.ndarray:
        s %= self.field.t
        if s == 0:
            return a
        e = self.p**s
        return np.where(a == 0, 0, self._exp[(self._log[a] * e) % (self.q - 1)])

    # -- vectors ----------------------------------------------------------
    def digits(self, v: np.ndarray) -> np.ndarray:
        return (np.asarray(v, np.int64)[..., None] // self.place) % self.q

    def pack(self, d: np.ndarray) -> np.ndarray:
        return (d * self.place).sum(-1)

    def vadd(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        if self.binary:
            return a ^ b
        return self.pack(self.fadd(self.digits(a), self.digits(b)))

    def leading(self, v: np.ndarray) -> np.ndarray:
        """Index of the first nonzero coordinate (n for the zero vector)."""
        d = self.digits(v) != 0
        idx = np.argmax(d, axis=-1)
        return np.where(d.any(-1), idx, self.n)

    def _normalize_digits(self, d: np.ndarray) -> np.ndarray:
        lead_idx = np.argmax(d != 0, axis=-1)
        lead = np.take_along_axis(d, lead_idx[..., None], -1)
        lead = np.where(lead == 0, 1, lead)
        return self.fmul(self.finv(lead), d)

    def _build_norm(self) -> np.ndarray:
        allv = np.arange(self.Q, dtype=np.int64)
        if self.binary:
            return allv
        out = np.empty(self.Q, np.int64)
        step = 1 << 16
        for lo in range(0, self.Q, step):
            chunk = allv[lo : lo + step]
            out[lo : lo + step] = self.pack(self._normalize_digits(self.digits(chunk)))
        return out

    def normalize(self, v: np.ndarray) -> np.ndarray:
        return self.norm_table[v]

    def apply(self, rows: np.ndarray, s: int, v: np.ndarray) -> np.ndarray:
        """Images x -> sigma^s(x) M of packed vectors ``v`` (M given by packed rows)."""
        v = np.asarray(v, np.int64)
        if self.binary:
            out = np.zeros_like(v)
            for i, r in enumerate(rows):
                bit = (v >> (self.n - 1 - i)) & 1
                out ^= bit * int(r)
            return out
        d = self.ffrob(self.digits(v), s)
        M = self.digits(np.asarray(rows, np.int64))  # n x n
        acc = np.zeros(v.shape + (self.n,), np.int64)
        for i in range(self.n):
            acc = self.fadd(acc, self.fmul(d[..., i : i + 1], M[i]))
        return self.pack(acc)

    def vector_table(self, rows, s: int) -> np.ndarray:
        return self.apply(np.asarray(rows, np.int64), s, np.arange(self.Q, dtype=np.int64))

    # -- 2-spaces -------------------------------------------------------
    def rref2(self, a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        a = np.asarray(a, np.int64)
        b = np.asarray(b, np.int64)
        if self.binary:
            c = a ^ b
            s = np.sort(np.stack([a, b, c], -1), -1)
            if np.any(s[..., 0] == 0):
                raise ValidationError("vectors do not span a 2-space")
            return s[..., 1], s[..., 0]
        da, db = self.digits(a), self.digits(b)
        la = np.argmax(da != 0, -1)
        lb = np.argmax(db != 0, -1)
        same = la == lb
        if np.any(same):
            ca = np.take_along_axis(da, la[..., None], -1)
            cb = np.take_along_axis(db, la[..., None], -1)
            factor = self.fmul(cb, self.finv(np.where(ca == 0, 1, ca)))
            elim = self.fadd(db, self.fneg(self.fmul(factor, da)))
            db = np.where(same[..., None], elim, db)
            lb = np.argmax(db != 0, -1)
        if np.any(~(db != 0).any(-1)) or np.any(~(da != 0).any(-1)):
            raise ValidationError("vectors do not span a 2-space")
        swap = (lb < la)[..., None]
        du = np.where(swap, db, da)
        dw = np.where(swap, da, db)
        p2 = np.maximum(la, lb)
        r2 = self._normalize_digits(dw)
        r1 = self._normalize_digits(du)
        c = np.take_along_axis(r1, p2[..., None], -1)
        r1 = self.fadd(r1, self.fneg(self.fmul(c, r2)))
        return self.pack(r1), self.pack(r2)

    def edge_point(self, r1: np.ndarray, r2: np.ndarray, pos: np.ndarray) -> np.ndarray:
        """The ``pos``-th point (ascending) of the edge with RREF rows (r1, r2)."""
        if self.binary:
            return np.where(pos == 0, r2, np.where(pos == 1, r1, r1 ^ r2))
        c = np.maximum(pos - 1, 0)
        pt = self.pack(self.fadd(self.digits(r1), self.fmul(c[..., None], self.digits(r2))))
        return np.where(pos == 0, r2, pt)

    def edge_points(self, r1: np.ndarray, r2: np.ndarray) -> np.ndarray:
        """All q+1 points of each edge, shape (..., q+1), ascending."""
        pos = np.arange(self.q + 1, dtype=np.int64)
        return self.edge_point(r1[..., None], r2[..., None], pos)

    def point_position(self, r1: np.ndarray, r2: np.ndarray, v: np.ndarray) -> np.ndarray:
        if self.binary:
            return np.where(v == r2, 0, np.where(v == r1, 1, 2))
        p2 = self.leading(r2)
        c = np.take_along_axis(self.digits(v), p2[..., None], -1)[..., 0]
        return np.where(v == r2, 0, c + 1)

    # -- keyed point actions ----------------------------------------------
    def keyspace(self, kind: str) -> int:
        Q = self.Q
        return {"vertex": Q, "edge": Q * Q, "flag": Q * Q * (self.q + 1), "pair": Q * Q}[kind]

    def image(self, kind: str, tab: np.ndarray, keys: np.ndarray) -> np.ndarray:
        Q = self.Q
        if kind == "vertex":
            return self.norm_table[tab[keys]]
        if kind == "pair":
            x, y = np.divmod(keys, Q)
            return self.norm_table[tab[x]] * Q + self.norm_table[tab[y]]
        if kind == "edge":
            r1, r2 = np.divmod(keys, Q)
            a, b = self.rref2(tab[r1], tab[r2])
            return a * Q + b
        if kind == "flag":
            e, pos = np.divmod(keys, self.q + 1)
            r1, r2 = np.divmod(e, Q)
            v = self.edge_point(r1, r2, pos)
            a, b = self.rref2(tab[r1], tab[r2])
            w = self.norm_table[tab[v]]
            return (a * Q + b) * (self.q + 1) + self.point_position(a, b, w)
        raise ValueError(f"unknown point kind {kind!r}")

    # -- enumeration of all 2-spaces --------------------------------------
    def all_edges(self) -> np.ndarray:
        """Sorted keys of every 2-space."""
        n, q, Q = self.n, self.q, self.Q
        parts = []
        for p1 in range(n):
            for p2 in range(p1 + 1, n):
                free1 = [c for c in range(p1 + 1, n) if c != p2]
                free2 = list(range(p2 + 1, n))
                m1 = _spread_digits(q, free1, self.place)
                m2 = _spread_digits(q, free2, self.place)
                r1 = self.place[p1] + m1
                r2 = self.place[p2] + m2
                parts.append((r1[:, None] * Q + r2[None, :]).ravel())
        return np.sort(np.concatenate(parts))


def _spread_digits(q: int, positions: list[int], place: np.ndarray) -> np.ndarray:
    """Packed vectors supported on ``positions``, every digit pattern once."""
    out = np.zeros(1, np.int64)
    for pos in positions:
        out = (out[:, None] + np.arange(q, dtype=np.int64)[None, :] * place[pos]).ravel()
    return out


@lru_cache(maxsize=32)
def engine(field: Field, n: int) -> VectorEngine:
    return VectorEngine(field, n)


class KeySet:
    """A growing set of nonnegative int64 keys."""

    BITMAP_LIMIT = 2**27

    def __init__(self, keyspace: int):
        self._bitmap = np.zeros(keyspace, bool) if keyspace <= self.BITMAP_LIMIT else None
        self._sorted = np.zeros(0, np.int64)
        self.size = 0

    def add_new(self, keys: np.ndarray) -> np.ndarray:
        """Insert ``keys``; return the (unique, sorted) ones not seen before."""
        keys = np.unique(keys)
        if self._bitmap is not None:
            fresh = keys[~self._bitmap[keys]]
            self._bitmap[fresh] = True
        else:
            fresh = keys[~np.isin(keys, self._sorted, assume_unique=True)]
            self._sorted = np.union1d(self._sorted, fresh)
        self.size += len(fresh)
        return fresh


def bfs(eng: VectorEngine, kind: str, tables: list[np.ndarray], seeds: np.ndarray,
        cap: int | None = None, seen: KeySet | None = None) -> np.ndarray:
    """Closure of ``seeds`` under the generator tables; sorted keys."""
    if seen is None:
        seen = KeySet(eng.keyspace(kind))
    frontier = seen.add_new(np.asarray(seeds, np.int64))
    found = [frontier]
    total = len(frontier)
    while len(frontier):
        images = np.concatenate([eng.image(kind, tab, frontier) for tab in tables]) if tables else frontier[:0]
        frontier = seen.add_new(images)
        if len(frontier):
            found.append(frontier)
            total += len(frontier)
            if cap is not None and total > cap:
                raise BudgetExceededError(f"{kind} orbit (partial)", total, cap)
    return np.sort(np.concatenate(found))


def orbit_partition(eng: VectorEngine, kind: str, tables: list[np.ndarray], domain: np.ndarray,
                    cap: int | None = None) -> list[np.ndarray]:
    """Orbits on a sorted, invariant ``domain``, ordered by their minimum."""
    seen = KeySet(eng.keyspace(kind))
    covered = np.zeros(len(domain), bool)
    out = []
    i = 0
    while i < len(domain):
        if covered[i]:
            i += 1
            continue
        orb = bfs(eng, kind, tables, domain[i : i + 1], cap=cap, seen=seen)
        pos = np.searchsorted(domain, orb)
        if (pos >= len(domain)).any() or not np.array_equal(domain[np.minimum(pos, len(domain) - 1)], orb):
            raise ValueError("domain is not invariant under the group")
        covered[pos] = True
        out.append(orb)
    return out
