"""Arithmetic in GF(p^t).

Elements are plain integers in ``[0, q)``: the base-p digits of the integer
are the polynomial coefficients, digit ``i`` being the coefficient of x^i.
``0`` and ``1`` are the field zero and one.

Fields are built from Conway polynomials so that GF(q) sits inside GF(q^b)
compatibly for every pair of shipped fields; :func:`extension_embedding`
relies on this.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from ._conway import CONWAY
from .errors import InvariantViolation, UnsupportedFieldError, ValidationError

FIELD_ORDER_CAP = 2**20
TABLE_LIMIT = 2**16


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def prime_factors(m: int) -> list[int]:
    out = []
    d = 2
    while d * d <= m:
        if m % d == 0:
            out.append(d)
            while m % d == 0:
                m //= d
        d += 1
    if m > 1:
        out.append(m)
    return out


class Field:
    """The finite field GF(p^t) with a fixed Conway modulus.

    Use :func:`field_create` rather than the constructor; it caches, so the
    same (p, t) always gives the same object.
    """

    def __init__(self, p: int, t: int, modulus: Sequence[int]):
        self.p = p
        self.t = t
        self.q = p**t
        self.modulus = tuple(modulus)
        if len(self.modulus) != t + 1 or self.modulus[-1] != 1:
            raise ValidationError(f"modulus for GF({p}^{t}) must be monic of degree {t}")
        q = self.q
        self._tabled = q <= TABLE_LIMIT
        self._pows = [p**i for i in range(t + 1)]
        if t == 1:
            self.primitive = (-self.modulus[0]) % p
        else:
            self.primitive = p  # the class of x
        if self._tabled:
            self._build_tables()
        else:
            self._check_primitive_slow()
        self._frob_tables: dict[int, list[int]] = {}

    # -- construction -------------------------------------------------
    def _digits(self, a: int) -> list[int]:
        p = self.p
        out = []
        for _ in range(self.t):
            a, r = divmod(a, p)
            out.append(r)
        return out

    def _undigits(self, ds: Sequence[int]) -> int:
        v = 0
        for d in reversed(ds):
            v = v * self.p + d
        return v

    def _times_x(self, a: int) -> int:
        p, t = self.p, self.t
        ds = [0] + self._digits(a)
        top = ds.pop()
        if top:
            for i in range(t):
                ds[i] = (ds[i] - top * self.modulus[i]) % p
        return self._undigits(ds)

    def _build_tables(self) -> None:
        q = self.q
        exp = [0] * (2 * (q - 1))
        log = [-1] * q
        a = 1
        for k in range(q - 1):
            if log[a] != -1:
                raise InvariantViolation(f"modulus of GF({q}) is not primitive (order {k})")
            exp[k] = a
            log[a] = k
            a = self._mul_by_primitive(a)
        if a != 1:
            raise InvariantViolation(f"primitive element of GF({q}) has wrong order")
        for k in range(q - 1, 2 * (q - 1)):
            exp[k] = exp[k - (q - 1)]
        self._exp = exp
        self._log = log
        if self.p != 2:
            # Zech logarithms: zech[k] = log(1 + w^k), -1 when 1 + w^k = 0
            zech = [-1] * (q - 1)
            for k in range(q - 1):
                s = self._add_digits(1, exp[k])
                zech[k] = log[s] if s else -1
            self._zech = zech
            self._neg_shift = (q - 1) // 2

    def _mul_by_primitive(self, a: int) -> int:
        if self.t == 1:
            return (a * self.primitive) % self.p
        return self._times_x(a)

    def _check_primitive_slow(self) -> None:
        q = self.q
        w = self.primitive
        if self._pow_slow(w, q - 1) != 1:
            raise InvariantViolation(f"primitive element of GF({q}) has wrong order")
        for r in prime_factors(q - 1):
            if self._pow_slow(w, (q - 1) // r) == 1:
                raise InvariantViolation(f"modulus of GF({q}) is not primitive")

    # -- digit-level arithmetic (used above the table limit) ---------
    def _add_digits(self, a: int, b: int) -> int:
        p = self.p
        v, place = 0, 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            v += ((ra + rb) % p) * place
            place *= p
        return v

    def _neg_digits(self, a: int) -> int:
        return self._undigits([(-d) % self.p for d in self._digits(a)])

    def _mul_slow(self, a: int, b: int) -> int:
        p, t = self.p, self.t
        da, db = self._digits(a), self._digits(b)
        prod = [0] * (2 * t - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        for k in range(2 * t - 2, t - 1, -1):
            c = prod[k]
            if c:
                for i in range(t + 1):
                    prod[k - t + i] = (prod[k - t + i] - c * self.modulus[i]) % p
        return self._undigits(prod[:t])

    def _pow_slow(self, a: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = self._mul_slow(r, a)
            a = self._mul_slow(a, a)
            e >>= 1
        return r

    # -- public arithmetic -------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if not self._tabled:
            return self._add_digits(a, b)
        if a == 0:
            return b
        if b == 0:
            return a
        la, lb = self._log[a], self._log[b]
        z = self._zech[(lb - la) % (self.q - 1)]
        if z < 0:
            return 0
        return self._exp[(la + z) % (self.q - 1)]

    def neg(self, a: int) -> int:
        if self.p == 2 or a == 0:
            return a
        if not self._tabled:
            return self._neg_digits(a)
        return self._exp[self._log[a] + self._neg_shift]

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if not self._tabled:
            return self._mul_slow(a, b)
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in " + repr(self))
        if not self._tabled:
            return self._pow_slow(a, self.q - 2)
        return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, e: int) -> int:
        if a == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 to a negative power")
            return 0
        if not self._tabled:
            return self._pow_slow(a, e % (self.q - 1))
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def log(self, a: int) -> int:
        """Discrete log of ``a`` to the base of the primitive element."""
        if a == 0:
            raise ValueError("log of zero")
        if not self._tabled:
            w, k = 1, 0
            while w != a:
                w = self._mul_slow(w, self.primitive)
                k += 1
            return k
        return self._log[a]

    def exp(self, k: int) -> int:
        if not self._tabled:
            return self._pow_slow(self.primitive, k % (self.q - 1))
        return self._exp[k % (self.q - 1)]

    def frobenius(self, a: int, s: int = 1) -> int:
        """Return a^(p^s)."""
        s %= self.t
        if s == 0 or a <= 1:
            return a
        return self.frobenius_table(s)[a]

    def frobenius_table(self, s: int) -> list[int]:
        s %= self.t
        tab = self._frob_tables.get(s)
        if tab is None:
            e = self.p**s
            tab = [self.pow(a, e) for a in range(self.q)]
            self._frob_tables[s] = tab
        return tab

    def sqrt(self, a: int) -> int:
        """Square root in characteristic 2 (the inverse Frobenius)."""
        if self.p != 2:
            raise ValidationError("sqrt is only defined here for characteristic 2")
        return self.frobenius(a, self.t - 1)

    def elements(self) -> range:
        return range(self.q)

    def __call__(self, value: int) -> "FieldElement":
        return FieldElement(self, value % self.q)

    # -- identity -----------------------------------------------------
    def __eq__(self, other: object) -> bool:
        return isinstance(other, Field) and (self.p, self.t) == (other.p, other.t)

    def __hash__(self) -> int:
        return hash((self.p, self.t))

    def __repr__(self) -> str:
        return f"GF({self.q})" if self.t == 1 else f"GF({self.p}^{self.t})"

    def to_dict(self) -> dict:
        return {"p": self.p, "t": self.t, "modulus": list(self.modulus)}


@dataclass(frozen=True)
class FieldElement:
    """Operator sugar over an integer-encoded element."""

    field: Field
    value: int

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise ValidationError("elements of different fields")
            return other.value
        return int(other) % self.field.q

    def __add__(self, other):
        return FieldElement(self.field, self.field.add(self.value, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.field, self.field.sub(self.value, self._coerce(other)))

    def __neg__(self):
        return FieldElement(self.field, self.field.neg(self.value))

    def __mul__(self, other):
        return FieldElement(self.field, self.field.mul(self.value, self._coerce(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FieldElement(self.field, self.field.div(self.value, self._coerce(other)))

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.value, e))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __repr__(self) -> str:
        return f"{self.field!r}({self.value})"


def _least_primitive_root(p: int) -> int:
    """The degree-1 Conway polynomial is x - g for this g."""
    if p == 2:
        return 1
    factors = prime_factors(p - 1)
    return next(g for g in range(2, p) if all(pow(g, (p - 1) // r, p) != 1 for r in factors))


@lru_cache(maxsize=None)
def field_create(p: int, t: int = 1) -> Field:
    if not is_prime(p):
        raise ValidationError(f"{p} is not prime")
    if t < 1:
        raise ValidationError("degree must be positive")
    if p**t > FIELD_ORDER_CAP:
        raise ValidationError(f"GF({p}^{t}) exceeds the field order cap {FIELD_ORDER_CAP}")
    modulus = CONWAY.get((p, t))
    if modulus is None and t == 1:
        modulus = (-_least_primitive_root(p) % p, 1)
    if modulus is None:
        raise UnsupportedFieldError(f"no modulus table entry for GF({p}^{t})")
    return Field(p, t, modulus)


def gf(q: int) -> Field:
    """Field of order ``q`` (a prime power)."""
    for p in range(2, q + 1):
        if q % p == 0:
            t, m = 0, q
            while m % p == 0:
                m //= p
                t += 1
            if m != 1:
                break
            return field_create(p, t)
    raise ValidationError(f"{q} is not a prime power")


def frobenius(F: Field, x: int, s: int = 1) -> int:
    return F.frobenius(x, s)


class ExtensionEmbedding:
    """GF(q^b) as a b-dimensional vector space over GF(q).

    The F-basis is ``theta^0, ..., theta^(b-1)`` with ``theta`` the primitive
    element of the extension; GF(q) sits inside via the Conway-compatible map
    ``w_F^k -> w_K^(k (q^b-1)/(q-1))``.
    """

    def __init__(self, base: Field, degree: int):
        if degree < 1:
            raise ValidationError("extension degree must be positive")
        self.base = base
        self.degree = degree
        self.ext = field_create(base.p, base.t * degree)
        K, F = self.ext, base
        step = (K.q - 1) // (F.q - 1)
        self._incl = [0] * F.q
        for c in range(1, F.q):
            self._incl[c] = K.exp(F.log(c) * step)
        self._restrict = {v: c for c, v in enumerate(self._incl)}
        # the image of w_F must satisfy the Conway polynomial of F
        root = self._incl[F.primitive]
        acc = 0
        for coeff in reversed(F.modulus):
            acc = K.add(K.mul(acc, root), coeff)  # prime-field digits encode identically in K
        if acc != 0:
            raise InvariantViolation(f"{F!r} -> {K!r} is not norm-compatible")
        self.basis = tuple(K.exp(i) for i in range(degree))
        self._fwd: list[tuple[int, ...]] | None = None

    def include(self, c: int) -> int:
        return self._incl[c]

    def restrict(self, x: int) -> int:
        try:
            return self._restrict[x]
        except KeyError:
            raise ValidationError(f"{x} does not lie in the subfield {self.base!r}") from None

    def inverse(self, coords: Sequence[int]) -> int:
        K = self.ext
        acc = 0
        for c, th in zip(coords, self.basis):
            if c:
                acc = K.add(acc, K.mul(self._incl[c], th))
        return acc

    def forward(self, x: int) -> tuple[int, ...]:
        if self._fwd is None:
            self._build_forward()
        return self._fwd[x]

    def _build_forward(self) -> None:
        F, K, b = self.base, self.ext, self.degree
        fwd: list[tuple[int, ...] | None] = [None] * K.q
        # walk coordinates in base-q counting order, reusing partial sums
        coords = [0] * b
        for _ in range(K.q):
            fwd[self.inverse(coords)] = tuple(coords)
            i = 0
            while i < b:
                coords[i] += 1
                if coords[i] < F.q:
                    break
                coords[i] = 0
                i += 1
        if any(v is None for v in fwd):
            raise InvariantViolation("extension basis is not an F-basis")
        self._fwd = fwd  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ExtensionEmbedding({self.base!r} -> {self.ext!r})"


@lru_cache(maxsize=None)
def extension_embedding(F: Field, b: int) -> ExtensionEmbedding:
    return ExtensionEmbedding(F, b)
