"""Named groups addressable from the command line and the default scan catalog."""

from __future__ import annotations

from functools import lru_cache

from .errors import ValidationError
from .finite_field import field_create, gf
from .semilinear import (
    GroupSpec,
    enumerate_group,
    gamma_l1_subgroup,
    gamma_l_generators,
    reduce_group,
    sl_generators,
    sp_generators,
)

GROUP_NAMES = ("trivial", "sp", "sl", "gammal", "gammal1", "gammal-reduced", "sp-reduced", "g2")


@lru_cache(maxsize=2)
def g2_group() -> GroupSpec:
    """Stabiliser in Sp_6(2) of the hexagon's trilinear form (order 12096)."""
    from .octonion import trilinear_table
    from .semilinear import stabiliser_of_trilinear_form

    elements = enumerate_group(sp_generators(6, gf(2)))
    return stabiliser_of_trilinear_form(elements, trilinear_table(1, singular=True), name="G2(2)")


def resolve_group(name: str, q: int, n: int, d: int | None = None, e: int | None = None,
                  s: int | None = None, b: int | None = None) -> GroupSpec:
    """Build a group on GF(q)^n from its catalog name and parameters.

    ``b`` is the extension degree for the reduced families: the group is
    built over GF(q^b) on dimension n/b and written over GF(q).
    """
    F = gf(q)
    if name not in GROUP_NAMES:
        raise ValidationError(f"unknown group {name!r}; choose from {', '.join(GROUP_NAMES)}")
    if name == "trivial":
        return GroupSpec.trivial(F, n)
    if name == "sp":
        return sp_generators(n, F)
    if name == "sl":
        return sl_generators(n, F)
    if name == "gammal":
        return gamma_l_generators(n, F)
    if name == "gammal1":
        d = 1 if d is None else d
        e = 0 if e is None else e
        s = 1 if s is None else s
        return gamma_l1_subgroup(F, n, d, e, s)
    if name in ("gammal-reduced", "sp-reduced"):
        if b is None or b < 1 or n % b:
            raise ValidationError(f"{name} needs an extension degree b dividing n={n}")
        K = field_create(F.p, F.t * b)
        inner = gamma_l_generators(n // b, K) if name == "gammal-reduced" else sp_generators(n // b, K)
        return reduce_group(inner, F, f"{inner.name}/GF({q})")
    if q != 2 or n != 6:
        raise ValidationError("the G2 stabiliser is available for q=2, n=6 only")
    return g2_group()


def default_catalog() -> list[GroupSpec]:
    """Groups scanned by the classification cross-check (all within the default budget)."""
    return [
        resolve_group("sp", 2, 4),
        resolve_group("sp", 3, 4),
        resolve_group("sp", 2, 6),
        resolve_group("gammal1", 2, 5),
        resolve_group("gammal1", 2, 6),
        resolve_group("gammal-reduced", 2, 4, b=2),
        resolve_group("gammal-reduced", 3, 4, b=2),
        resolve_group("gammal-reduced", 2, 6, b=3),
        resolve_group("gammal-reduced", 2, 6, b=2),
        resolve_group("g2", 2, 6),
    ]


def extended_catalog() -> list[GroupSpec]:
    """Proper subgroups worth scanning too: vertex-transitive Foulser subgroups
    of GammaL_1(2^5), GammaL_1(2^6) and the reduced Sp_4(4)."""
    from .semilinear import foulser_triples

    out = []
    for n in (5, 6):
        F = gf(2)
        for d, e, s in foulser_triples(F, n):
            G = gamma_l1_subgroup(F, n, d, e, s)
            if G.order % (2**n - 1) == 0 and (d, e, s) != (1, 0, 1):
                out.append(G)
    out.append(resolve_group("sp-reduced", 2, 8, b=2))
    return out
