"""Exponent-3^m quotients of wild kernels of quadratic fields via the Scholz mirror."""

from __future__ import annotations

from dataclasses import dataclass

from .logarith import log_class_group
from .padic import PrecisionError
from .quadfield import field_init, squarefree_part

ELL = 3


@dataclass(frozen=True)
class WildKernelQuotient:
    d: int
    i: int
    source_field: int
    group: tuple[int, ...]
    note: str = ""

    def to_record(self) -> dict:
        out = {"d": self.d, "i": self.i, "source_field": self.source_field, "group": list(self.group)}
        if self.note:
            out["note"] = self.note
        return out


def reflect(d: int) -> int:
    """d* = squarefree part of -3d (the mirror field)."""
    return squarefree_part(-3 * d)


def wild_kernel_quotient(d: int, i: int) -> WildKernelQuotient:
    """Cl~_3 of Q(sqrt d) for even i, of its mirror Q(sqrt d*) for odd i."""
    if i <= 0:
        raise ValueError("twist i must be positive")
    d = squarefree_part(d)
    if d == 1:
        raise ValueError("d must not be a square")
    if d == -3:
        # Q(sqrt -3) contains mu_3, and its 3-logarithmic class group is trivial
        return WildKernelQuotient(d, i, d, (), "mu_3 in k: quotient trivial for every i")
    src = d if i % 2 == 0 else reflect(d)
    G = log_class_group(field_init(src), ELL)
    if not G.stable:
        raise PrecisionError(f"unstable logarithmic class group for d={src}")
    return WildKernelQuotient(d, i, src, G.invariants)
