"""Fairness verifiers: EF, EF1, EFX and their multiplicative relaxations.

Every comparison is exact. Partial allocations are judged on their bundles
only; the unallocated pool is invisible here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import Allocation, Instance, Value, exact, fmt


def _ratio(num, den) -> Value:
    q = Fraction(num) / Fraction(den)
    return q.numerator if q.denominator == 1 else q


@dataclass(frozen=True)
class FairnessProperty:
    kind: str  # "EF", "EF1", "EFX", "alpha-EF", "alpha-EFX"
    alpha: Value = 1

    def __post_init__(self):
        if self.kind not in ("EF", "EF1", "EFX", "alpha-EF", "alpha-EFX"):
            raise ValueError(f"unknown fairness property {self.kind!r}")
        a = exact(self.alpha)
        if a > 1:
            raise ValueError("alpha must lie in [0, 1]")
        object.__setattr__(self, "alpha", a)


EF = FairnessProperty("EF")
EF1 = FairnessProperty("EF1")
EFX = FairnessProperty("EFX")


def alpha_ef(alpha) -> FairnessProperty:
    return FairnessProperty("alpha-EF", alpha)


def alpha_efx(alpha) -> FairnessProperty:
    return FairnessProperty("alpha-EFX", alpha)


@dataclass
class FairnessReport:
    verdict: bool
    witnesses: list = field(default_factory=list)
    certified_alpha: Value = 1

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "alpha": fmt(self.certified_alpha),
            "witnesses": [list(w) for w in self.witnesses],
        }


def check_fairness(inst: Instance, alloc: Allocation, prop: FairnessProperty) -> FairnessReport:
    """Decide ``prop`` for ``alloc``.

    Witnesses are ``(i, j, g)`` triples for the EFX family (one per failing
    item) and ``(i, j, None)`` for EF and EF1, sorted.
    """
    A = alloc.bundles
    witnesses = []
    kind = prop.kind
    alpha = 1 if kind in ("EF", "EFX") else prop.alpha
    for i in range(inst.n):
        own = inst.value(i, A[i])
        for j in range(inst.n):
            if j == i:
                continue
            Aj = A[j]
            if kind in ("EF", "alpha-EF"):
                if own < alpha * inst.value(i, Aj):
                    witnesses.append((i, j, None))
            elif kind == "EF1":
                if Aj and all(own < inst.value(i, Aj - {g}) for g in Aj):
                    witnesses.append((i, j, None))
            else:
                for g in sorted(Aj):
                    if own < alpha * inst.value(i, Aj - {g}):
                        witnesses.append((i, j, g))
    return FairnessReport(not witnesses, witnesses, max_alpha_efx(inst, alloc))


def is_efx(inst: Instance, alloc: Allocation, alpha=1) -> bool:
    """Fast boolean EFX test (no witness collection)."""
    A = alloc.bundles
    for i in range(inst.n):
        own = inst.value(i, A[i])
        for j in range(inst.n):
            if j != i:
                Aj = A[j]
                if len(Aj) > 1:
                    for g in Aj:
                        if own < alpha * inst.value(i, Aj - {g}):
                            return False
    return True


def max_alpha_efx(inst: Instance, alloc: Allocation) -> Value:
    """Largest ``alpha`` in ``[0, 1]`` for which ``alloc`` is alpha-EFX."""
    A = alloc.bundles
    best = 1
    for i in range(inst.n):
        own = inst.value(i, A[i])
        for j in range(inst.n):
            if j == i:
                continue
            for g in A[j]:
                w = inst.value(i, A[j] - {g})
                if w > 0 and own < best * w:
                    best = _ratio(own, w)
    return best


def max_alpha_ef(inst: Instance, alloc: Allocation) -> Value:
    A = alloc.bundles
    best = 1
    for i in range(inst.n):
        own = inst.value(i, A[i])
        for j in range(inst.n):
            if j != i:
                w = inst.value(i, A[j])
                if w > 0 and own < best * w:
                    best = _ratio(own, w)
    return best


def max_alpha_ef1(inst: Instance, alloc: Allocation) -> Value:
    """Largest ``gamma`` for which every pair is gamma-EF1."""
    A = alloc.bundles
    best = 1
    for i in range(inst.n):
        own = inst.value(i, A[i])
        for j in range(inst.n):
            if j == i or not A[j]:
                continue
            w = min(inst.value(i, A[j] - {g}) for g in A[j])
            if w > 0 and own < best * w:
                best = _ratio(own, w)
    return best


def strong_envy_pairs(inst: Instance, alloc: Allocation) -> list:
    """Pairs ``(i, j)`` where ``i`` violates the EFX condition toward ``j``."""
    A = alloc.bundles
    out = []
    for i in range(inst.n):
        own = inst.value(i, A[i])
        for j in range(inst.n):
            if j != i and any(own < inst.value(i, A[j] - {g}) for g in A[j]):
                out.append((i, j))
    return out
