"""Partial allocation + envy-cycle completion, with a measured certificate.

A builder produces a partial allocation S. We measure

* ``alpha``: the EFX factor of S,
* ``beta``: min over agents of ``v_i(S_i) / max_{h in pool} v_i(h)``,
* ``gamma``: the EF1 factor of S,

then complete S with plain envy-cycle elimination. The completed allocation
is ``min(alpha, beta / (beta + 1))``-EFX for subadditive valuations, and
EF1 whenever ``gamma == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .core import Allocation, Instance, Value, fmt
from .ece import EcePolicy, run_ece
from .errors import UnknownBuilder, UnsupportedValuation
from .verify import max_alpha_ef1, max_alpha_efx

INF = math.inf

# the completion bound adds v(A - h) and v(h), which needs subadditivity
SUBADDITIVE_KINDS = {"additive", "unit_demand"}

BUILDERS: dict = {}


def register_builder(name: str):
    def deco(fn):
        BUILDERS[name] = fn
        return fn

    return deco


def resolve_builder(name_or_fn) -> Callable[[Instance], Allocation]:
    """Turn ``"name"`` or ``"name:arg"`` into a one-argument builder."""
    if callable(name_or_fn):
        return name_or_fn
    name, _, arg = str(name_or_fn).partition(":")
    try:
        fn = BUILDERS[name]
    except KeyError:
        raise UnknownBuilder(f"unknown builder {name!r}; known: {sorted(BUILDERS)}") from None
    return lambda inst: fn(inst, arg or None)


@dataclass(frozen=True)
class PartialCertificate:
    alpha: Value
    beta: object  # exact rational, or INF when the pool is empty / worthless
    gamma: Value

    @property
    def certified_factor(self) -> Value:
        if self.beta == INF:
            return self.alpha
        b = Fraction(self.beta)
        q = min(Fraction(self.alpha), b / (b + 1))
        return q.numerator if q.denominator == 1 else q

    def to_json(self) -> dict:
        return {
            "alpha": fmt(self.alpha),
            "beta": fmt(self.beta),
            "gamma": fmt(self.gamma),
            "certified_factor": fmt(self.certified_factor),
        }


def pool_domination(inst: Instance, partial: Allocation):
    beta = INF
    if not partial.pool:
        return beta
    for i in range(inst.n):
        top = max(inst.singleton(i, h) for h in partial.pool)
        if top == 0:
            continue
        q = Fraction(inst.value(i, partial.bundles[i])) / Fraction(top)
        q = q.numerator if q.denominator == 1 else q
        if beta == INF or q < beta:
            beta = q
    return beta


def measure_partial(inst: Instance, partial: Allocation) -> PartialCertificate:
    return PartialCertificate(
        max_alpha_efx(inst, partial),
        pool_domination(inst, partial),
        max_alpha_ef1(inst, partial),
    )


def run_framework(inst: Instance, builder, *, trace: list = None):
    """Build, measure, complete. Returns ``(allocation, certificate)``."""
    if not inst.kinds() <= SUBADDITIVE_KINDS:
        raise UnsupportedValuation(
            f"the framework certificate needs subadditive valuations, got {sorted(inst.kinds())}"
        )
    partial = resolve_builder(builder)(inst)
    partial.check_for(inst)
    cert = measure_partial(inst, partial)
    if partial.is_complete:
        return partial, cert
    return run_ece(inst, partial, EcePolicy(), trace=trace), cert


@register_builder("empty")
def _empty_builder(inst, arg=None):
    return Allocation.empty(inst.n, inst.m)


@register_builder("pick-rounds")
def _pick_rounds_builder(inst, arg=None):
    """The first ``n`` pick-your-favourite rounds of envy-cycle elimination."""
    return run_ece(inst, None, EcePolicy.pick_favorite(inst.n), max_rounds=inst.n)
