"""Approximate EFX when agents agree on (part of) what the best items are.

All solvers here are builders for :mod:`fairdiv.framework`: they produce a
partial allocation of the top items, and the framework finishes the job
with envy-cycle elimination and certifies the result from measured values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .core import Allocation, Instance
from .ece import EcePolicy, favorite_item, run_ece
from .errors import (
    BuilderPostconditionFailed,
    NotBoundedInterval,
    NotCommon,
    NotCommonOrder,
    NotDistinctFavorites,
    PreconditionError,
    UnsupportedValuation,
)
from .framework import register_builder, run_framework
from .verify import is_efx


def _require_additive(inst: Instance, what: str) -> None:
    if not inst.is_additive():
        raise UnsupportedValuation(f"{what} requires additive valuations, got {sorted(inst.kinds())}")


def common_top_set(inst: Instance, ell: int) -> frozenset:
    """A size-``ell`` item set that is a top-``ell`` set for every agent.

    A set qualifies for an agent when its worst item is worth at least her
    best item outside it, so ties at the boundary leave a choice; the
    lowest-index choice is returned. Raises :class:`NotCommon` when no
    common set exists.

    >>> sorted(common_top_set(Instance.additive([(10, 9, 5, 1), (9, 10, 2, 2)]), 2))
    [0, 1]
    """
    _require_additive(inst, "common_top_set")
    if not 1 <= ell <= inst.m:
        raise PreconditionError(f"need 1 <= ell <= m, got ell={ell}, m={inst.m}")
    must, allowed = set(), set(inst.items)
    for i in range(inst.n):
        vals = [inst.singleton(i, g) for g in inst.items]
        cut = sorted(vals, reverse=True)[ell - 1]
        must |= {g for g in inst.items if vals[g] > cut}
        allowed &= {g for g in inst.items if vals[g] >= cut}
    if not must <= allowed or len(allowed) < ell:
        raise NotCommon(f"agents do not share a top-{ell} set")
    extra = sorted(allowed - must)[: ell - len(must)]
    return frozenset(must | set(extra))


# --------------------------------------------------------------------------
# common top-n set: 2/3-EFX


@dataclass
class TopSplit:
    """Bookkeeping of the top-n partial construction, for inspection in tests."""

    top: frozenset
    bottom: frozenset
    best: list = field(default_factory=list)  # h_i
    worst_top: list = field(default_factory=list)  # g1_i
    best_bottom: list = field(default_factory=list)  # g2_i, None when the bottom ran dry
    content: list = field(default_factory=list)


def top_n_partial(inst: Instance, content_test: str = "sequential"):
    """Partial allocation of the common top-n set; returns ``(partial, split)``.

    Agents are processed in index order. A *content* agent takes her best
    remaining top item; a non-content agent takes her best remaining bottom
    item now and one leftover top item at the end. ``content_test`` selects
    whether the threshold compares against the current (shrinking) sets
    (``"sequential"``) or against the initial ones (``"initial"``).
    """
    _require_additive(inst, "top-n")
    n, m = inst.n, inst.m
    if m <= n:
        raise PreconditionError(f"top-n needs m > n (got n={n}, m={m})")
    T0 = common_top_set(inst, n)
    B0 = frozenset(inst.items) - T0
    split = TopSplit(T0, B0)
    T, B = set(T0), set(B0)
    bundles = [set() for _ in range(n)]
    for i in range(n):
        v = lambda g: inst.singleton(i, g)  # noqa: E731
        h = min(T, key=lambda g: (-v(g), g))
        g1 = min(T, key=lambda g: (v(g), g))
        g2 = min(B, key=lambda g: (-v(g), g)) if B else None
        if content_test == "initial":
            th = max(v(g) for g in T0)
            tg1 = min(v(g) for g in T0)
            tg2 = max(v(g) for g in B0)
            non_content = g2 is not None and 3 * (tg1 + tg2) >= 2 * th
        else:
            non_content = g2 is not None and 3 * (v(g1) + v(g2)) >= 2 * v(h)
        split.best.append(h)
        split.worst_top.append(g1)
        split.best_bottom.append(g2)
        split.content.append(not non_content)
        if non_content:
            bundles[i].add(g2)
            B.discard(g2)
        else:
            bundles[i].add(h)
            T.discard(h)
    leftovers = sorted(T)
    for i in range(n):
        if not split.content[i]:
            bundles[i].add(leftovers.pop(0))
    return Allocation.from_bundles(bundles, m), split


@register_builder("top-n")
def _top_n_builder(inst, arg=None):
    return top_n_partial(inst)[0]


def solve_top_n(inst: Instance, *, trace: list = None):
    """2/3-EFX (and EF1) allocation under a common top-n set."""
    return run_framework(inst, "top-n", trace=trace)


# --------------------------------------------------------------------------
# shared rankings, bounded values, distinct favourites


def _ell(arg, inst) -> int:
    if arg is None:
        raise PreconditionError("this builder needs a parameter, e.g. 'relaxed-top:4'")
    try:
        ell = int(arg)
    except ValueError:
        raise PreconditionError(f"bad parameter {arg!r}") from None
    if not 1 <= ell <= inst.m:
        raise PreconditionError(f"need 1 <= ell <= m, got ell={ell}, m={inst.m}")
    return ell


def common_top_order(inst: Instance, ell: int) -> list:
    """Top-``ell`` items in an order every agent weakly agrees with."""
    try:
        top = common_top_set(inst, ell)
    except NotCommon as exc:
        raise NotCommonOrder(str(exc)) from None
    key = lambda g: tuple(-inst.singleton(i, g) for i in range(inst.n))  # noqa: E731
    order = sorted(top, key=lambda g: (key(g), g))
    for i in range(inst.n):
        vals = [inst.singleton(i, g) for g in order]
        if any(a < b for a, b in zip(vals, vals[1:])):
            raise NotCommonOrder(f"agents rank the top-{ell} items differently")
    return order


def relaxed_top_partial(inst: Instance, ell: int) -> Allocation:
    """Envy-cycle elimination over the commonly ranked top items, best first."""
    _require_additive(inst, "relaxed-top")
    order = common_top_order(inst, ell)
    rest = sorted(set(inst.items) - set(order))
    partial = run_ece(inst, None, EcePolicy.fixed(order + rest), max_rounds=ell)
    if not is_efx(inst, partial):
        raise BuilderPostconditionFailed("identical-ranking partial allocation is not EFX")
    return partial


def interval_check(inst: Instance, ell: int) -> None:
    """Every agent's ``ell`` best values must fit in some ``[x, 2x]`` with ``x > 0``."""
    for i in range(inst.n):
        top = sorted((inst.singleton(i, g) for g in inst.items), reverse=True)[:ell]
        if top[-1] <= 0 or top[0] > 2 * top[-1]:
            raise NotBoundedInterval(
                f"agent {i}: top-{ell} values span [{top[-1]}, {top[0]}], not within [x, 2x]"
            )


def bounded_interval_partial(inst: Instance, ell: int) -> Allocation:
    """``ell // n`` round-robin rounds, agents picking favourites in index order."""
    _require_additive(inst, "bounded-interval")
    interval_check(inst, ell)
    alloc = Allocation.empty(inst.n, inst.m)
    for _ in range(ell // inst.n):
        for i in range(inst.n):
            alloc = alloc.give(i, favorite_item(inst, i, alloc.pool))
    if not is_efx(inst, alloc):
        raise BuilderPostconditionFailed("round-robin partial allocation is not EFX")
    return alloc


def distinct_favorites(inst: Instance) -> list:
    favs = []
    for i in range(inst.n):
        vals = [inst.singleton(i, g) for g in inst.items]
        top = max(vals)
        if vals.count(top) > 1:
            raise NotDistinctFavorites(f"agent {i} has no unique favourite item")
        favs.append(vals.index(top))
    if len(set(favs)) < len(favs):
        raise NotDistinctFavorites("two agents share a favourite item")
    return favs


def distinct_favorites_partial(inst: Instance) -> Allocation:
    """Everyone takes her favourite, then ``n`` pick-your-favourite rounds."""
    _require_additive(inst, "distinct-favorites")
    if inst.m < 2 * inst.n:
        raise PreconditionError(f"distinct-favorites needs m >= 2n (got n={inst.n}, m={inst.m})")
    favs = distinct_favorites(inst)
    start = Allocation.from_bundles([[f] for f in favs], inst.m)
    return run_ece(inst, start, EcePolicy.pick_favorite(inst.n), max_rounds=inst.n)


@register_builder("relaxed-top")
def _relaxed_top_builder(inst, arg=None):
    return relaxed_top_partial(inst, _ell(arg, inst))


@register_builder("bounded-interval")
def _bounded_interval_builder(inst, arg=None):
    return bounded_interval_partial(inst, _ell(arg, inst))


@register_builder("distinct-favorites")
def _distinct_favorites_builder(inst, arg=None):
    return distinct_favorites_partial(inst)


def solve_relaxed_top_ranking(inst: Instance, ell: int, *, trace: list = None):
    return run_framework(inst, f"relaxed-top:{ell}", trace=trace)


def solve_bounded_interval(inst: Instance, ell: int, *, trace: list = None):
    return run_framework(inst, f"bounded-interval:{ell}", trace=trace)


def solve_distinct_favorites(inst: Instance, *, trace: list = None):
    return run_framework(inst, "distinct-favorites", trace=trace)


def guaranteed_factor(n: int, ell: int):
    """``k / (k + 1)`` with ``k = ell // n``."""
    k = ell // n
    q = Fraction(k, k + 1)
    return q.numerator if q.denominator == 1 else q
