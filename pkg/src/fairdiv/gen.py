"""Seeded instance generators, one per structural assumption.

Every generator builds the structure first (top set, tiers, favourites)
and then draws values consistent with it, so no rejection sampling is
needed. Each emitted instance is run through its family's validator before
it is returned.
"""

from __future__ import annotations

import json
import random

from .core import (
    Additive,
    Instance,
    Multiplicative,
    TableValuation,
    UnitDemand,
)
from .errors import FairDivError, InfeasibleParams, InvariantBreach

FAMILIES = (
    "random_additive",
    "random_valuation",
    "common_top_n",
    "identical_top_ranking",
    "bounded_interval",
    "distinct_favorites",
    "tiered",
    "distinct_top_tiers",
)

_MAKERS = {"additive": Additive, "multiplicative": Multiplicative, "unit_demand": UnitDemand}


def _ints(rng, k, lo, hi):
    return [rng.randint(lo, hi) for _ in range(k)]


def _kind_range(kind, lo, hi):
    # factors stay small so products over many items remain readable
    return (1, 10) if kind == "multiplicative" else (lo, hi)


def _random_table(rng, m, hi):
    if m > 12:
        raise InfeasibleParams("table valuations support at most 12 items")
    tab = [0] * (1 << m)
    for mask in range(1, 1 << m):
        base = max(tab[mask & ~(1 << j)] for j in range(m) if mask >> j & 1)
        tab[mask] = base + rng.randint(0, hi)
    return TableValuation(tuple(tab))


def _random_additive(rng, n, m, lo=1, hi=100, **_):
    return Instance(tuple(Additive(tuple(_ints(rng, m, lo, hi))) for _ in range(n)))


def _random_valuation(rng, n, m, kind="additive", lo=1, hi=100, **_):
    if kind == "table":
        return Instance(tuple(_random_table(rng, m, hi) for _ in range(n)))
    if kind not in _MAKERS:
        raise InfeasibleParams(f"unknown valuation kind {kind!r}")
    a, b = _kind_range(kind, lo, hi)
    return Instance(tuple(_MAKERS[kind](tuple(_ints(rng, m, a, b))) for _ in range(n)))


def _top_values(rng, m, top, lo, hi, ordered=None):
    """Per-agent values with every item of ``top`` worth at least every other item."""
    cut = rng.randint(lo, hi)
    vals = [0] * m
    tops = _ints(rng, len(top), cut, hi)
    if ordered is not None:
        tops.sort(reverse=True)
        top = ordered
    for g, v in zip(top, tops):
        vals[g] = v
    for g in range(m):
        if g not in top:
            vals[g] = rng.randint(lo, cut)
    return vals


def _common_top_n(rng, n, m, lo=1, hi=100, **_):
    if m < n:
        raise InfeasibleParams(f"common_top_n needs m >= n (n={n}, m={m})")
    top = sorted(rng.sample(range(m), n))
    rows = [_top_values(rng, m, top, lo, hi) for _ in range(n)]
    inst = Instance.additive(rows)
    return Instance(inst.valuations, hints={"top_set": top})


def _identical_top_ranking(rng, n, m, ell=None, lo=1, hi=100, **_):
    ell = n if ell is None else ell
    if not 1 <= ell <= m:
        raise InfeasibleParams(f"need 1 <= ell <= m (ell={ell}, m={m})")
    order = rng.sample(range(m), ell)
    rows = [_top_values(rng, m, order, lo, hi, ordered=order) for _ in range(n)]
    return Instance(Instance.additive(rows).valuations, hints={"top_order": order})


def _bounded_interval(rng, n, m, ell=None, hi=100, **_):
    ell = n if ell is None else ell
    if not 1 <= ell <= m:
        raise InfeasibleParams(f"need 1 <= ell <= m (ell={ell}, m={m})")
    top = set(rng.sample(range(m), ell))
    rows = []
    for _ in range(n):
        x = rng.randint(1, max(1, hi // 2))
        rows.append([rng.randint(x, 2 * x) if g in top else rng.randint(1, x) for g in range(m)])
    return Instance(Instance.additive(rows).valuations, hints={"top_set": sorted(top)})


def _distinct_favorites(rng, n, m, lo=1, hi=100, **_):
    if m < 2 * n:
        raise InfeasibleParams(f"distinct_favorites needs m >= 2n (n={n}, m={m})")
    favs = rng.sample(range(m), n)
    rows = []
    for f in favs:
        row = _ints(rng, m, lo, hi - 1)
        row[f] = hi
        rows.append(row)
    return Instance(Instance.additive(rows).valuations, hints={"favorites": favs})


def _tier_sizes(rng, m, max_size):
    sizes = []
    while sum(sizes) < m:
        sizes.append(min(rng.randint(1, max_size), m - sum(sizes)))
    return sizes


def _tiered(rng, n, m, max_tier_size=3, kind="additive", lo=1, hi=100, **_):
    if not 1 <= max_tier_size:
        raise InfeasibleParams("max_tier_size must be >= 1")
    if kind not in _MAKERS:
        raise InfeasibleParams(f"unknown valuation kind {kind!r}")
    items = list(range(m))
    rng.shuffle(items)
    tiers, start = [], 0
    for size in _tier_sizes(rng, m, max_tier_size):
        tiers.append(items[start : start + size])
        start += size
    a, b = _kind_range(kind, lo, hi)
    vals_out = []
    for _ in range(n):
        vals = sorted(_ints(rng, m, a, b), reverse=True)
        row = [0] * m
        pos = 0
        for tier in tiers:
            chunk = vals[pos : pos + len(tier)]
            rng.shuffle(chunk)
            for g, v in zip(tier, chunk):
                row[g] = v
            pos += len(tier)
        vals_out.append(_MAKERS[kind](tuple(row)))
    return Instance(tuple(vals_out), hints={"tiers": [sorted(t) for t in tiers]})


def _distinct_top_tiers(rng, n, m, kind="additive", hi=100, **_):
    k = m // n
    if k == 0:
        raise InfeasibleParams(f"distinct_top_tiers needs m >= n (n={n}, m={m})")
    if kind not in ("additive", "multiplicative"):
        raise InfeasibleParams("distinct_top_tiers supports additive and multiplicative values")
    items = list(range(m))
    rng.shuffle(items)
    tops = [set(items[i * k : (i + 1) * k]) for i in range(n)]
    low, high = ((1, 5), (6, 10)) if kind == "multiplicative" else ((1, hi // 2), (hi // 2 + 1, hi))
    rows = []
    for i in range(n):
        rows.append(
            _MAKERS[kind](tuple(rng.randint(*high) if g in tops[i] else rng.randint(*low) for g in range(m)))
        )
    return Instance(tuple(rows), hints={"top_tiers": [sorted(t) for t in tops]})


_GENERATORS = {
    "random_additive": _random_additive,
    "random_valuation": _random_valuation,
    "common_top_n": _common_top_n,
    "identical_top_ranking": _identical_top_ranking,
    "bounded_interval": _bounded_interval,
    "distinct_favorites": _distinct_favorites,
    "tiered": _tiered,
    "distinct_top_tiers": _distinct_top_tiers,
}


def validate(family: str, inst: Instance, params: dict) -> None:
    """Raise if ``inst`` lacks the structure ``family`` promises."""
    from .tiers import detect_tiers, solve_distinct_top_tiers
    from .topn import common_top_order, common_top_set, distinct_favorites, interval_check

    n = inst.n
    if family == "common_top_n":
        common_top_set(inst, n)
    elif family == "identical_top_ranking":
        common_top_order(inst, params.get("ell") or n)
    elif family == "bounded_interval":
        interval_check(inst, params.get("ell") or n)
    elif family == "distinct_favorites":
        distinct_favorites(inst)
    elif family == "tiered":
        size = detect_tiers(inst).size
        if size > params.get("max_tier_size", 3):
            raise InvariantBreach(f"generated tiers have size {size}")
    elif family == "distinct_top_tiers":
        solve_distinct_top_tiers(inst)


def generate(family: str, params: dict = None, seed: int = 0) -> Instance:
    """Deterministic instance for ``(family, params, seed)``.

    ``params`` holds ``n`` and ``m`` plus family-specific keys: ``lo``,
    ``hi`` (integer value range), ``ell``, ``kind``, ``max_tier_size``.
    """
    params = dict(params or {})
    try:
        fn = _GENERATORS[family]
    except KeyError:
        raise InfeasibleParams(f"unknown family {family!r}; known: {FAMILIES}") from None
    n, m = params.get("n"), params.get("m")
    if not isinstance(n, int) or not isinstance(m, int) or n < 1 or m < 1:
        raise InfeasibleParams(f"need integer n >= 1 and m >= 1, got n={n!r}, m={m!r}")
    rng = random.Random(f"{family}:{seed}")
    inst = fn(rng, **params)
    try:
        validate(family, inst, params)
    except FairDivError as exc:
        raise InvariantBreach(f"generator {family} produced an invalid instance: {exc}") from exc
    hints = dict(inst.hints, family=family)
    return Instance(inst.valuations, hints=hints)


def dumps(inst: Instance) -> str:
    return json.dumps(inst.to_json(), sort_keys=True)
