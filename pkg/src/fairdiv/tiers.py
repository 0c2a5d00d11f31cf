"""Exact EFX under a common tiered ranking, and under distinct top tiers.

The tier solver allocates one tier at a time while keeping two invariants
between tiers: the partial allocation is EFX and its envy graph is a DAG.
Within a tier it dispatches on the number of sources of the envy graph:

* three or more sources (case ``"1"``): each takes one item;
* one source (``"2a"`` / ``"2b"``): either the source can absorb several
  items, or items flow to level-1 agents once the source stops envying
  them, possibly after rotating an envy cycle through the source;
* two sources (``"3a"`` / ``"3b"`` / ``"3c"``): classified by where the
  agents who would envy a source after it receives an item sit relative to
  the parts of the graph reachable from one or both sources.

Each case first tries its prescribed moves, then a depth-first search over
"give a remaining tier item to a source, then decycle" steps ordered by the
case. Every step is checked for EFX. If all of that fails, a bounded
breadth-first search over raw moves (assign an item to anyone, rotate any
envy cycle) takes over; its activations are counted and logged because the
case analysis is expected to suffice.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from dataclasses import dataclass, field

from .core import (
    Allocation,
    Instance,
    build_envy_graph,
    check_cancelable,
    envy_levels,
)
from .ece import decycle_counted
from .errors import (
    InvariantBreach,
    NotDistinctTiers,
    PreconditionError,
    TierExtensionNotFound,
    TooLarge,
    UnsupportedValuation,
)
from .verify import is_efx, strong_envy_pairs

log = logging.getLogger(__name__)

CANCELABLE_KINDS = {"additive", "multiplicative", "unit_demand"}
FALLBACK_STATE_CAP = 200_000


@dataclass(frozen=True)
class TierPartition:
    tiers: tuple  # of frozensets, best tier first

    @property
    def size(self) -> int:
        return max(len(t) for t in self.tiers)

    def to_json(self) -> list:
        return [sorted(t) for t in self.tiers]


def detect_tiers(inst: Instance) -> TierPartition:
    """Finest common tier partition found along one consistent item order.

    Items are sorted by agent 0's singleton values (ties broken by the other
    agents' values, then by index); a cut after each prefix is kept when
    every agent values each prefix item at least as much as each suffix item.
    """
    m = inst.m
    order = sorted(
        inst.items, key=lambda g: (tuple(-inst.singleton(i, g) for i in range(inst.n)), g)
    )
    cut_ok = [True] * m
    for i in range(inst.n):
        vals = [inst.singleton(i, g) for g in order]
        pre_min = list(itertools.accumulate(vals, min))
        suf_max = list(itertools.accumulate(reversed(vals), max))[::-1]
        for p in range(1, m):
            if pre_min[p - 1] < suf_max[p]:
                cut_ok[p] = False
    tiers, start = [], 0
    for p in range(1, m + 1):
        if p == m or cut_ok[p]:
            tiers.append(frozenset(order[start:p]))
            start = p
    return TierPartition(tuple(tiers))


@dataclass
class TierStats:
    cases: dict = field(default_factory=dict)
    fallbacks: int = 0
    rotations: int = 0

    def record(self, case: str) -> None:
        self.cases[case] = self.cases.get(case, 0) + 1


def _efx_toward(inst: Instance, alloc: Allocation, a: int) -> bool:
    """EFX of everyone toward agent ``a`` (the only pairs a gift to ``a`` can break)."""
    Aa = alloc.bundles[a]
    if len(Aa) < 2:
        return True
    for i in range(inst.n):
        if i != a:
            own = inst.value(i, alloc.bundles[i])
            for g in Aa:
                if own < inst.value(i, Aa - {g}):
                    return False
    return True


class _Tier:
    """Search context for allocating one tier."""

    def __init__(self, inst: Instance, items: frozenset):
        self.inst = inst
        self.items = items
        self.seen = set()
        self.restart_cap = None

    def remaining(self, alloc):
        return sorted(alloc.pool & self.items)

    def pref(self, agent, items):
        return sorted(items, key=lambda g: (-self.inst.singleton(agent, g), g))

    def give(self, alloc, agent, *items):
        """Give items to ``agent``; ``None`` if that breaks EFX toward her."""
        nxt = alloc.give(agent, *items)
        return nxt if _efx_toward(self.inst, nxt, agent) else None

    def fresh(self, alloc, agent):
        return not alloc.bundles[agent] & self.items

    def default_moves(self, alloc):
        rem = self.remaining(alloc)
        srcs = build_envy_graph(self.inst, alloc).sources()
        srcs.sort(key=lambda s: (not self.fresh(alloc, s), s))
        return [(s, g) for s in srcs for g in self.pref(s, rem)]

    def search(self, alloc, first=None, rotations=0):
        """Depth-first over give-to-source steps; returns ``(alloc, rotations)``."""
        if not self.remaining(alloc):
            return (alloc, rotations) if is_efx(self.inst, alloc) else None
        key = alloc.bundles
        if first is None:
            if key in self.seen:
                return None
            self.seen.add(key)
        moves = self.default_moves(alloc) if first is None else first
        for agent, g in moves:
            if g not in alloc.pool:
                continue
            nxt = self.give(alloc, agent, g)
            if nxt is None:
                continue
            nxt, rot = decycle_counted(self.inst, nxt)
            res = self.search(nxt, None, rotations + rot)
            if res is not None:
                return res
        return None

    def finish(self, alloc, rotations=0):
        """Decycle a state that already holds the whole tier."""
        if self.remaining(alloc) or not is_efx(self.inst, alloc):
            return None
        alloc, rot = decycle_counted(self.inst, alloc)
        return alloc, rotations + rot


def _case1(t: _Tier, alloc, sources):
    for s in sources:
        rem = t.remaining(alloc)
        if not rem:
            break
        alloc = alloc.give(s, t.pref(s, rem)[0])
    return t.finish(alloc)


def _case2(t: _Tier, alloc, graph):
    inst = t.inst
    s1 = graph.sources()[0]
    rem = t.remaining(alloc)
    levels = envy_levels(graph)
    level1 = sorted(
        (a for a in range(inst.n) if levels[a] == 1),
        key=lambda a: (inst.value(s1, alloc.bundles[a]), a),
    )

    # 2a: the source absorbs several items
    everything = t.give(alloc, s1, *rem)
    if everything is not None:
        res = t.finish(everything)
        if res:
            return res, "2a"
    if len(rem) == 3:
        pairs = sorted(
            itertools.combinations(rem, 2),
            key=lambda p: (-inst.value(s1, alloc.bundles[s1] | set(p)), p),
        )
        for a, b in pairs:
            st = t.give(alloc, s1, a, b)
            if st is None:
                continue
            (c,) = set(rem) - {a, b}
            if level1 and inst.value(s1, st.bundles[s1]) >= inst.value(s1, alloc.bundles[level1[0]]):
                st2 = t.give(st, level1[0], c)
                res = st2 and t.finish(st2)
            else:
                st2, rot = decycle_counted(inst, st)
                res = t.search(st2, None, rot)
            if res:
                return res, "2a"

    # 2b: one item to the source, the rest to level-1 agents or new sources
    order = t.pref(s1, rem)
    if level1:
        fav_o1 = t.pref(level1[0], rem)[0]
        order = [order[0], fav_o1] + [g for g in order[1:] if g != fav_o1]
        order = list(dict.fromkeys(order))
    for a in order:
        st = t.give(alloc, s1, a)
        if st is None:
            continue
        rest = [g for g in rem if g != a]
        if len(level1) >= 2 and inst.value(s1, st.bundles[s1]) >= inst.value(
            s1, alloc.bundles[level1[1]]
        ):
            for perm in itertools.permutations(rest):
                st2 = st
                for o, g in zip(level1[:2], perm):
                    st2 = st2 and t.give(st2, o, g)
                res = st2 and t.finish(st2)
                if res:
                    return res, "2b"
        st2, rot = decycle_counted(inst, st)
        res = t.search(st2, None, rot)
        if res:
            return res, "2b"
    return None


def _case3(t: _Tier, alloc, graph):
    inst = t.inst
    s1, s2 = graph.sources()[:2]
    rem = t.remaining(alloc)
    r1, r2 = graph.reachable_from(s1), graph.reachable_from(s2)
    V1, V2 = r1 - r2, r2 - r1

    # a source absorbs two items and the other source takes the last one
    for s, o in ((s1, s2), (s2, s1)):
        for a, b in itertools.combinations(t.pref(s, rem), 2):
            st = t.give(alloc, s, a, b)
            if st is None:
                continue
            (c,) = set(rem) - {a, b}
            st = t.give(st, o, c)
            res = st and t.finish(st)
            if res:
                return res, "3a"

    def envious_after(s, g):
        return set(build_envy_graph(inst, alloc.give(s, g)).predecessors(s))

    f1, f2 = t.pref(s1, rem)[0], t.pref(s2, rem)[0]
    T1, T2 = envious_after(s1, f1), envious_after(s2, f2)
    if not T1 or not T2 or T1 & V1 or T2 & V2:
        case = "3a"
        lead = s1 if (not T1 or T1 & V1) else s2
        first = [(lead, g) for g in t.pref(lead, rem)]
        other = s2 if lead == s1 else s1
        first += [(other, g) for g in t.pref(other, rem)]
    elif T1 & ({s2} | V2) or T2 & ({s1} | V1):
        case = "3b"
        first = [(s1, g) for g in t.pref(s1, rem)] + [(s2, g) for g in t.pref(s2, rem)]
    else:
        case = "3c"
        levels = envy_levels(graph)
        scored = []
        for s in (s1, s2):
            for g in rem:
                env = envious_after(s, g)
                depth = max((levels[e] for e in env), default=-1)
                scored.append((-depth, s, g))
        scored.sort()
        first = [(s, g) for _, s, g in scored][: inst.n]
    res = t.search(alloc, first)
    if res:
        return res, case
    return None


def _fallback(t: _Tier, alloc):
    """Breadth-first search over raw moves; first EFX completion wins."""
    inst = t.inst
    k = len(t.remaining(alloc))
    max_depth = 2 * k + inst.n
    start = (alloc, 0)
    seen = {alloc.bundles}
    queue = deque([(start, 0)])
    while queue:
        (st, rot), depth = queue.popleft()
        rem = t.remaining(st)
        if not rem and is_efx(inst, st):
            return decycle_counted(inst, st)[0], rot
        if depth == max_depth:
            continue
        succ = []
        for g in rem:
            for a in range(inst.n):
                succ.append((st.give(a, g), rot))
        for cyc in build_envy_graph(inst, st).simple_cycles():
            succ.append((st.rotate(cyc), rot + 1))
        for nxt in succ:
            if nxt[0].bundles not in seen:
                seen.add(nxt[0].bundles)
                if len(seen) > FALLBACK_STATE_CAP:
                    return None
                queue.append((nxt, depth + 1))
    return None


def extend_tier(inst: Instance, alloc: Allocation, items: frozenset, stats: TierStats = None):
    """Allocate ``items`` on top of an EFX partial allocation, keeping EFX.

    Returns ``(allocation, case, rotations)``; the allocation is decycled.
    """
    alloc, rot0 = decycle_counted(inst, alloc)
    t = _Tier(inst, frozenset(items))
    graph = build_envy_graph(inst, alloc)
    sources = graph.sources()
    k = len(t.remaining(alloc))
    if len(sources) >= k:
        res, case = _case1(t, alloc, sources), "1"
    elif len(sources) == 1:
        res, case = _case2(t, alloc, graph) or (None, None)
    else:
        res, case = _case3(t, alloc, graph) or (None, None)
    if res is None:
        log.warning("tier %s: case analysis found no extension; running fallback search", sorted(items))
        res, case = _fallback(t, alloc), "fallback"
        if stats is not None:
            stats.fallbacks += 1
        if res is None:
            raise TierExtensionNotFound(
                f"no EFX extension found for tier {sorted(items)}",
                state={"bundles": alloc.to_json(), "tier": sorted(items)},
            )
    out, rot = res
    if stats is not None:
        stats.record(case)
        stats.rotations += rot0 + rot
    return out, case, rot0 + rot


def check_tiered_hypothesis(inst: Instance) -> TierPartition:
    if inst.n < 3:
        raise PreconditionError(
            f"the tiered solver assumes n >= 3 agents (got n={inst.n}); "
            "use the exhaustive exact search for two agents"
        )
    for i, v in enumerate(inst.valuations):
        if v.kind not in CANCELABLE_KINDS:
            ok, witness = check_cancelable(v)
            if not ok:
                raise UnsupportedValuation(f"valuation of agent {i} is not cancelable: {witness}")
    part = detect_tiers(inst)
    if part.size > 3:
        raise PreconditionError(f"common tiered ranking has size {part.size} > 3")
    return part


def solve_tiered(inst: Instance, *, trace: list = None, stats: TierStats = None) -> Allocation:
    """Exact EFX allocation for cancelable valuations with tiers of size <= 3."""
    part = check_tiered_hypothesis(inst)
    alloc = Allocation.empty(inst.n, inst.m)
    for k, tier in enumerate(part.tiers):
        alloc, case, rotations = extend_tier(inst, alloc, tier, stats)
        if strong_envy_pairs(inst, alloc):
            raise InvariantBreach(f"tier {k}: allocation is not EFX after extension")
        envy_levels(build_envy_graph(inst, alloc))  # raises on a cycle
        if trace is not None:
            trace.append({"tier": k, "case": case, "rotations": rotations})
    return alloc


# --------------------------------------------------------------------------
# distinct top tiers

_SUBSET_CAP = 200_000


def favorite_tier(inst: Instance, agent: int, k: int) -> frozenset:
    """The unique most valuable ``k``-item bundle of ``agent``.

    Raises :class:`NotDistinctTiers` when the best ``k``-set is not unique.
    """
    v = inst.valuations[agent]
    m = inst.m
    if v.kind in ("additive", "multiplicative"):
        order = sorted(range(m), key=lambda g: (-v.singleton(g), g))
        if k < m and v.singleton(order[k - 1]) == v.singleton(order[k]):
            raise NotDistinctTiers(f"agent {agent} has no strict top-{k} set")
        return frozenset(order[:k])
    if math.comb(m, k) > _SUBSET_CAP:
        raise TooLarge(f"C({m},{k}) subsets is too many to search")
    best, best_val, tie = None, None, False
    for c in itertools.combinations(range(m), k):
        val = v.value(c)
        if best_val is None or val > best_val:
            best, best_val, tie = frozenset(c), val, False
        elif val == best_val:
            tie = True
    if tie:
        raise NotDistinctTiers(f"agent {agent} has no unique favourite {k}-set")
    return best


def solve_distinct_top_tiers(inst: Instance) -> Allocation:
    """Each agent gets her favourite ``m // n`` items; leftovers go one each to the first agents."""
    n, m = inst.n, inst.m
    k = m // n
    if k == 0:
        raise PreconditionError(f"distinct top tiers need m >= n (got n={n}, m={m})")
    tops = [favorite_tier(inst, i, k) for i in range(n)]
    for a, b in itertools.combinations(range(n), 2):
        if tops[a] & tops[b]:
            raise NotDistinctTiers(f"agents {a} and {b} have overlapping top tiers")
    bundles = [set(t) for t in tops]
    leftovers = sorted(set(range(m)).difference(*tops))
    for i, g in enumerate(leftovers):
        bundles[i].add(g)
    return Allocation.from_bundles(bundles, m)
