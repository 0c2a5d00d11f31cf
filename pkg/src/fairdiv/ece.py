"""Envy-cycle elimination with full decycling.

After every round the envy graph is a DAG: cycles are removed one at a time
by rotating bundles backwards along them until none remain.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .core import Allocation, Instance, build_envy_graph
from .errors import InvalidAllocation, NoSourceAfterDecycle


@dataclass(frozen=True)
class EcePolicy:
    """How items are fed to sources.

    During the first ``pick_rounds`` rounds the chosen source (an agent not
    yet served, when one is a source) picks her favourite unallocated item.
    Afterwards items follow ``order`` (default: increasing index).
    """

    order: Optional[tuple] = None
    pick_rounds: int = 0

    @classmethod
    def fixed(cls, order: Sequence[int] = None) -> "EcePolicy":
        return cls(None if order is None else tuple(order), 0)

    @classmethod
    def pick_favorite(cls, rounds: int, order: Sequence[int] = None) -> "EcePolicy":
        return cls(None if order is None else tuple(order), rounds)


PLAIN = EcePolicy()


def favorite_item(inst: Instance, agent: int, items) -> int:
    """Best item by singleton value, lowest index on ties."""
    return min(items, key=lambda g: (-inst.singleton(agent, g), g))


def decycle_counted(inst: Instance, alloc: Allocation):
    """Rotate envy cycles until none is left; return ``(allocation, rotations)``.

    Every rotation strictly raises the welfare of the agents on the cycle and
    leaves everyone else untouched, so this terminates.
    """
    rotations = 0
    while True:
        cycle = build_envy_graph(inst, alloc).find_cycle()
        if cycle is None:
            return alloc, rotations
        alloc = alloc.rotate(cycle)
        rotations += 1


def decycle(inst: Instance, alloc: Allocation) -> Allocation:
    return decycle_counted(inst, alloc)[0]


def run_ece(
    inst: Instance,
    start: Allocation = None,
    policy: EcePolicy = PLAIN,
    *,
    max_rounds: int = None,
    trace: list = None,
    observer: Callable = None,
) -> Allocation:
    """Allocate the pool of ``start`` one item per round to an unenvied agent.

    ``max_rounds`` stops early and returns the partial allocation. ``trace``
    (a list) receives one dict per round; ``observer`` is called with the
    allocation after every round.
    """
    alloc = Allocation.empty(inst.n, inst.m) if start is None else start
    alloc.check_for(inst)
    if policy.order is not None:
        if sorted(policy.order) != sorted(alloc.pool):
            raise InvalidAllocation("item order must be a permutation of the pool")
        queue = list(policy.order)
    else:
        queue = sorted(alloc.pool)
    alloc, _ = decycle_counted(inst, alloc)
    served = set()
    rnd = 0
    while alloc.pool and (max_rounds is None or rnd < max_rounds):
        sources = build_envy_graph(inst, alloc).sources()
        if not sources:
            raise NoSourceAfterDecycle("envy graph has no source after decycling")
        if rnd < policy.pick_rounds:
            fresh = [s for s in sources if s not in served]
            src = fresh[0] if fresh else sources[0]
            served.add(src)
            item = favorite_item(inst, src, alloc.pool)
        else:
            src = sources[0]
            item = next(g for g in queue if g in alloc.pool)
        alloc = alloc.give(src, item)
        alloc, rotations = decycle_counted(inst, alloc)
        if trace is not None:
            trace.append({"round": rnd, "source": src, "item": item, "cycles_rotated": rotations})
        if observer is not None:
            observer(alloc)
        rnd += 1
    return alloc
