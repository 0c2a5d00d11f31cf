"""Brute-force ground truth for small instances.

Allocations are enumerated as assignment vectors ``(a_0, ..., a_{m-1})`` in
lexicographic order, where ``a_g`` is the agent holding item ``g`` (or ``n``
for the pool when partial allocations are requested).
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterator

from .core import Allocation, Instance
from .errors import TooLarge
from .verify import is_efx, max_alpha_efx

ENUMERATION_GUARD = 10**8


def _guard(owners: int, m: int) -> None:
    if owners**m > ENUMERATION_GUARD:
        raise TooLarge(f"{owners}^{m} assignments exceed the guard of {ENUMERATION_GUARD}")


def _from_assignment(assign, n: int, m: int) -> Allocation:
    bundles = [[] for _ in range(n)]
    pool = []
    for g, a in enumerate(assign):
        (bundles[a] if a < n else pool).append(g)
    return Allocation(tuple(frozenset(b) for b in bundles), frozenset(pool))


def enumerate_allocations(n: int, m: int, include_partial: bool = False) -> Iterator[Allocation]:
    """All allocations of ``m`` items to ``n`` agents, in lexicographic order.

    >>> sum(1 for _ in enumerate_allocations(3, 3))
    27
    """
    owners = n + 1 if include_partial else n
    _guard(owners, m)
    for assign in itertools.product(range(owners), repeat=m):
        yield _from_assignment(assign, n, m)


def _upper_bound(inst: Instance, bundles, rest: frozenset, cap):
    """Upper bound on the EFX factor of any completion of a partial assignment.

    Completions can only add ``rest`` to agent i's bundle and can only grow
    ``A_j - g``, so ``v_i(A_i + rest) / v_i(A_j - g)`` bounds every triple.
    Stops as soon as the bound drops to ``cap``.
    """
    bound = 1
    for i in range(inst.n):
        top = inst.value(i, bundles[i] | rest)
        for j in range(inst.n):
            if j != i:
                for g in bundles[j]:
                    w = inst.value(i, bundles[j] - {g})
                    if w > 0 and top < bound * w:
                        bound = Fraction(top) / Fraction(w)
                        if cap is not None and bound <= cap:
                            return bound
    return bound


def _search(inst: Instance, keep, score) -> None:
    """Depth-first walk over assignments in lexicographic order.

    ``keep(bundles, rest)`` decides whether a subtree is worth entering;
    ``score(allocation)`` returns True to stop the walk.
    """
    n, m = inst.n, inst.m
    bundles = [frozenset()] * n

    def rec(g):
        if g == m:
            return score(Allocation(tuple(bundles), frozenset()))
        rest = frozenset(range(g + 1, m))
        for a in range(n):
            old = bundles[a]
            bundles[a] = old | {g}
            stop = keep(bundles, rest) and rec(g + 1)
            bundles[a] = old
            if stop:
                return True
        return False

    rec(0)


def best_alpha_efx(inst: Instance, prune: bool = True):
    """``(alpha, allocation)`` maximising the EFX factor over complete allocations.

    The first maximiser in enumeration order is returned; the scan stops at
    the first allocation reaching 1, which is then that maximiser. With
    ``prune`` a branch-and-bound skips subtrees that cannot beat the best
    value so far; the result is the same as the plain scan.

    >>> a, alloc = best_alpha_efx(Instance.additive([(2, 1, 1), (2, 1, 1)]))
    >>> a, alloc.to_json()
    (1, [[0], [1, 2]])
    """
    _guard(inst.n, inst.m)
    if not prune:
        best_val, best_alloc = None, None
        for alloc in enumerate_allocations(inst.n, inst.m):
            val = max_alpha_efx(inst, alloc)
            if best_val is None or val > best_val:
                best_val, best_alloc = val, alloc
                if val == 1:
                    break
        return best_val, best_alloc
    best = [None, None]

    def keep(bundles, rest):
        cap = best[0]
        return cap is None or _upper_bound(inst, bundles, rest, cap) > cap

    def score(alloc):
        val = max_alpha_efx(inst, alloc)
        if best[0] is None or val > best[0]:
            best[0], best[1] = val, alloc
        return best[0] == 1

    _search(inst, keep, score)
    return best[0], best[1]


def exists_efx(inst: Instance, prune: bool = True):
    """First complete EFX allocation in enumeration order, or ``None``."""
    _guard(inst.n, inst.m)
    if not prune:
        for alloc in enumerate_allocations(inst.n, inst.m):
            if is_efx(inst, alloc):
                return alloc
        return None
    found = []

    def keep(bundles, rest):
        # hopeless once someone strongly envies even after taking all of rest
        for i in range(inst.n):
            top = inst.value(i, bundles[i] | rest)
            for j in range(inst.n):
                if j != i and any(top < inst.value(i, bundles[j] - {g}) for g in bundles[j]):
                    return False
        return True

    def score(alloc):
        if is_efx(inst, alloc):
            found.append(alloc)
            return True
        return False

    _search(inst, keep, score)
    return found[0] if found else None
