"""Domain types: exact valuations, instances, allocations and envy graphs.

All values are exact rationals. Integral values are kept as ``int`` (they
compare and add exactly with :class:`fractions.Fraction`) because plain
integer arithmetic is several times faster than ``Fraction`` arithmetic.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    CycleDetected,
    InvalidAllocation,
    InvalidInstance,
    InvalidItem,
    TooLargeForExhaustiveCheck,
)

Value = Union[int, Fraction]

MAX_TABLE_ITEMS = 12


def exact(x) -> Value:
    """Coerce ``x`` to an exact nonnegative rational.

    Accepts ints, Fractions and strings such as ``"3"``, ``"2/3"`` or
    ``"1.25"``. Floats are refused: their binary expansion is rarely the
    number the user meant.

    >>> exact("6/4")
    Fraction(3, 2)
    >>> exact("4/2")
    2
    """
    if isinstance(x, bool) or isinstance(x, float):
        raise InvalidInstance(f"value {x!r} is not an exact rational")
    if isinstance(x, int):
        q = Fraction(x)
    elif isinstance(x, Fraction):
        q = x
    elif isinstance(x, str):
        try:
            q = Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInstance(f"cannot parse rational {x!r}") from exc
    else:
        raise InvalidInstance(f"value {x!r} is not an exact rational")
    if q < 0:
        raise InvalidInstance(f"negative value {x!r}: chores are not supported")
    return q.numerator if q.denominator == 1 else q


def fmt(x) -> str:
    """Render an exact value as ``"p/q"`` (or ``"p"`` when integral)."""
    if x == float("inf"):
        return "inf"
    return str(Fraction(x))


# --------------------------------------------------------------------------
# valuations


class Valuation:
    """A monotone, nonnegative set function over items ``0..m-1``."""

    kind: str = ""

    @property
    def m(self) -> int:
        raise NotImplementedError

    def value(self, items: Iterable[int]) -> Value:
        raise NotImplementedError

    def singleton(self, g: int) -> Value:
        return self.value((g,))

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Additive(Valuation):
    values: tuple
    kind = "additive"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(exact(v) for v in self.values))

    @property
    def m(self):
        return len(self.values)

    def value(self, items):
        vals = self.values
        return sum(vals[g] for g in items)

    def singleton(self, g):
        return self.values[g]

    def to_json(self):
        return {"kind": self.kind, "values": [fmt(v) for v in self.values]}


@dataclass(frozen=True)
class Multiplicative(Valuation):
    """Product of per-item factors; the empty bundle is worth 1."""

    factors: tuple
    kind = "multiplicative"

    def __post_init__(self):
        fs = tuple(exact(v) for v in self.factors)
        if any(f < 1 for f in fs):
            raise InvalidInstance("multiplicative factors must be >= 1")
        object.__setattr__(self, "factors", fs)

    @property
    def m(self):
        return len(self.factors)

    def value(self, items):
        out = 1
        for g in items:
            out *= self.factors[g]
        return out

    def singleton(self, g):
        return self.factors[g]

    def to_json(self):
        return {"kind": self.kind, "values": [fmt(v) for v in self.factors]}


@dataclass(frozen=True)
class UnitDemand(Valuation):
    """Value of the best single item in the bundle; the empty bundle is 0."""

    values: tuple
    kind = "unit_demand"

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(exact(v) for v in self.values))

    @property
    def m(self):
        return len(self.values)

    def value(self, items):
        vals = self.values
        return max((vals[g] for g in items), default=0)

    def singleton(self, g):
        return self.values[g]

    def to_json(self):
        return {"kind": self.kind, "values": [fmt(v) for v in self.values]}


@dataclass(frozen=True)
class TableValuation(Valuation):
    """Explicit value per subset, indexed by bitmask (bit ``j`` is item ``j``)."""

    table: tuple
    kind = "table"

    def __post_init__(self):
        tab = tuple(exact(v) for v in self.table)
        size = len(tab)
        if size < 2 or size & (size - 1):
            raise InvalidInstance("table length must be a power of two >= 2")
        m = size.bit_length() - 1
        if m > MAX_TABLE_ITEMS:
            raise InvalidInstance(f"table valuations support at most {MAX_TABLE_ITEMS} items")
        for mask in range(size):
            for j in range(m):
                if not mask >> j & 1 and tab[mask] > tab[mask | 1 << j]:
                    raise InvalidInstance(
                        f"table is not monotone: adding item {j} to mask {mask} lowers the value"
                    )
        object.__setattr__(self, "table", tab)

    @classmethod
    def from_dict(cls, m: int, entries: dict) -> "TableValuation":
        """Build from ``{frozenset_of_items: value}``; missing subsets are an error."""
        tab = [None] * (1 << m)
        for items, v in entries.items():
            tab[mask_of(items)] = v
        if any(v is None for v in tab):
            raise InvalidInstance("table is missing subsets")
        return cls(tuple(tab))

    @property
    def m(self):
        return len(self.table).bit_length() - 1

    def value(self, items):
        return self.table[mask_of(items)]

    def to_json(self):
        return {"kind": self.kind, "values": [fmt(v) for v in self.table]}


def mask_of(items: Iterable[int]) -> int:
    mask = 0
    for g in items:
        mask |= 1 << g
    return mask


def items_of(mask: int) -> frozenset:
    return frozenset(j for j in range(mask.bit_length()) if mask >> j & 1)


_KINDS = {
    "additive": Additive,
    "multiplicative": Multiplicative,
    "unit_demand": UnitDemand,
    "table": TableValuation,
}


def valuation_from_json(obj: dict) -> Valuation:
    try:
        cls = _KINDS[obj["kind"]]
        values = obj["values"]
    except (KeyError, TypeError) as exc:
        raise InvalidInstance(f"malformed valuation {obj!r}") from exc
    if not isinstance(values, list):
        raise InvalidInstance("valuation 'values' must be a list")
    return cls(tuple(values))


def bundle_value(v: Valuation, items: Iterable[int]) -> Value:
    """Value of ``items`` under ``v``, rejecting item indices outside ``0..m-1``.

    >>> bundle_value(Additive((3, 2, 1)), {0, 2})
    4
    >>> bundle_value(Multiplicative((2, 3, 1)), {0, 1})
    6
    """
    items = list(items)
    for g in items:
        if not isinstance(g, int) or not 0 <= g < v.m:
            raise InvalidItem(f"item {g!r} outside 0..{v.m - 1}")
    return v.value(items)


def check_cancelable(v: Valuation, m: int | None = None):
    """Exhaustively test whether ``v`` is cancelable.

    Returns ``(True, None)`` or ``(False, (S, T, g))`` where
    ``v(S | {g}) > v(T | {g})`` but ``v(S) <= v(T)``.

    For each ``g`` the check is a sweep rather than a double loop over
    subset pairs: a violation is a pair with ``v(S) <= v(T)`` and
    ``v(S+g) > v(T+g)``, found by scanning bases in decreasing order while
    tracking the smallest augmented value seen so far.
    """
    m = v.m if m is None else m
    if m > MAX_TABLE_ITEMS:
        raise TooLargeForExhaustiveCheck(f"m={m} > {MAX_TABLE_ITEMS}")
    full = (1 << m) - 1
    for g in range(m):
        gbit = 1 << g
        rest = full & ~gbit
        rows = []
        sub = rest
        while True:
            s = items_of(sub)
            rows.append((v.value(s), v.value(s | {g}), sub))
            if sub == 0:
                break
            sub = (sub - 1) & rest
        rows.sort(key=lambda r: (r[0], r[2]))
        best = None  # (aug, mask) minimising aug among rows with base >= current
        i = len(rows) - 1
        while i >= 0:
            j = i
            while j > 0 and rows[j - 1][0] == rows[i][0]:
                j -= 1
            group = rows[j : i + 1]
            for row in group:
                if best is None or row[1] < best[0]:
                    best = (row[1], row[2])
            for base, aug, smask in group:
                if aug > best[0]:
                    return False, (items_of(smask), items_of(best[1]), g)
            i = j - 1
    return True, None


# --------------------------------------------------------------------------
# instances and allocations


@dataclass(frozen=True)
class Instance:
    valuations: tuple
    hints: dict = field(default_factory=dict, compare=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        vals = tuple(self.valuations)
        if not vals:
            raise InvalidInstance("an instance needs at least one agent")
        m = vals[0].m
        if m < 1:
            raise InvalidInstance("an instance needs at least one item")
        if any(v.m != m for v in vals):
            raise InvalidInstance("every valuation must cover the same items")
        object.__setattr__(self, "valuations", vals)

    @property
    def n(self) -> int:
        return len(self.valuations)

    @property
    def m(self) -> int:
        return self.valuations[0].m

    @property
    def items(self) -> range:
        return range(self.m)

    def value(self, agent: int, bundle: frozenset) -> Value:
        key = (agent, bundle)
        try:
            return self._cache[key]
        except KeyError:
            out = self._cache[key] = self.valuations[agent].value(bundle)
            return out

    def singleton(self, agent: int, g: int) -> Value:
        return self.valuations[agent].singleton(g)

    def kinds(self) -> set:
        return {v.kind for v in self.valuations}

    def is_additive(self) -> bool:
        return self.kinds() == {"additive"}

    @classmethod
    def additive(cls, rows: Sequence[Sequence]) -> "Instance":
        return cls(tuple(Additive(tuple(r)) for r in rows))

    def to_json(self) -> dict:
        out = {"n": self.n, "m": self.m, "valuations": [v.to_json() for v in self.valuations]}
        if self.hints:
            out["hints"] = self.hints
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "Instance":
        if not isinstance(obj, dict) or "valuations" not in obj:
            raise InvalidInstance("instance JSON must be an object with 'valuations'")
        vals = tuple(valuation_from_json(v) for v in obj["valuations"])
        inst = cls(vals, hints=dict(obj.get("hints") or {}))
        if "n" in obj and obj["n"] != inst.n:
            raise InvalidInstance(f"declared n={obj['n']} but {inst.n} valuations given")
        if "m" in obj and obj["m"] != inst.m:
            raise InvalidInstance(f"declared m={obj['m']} but valuations cover {inst.m} items")
        return inst


@dataclass(frozen=True)
class Allocation:
    """Ordered bundles plus the pool of unallocated items."""

    bundles: tuple
    pool: frozenset

    @classmethod
    def from_bundles(cls, bundles: Iterable[Iterable[int]], m: int) -> "Allocation":
        bs = tuple(frozenset(b) for b in bundles)
        seen = set()
        for b in bs:
            for g in b:
                if not isinstance(g, int) or not 0 <= g < m:
                    raise InvalidAllocation(f"item {g!r} outside 0..{m - 1}")
                if g in seen:
                    raise InvalidAllocation(f"item {g} appears in two bundles")
                seen.add(g)
        return cls(bs, frozenset(range(m)) - seen)

    @classmethod
    def empty(cls, n: int, m: int) -> "Allocation":
        return cls(tuple(frozenset() for _ in range(n)), frozenset(range(m)))

    @property
    def n(self) -> int:
        return len(self.bundles)

    @property
    def is_complete(self) -> bool:
        return not self.pool

    def give(self, agent: int, *items: int) -> "Allocation":
        if any(g not in self.pool for g in items):
            raise InvalidAllocation(f"items {items} are not all unallocated")
        bs = list(self.bundles)
        bs[agent] = bs[agent] | frozenset(items)
        return Allocation(tuple(bs), self.pool - frozenset(items))

    def rotate(self, cycle: Sequence[int]) -> "Allocation":
        """Each agent on ``cycle`` takes the bundle of the next agent on it."""
        bs = list(self.bundles)
        k = len(cycle)
        for t, a in enumerate(cycle):
            bs[a] = self.bundles[cycle[(t + 1) % k]]
        return Allocation(tuple(bs), self.pool)

    def check_for(self, inst: Instance) -> None:
        if self.n != inst.n:
            raise InvalidAllocation(f"allocation has {self.n} bundles, instance has {inst.n} agents")
        universe = frozenset(range(inst.m))
        union = frozenset().union(*self.bundles) | self.pool
        if union != universe or sum(map(len, self.bundles)) + len(self.pool) != inst.m:
            raise InvalidAllocation("bundles and pool do not partition the items")

    def to_json(self) -> list:
        return [sorted(b) for b in self.bundles]

    @classmethod
    def from_json(cls, obj, m: int) -> "Allocation":
        if isinstance(obj, dict):
            obj = obj.get("bundles", obj.get("allocation"))
        if not isinstance(obj, list) or not all(isinstance(b, list) for b in obj):
            raise InvalidAllocation("allocation JSON must be a list of item lists")
        return cls.from_bundles(obj, m)


# --------------------------------------------------------------------------
# envy graphs


@dataclass(frozen=True)
class EnvyGraph:
    n: int
    edges: frozenset

    def successors(self, i: int) -> list:
        return [j for j in range(self.n) if (i, j) in self.edges]

    def predecessors(self, j: int) -> list:
        return [i for i in range(self.n) if (i, j) in self.edges]

    def sources(self) -> list:
        envied = {j for _, j in self.edges}
        return [a for a in range(self.n) if a not in envied]

    def find_cycle(self):
        """Shortest cycle through the lowest-index agent that lies on one.

        Returns ``[i1, ..., ik]`` with edges ``i1 -> i2 -> ... -> ik -> i1``,
        or ``None`` for an acyclic graph.
        """
        succ = [self.successors(i) for i in range(self.n)]
        for start in range(self.n):
            parent = {start: None}
            queue = deque([start])
            while queue:
                u = queue.popleft()
                for w in succ[u]:
                    if w == start:
                        path = [u]
                        while parent[path[-1]] is not None:
                            path.append(parent[path[-1]])
                        return path[::-1]
                    if w not in parent:
                        parent[w] = u
                        queue.append(w)
        return None

    def reachable_from(self, i: int) -> set:
        seen = {i}
        stack = [i]
        while stack:
            u = stack.pop()
            for w in self.successors(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        seen.discard(i)
        return seen

    def simple_cycles(self) -> Iterator[list]:
        """All simple cycles, each listed once starting from its smallest agent."""
        succ = [self.successors(i) for i in range(self.n)]
        for start in range(self.n):
            stack = [(start, [start])]
            while stack:
                u, path = stack.pop()
                for w in reversed(succ[u]):
                    if w == start:
                        yield list(path)
                    elif w > start and w not in path:
                        stack.append((w, path + [w]))


def build_envy_graph(inst: Instance, alloc: Allocation) -> EnvyGraph:
    """Edge ``(i, j)`` iff agent ``i`` values ``j``'s bundle strictly above her own."""
    bundles = alloc.bundles
    edges = set()
    for i in range(inst.n):
        own = inst.value(i, bundles[i])
        for j in range(inst.n):
            if j != i and inst.value(i, bundles[j]) > own:
                edges.add((i, j))
    return EnvyGraph(inst.n, frozenset(edges))


def envy_levels(graph: EnvyGraph) -> tuple:
    """Longest-path level of every agent; sources sit at level 0.

    Raises :class:`CycleDetected` when the graph has a cycle.

    >>> envy_levels(EnvyGraph(3, frozenset({(0, 1), (1, 2)})))
    (0, 1, 2)
    """
    cycle = graph.find_cycle()
    if cycle is not None:
        raise CycleDetected(cycle)
    indeg = [len(graph.predecessors(j)) for j in range(graph.n)]
    level = [0] * graph.n
    queue = deque(a for a in range(graph.n) if indeg[a] == 0)
    while queue:
        u = queue.popleft()
        for w in graph.successors(u):
            level[w] = max(level[w], level[u] + 1)
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return tuple(level)


def all_subsets(items: Sequence[int]) -> Iterator[frozenset]:
    for r in range(len(items) + 1):
        for c in itertools.combinations(items, r):
            yield frozenset(c)
