"""Shared test helpers and independent reference evaluators."""

from fractions import Fraction

from fairdiv import Allocation, Instance

ACCEPTANCE_LINES = []


def additive(*rows):
    return Instance.additive([[Fraction(v) for v in r] for r in rows])


def alloc(m, *bundles):
    return Allocation.from_bundles(bundles, m)


# Independent reference evaluators over plain additive value lists. They share
# no code with fairdiv and are used to compute expected values.


def ref_efx_alpha(rows, bundles):
    best = Fraction(1)
    for i, row in enumerate(rows):
        own = sum(Fraction(row[g]) for g in bundles[i])
        for j, other in enumerate(bundles):
            if j == i:
                continue
            for g in other:
                w = sum(Fraction(row[h]) for h in other if h != g)
                if w > 0:
                    best = min(best, own / w)
    return best


def ref_envy_edges(rows, bundles):
    out = set()
    for i, row in enumerate(rows):
        own = sum(Fraction(row[g]) for g in bundles[i])
        for j, other in enumerate(bundles):
            if j != i and sum(Fraction(row[g]) for g in other) > own:
                out.add((i, j))
    return out
