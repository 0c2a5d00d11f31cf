"""Checking fairness of a fixed allocation.

Two agents with identical additive values (2, 1, 1). Agent 0 holds the
middle item, agent 1 holds the other two.
"""
from fractions import Fraction

from fairdiv import Allocation, Instance
from fairdiv.verify import EF, EF1, EFX, alpha_efx, check_fairness, max_alpha_efx, strong_envy_pairs

inst = Instance.additive([(2, 1, 1), (2, 1, 1)])
alloc = Allocation.from_bundles([[1], [0, 2]], inst.m)

for prop in (EF, EF1, EFX, alpha_efx(Fraction(1, 2))):
    report = check_fairness(inst, alloc, prop)
    print(f"{prop.kind:10s} alpha={prop.alpha}  verdict={report.verdict}  witnesses={report.witnesses}")

# removing item 2 from agent 1's bundle leaves item 0, worth 2 to agent 0
print("strong envy:", strong_envy_pairs(inst, alloc))
print("best alpha for this allocation:", max_alpha_efx(inst, alloc))

# swapping the roles fixes it
better = Allocation.from_bundles([[0], [1, 2]], inst.m)
print("after swap, EFX:", check_fairness(inst, better, EFX).verdict)
