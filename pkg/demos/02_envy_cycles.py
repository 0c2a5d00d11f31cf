"""Envy-cycle elimination, plain and with favourite picks."""

from fairdiv import Instance
from fairdiv.ece import EcePolicy, decycle, run_ece
from fairdiv.core import Allocation, build_envy_graph
from fairdiv.verify import EF1, check_fairness, max_alpha_ef, max_alpha_efx

# three agents each prefer the next agent's item: one rotation fixes it
cyc = Instance.additive([(1, 2, 0), (0, 1, 2), (2, 0, 1)])
start = Allocation.from_bundles([[0], [1], [2]], 3)
print("envy edges before:", sorted(build_envy_graph(cyc, start).edges))
after = decycle(cyc, start)
print("bundles after decycling:", after.to_json(), "edges:", sorted(build_envy_graph(cyc, after).edges))

inst = Instance.additive([(3, 2, 1), (3, 2, 1)])
trace = []
alloc = run_ece(inst, trace=trace)
for row in trace:
    print(row)
print("plain ECE:", alloc.to_json(), "EF1:", check_fairness(inst, alloc, EF1).verdict)

# letting the first n sources pick their favourite gives 1/2-EFX
inst = Instance.additive([(5, 4, 3, 0), (4, 5, 0, 3)])
alloc = run_ece(inst, None, EcePolicy.pick_favorite(inst.n))
print("pick-favorite:", alloc.to_json(), "alpha-EFX:", max_alpha_efx(inst, alloc))

# but not always 1/2-EF: agent 1 loses item 0 and gets two scraps
inst = Instance.additive([(5, 3, 2), (8, 1, 1)])
alloc = run_ece(inst, None, EcePolicy.pick_favorite(inst.n))
print("scraps:", alloc.to_json(), "alpha-EF:", max_alpha_ef(inst, alloc), "alpha-EFX:", max_alpha_efx(inst, alloc))
