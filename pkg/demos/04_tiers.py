"""Exact EFX when every agent ranks items into the same tiers of size <= 3."""
from fairdiv import Instance
from fairdiv.gen import generate
from fairdiv.tiers import TierStats, detect_tiers, solve_distinct_top_tiers, solve_tiered
from fairdiv.verify import is_efx

inst = Instance.additive([(9, 8, 7, 3, 2, 1), (7, 9, 8, 1, 3, 2), (8, 7, 9, 2, 1, 3)])
print("tiers:", detect_tiers(inst).to_json())
trace = []
alloc = solve_tiered(inst, trace=trace)
print("allocation:", alloc.to_json(), "EFX:", is_efx(inst, alloc))
for row in trace:
    print(" ", row)

stats = TierStats()
for seed in range(500):
    g = generate("tiered", {"n": 5, "m": 14, "kind": ("additive", "multiplicative", "unit_demand")[seed % 3]}, seed)
    assert is_efx(g, solve_tiered(g, stats=stats))
print("500 generated instances, cases used:", dict(sorted(stats.cases.items())), "fallbacks:", stats.fallbacks)

inst = Instance.additive([(5, 4, 1, 1, 2), (1, 1, 5, 4, 2)])
alloc = solve_distinct_top_tiers(inst)
print("distinct top tiers:", alloc.to_json(), "EFX:", is_efx(inst, alloc))
