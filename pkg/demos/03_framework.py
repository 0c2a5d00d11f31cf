"""Partial allocation, measured certificate, envy-cycle completion."""
from fairdiv import Instance
from fairdiv.core import Allocation, fmt
from fairdiv.framework import measure_partial, run_framework
from fairdiv.gen import generate
from fairdiv.topn import solve_top_n, top_n_partial
from fairdiv.verify import max_alpha_efx

inst = Instance.additive([(4, 4, 1, 1), (4, 4, 1, 1)])
partial = Allocation.from_bundles([[0], [1]], 4)
print("certificate of ({0},{1}):", measure_partial(inst, partial).to_json())

# agents agree on the two best items but not their order
inst = Instance.additive([(10, 9, 5, 1), (9, 10, 2, 2)])
partial, split = top_n_partial(inst)
print("top set", sorted(split.top), "content flags", split.content, "partial", partial.to_json())
alloc, cert = solve_top_n(inst)
print("top-n result", alloc.to_json(), cert.to_json())

print("\nworst achieved alpha over 300 generated instances per solver")
worst = {"pick-rounds": 1, "top-n": 1, "relaxed-top:6": 1}
for seed in range(300):
    ranked = generate("identical_top_ranking", {"n": 3, "m": 9, "ell": 6}, seed)
    for name in worst:
        out, _ = run_framework(ranked, name)
        worst[name] = min(worst[name], max_alpha_efx(ranked, out))
for name, a in worst.items():
    print(f"  {name:15s} {fmt(a)}")
