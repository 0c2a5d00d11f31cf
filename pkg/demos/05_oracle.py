"""Brute force on small instances: how close do the solvers get?"""
from fractions import Fraction

from fairdiv.gen import generate
from fairdiv.oracle import best_alpha_efx, exists_efx
from fairdiv.solve import run_algorithm

gaps = {"ece": [], "pick-ece": [], "top-n": []}
for seed in range(100):
    inst = generate("common_top_n", {"n": 3, "m": 6, "hi": 20}, seed)
    best, _ = best_alpha_efx(inst)
    for alg in gaps:
        got = Fraction(run_algorithm(inst, alg)["verified"]["efx_alpha"])
        gaps[alg].append(best - got)

for alg, g in gaps.items():
    print(f"{alg:10s} optimal on {sum(x == 0 for x in g)}/100, worst gap {max(g)}")

inst = generate("random_additive", {"n": 2, "m": 5}, 3)
print("an EFX allocation for two agents:", exists_efx(inst).to_json())
