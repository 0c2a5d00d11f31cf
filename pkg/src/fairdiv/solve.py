"""One dispatch path from an algorithm name to a verified result.

Used by the command line and the benchmark harness. Every result is
re-checked by the verifiers before it is returned; a certificate the
verifier rejects raises :class:`InvariantBreach`.
"""

from __future__ import annotations

from fractions import Fraction

from .core import Instance, fmt
from .ece import EcePolicy, run_ece
from .errors import InvariantBreach, PreconditionError, UnsupportedValuation
from .framework import SUBADDITIVE_KINDS, run_framework
from .oracle import exists_efx
from .tiers import TierStats, solve_distinct_top_tiers, solve_tiered
from .verify import EF1, alpha_efx, check_fairness, max_alpha_efx

ALGORITHMS = (
    "ece",
    "pick-ece",
    "framework:<builder>",
    "top-n",
    "relaxed-top:<ell>",
    "bounded-interval:<ell>",
    "distinct-favorites",
    "tiered",
    "distinct-top-tiers",
    "oracle-exact",
)


def _exact_cert():
    return {"certified_factor": "1"}


def run_algorithm(inst: Instance, algorithm: str, trace: list = None) -> dict:
    """Run ``algorithm`` on ``inst``; returns the solver JSON document.

    The document has ``allocation``, ``certificate`` (or ``None`` when the
    algorithm only promises EF1) and ``verified``. Tier runs also report
    ``fallbacks``.
    """
    name, _, arg = algorithm.partition(":")
    cert = None
    fallbacks = 0
    if name == "ece":
        alloc = run_ece(inst, trace=trace)
    elif name == "pick-ece":
        if not inst.kinds() <= SUBADDITIVE_KINDS:
            raise UnsupportedValuation("pick-ece's 1/2 guarantee needs subadditive valuations")
        alloc = run_ece(inst, None, EcePolicy.pick_favorite(inst.n), trace=trace)
        cert = {"certified_factor": "1/2"}
    elif name in ("framework", "top-n", "relaxed-top", "bounded-interval", "distinct-favorites"):
        builder = arg if name == "framework" else algorithm
        if not builder:
            raise PreconditionError("use framework:<builder>, e.g. framework:pick-rounds")
        alloc, pc = run_framework(inst, builder, trace=trace)
        cert = pc.to_json()
    elif name == "tiered":
        stats = TierStats()
        alloc = solve_tiered(inst, trace=trace, stats=stats)
        fallbacks = stats.fallbacks
        cert = _exact_cert()
    elif name == "distinct-top-tiers":
        alloc = solve_distinct_top_tiers(inst)
        cert = _exact_cert()
    elif name == "oracle-exact":
        alloc = exists_efx(inst)
        if alloc is None:
            return {"allocation": None, "certificate": None, "verified": None}
        cert = _exact_cert()
    else:
        raise PreconditionError(f"unknown algorithm {algorithm!r}; known: {', '.join(ALGORITHMS)}")

    if not alloc.is_complete:
        raise InvariantBreach(f"{algorithm} left items {sorted(alloc.pool)} unallocated")
    alpha = max_alpha_efx(inst, alloc)
    ef1 = check_fairness(inst, alloc, EF1).verdict
    if cert is not None:
        factor = Fraction(cert["certified_factor"])
        if not check_fairness(inst, alloc, alpha_efx(factor)).verdict:
            raise InvariantBreach(f"{algorithm}: verifier rejects certified factor {fmt(factor)}")
        if cert.get("gamma") == "1" and not ef1:
            raise InvariantBreach(f"{algorithm}: EF1 did not carry over from the partial allocation")
    elif not ef1:
        raise InvariantBreach(f"{algorithm}: output is not EF1")
    out = {
        "allocation": alloc.to_json(),
        "certificate": cert,
        "verified": {"efx_alpha": fmt(alpha), "ef1": ef1},
    }
    if name == "tiered":
        out["fallbacks"] = fallbacks
    return out
