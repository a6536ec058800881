"""Margins of every intermediate inequality on random pairs.

For each check the smallest slack (right side minus left side) over the
sample is reported; a negative value beyond rounding would be a counterexample.

    python scripts/proof_steps.py --n 1000 --sigma near
"""

import argparse
import json

import numpy as np

from bslab.qf import step_diagnostics
from bslab.states import perturbed_product, sample_bipartite, sample_ginibre_density, sample_rng


def draw(kind: str, seed: int, index: int, eps: float):
    rng = sample_rng(seed, index)
    rho = sample_bipartite(2, 2, rng)
    if kind == "general":
        return rho, sample_bipartite(2, 2, rng)
    parts = (sample_ginibre_density(2, rng), sample_ginibre_density(2, rng), sample_ginibre_density(4, rng))
    return rho, perturbed_product(*parts, eps)


def slacks(d) -> dict[str, float]:
    return {
        "step1 relative-entropy form": d.neg_rel_omega - d.bs_gap,
        "step1 normalization": d.log_tr_omega - d.neg_rel_omega,
        "step1 Golden-Thompson": d.step1_rhs - d.log_tr_omega,
        "step2 log bound": d.step2_rhs - d.step1_rhs,
        "step3 cross term": d.step3_rhs - d.z_ab,
        "step3' eta form": d.step3bis_rhs - d.step2_rhs,
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--sigma", choices=["general", "near"], default="general")
    ap.add_argument("--epsilon", type=float, default=0.01)
    args = ap.parse_args()

    worst: dict[str, float] = {}
    failed: dict[str, int] = {}
    for i in range(args.n):
        d = step_diagnostics(*draw(args.sigma, args.seed, i, args.epsilon))
        for k, v in slacks(d).items():
            worst[k] = min(worst.get(k, np.inf), v)
        for k, ok in d.checks().items():
            failed[k] = failed.get(k, 0) + (not ok)
    print(json.dumps({"min_slack": worst, "failed_checks": failed}, indent=2))


if __name__ == "__main__":
    main()
