#!/usr/bin/env python3
"""Structural-stability audit sweep over equilibria and collision models.

Samples random equilibria for each node count and checks the three
stability conditions for BGK and a range of Prandtl numbers, printing one
line per combination and failing loudly if any condition is violated.
"""

import argparse

import numpy as np

from qbmm.stability import SourceModel, stability_report


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    models = [SourceModel("bgk")] + [SourceModel("shakhov", pr=pr) for pr in (0.3, 2.0 / 3.0, 1.0)]
    failures = 0
    for n in (2, 3, 4):
        for model in models:
            tag = model.kind if model.kind == "bgk" else f"{model.kind}(Pr={model.pr:g})"
            worst_i = worst_off = 0.0
            eps_min = np.inf
            for _ in range(args.samples):
                rho = rng.uniform(0.2, 3.0)
                u = rng.uniform(-2.0, 2.0)
                theta = rng.uniform(0.1, 3.0)
                rep = stability_report(rho, u, theta, n, model)
                if not rep.passed:
                    failures += 1
                worst_i = max(worst_i, rep.cond_i.details["relative_residual"])
                worst_off = max(
                    worst_off,
                    rep.cond_iii.details["off_block_norm"] / rep.cond_iii.details["k_norm"],
                )
                eps_min = min(eps_min, rep.cond_iii.details["epsilon"] or np.inf)
            print(
                f"N={n} {tag:18s}: cond-i resid<={worst_i:.2e} "
                f"off-block<={worst_off:.2e} eps>={eps_min:g}"
            )
    if failures:
        raise SystemExit(f"{failures} stability check(s) failed")
    print("all stability checks passed")


if __name__ == "__main__":
    main()
