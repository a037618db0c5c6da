"""Screening on two-level supersaturated designs built by Kronecker product.

A 12-run, 66-factor two-level base design is expanded by a Hadamard
matrix into 24 x 132 or 48 x 264 designs with far more factors than
runs.  The harness consumes any such base design from a headerless CSV
of +-1 entries; here a random alias-free stand-in is generated, since
published designs are distributed separately.

Two regimes are contrasted.  With 2 active factors every method recovers
them; with 5 active factors a *random* supersaturated design no longer
identifies the support at all (well-fitting subsets exist that miss it),
even though the refit iteration still improves every initializer's fit.
Purpose-built designs with controlled aliasing are exactly what makes
the 5-factor problem tractable in practice.
"""

import tempfile
from pathlib import Path

import numpy as np

from subsetscreen import config_from_dict, run_experiment


def random_two_level_base(seed, runs=12, factors=66):
    """Random +-1 design with no constant, duplicate, or negated columns."""
    rng = np.random.default_rng(seed)
    columns, seen = [], set()
    while len(columns) < factors:
        col = rng.choice([-1.0, 1.0], size=runs)
        key = tuple(col) if col[0] > 0 else tuple(-col)
        if key in seen or abs(col.sum()) == runs:
            continue
        seen.add(key)
        columns.append(col)
    return np.column_stack(columns)


with tempfile.TemporaryDirectory() as tmp:
    base_path = Path(tmp) / "base12x66.csv"
    np.savetxt(base_path, random_two_level_base(99), delimiter=",", fmt="%.0f")

    for d, sigma in ((2, 0.5), (5, 1.0)):
        print(f"--- {d} active factors, noise sd {sigma} ---")
        for order in (2, 4):
            config = config_from_dict(
                {
                    "d": d, "sigma": sigma, "beta_value": 1.0, "M": 10,
                    "repetitions": 40,
                    "methods": ["sis", "foss-sis", "fs", "foss-fs"],
                    "seed": 321,
                    "design": {
                        "kind": "kronecker",
                        "base_design_path": str(base_path),
                        "hadamard_order": order,
                    },
                }
            )
            n, p = config.model.n, config.model.p
            result = run_experiment(config, workers=2)
            cells = "  ".join(
                f"{row.method} cr {row.cr:.2f} ao {row.ao:7.2f}"
                for row in result.table.rows
            )
            print(f"  {n:>2} x {p:<3} {cells}")
        print()

print("with d=2 everything works; with d=5 the random design admits")
print("well-fitting subsets that miss the truth, so coverage collapses")
print("while the refit iteration still lowers every initializer's rss.")
