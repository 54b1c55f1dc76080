#!/usr/bin/env python3
"""Build a seeded benchmark corpus for the gap-table experiments.

Every file is produced through the CLI, so rebuilding with the same seeds
is byte-identical and the directory can be fed straight to
``sched-reduce bench`` or scripts/run_gap_table.py.
"""

import argparse
import sys
from pathlib import Path

from schedreduce import cli


FAMILIES = [
    ("layered", "layers=3,per_layer=2,edge_prob=1/2"),
    ("layered", "layers=2,per_layer=3,edge_prob=3/4"),
    ("random", "n=6,m=2,edge_prob=1/2"),
    ("random", "n=5,m=3,edge_prob=1/4"),
    ("random", "n=7,m=3,edge_prob=1/2"),
    ("kpartite_yes", "n=6,k=2"),
    ("kpartite_yes", "n=6,k=3"),
    ("kpartite_dense", "n=4,k=2,density=1"),
]


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", required=True)
    ap.add_argument("--seeds", type=int, default=5,
                    help="seeds 0..N-1 per family (default 5)")
    args = ap.parse_args(argv)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rc = 0
    count = 0
    for index, (family, params) in enumerate(FAMILIES):
        for seed in range(args.seeds):
            name = f"{family}_{index}_s{seed}.json"
            rc |= cli.main(["gen", family, "--params", params,
                            "--seed", str(seed), "--out", str(out / name)])
            count += 1
    print(f"wrote {count} instances to {out}")
    return rc


if __name__ == "__main__":
    sys.exit(main())
