#!/usr/bin/env python3
"""How far from optimal are the greedy quantizers?

Draws random instances per family, quantizes greedily, then asks the exact
oracle for the true optimum and tabulates the gap distribution.  Everything
is seeded and exact; the CSV (optional) holds one row per instance.
"""

import argparse
import csv
from fractions import Fraction

from qlab.core import lattice_family
from qlab.norms import C0Space, SchauderSpace, SummingSpace, TreeSpace
from qlab.oracle import SectionProblem, best_quantization
from qlab.quantize import quantize_c0, quantize_schauder, quantize_summing, quantize_tree
from qlab.sampling import random_coeffs, seeded


def families(rng, dim):
    tree = TreeSpace(tuple(None if i == 0 else rng.randint(0, i - 1) for i in range(dim)))
    schauder = SchauderSpace(dim - 1)
    return [
        ("c0", C0Space(dim), quantize_c0),
        ("summing", SummingSpace(dim), quantize_summing),
        ("schauder", schauder, lambda x, nets: quantize_schauder(x, nets, schauder)),
        ("tree", tree, lambda x, nets: quantize_tree(x, nets, tree)),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--instances", type=int, default=100)
    parser.add_argument("--dim", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--csv", default=None, help="write per-instance rows here")
    args = parser.parse_args()

    rng = seeded(args.seed)
    nets = lattice_family(1)
    rows = []
    for k in range(args.instances):
        x = random_coeffs(rng, range(args.dim), density=0.8)
        for name, space, quantizer in families(rng, args.dim):
            report = quantizer(x, nets)
            problem = SectionProblem(space, tuple(range(space.dim)), nets)
            oracle_result = best_quantization(problem, x, initial=report.choice)
            rows.append(
                {
                    "instance": k,
                    "family": name,
                    "greedy": report.error,
                    "optimum": oracle_result.optimum,
                    "gap": report.error - oracle_result.optimum,
                    "nodes": oracle_result.nodes,
                }
            )

    print(f"{'family':<10} {'instances':>9} {'optimal%':>8} {'mean gap':>12} {'max gap':>9}")
    for name in ("c0", "summing", "schauder", "tree"):
        sub = [r for r in rows if r["family"] == name]
        exact = sum(1 for r in sub if r["gap"] == 0)
        mean_gap = sum((r["gap"] for r in sub), Fraction(0)) / len(sub)
        max_gap = max(r["gap"] for r in sub)
        print(
            f"{name:<10} {len(sub):>9} {100 * exact // len(sub):>7}% "
            f"{float(mean_gap):>12.4f} {float(max_gap):>9.4f}"
        )

    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=list(rows[0]))
            writer.writeheader()
            for row in rows:
                writer.writerow({k: str(v) for k, v in row.items()})
        print(f"wrote {len(rows)} rows to {args.csv}")


if __name__ == "__main__":
    main()
