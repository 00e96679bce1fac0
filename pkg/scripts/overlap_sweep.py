#!/usr/bin/env python3
"""Level-0 AUC as the synthetic classes overlap more.

Runs a trimmed level-0 grid per overlap value and prints the mean and range
of AUC per classifier, which shows how hard the generator makes the task.

    python scripts/overlap_sweep.py --overlaps 0.1 0.3 0.5 --n 5000
"""
import argparse

import numpy as np

from imbstack import harness
from imbstack.config import from_mapping


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--overlaps", type=float, nargs="+", default=[0.1, 0.3, 0.5, 0.7])
    ap.add_argument("--n", type=int, default=5000)
    ap.add_argument("--ir", type=float, default=0.02)
    ap.add_argument("--resamplers", nargs="+", default=["full", "ros", "smote"])
    ap.add_argument("--classifiers", nargs="+", default=["gaussian_nb", "c45", "knn", "svm", "gbm"])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for ov in args.overlaps:
        cfg = from_mapping({
            "synthetic_n": args.n, "synthetic_ir": args.ir, "synthetic_overlap": ov,
            "resamplers": args.resamplers, "classifiers": args.classifiers, "seed": args.seed,
        })
        rows = harness.run_level0(cfg).rows
        print(f"overlap {ov:.2f}")
        for c in sorted({r.classifier for r in rows}):
            aucs = np.array([r.metric("auc") for r in rows if r.classifier == c and r.metric("auc") is not None])
            print(f"  {c:<12} mean AUC {aucs.mean():.4f}  [{aucs.min():.4f}, {aucs.max():.4f}]")


if __name__ == "__main__":
    main()
