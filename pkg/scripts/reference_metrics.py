#!/usr/bin/env python3
"""Recompute accuracy and F1 for the transcribed reference confusion counts.

Prints each row with the printed values, the recomputed ones under both F1
conventions (exact ratios, and precision/recall rounded to 4 decimals
first) and the deviations. Exits non-zero if any row misses by more than
5e-5 under the rounded convention.
"""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from reference_rows import ROWS  # noqa: E402

from imbstack.metrics import ConfusionMatrix, scalar_metrics  # noqa: E402

TOL = 5e-5


def main():
    head = f"{'run':<14} {'classifier':<12} {'acc':>7} {'F1':>7} {'F1 exact':>9} {'F1 rounded':>10} {'dF1':>8}"
    print(head)
    print("-" * len(head))
    worst = 0.0
    misses = 0
    for run, name, tp, fp, fn, tn, acc, f1, _ in ROWS:
        cm = ConfusionMatrix(tp, fp, fn, tn)
        exact = scalar_metrics(cm)
        rounded = scalar_metrics(cm, round_pr=4)
        dev = max(abs(rounded.f1 - f1), abs(rounded.accuracy - acc))
        worst = max(worst, dev)
        misses += dev > TOL
        flag = "" if dev <= TOL else "  <-- miss"
        print(f"{run:<14} {name:<12} {acc:>7.4f} {f1:>7.4f} {exact.f1:>9.5f} {rounded.f1:>10.5f} "
              f"{rounded.f1 - f1:>+8.1e}{flag}")
    print(f"\n{len(ROWS)} rows, worst deviation {worst:.1e}, {misses} beyond {TOL}")
    return 1 if misses else 0


if __name__ == "__main__":
    sys.exit(main())
