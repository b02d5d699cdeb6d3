#!/usr/bin/env python3
"""Render the plot_f1*.csv files of an erasure_bench output directory as PNGs.

Needs matplotlib. One image per plot file, one line per classifier.

    tools/plot_results.py results/
"""

import argparse
import csv
import pathlib
import sys
from collections import defaultdict


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    value = "mean" if rows and "mean" in rows[0] else "difference"
    series = defaultdict(lambda: ([], []))
    for r in rows:
        xs, ys = series[r["classifier"]]
        xs.append(100 * float(r["percentage"]))
        ys.append(float(r[value]))
    return value, series


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out_dir", type=pathlib.Path)
    ap.add_argument("--title", default=None)
    args = ap.parse_args()
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.exit("matplotlib is not installed")

    files = sorted(args.out_dir.glob("plot_f1*.csv"))
    if not files:
        sys.exit(f"no plot_f1*.csv files in {args.out_dir}")
    for path in files:
        value, series = load(path)
        fig, ax = plt.subplots(figsize=(6, 4))
        for name, (xs, ys) in series.items():
            ax.plot(xs, ys, label=name)
        if value == "difference":
            ax.axhline(0, color="grey", linewidth=0.8)
        ax.set_xlabel("deleted records [%]")
        ax.set_ylabel("F1" if value == "mean" else "F1 difference")
        ax.set_title(args.title or path.stem)
        ax.legend()
        fig.tight_layout()
        fig.savefig(path.with_suffix(".png"), dpi=120)
        plt.close(fig)
        print(path.with_suffix(".png"))


if __name__ == "__main__":
    main()
