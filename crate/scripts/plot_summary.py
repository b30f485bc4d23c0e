"""Plot mean trace-norm distance with one-standard-deviation bands from run directories.

usage: python scripts/plot_summary.py RUN_DIR [RUN_DIR ...] [-o out.png]
"""

import argparse
import csv
from pathlib import Path

import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        rows = list(csv.DictReader(f))
    col = lambda k: [float(r[k]) for r in rows]
    return col("t"), col("mean_dS"), col("std_dS")


def band(ax, path, label):
    t, m, s = load(path)
    ax.plot(t, m, label=label)
    ax.fill_between(t, [a - b for a, b in zip(m, s)], [a + b for a, b in zip(m, s)], alpha=0.2)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("runs", nargs="+", type=Path)
    p.add_argument("-o", "--output", type=Path)
    args = p.parse_args()

    fig, ax = plt.subplots(figsize=(7, 4))
    for run in args.runs:
        band(ax, run / "summary.csv", run.name)
        if (run / "open_loop_summary.csv").exists():
            band(ax, run / "open_loop_summary.csv", f"{run.name} (open loop)")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\|\rho - \Pi_S \rho \Pi_S\|_1$")
    ax.legend()
    fig.tight_layout()
    if args.output:
        fig.savefig(args.output, dpi=150)
    else:
        plt.show()


if __name__ == "__main__":
    main()
