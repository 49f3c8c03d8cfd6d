#!/usr/bin/env python3
"""Plot a sweep-h or sweep-3d results CSV: analytic curves with Monte Carlo error bars."""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("-o", "--output", default="height_sweep.png")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4))
    for (alpha, c), g in df.groupby(["alpha", "C"]):
        g = g.sort_values("h")
        line, = ax.plot(g["h"], g["analytic_total"], label=f"alpha={alpha:g}, C={c}")
        mc = g.dropna(subset=["mc_mean"])
        if not mc.empty:
            ax.errorbar(mc["h"], mc["mc_mean"], yerr=2 * mc["mc_stderr"], fmt="o", ms=3,
                        color=line.get_color(), alpha=0.6)
    ax.set_xscale("log")
    ax.set_xlabel("h")
    ax.set_ylabel("unnormalised mean connection probability")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
