#!/usr/bin/env python3
"""Plot a sweep-density results CSV: P(all externals connected) against rho."""
import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("csv")
    ap.add_argument("-o", "--output", default="density_sweep.png")
    args = ap.parse_args()

    df = pd.read_csv(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4))
    for (alpha, c), g in df.groupby(["alpha", "C"]):
        g = g.sort_values("rho")
        line, = ax.plot(g["rho"], g["analytic_total"], label=f"alpha={alpha:g}, C={c}")
        mc = g.dropna(subset=["mc_mean"])
        if not mc.empty:
            ax.errorbar(mc["rho"], mc["mc_mean"], yerr=2 * mc["mc_stderr"], fmt="o", ms=3,
                        color=line.get_color(), alpha=0.6)
    ax.set_xlabel("rho")
    ax.set_ylabel("P(all external nodes connected)")
    ax.set_ylim(0, 1.02)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
