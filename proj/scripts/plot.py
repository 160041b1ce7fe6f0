#!/usr/bin/env python3
"""Quick-look plots of moire-ssh output files.

    scripts/plot.py results/fig5d_eps03_cut.csv
    scripts/plot.py results/fig2ab_w0_phase_diagram.csv --column delta_e2
    scripts/plot.py results/fig3_fig4_w0_scaling.json

Writes <input>.png next to the input. Needs numpy, pandas and matplotlib.
"""

import argparse
import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd

AXES = ["epsilon", "j2", "m_o"]


def load_table(path):
    if path.suffix == ".json":
        doc = json.loads(path.read_text())
        return pd.DataFrame(doc["rows"], columns=doc["columns"])
    return pd.read_csv(path, comment="#")


def plot_table(df, column, out):
    axes = [c for c in df.columns if c in AXES]
    fig, ax = plt.subplots(figsize=(6, 4))
    if "index" in df.columns and "energy" in df.columns:
        # Spectrum: energy levels against the swept axis, if any.
        x = df[axes[0]] if axes else df["index"]
        ax.plot(x, df["energy"], ",k")
        ax.set_xlabel(axes[0] if axes else "level")
        ax.set_ylabel("E")
    elif "density" in df.columns:
        for mode, g in df.groupby("mode"):
            ax.plot(g["cell"], g["density"], label=f"mode {mode}")
        ax.set_xlabel("cell j")
        ax.set_ylabel("density")
        ax.legend()
    elif "zeta" in df.columns:
        ax.plot(df["index"], df["zeta"], "o", ms=3)
        ax.set_xlabel("i")
        ax.set_ylabel("zeta")
    elif "entropy" in df.columns:
        ax.plot(df["l"], df["entropy"])
        ax.set_xlabel("l")
        ax.set_ylabel("S(l)")
    elif len(axes) == 2:
        grid = df.pivot(index=axes[0], columns=axes[1], values=column)
        mesh = ax.pcolormesh(grid.columns, grid.index, grid.values, shading="nearest")
        fig.colorbar(mesh, ax=ax, label=column)
        ax.set_xlabel(axes[1])
        ax.set_ylabel(axes[0])
    else:
        ax.plot(df[axes[0]], df[column], label=column)
        if column == "nu_real" and "entropy_half" in df.columns:
            twin = ax.twinx()
            twin.plot(df[axes[0]], df["entropy_half"], color="tab:red")
            twin.set_ylabel("S(L/2)", color="tab:red")
        ax.set_xlabel(axes[0])
        ax.set_ylabel(column)
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def plot_scaling(doc, out):
    parts = ["mu", "z", "c_vs_L", "c_vs_l"]
    transitions = [t for t in doc["transitions"] if "m_oc" in t]
    fig, axs = plt.subplots(1, len(parts), figsize=(4 * len(parts), 3.5))
    for ax, part in zip(axs, parts):
        for t in transitions:
            fit = t.get(part, {})
            if "fitted" not in fit:
                continue
            pts = np.array(fit["fitted"], dtype=float)
            ax.plot(pts[:, 0], pts[:, 1], "o", label=f"{t['m_oc']:.4f}: {fit['value']:.3f}")
            xs = np.linspace(pts[:, 0].min(), pts[:, 0].max(), 2)
            ax.plot(xs, fit["slope"] * xs + fit["intercept"], "-", lw=0.8)
        ax.set_title(part)
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(out, dpi=150)


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("file", type=Path)
    ap.add_argument("--column", default="nu_real", help="value column for cuts and phase diagrams")
    args = ap.parse_args()
    out = args.file.with_suffix(".png")
    if args.file.suffix == ".json":
        doc = json.loads(args.file.read_text())
        if "transitions" in doc:
            plot_scaling(doc, out)
            print(out)
            return
    plot_table(load_table(args.file), args.column, out)
    print(out)


if __name__ == "__main__":
    main()
