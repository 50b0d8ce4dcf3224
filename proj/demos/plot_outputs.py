"""Render anharm CSV outputs with matplotlib.

    anharm sweep-g2 --config demos/configs/kerr_g2_sweep.yaml --out out/kerr_g2
    python3 demos/plot_outputs.py g2 out/kerr_g2/g2.csv
    python3 demos/plot_outputs.py spectrum out/working_point/spectrum.csv
    python3 demos/plot_outputs.py map out/working_point/map.csv
    python3 demos/plot_outputs.py levels out/levels/levels.csv
"""

import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
from matplotlib.colors import LogNorm, TwoSlopeNorm


def read(path):
    return pd.read_csv(path, comment="#")


def plot_g2(df, out):
    Us = np.sort(df["U"].unique())
    Ts = np.sort(df["T"].unique())
    grid = df.pivot(index="T", columns="U", values="g2").loc[Ts, Us].to_numpy()
    fig, ax = plt.subplots()
    vmax = max(2.0, float(np.nanmax(grid)))
    m = ax.pcolormesh(np.abs(Us), Ts, grid, cmap="RdBu_r", norm=TwoSlopeNorm(vmin=0.0, vcenter=1.0, vmax=vmax), shading="auto")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("|U| / omega_a")
    ax.set_ylabel("T / omega_a")
    fig.colorbar(m, label="g2(0)")
    fig.savefig(out, dpi=150)


def plot_spectrum(df, out):
    fig, ax = plt.subplots()
    ax.plot(df["omega"], df["S"], label="S")
    ax.plot(df["omega"], df["S_omega2"], "--", label="omega^2 S")
    ax.set_yscale("log")
    ax.set_xlabel("omega / omega_a")
    ax.legend()
    fig.savefig(out, dpi=150)


def plot_map(df, out):
    w1 = np.sort(df["omega1"].unique())
    w2 = np.sort(df["omega2"].unique())
    grid = df.pivot(index="omega2", columns="omega1", values="g2").loc[w2, w1].to_numpy()
    fig, ax = plt.subplots()
    m = ax.pcolormesh(w1, w2, grid, cmap="RdBu_r", norm=LogNorm(vmin=grid.min(), vmax=grid.max()), shading="auto")
    ax.set_xlabel("omega1 / omega_a")
    ax.set_ylabel("omega2 / omega_a")
    fig.colorbar(m, label="g2(omega1; omega2)")
    fig.savefig(out, dpi=150)


def plot_levels(df, out):
    fig, ax = plt.subplots()
    for (branch, j), part in df.groupby(["branch", "j"]):
        ax.plot(part["U"], part["energy"], color="k" if branch == "repulsive" else "C3", lw=1)
    ax.set_xlabel("U / omega_a")
    ax.set_ylabel("energy / omega_a")
    fig.savefig(out, dpi=150)


if __name__ == "__main__":
    kind, path = sys.argv[1], sys.argv[2]
    out = sys.argv[3] if len(sys.argv) > 3 else path.rsplit(".", 1)[0] + ".png"
    {"g2": plot_g2, "spectrum": plot_spectrum, "map": plot_map, "levels": plot_levels}[kind](read(path), out)
    print(out)
