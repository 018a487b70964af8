#!/usr/bin/env python3
"""Render the CSV artifacts of a wbcrlb run directory as PNG curves.

Usage: plot_figures.py OUT_DIR [PLOT_DIR]

Plotting is a convenience on top of the CSV contract; nothing here feeds
back into the library or its tests.
"""

import csv
import sys
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def plot_mse(path, out):
    rows = read_rows(path)
    by_method = defaultdict(list)
    for r in rows:
        by_method[r["method"]].append(r)
    for param, bound in (("mse_tau", "crlb_tau"), ("mse_gamma", "crlb_gamma")):
        fig, ax = plt.subplots(figsize=(6, 4))
        snr = [float(r["snr_db"]) for r in next(iter(by_method.values()))]
        ax.semilogy(snr, [float(r[bound]) for r in next(iter(by_method.values()))],
                    "k-", label="CRLB")
        for method, mrows in sorted(by_method.items()):
            ax.semilogy([float(r["snr_db"]) for r in mrows],
                        [float(r[param]) for r in mrows], "o--", label=method)
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel(param)
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        fig.savefig(out / f"{path.stem}_{param}.png", dpi=150)
        plt.close(fig)


def plot_crlb(path, out):
    rows = read_rows(path)
    by_p = defaultdict(list)
    for r in rows:
        by_p[int(r["P"])].append(r)
    for param in ("crlb_tau", "crlb_gamma"):
        fig, ax = plt.subplots(figsize=(6, 4))
        for p, prows in sorted(by_p.items()):
            ax.semilogy([float(r["snr_db"]) for r in prows],
                        [float(r[param]) for r in prows], "o--", label=f"P={p}")
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel(param)
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        fig.savefig(out / f"{path.stem}_{param}.png", dpi=150)
        plt.close(fig)


def plot_series(path, out):
    rows = read_rows(path)
    by_k = defaultdict(list)
    for r in rows:
        by_k[int(r["K"])].append(r)
    for param in ("crlb_tau_K", "crlb_gamma_K"):
        fig, ax = plt.subplots(figsize=(6, 4))
        for k, krows in sorted(by_k.items()):
            ax.semilogy([float(r["snr_db"]) for r in krows],
                        [abs(float(r[param])) for r in krows], "o--", label=f"K={k}")
        ax.set_xlabel("SNR [dB]")
        ax.set_ylabel(param)
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        fig.tight_layout()
        fig.savefig(out / f"{path.stem}_{param}.png", dpi=150)
        plt.close(fig)


def plot_sweep(path, out):
    rows = read_rows(path)
    for x_col in ("rms_bandwidth", "effective_duration", "time_bandwidth"):
        for param in ("crlb_tau", "crlb_gamma"):
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.loglog([float(r[x_col]) for r in rows],
                      [float(r[param]) for r in rows], "o--")
            ax.set_xlabel(x_col)
            ax.set_ylabel(param)
            ax.grid(True, which="both", alpha=0.3)
            fig.tight_layout()
            fig.savefig(out / f"{path.stem}_{param}_vs_{x_col}.png", dpi=150)
            plt.close(fig)


def main():
    if len(sys.argv) < 2:
        print(__doc__)
        return 1
    run_dir = Path(sys.argv[1])
    out = Path(sys.argv[2]) if len(sys.argv) > 2 else run_dir / "plots"
    out.mkdir(parents=True, exist_ok=True)
    handlers = {"_mse.csv": plot_mse, "_crlb.csv": plot_crlb,
                "_series.csv": plot_series, "_sweep.csv": plot_sweep}
    for path in sorted(run_dir.glob("*.csv")):
        for suffix, handler in handlers.items():
            if path.name.endswith(suffix):
                handler(path, out)
                print(f"plotted {path.name}")
                break
    return 0


if __name__ == "__main__":
    sys.exit(main())
