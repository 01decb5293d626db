"""Plot CSVs produced by run_campaigns.py (needs the ``plot`` extra)."""

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def plot_sweep(path: Path):
    series = defaultdict(list)
    for row in read_rows(path):
        series[(row["protocol"], row["model"])].append(row)
    fig, (ax_t, ax_p) = plt.subplots(1, 2, figsize=(10, 4))
    for (proto, model), rows in sorted(series.items()):
        g = [float(r["G_effective"]) for r in rows]
        ax_t.plot(g, [float(r["throughput"]) for r in rows], marker="o", ms=3, label=f"{proto} {model}")
        per = [float(r["per"]) or float("nan") for r in rows]
        ax_p.semilogy(g, per, marker="o", ms=3, label=f"{proto} {model}")
    ax_t.set(xlabel="G [Erlang]", ylabel="T [packets/packet duration]")
    ax_p.set(xlabel="G [Erlang]", ylabel="PER")
    for ax in (ax_t, ax_p):
        ax.grid(True, alpha=0.3)
        ax.legend()
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"), dpi=120)
    plt.close(fig)


def plot_histogram(path: Path):
    rows = read_rows(path)
    lo = [float(r["bin_lo_db"]) for r in rows]
    width = float(rows[0]["bin_hi_db"]) - lo[0]
    fig, ax = plt.subplots(figsize=(6, 4))
    for key, label in [("density_cra", "CRA"), ("density_ecra", "ECRA")]:
        ax.step(lo, [float(r[key]) for r in rows], where="post", label=label)
    ax.set(xlabel="SNIR [dB]", ylabel="density [1/dB]", xlim=(lo[0], lo[-1] + width))
    ax.legend()
    fig.tight_layout()
    fig.savefig(path.with_suffix(".png"), dpi=120)
    plt.close(fig)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("csv", nargs="+", type=Path)
    args = ap.parse_args()
    for path in args.csv:
        header = path.read_text().splitlines()[0]
        (plot_histogram if header.startswith("bin_lo_db") else plot_sweep)(path)
        print(f"{path.with_suffix('.png')}")


if __name__ == "__main__":
    main()
