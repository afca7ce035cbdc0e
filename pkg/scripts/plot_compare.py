"""Bar charts of an `ipndn compare` summary (mean with 95% CI error bars).

    python scripts/plot_compare.py results/summary.csv -o results/compare.png
"""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

PANELS = [
    ("rate_bps", "goodput (Mbit/s)", 1e-6),
    ("jitter_ms", "jitter (ms)", 1.0),
    ("loss_pct", "loss (%)", 1.0),
    ("overhead_ratio", "NDN packets / delivered datagram", 1.0),
]


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("summary")
    ap.add_argument("-o", "--out", default="compare.png")
    args = ap.parse_args(argv)

    data = defaultdict(dict)
    with open(args.summary, newline="") as fh:
        for row in csv.DictReader(fh):
            ci = float(row["ci95"]) if row["ci95"] else 0.0
            data[row["metric"]][row["mode"]] = (float(row["mean"]), ci)

    fig, axes = plt.subplots(1, len(PANELS), figsize=(4 * len(PANELS), 3.5))
    for ax, (metric, label, scale) in zip(axes, PANELS):
        modes = sorted(data[metric])
        means = [data[metric][m][0] * scale for m in modes]
        errs = [data[metric][m][1] * scale for m in modes]
        ax.bar(modes, means, yerr=errs, capsize=6, color=["#999999", "#3070b0"][: len(modes)])
        ax.set_title(label)
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
