"""Plot a sweep CSV: secrecy rate against n per family, with the second-order band.

usage: python demos/plot_sweep.py results/sweep_default.csv [out.png] [--variant bound2]
needs matplotlib (pip install polarwiretap[plot])
"""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

STYLE = {"polar": "o-", "rm": "s-", "mk": "^-", "abs": "d-", "rl": "x-"}

parser = argparse.ArgumentParser()
parser.add_argument("csv")
parser.add_argument("out", nargs="?", default="sweep.png")
parser.add_argument("--variant", default="bound2", choices=["bound1", "bound2"])
args = parser.parse_args()

with open(args.csv) as fh:
    rows = list(csv.DictReader(fh))

scenarios = sorted({r["p_e"] for r in rows}, key=float)
fig, axes = plt.subplots(1, len(scenarios), figsize=(6 * len(scenarios), 4.5), squeeze=False)
for ax, p_e in zip(axes[0], scenarios):
    sub = [r for r in rows if r["p_e"] == p_e]
    bench = {int(r["n"]): r for r in sub}
    ns = sorted(bench)
    ax.plot(ns, [float(bench[n]["cs"]) for n in ns], "k:", label="$C_s$")
    ax.plot(ns, [float(bench[n]["upper2nd"]) for n in ns], "k--", label="2nd-order upper")
    ax.plot(ns, [float(bench[n]["lower2nd"]) for n in ns], "k-.", label="2nd-order lower")
    curves = defaultdict(list)
    for r in sub:
        if r["variant"] == args.variant and r["status"].startswith("ok"):
            curves[r["family"]].append((int(r["n"]), float(r["R_s"])))
    for fam, pts in curves.items():
        pts.sort()
        ax.plot(*zip(*pts), STYLE.get(fam, ".-"), label=fam)
    ax.set_xscale("log", base=2)
    ax.set_xlabel("n")
    ax.set_ylabel("secrecy rate")
    ax.set_title(f"p_b={sub[0]['p_b']}, p_e={p_e} ({args.variant})")
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(args.out, dpi=150)
print("wrote", args.out)
