"""Small version of the family sweep (n up to 256, 20k samples), printed as a table.

The full grid is `polarwiretap sweep --out results/sweep_default.csv`.
"""

import csv
import io

from polarwiretap import cli

args = cli._parser().parse_args(
    ["sweep", "--n", "64", "128", "256", "--samples", "20000", "--bound", "both"])
text, _ = cli.cmd_sweep(cli.resolve_config(args))

print(f"{'p_e':>4} {'n':>5} {'family':>6} {'variant':>7} {'k_b':>4} {'k_e':>4} {'R_s':>7} "
      f"{'upper2nd':>8}  status")
for r in csv.DictReader(io.StringIO(text)):
    rs = f"{float(r['R_s']):.4f}" if r["R_s"] else "-"
    print(f"{r['p_e']:>4} {r['n']:>5} {r['family']:>6} {r['variant']:>7} {r['k_b']:>4} "
          f"{r['k_e']:>4} {rs:>7} {float(r['upper2nd']):8.4f}  {r['status']}")
