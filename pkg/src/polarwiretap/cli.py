"""Command-line front end: ``design``, ``sweep``, ``oracle`` and ``kernel``.

Each subcommand reads an optional JSON config (``--config``); explicit flags
override config keys.  Recognized config keys::

    p_b           float           legitimate receiver's erasure probability
    p_e           float or list   eavesdropper erasure probability (list: sweep scenarios)
    eps, delta    float           error and leakage budgets
    families      list of str     subset of polar, rm, mk, abs, rl
    blocklengths  list of int
    bounds        list of str     subset of bound1, bound2
    samples       int             Monte-Carlo patterns per profile
    seed          int             base seed
    workers       int             threads for Monte-Carlo chunks
    kernel        str             path to the large kernel used by the mk family
    abs_samples   int             Monte-Carlo patterns for ABS swap decisions
    configs       int             oracle: number of random partitions
    out           str             output path (stdout when absent)

Exit codes: 0 success, 1 oracle check failed, 2 invalid input,
3 ran but no feasible design (zero secrecy rate).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import warnings
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from . import oracle, transforms
from .bitchannel import (
    DEFAULT_SAMPLES,
    arikan_recursion,
    erasure_polynomial,
    exhaustive_profile,
    kernel_recursion,
    mc_profile,
)
from .wiretap import (
    SecrecyOperatingPoint,
    design_bound1,
    design_bound2,
    dispersions,
    second_order_bounds,
    secrecy_capacity,
)

log = logging.getLogger("polarwiretap")

SCHEMA_VERSION = 1
# Below this blocklength every profile is enumerated exactly instead of sampled.
EXACT_MAX_N = 16
EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2, 3

SWEEP_COLUMNS = ["n", "family", "variant", "k_b", "k_e", "R_s", "pe_bound", "leakage_bound",
                 "cs", "upper2nd", "lower2nd", "samples", "seed", "p_b", "p_e", "status"]

DEFAULTS = {
    "p_b": 0.05,
    "p_e": [0.3, 0.4],
    "eps": 0.001,
    "delta": 0.01,
    "families": list(transforms.FAMILIES),
    "blocklengths": [128, 256, 512, 1024],
    "bounds": ["bound1", "bound2"],
    "samples": DEFAULT_SAMPLES,
    "seed": 0,
    "workers": 1,
    "kernel": None,
    "abs_samples": transforms.ABS_SAMPLES,
    "configs": 50,
    "out": None,
}


class UsageError(ValueError):
    pass


def _tool_version() -> str:
    try:
        return version("polarwiretap")
    except PackageNotFoundError:
        return "unknown"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n"


# ------------------------------------------------------------ construction


def row_seed(base_seed: int, family: str, n: int) -> int:
    """Seed of one (family, n) row, derived from the base seed alone."""
    fam = transforms.FAMILIES.index(family)
    return int(np.random.SeedSequence([base_seed, fam, n]).generate_state(1)[0])


def _sub_seeds(seed: int) -> dict:
    s = np.random.SeedSequence(seed).generate_state(4)
    return dict(zip(("construct", "bob", "eve", "bound1"), (int(v) for v in s)))


def _log2_exact(n: int) -> int:
    m = int(round(math.log2(n))) if n > 0 else -1
    if m < 1 or 2**m != n:
        raise UsageError(f"n={n} is not a power of two >= 2")
    return m


def _mk_kernels(n: int, big):
    if big is None:
        raise UsageError("mk family needs a large kernel file (--kernel)")
    rest, rem = divmod(n, big.size)
    if rem or rest < 1 or rest & (rest - 1):
        raise UsageError(f"n={n} is not {big.size} times a power of two")
    return [big] + [transforms.arikan_kernel()] * int(round(math.log2(rest)))


def build_code(family: str, n: int, op: SecrecyOperatingPoint, seed: int, cfg: dict):
    """Construct the code and its receiver/eavesdropper profiles for one row."""
    seeds = _sub_seeds(seed)
    samples, workers = cfg["samples"], cfg["workers"]
    if family == "polar":
        m = _log2_exact(n)
        code = transforms.polar_transform(m)
        return code, arikan_recursion(op.p_b, m), arikan_recursion(op.p_e, m)
    if family == "mk":
        kernels = _mk_kernels(n, cfg.get("_kernel_spec"))
        code = transforms.mk_transform(kernels)
        return code, kernel_recursion(kernels, op.p_b), kernel_recursion(kernels, op.p_e)
    if family == "rm":
        code = transforms.rm_transform(_log2_exact(n))
    elif family == "abs":
        code = transforms.abs_transform(_log2_exact(n), op.p_b, op.p_e,
                                        samples=cfg["abs_samples"], seed=seeds["construct"])
    elif family == "rl":
        code = transforms.rl_transform(n, seeds["construct"])
    else:
        raise UsageError(f"unknown family {family!r}")
    if n <= EXACT_MAX_N:
        return code, exhaustive_profile(code, op.p_b), exhaustive_profile(code, op.p_e)
    bob = mc_profile(code, op.p_b, samples, seeds["bob"], workers)
    eve = mc_profile(code, op.p_e, samples, seeds["eve"], workers)
    return code, bob, eve


def run_designs(family: str, op: SecrecyOperatingPoint, seed: int, cfg: dict):
    code, bob, eve = build_code(family, op.n, op, seed, cfg)
    designs = {}
    if "bound2" in cfg["bounds"]:
        designs["bound2"] = design_bound2(bob, eve, op)
    if "bound1" in cfg["bounds"]:
        designs["bound1"] = design_bound1(code, bob, eve, op, samples=cfg["samples"],
                                          seed=_sub_seeds(seed)["bound1"],
                                          workers=cfg["workers"],
                                          method="exhaustive" if op.n <= EXACT_MAX_N
                                          else "monte-carlo")
    return code, bob, eve, designs


def _second_order(op: SecrecyOperatingPoint) -> dict:
    v_b, v_e, v_c = dispersions(op)
    d = {"cs": secrecy_capacity(op), "v_b": v_b, "v_e": v_e, "v_c": v_c,
         "dropped_terms": "O(log n / n)"}
    if op.eps + op.delta < 1:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            upper, lower = second_order_bounds(op)
        d.update(upper=upper, lower=lower, upper_exceeds_cs=upper > d["cs"])
    return d


def _profile_summary(p) -> dict:
    d = {"method": p.method, "erasure_prob": p.channel.erasure_prob,
         "capacity_sum": float(p.capacity.sum()), "n": p.n}
    if p.method == "monte-carlo":
        d.update(samples=p.samples, max_std_err=float(p.std_err.max()))
    return d


def _provenance(code) -> dict:
    prov = {k: v for k, v in code.provenance.items() if k not in ("evaluations", "column_order")}
    return prov


# ---------------------------------------------------------------- commands


def cmd_design(cfg: dict) -> tuple[str, int]:
    families = cfg["families"]
    if len(families) != 1:
        raise UsageError("design needs exactly one family")
    ns = cfg["blocklengths"]
    if len(ns) != 1:
        raise UsageError("design needs exactly one blocklength")
    p_e = cfg["p_e"]
    if isinstance(p_e, list):
        if len(p_e) != 1:
            raise UsageError("design needs exactly one p_e")
        p_e = p_e[0]
    family, n = families[0], int(ns[0])
    op = SecrecyOperatingPoint(cfg["p_b"], p_e, n, cfg["eps"], cfg["delta"])
    seed = row_seed(cfg["seed"], family, n)
    code, bob, eve, designs = run_designs(family, op, seed, cfg)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": _tool_version(),
        "family": family,
        "operating_point": {"p_b": op.p_b, "p_e": op.p_e, "n": n, "eps": op.eps,
                            "delta": op.delta},
        "designs": {k: d.to_dict() for k, d in designs.items()},
        "profiles": {"bob": _profile_summary(bob), "eve": _profile_summary(eve)},
        "second_order": _second_order(op),
        "provenance": {"base_seed": cfg["seed"], "row_seed": seed, "samples": cfg["samples"],
                       "construction": _provenance(code)},
    }
    feasible = any(d.feasible for d in designs.values())
    return dumps(report), EXIT_OK if feasible else EXIT_INFEASIBLE


def _fmt(v) -> str:
    return repr(float(v)) if isinstance(v, (float, np.floating)) else str(v)


def sweep_rows(cfg: dict) -> list[dict]:
    p_es = cfg["p_e"] if isinstance(cfg["p_e"], list) else [cfg["p_e"]]
    rows = []
    for p_e in sorted(p_es):
        for n in sorted(int(v) for v in cfg["blocklengths"]):
            op = SecrecyOperatingPoint(cfg["p_b"], p_e, n, cfg["eps"], cfg["delta"])
            so = _second_order(op)
            for family in [f for f in transforms.FAMILIES if f in cfg["families"]]:
                seed = row_seed(cfg["seed"], family, n)
                base = {"n": n, "family": family, "cs": so["cs"], "upper2nd": so.get("upper"),
                        "lower2nd": so.get("lower"), "seed": seed, "p_b": op.p_b, "p_e": p_e}
                log.info("sweep p_e=%s n=%d family=%s", p_e, n, family)
                try:
                    code, bob, eve, designs = run_designs(family, op, seed, cfg)
                except Exception as exc:  # recorded per row, sweep continues
                    status = f"skipped: {exc}" if isinstance(exc, UsageError) else f"error: {exc}"
                    for variant in sorted(cfg["bounds"]):
                        rows.append(dict(base, variant=variant, status=status))
                    continue
                for variant in sorted(designs):
                    d = designs[variant]
                    mc = bob.method == "monte-carlo" or (variant == "bound1"
                                                         and n > EXACT_MAX_N)
                    status = "ok"
                    if so.get("upper") is not None and d.secrecy_rate > so["upper"] + 1e-9:
                        status = "ok; above converse"
                    rows.append(dict(base, variant=variant, k_b=d.k_b, k_e=d.k_e,
                                     R_s=d.secrecy_rate, pe_bound=d.pe_bound,
                                     leakage_bound=d.leakage_bound,
                                     samples=cfg["samples"] if mc else 0, status=status))
    return rows


def cmd_sweep(cfg: dict) -> tuple[str, int]:
    if not cfg["families"]:
        raise UsageError("no families to sweep")
    if cfg.get("kernel"):
        cfg["_kernel_spec"] = transforms.load_kernel(cfg["kernel"])
    rows = sweep_rows(cfg)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: _fmt(r[k]) if r.get(k) is not None else "" for k in SWEEP_COLUMNS})
    return buf.getvalue(), EXIT_OK


def _oracle_code(family: str, n: int, p_b: float, p_e: float, seed: int):
    if family == "rl":
        return transforms.rl_transform(n, seed)
    m = _log2_exact(n)
    if family == "polar":
        return transforms.polar_transform(m)
    if family == "rm":
        return transforms.rm_transform(m)
    if family == "abs":
        return transforms.abs_transform(m, p_b, p_e, seed=seed)
    raise UsageError(f"oracle does not build family {family!r}")


def oracle_suite(n: int = 8, configs: int = 50, p_b: float = 0.1,
                 p_e_values=(0.3, 0.5, 0.8), families=("polar", "rm", "abs", "rl"),
                 seed: int = 0) -> dict:
    """Random partitions checked against the exact leakage and block error."""
    if n > oracle.LEAKAGE_MAX_N:
        raise oracle.BudgetError(f"oracle suite limited to n <= {oracle.LEAKAGE_MAX_N}, got {n}")
    rng = np.random.default_rng(seed)
    reports = []
    for c in range(configs):
        family = families[c % len(families)]
        p_e = float(p_e_values[c % len(p_e_values)])
        code = _oracle_code(family, n, p_b, p_e, seed + c)
        labels = rng.integers(0, 3, size=n)
        design = oracle.partition_design(n, *(np.flatnonzero(labels == v) for v in range(3)))
        reports.append(oracle.leakage_report(code, design, p_b, p_e,
                                             config={"case": c, "family": family, "n": n}))
    checks = [r.chain_ok() for r in reports]
    failed = [i for i, ch in enumerate(checks) if not all(ch.values())]
    return {"cases": len(reports), "vacuous": len(reports) == 0, "passed": not failed,
            "failed_cases": failed, "reports": [r.to_dict() for r in reports]}


def cmd_oracle(cfg: dict) -> tuple[str, int]:
    ns = cfg["blocklengths"]
    n = int(ns[0]) if isinstance(ns, list) else int(ns)
    p_es = cfg["p_e"] if isinstance(cfg["p_e"], list) else [cfg["p_e"]]
    families = [f for f in cfg["families"] if f != "mk"] or ["polar"]
    result = oracle_suite(n, cfg["configs"], cfg["p_b"], p_es, families, cfg["seed"])
    result["schema_version"] = SCHEMA_VERSION
    return dumps(result), EXIT_OK if result["passed"] else EXIT_CHECK_FAILED


def cmd_kernel(path: str) -> tuple[str, int]:
    k = transforms.load_kernel(path)
    grid = np.linspace(0.0, 1.0, 11)
    values = erasure_polynomial(k.weight_counts, grid)
    report = {
        "schema_version": SCHEMA_VERSION,
        "size": k.size,
        "matrix": k.matrix.to_text().splitlines(),
        "q_grid": grid,
        "bits": [
            {"index": i,
             "undecodable_weight_counts": k.weight_counts[i],
             "coefficients": k.polynomial_coefficients()[i],
             "values": values[:, i]}
            for i in range(k.size)
        ],
    }
    return dumps(report), EXIT_OK


# ------------------------------------------------------------------ parser


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--bound", choices=["1", "2", "both"])
    common.add_argument("--family", nargs="+", choices=list(transforms.FAMILIES))
    common.add_argument("--pb", type=float)
    common.add_argument("--pe", type=float, nargs="+")
    common.add_argument("--eps", type=float)
    common.add_argument("--delta", type=float)
    common.add_argument("--n", type=int, nargs="+")
    common.add_argument("--kernel", help="large kernel file for the mk family")
    common.add_argument("--configs", type=int, help="oracle: number of random partitions")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="polarwiretap",
                                description="Polar-like wiretap code design over BEC wiretap channels.")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("design", parents=[common], help="one (family, n) design, JSON report")
    sub.add_parser("sweep", parents=[common], help="secrecy-rate sweep, CSV")
    sub.add_parser("oracle", parents=[common], help="exact small-n validation, JSON report")
    k = sub.add_parser("kernel", parents=[common], help="kernel erasure polynomials, JSON")
    k.add_argument("kernel_file")
    return p


_FLAG_KEYS = {"seed": "seed", "samples": "samples", "workers": "workers", "family": "families",
              "pb": "p_b", "pe": "p_e", "eps": "eps", "delta": "delta", "n": "blocklengths",
              "kernel": "kernel", "configs": "configs", "out": "out"}


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.command in ("design", "oracle"):
        cfg.update(p_e=0.3 if args.command == "design" else [0.3, 0.5, 0.8],
                   blocklengths=[1024] if args.command == "design" else [8])
        if args.command == "design":
            cfg["families"] = ["polar"]
        else:
            cfg["p_b"] = 0.1
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for flag, key in _FLAG_KEYS.items():
        val = getattr(args, flag, None)
        if val is not None:
            cfg[key] = val
    if args.bound is not None:
        cfg["bounds"] = {"1": ["bound1"], "2": ["bound2"], "both": ["bound1", "bound2"]}[args.bound]
    if cfg["samples"] < 1:
        raise UsageError("samples must be >= 1")
    if cfg.get("kernel") and args.command == "design":
        cfg["_kernel_spec"] = transforms.load_kernel(cfg["kernel"])
    return cfg


def main(argv=None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        if args.command == "design":
            text, code = cmd_design(cfg)
        elif args.command == "sweep":
            text, code = cmd_sweep(cfg)
        elif args.command == "oracle":
            text, code = cmd_oracle(cfg)
        else:
            text, code = cmd_kernel(args.kernel_file)
    except (UsageError, ValueError, OSError) as exc:
        print(f"polarwiretap {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if cfg.get("out"):
        with open(cfg["out"], "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
