import csv
import io
import json

import numpy as np
import pytest

from polarwiretap import cli, transforms
from polarwiretap.bitchannel import mc_profile
from polarwiretap.wiretap import SecrecyOperatingPoint, design_bound2

N4_ARGS = ["--n", "4", "--pb", "0.1", "--pe", "0.5", "--eps", "0.05", "--delta", "0.6"]


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_design_worked_instance(capsys):
    code, out = run(["design", *N4_ARGS], capsys)
    assert code == cli.EXIT_OK
    rep = json.loads(out.out)
    assert rep["schema_version"] == cli.SCHEMA_VERSION
    for variant in ("bound1", "bound2"):
        d = rep["designs"][variant]
        assert d["secrecy_rate"] == 0.25 and d["k_b"] == 2
        assert d["leakage_bound"] == pytest.approx(0.53125)
    assert rep["second_order"]["dropped_terms"] == "O(log n / n)"
    assert rep["profiles"]["eve"]["method"] == "recursion"


def test_design_is_byte_identical(tmp_path, capsys):
    args = ["design", "--family", "rl", "--n", "64", "--samples", "3000", "--seed", "4"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main([*args, "--out", str(a)]) in (cli.EXIT_OK, cli.EXIT_INFEASIBLE)
    assert cli.main([*args, "--out", str(b), "--workers", "3"]) in (cli.EXIT_OK, cli.EXIT_INFEASIBLE)
    assert a.read_bytes() == b.read_bytes()


def test_design_infeasible_exit_code(capsys):
    code, out = run(["design", *N4_ARGS[:-1], "0.2"], capsys)
    assert code == cli.EXIT_INFEASIBLE
    assert json.loads(out.out)["designs"]["bound2"]["secrecy_rate"] == 0


def test_design_usage_errors(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"families": []}))
    code, out = run(["design", "--config", str(cfg)], capsys)
    assert code == cli.EXIT_USAGE and "family" in out.err
    assert run(["design", "--n", "6"], capsys)[0] == cli.EXIT_USAGE
    assert run(["design", "--pb", "0.5", "--pe", "0.3"], capsys)[0] == cli.EXIT_USAGE
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["design", "--config", str(cfg)], capsys)[0] == cli.EXIT_USAGE
    with pytest.raises(SystemExit):
        cli.main(["design", "--bound", "3"])


def test_config_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p_b": 0.1, "p_e": 0.5, "eps": 0.05, "delta": 0.6,
                               "blocklengths": [4], "bounds": ["bound2"]}))
    rep = json.loads(run(["design", "--config", str(cfg)], capsys)[1].out)
    assert list(rep["designs"]) == ["bound2"]
    rep = json.loads(run(["design", "--config", str(cfg), "--bound", "1"], capsys)[1].out)
    assert list(rep["designs"]) == ["bound1"]
    rep = json.loads(run(["design", "--config", str(cfg), "--delta", "0.2"], capsys)[1].out)
    assert rep["operating_point"]["delta"] == 0.2


SWEEP = ["sweep", "--n", "16", "32", "--family", "polar", "rm", "mk", "abs", "rl",
         "--samples", "3000", "--seed", "2"]


@pytest.fixture(scope="module")
def sweep_text():
    cfg = cli.resolve_config(cli._parser().parse_args(SWEEP))
    text, code = cli.cmd_sweep(cfg)
    assert code == cli.EXIT_OK
    return text


def test_sweep_schema(sweep_text):
    rows = read_csv(sweep_text)
    assert list(rows[0]) == cli.SWEEP_COLUMNS
    assert len(rows) == 2 * 2 * 5 * 2
    keys = [(float(r["p_e"]), int(r["n"]), r["family"], r["variant"]) for r in rows]
    fam_rank = {f: i for i, f in enumerate(transforms.FAMILIES)}
    assert keys == sorted(keys, key=lambda k: (k[0], k[1], fam_rank[k[2]], k[3]))
    for r in rows:
        expect_cs = {0.3: 0.25, 0.4: 0.35}[float(r["p_e"])]
        assert float(r["cs"]) == pytest.approx(expect_cs)
        if r["family"] == "mk":
            assert r["status"].startswith("skipped") and r["R_s"] == ""
            continue
        assert r["status"] == "ok"
        assert float(r["R_s"]) <= float(r["upper2nd"]) + 1e-9
        assert float(r["R_s"]) == int(r["k_e"]) / int(r["n"])


def test_sweep_benchmarks_family_independent(sweep_text):
    rows = read_csv(sweep_text)
    seen = {}
    for r in rows:
        key = (r["p_e"], r["n"])
        vals = (r["cs"], r["upper2nd"], r["lower2nd"])
        assert seen.setdefault(key, vals) == vals


def test_sweep_deterministic(sweep_text, tmp_path):
    out = tmp_path / "s.csv"
    assert cli.main([*SWEEP, "--out", str(out)]) == cli.EXIT_OK
    assert out.read_text() == sweep_text


def test_sweep_row_reproducible(sweep_text):
    row = next(r for r in read_csv(sweep_text)
               if r["family"] == "rl" and r["variant"] == "bound2" and r["n"] == "32")
    seed, samples = int(row["seed"]), int(row["samples"])
    assert seed == cli.row_seed(2, "rl", 32)
    subs = cli._sub_seeds(seed)
    code = transforms.rl_transform(32, subs["construct"])
    op = SecrecyOperatingPoint(float(row["p_b"]), float(row["p_e"]), 32, 0.001, 0.01)
    d = design_bound2(mc_profile(code, op.p_b, samples, subs["bob"]),
                      mc_profile(code, op.p_e, samples, subs["eve"]), op)
    # n=32 is above the exact cutoff, so this row was sampled
    assert repr(d.secrecy_rate) == row["R_s"]


def test_sweep_with_mk_kernel(kernel16_file, capsys):
    code, out = run(["sweep", "--n", "32", "--family", "mk", "--pe", "0.4",
                     "--kernel", str(kernel16_file), "--samples", "2000"], capsys)
    assert code == cli.EXIT_OK
    rows = read_csv(out.out)
    assert {r["status"] for r in rows} == {"ok"}
    assert {r["variant"] for r in rows} == {"bound1", "bound2"}


def test_sweep_bad_n_recorded_per_row(capsys):
    code, out = run(["sweep", "--n", "24", "--family", "polar", "rl", "--pe", "0.4",
                     "--samples", "1000", "--bound", "2"], capsys)
    rows = read_csv(out.out)
    status = {r["family"]: r["status"] for r in rows}
    assert status["polar"].startswith("skipped") and status["rl"] == "ok"


def test_oracle_command(capsys):
    code, out = run(["oracle", "--configs", "12"], capsys)
    assert code == cli.EXIT_OK
    rep = json.loads(out.out)
    assert rep["cases"] == 12 and rep["passed"] and rep["failed_cases"] == []
    code, out = run(["oracle", "--n", "32"], capsys)
    assert code == cli.EXIT_USAGE and "n <= 12" in out.err
    code, out = run(["oracle", "--configs", "0"], capsys)
    rep = json.loads(out.out)
    assert code == cli.EXIT_OK and rep["vacuous"] and rep["cases"] == 0


def test_kernel_command(tmp_path, kernel16_file, capsys):
    rep = json.loads(run(["kernel", "builtin:g2"], capsys)[1].out)
    assert rep["bits"][0]["coefficients"] == [0, 2, -1]
    assert rep["bits"][1]["coefficients"] == [0, 0, 1]
    q = np.array(rep["q_grid"])
    np.testing.assert_allclose(rep["bits"][0]["values"], 2 * q - q * q, atol=1e-12)
    ident = tmp_path / "i.txt"
    ident.write_text("2\n10\n01\n")
    rep = json.loads(run(["kernel", str(ident)], capsys)[1].out)
    assert all(b["coefficients"] == [0, 1, 0] for b in rep["bits"])
    rep = json.loads(run(["kernel", str(kernel16_file)], capsys)[1].out)
    assert len(rep["bits"]) == 16
    for b in rep["bits"]:
        assert b["values"][0] == 0 and b["values"][-1] == pytest.approx(1.0, abs=1e-12)
    sing = tmp_path / "s.txt"
    sing.write_text("2\n11\n11\n")
    code, out = run(["kernel", str(sing)], capsys)
    assert code == cli.EXIT_USAGE and "singular" in out.err
