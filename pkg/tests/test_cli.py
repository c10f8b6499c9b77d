import json

import pytest

from hfree import cli
from hfree.config import ExperimentConfig
from hfree.graphs import write_edge_list
from hfree.patterns import parse_pattern
from hfree.verify import run_verification, verify_closure


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_params_table(capsys):
    code, out, _ = run_cli(capsys, "params", "C3", "10000")
    assert code == 0
    assert "30348" in out and "0.01" in out
    data = json.loads(out.strip().splitlines()[-1])
    assert data["m_steps"] == 30348 and data["p"] == 0.01
    assert data["eps"] == "1/10" and data["mu"] == "1/100"


def test_params_json_k4(capsys):
    code, out, _ = run_cli(capsys, "params", "K4", "64", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["p"] == pytest.approx(64 ** (-2 / 5))
    assert data["beta"] == "5/4"


def test_params_bad_pattern_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "params", "C99x", "100")
    assert code == cli.EXIT_USAGE


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == cli.EXIT_USAGE


def test_verify_cli_pass(capsys):
    code, out, _ = run_cli(capsys, "verify", "--scope", "counts",
                           "--size", "8", "--seeds", "2")
    assert code == 0 and "no mismatches" in out


def test_verify_cli_closure_scope(capsys):
    code, out, _ = run_cli(capsys, "verify", "--scope", "closure",
                           "--size", "10", "--seeds", "2")
    assert code == 0 and "no mismatches" in out


def test_verify_cli_failure_path(capsys, monkeypatch):
    monkeypatch.setattr(cli, "run_verification",
                        lambda **kw: ["synthetic mismatch"])
    code, _, err = run_cli(capsys, "verify", "--scope", "counts")
    assert code == cli.EXIT_VERIFY_FAILED
    assert "synthetic mismatch" in err


def test_verify_library_detects_corruption():
    from hfree.process import CLOSED, OPEN

    def corrupt(state, step_no):
        if step_no == 3:
            for pid, c in enumerate(state.classes):
                if c == OPEN:
                    state.classes[pid] = CLOSED
                    state._remove_open(pid)
                    break

    mismatches = verify_closure(n=8, seeds=1, patterns=("C3",), mutate=corrupt)
    assert mismatches and "closure mismatch" in mismatches[0]


def test_simulate_analyze_roundtrip(tmp_path, capsys):
    cfg = ExperimentConfig(pattern="C3", n_values=[12], trials=2, seed=7,
                           stop="exhaustion")
    cfg_path = tmp_path / "exp.cfg"
    cfg_path.write_text(cfg.to_text())
    out_dir = tmp_path / "out"
    code, out, _ = run_cli(capsys, "simulate", "--config", str(cfg_path),
                           "--out", str(out_dir))
    assert code == 0 and "manifest" in out
    code, out, _ = run_cli(capsys, "analyze", str(out_dir), "--json")
    assert code == 0
    summary = json.loads(out)
    assert summary["by_n"]["12"]["trials"] == 2


def test_simulate_partial_failure_exit(tmp_path, capsys):
    cfg = ExperimentConfig(pattern="C4", n_values=[2], trials=1, seed=0)
    cfg_path = tmp_path / "bad.cfg"
    cfg_path.write_text(cfg.to_text())
    code, _, err = run_cli(capsys, "simulate", "--config", str(cfg_path),
                           "--out", str(tmp_path / "out"))
    assert code == cli.EXIT_PARTIAL_FAILURE
    assert "FAILED" in err


def test_analyze_missing_dir(tmp_path, capsys):
    code, _, err = run_cli(capsys, "analyze", str(tmp_path / "nope"))
    assert code == cli.EXIT_USAGE


def test_density_subcommand(tmp_path, capsys):
    g = parse_pattern("K4").to_graph()
    path = tmp_path / "k4.edges"
    with open(path, "w") as fh:
        write_edge_list(g, fh)
    code, out, _ = run_cli(capsys, "density", str(path), "--k", "4")
    assert code == 0
    data = json.loads(out.splitlines()[0])
    assert data["density"] == "3/2" and data["optimal"] == 1


def test_density_threshold_check(tmp_path, capsys):
    g = parse_pattern("K12").to_graph()
    path = tmp_path / "k12.edges"
    with open(path, "w") as fh:
        write_edge_list(g, fh)
    code, out, _ = run_cli(capsys, "density", str(path), "--k", "12",
                           "--threshold", "2.0")
    assert code == cli.EXIT_VERIFY_FAILED
    check = json.loads(out.splitlines()[-1])
    assert not check["passed"]


def test_full_verification_clean():
    assert run_verification(scope="counts", size=8, seeds=2) == []
