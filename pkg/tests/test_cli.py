"""Command-line interface: outputs are byte-exact, exit codes are stable."""

import io
import json
import subprocess
import sys

import fps_iterate.cli as cli
from fps_iterate.verify import DiscrepancyReport, Mismatch


def write_series(tmp_path, name, coeffs, **extra):
    path = tmp_path / name
    path.write_text(json.dumps({"coeffs": coeffs, **extra}))
    return str(path)


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_iterate_exact_output(tmp_path, capsys):
    path = write_series(tmp_path, "s.json", ["1", "1"])
    code, out, err = run_cli(capsys, "iterate", path, "-n", "2", "--order", "4")
    assert code == 0
    assert out == '{"domain": "rational", "order": 4, "coeffs": ["1", "2", "2", "1"]}\n'
    assert err == ""


def test_iterate_identity_padding(tmp_path, capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO('{"coeffs": ["1"]}'))
    code, out, _ = run_cli(capsys, "iterate", "-", "-n", "9", "--order", "3")
    assert code == 0
    assert out == '{"domain": "rational", "order": 3, "coeffs": ["1", "0", "0"]}\n'


def test_iterate_truncates(tmp_path, capsys):
    path = write_series(tmp_path, "s.json", ["2", "1", "0", "0"])
    code, out, _ = run_cli(capsys, "iterate", path, "-n", "2", "--order", "2")
    assert code == 0
    assert out == '{"domain": "rational", "order": 2, "coeffs": ["4", "6"]}\n'


def test_coeff_muckenhoupt(tmp_path, capsys):
    path = write_series(tmp_path, "g.json", ["2", "1"])
    code, out, _ = run_cli(
        capsys, "coeff", path, "-k", "2", "-n", "2", "--method", "muckenhoupt"
    )
    assert code == 0
    assert out == '{"k": 2, "n": 2, "method": "muckenhoupt", "value": "6"}\n'


def test_coeff_schroder(tmp_path, capsys):
    path = write_series(tmp_path, "s.json", ["1", "1"])
    code, out, _ = run_cli(
        capsys,
        "coeff", path, "-k", "5", "-n", "3", "--method", "schroder", "--order", "5",
    )
    assert code == 0
    assert json.loads(out) == {"k": 5, "n": 3, "method": "schroder", "value": "10"}


def test_coeff_all_methods_agree(tmp_path, capsys):
    path = write_series(tmp_path, "s.json", ["2", "1", "-1", "1/2"])
    values = {}
    for method in ("oracle", "recursive", "closed", "small"):
        code, out, _ = run_cli(
            capsys, "coeff", path, "-k", "4", "-n", "3", "--method", method
        )
        assert code == 0
        values[method] = json.loads(out)["value"]
    assert len(set(values.values())) == 1


def test_coeff_default_method(tmp_path, capsys):
    path = write_series(tmp_path, "g.json", ["2", "1"])
    code, out, _ = run_cli(capsys, "coeff", path, "-k", "2", "-n", "2")
    assert code == 0
    assert json.loads(out)["method"] == "recursive"
    assert json.loads(out)["value"] == "6"


def test_formula_outputs(capsys):
    code, out, _ = run_cli(capsys, "formula", "-k", "1", "-n", "4")
    assert code == 0
    assert out == "a1^4\n"
    code, out, _ = run_cli(capsys, "formula", "-k", "3", "-n", "2", "--a1", "one")
    assert code == 0
    assert out == "2*a2^2 + 2*a3\n"
    code, out, _ = run_cli(capsys, "formula", "-k", "2", "-n", "3")
    assert code == 0
    assert out == "a1^4*a2 + a1^3*a2 + a1^2*a2\n"


def test_formula_json(capsys):
    code, out, _ = run_cli(capsys, "formula", "-k", "2", "-n", "2", "--json")
    assert code == 0
    assert json.loads(out) == {
        "k": 2,
        "n": 2,
        "a1": "generic",
        "formula": "a1^2*a2 + a1*a2",
    }


def test_formula_guardrail(capsys):
    code, _, err = run_cli(capsys, "formula", "-k", "9", "-n", "2")
    assert code == 2
    assert "--allow-large" in err
    code, out, _ = run_cli(capsys, "formula", "-k", "9", "-n", "2", "--allow-large")
    assert code == 0
    assert out.startswith("a1^")


def test_identities_command(capsys):
    code, out, _ = run_cli(capsys, "identities", "--n-max", "10", "--alpha-max", "3")
    assert code == 0
    assert "all identities hold" in out
    code, out, _ = run_cli(
        capsys, "identities", "--n-max", "8", "--alpha-max", "2", "--json"
    )
    assert code == 0
    blob = json.loads(out)
    assert blob["ok"] is True
    assert [row["alpha"] for row in blob["rows"]] == [1, 2]


def test_verify_preset(capsys):
    code, out, _ = run_cli(capsys, "verify", "--preset", "typo-adjudication")
    assert code == 0
    assert "result: PASS" in out


def test_verify_sweep_spec_file(tmp_path, capsys):
    spec = {
        "k_max": 4,
        "n_max": 3,
        "domains": ["rational"],
        "methods": ["oracle", "recursive", "closed"],
        "generator": {"kind": "random-rational", "seed": 5, "count": 4, "order": 4},
    }
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec))
    code, out, _ = run_cli(capsys, "verify", "--sweep-spec", str(path), "--json")
    assert code == 0
    blob = json.loads(out)
    assert blob["mismatches"] == 0
    assert len(blob["cells"]) == 4 * 4 * 3


def test_verify_failure_exit_code(capsys, monkeypatch):
    failing = DiscrepancyReport(
        {},
        [],
        [
            Mismatch(
                "rational", 0, 2, 2, ("oracle", "closed"),
                {"oracle": "1", "closed": "2"}, "1",
            )
        ],
    )
    monkeypatch.setattr(cli, "run_preset", lambda name: failing)
    code, out, _ = run_cli(capsys, "verify")
    assert code == 1
    assert "result: FAIL" in out


def test_round_trip_fixed_point(tmp_path, capsys):
    path = write_series(tmp_path, "s.json", ["1", "1"])
    code, out, _ = run_cli(capsys, "iterate", path, "-n", "2", "--order", "5")
    assert code == 0
    again = tmp_path / "t.json"
    again.write_text(out)
    code, once_more, _ = run_cli(capsys, "iterate", str(again), "-n", "1")
    assert code == 0
    assert once_more == out


def test_usage_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("not json")
    code, _, err = run_cli(capsys, "iterate", str(bad), "-n", "2")
    assert code == 2 and "error:" in err
    code, _, err = run_cli(capsys, "iterate", str(bad) + ".missing", "-n", "2")
    assert code == 2 and "error:" in err
    path = write_series(tmp_path, "g.json", ["2", "1", "0"])
    code, _, err = run_cli(
        capsys, "coeff", path, "-k", "3", "-n", "2", "--method", "schroder"
    )
    assert code == 2 and "a_1 = 1" in err
    code, _, err = run_cli(
        capsys, "coeff", path, "-k", "3", "-n", "2", "--method", "muckenhoupt"
    )
    assert code == 2 and "k = 2" in err
    code, _, err = run_cli(capsys, "coeff", path, "-k", "9", "-n", "2")
    assert code == 2 and "order" in err


def test_argparse_errors(tmp_path, capsys):
    path = write_series(tmp_path, "s.json", ["1", "1"])
    assert run_cli(capsys, "iterate", path, "-n", "0")[0] == 2
    assert run_cli(capsys, "iterate", path, "-n", "x")[0] == 2
    assert run_cli(capsys, "coeff", path, "-k", "1", "-n", "1", "--method", "m")[0] == 2
    assert run_cli(capsys)[0] == 2
    assert run_cli(capsys, "nosuchcommand")[0] == 2
    assert run_cli(capsys, "--help")[0] == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "fps_iterate.cli", "formula", "-k", "2", "-n", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "a1^2*a2 + a1*a2\n"
