import json
from importlib import resources

from windkb.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_check(capsys):
    code, out, _ = run(capsys, "check", "--corpus", "intended")
    assert code == 0 and "coherent" in out
    code, out, err = run(capsys, "check", "--corpus", "literal")
    assert code == 1 and "Area" in out
    code, _, err = run(capsys, "--strict", "check", "--corpus", "literal")
    assert code == 2 and err


def test_compliance_exit_codes(capsys):
    code, out, _ = run(capsys, "compliance", "--corpus", "intended", "--threshold", "300")
    assert code == 1 and "violation" in out and "280.0 m" in out
    code, out, _ = run(capsys, "compliance", "--corpus", "intended", "--threshold", "250")
    assert code == 0 and "compliant" in out
    code, _, err = run(capsys, "compliance", "--corpus", "intended", "--turbine", "nobody")
    assert code == 2 and "nobody" in err


def test_malformed_input_is_an_error(capsys, tmp_path):
    bad = tmp_path / "bad.krss"
    bad.write_text("(implies A (and B)\n")
    code, _, err = run(capsys, "check", str(bad))
    assert code == 2 and "bad.krss" in err


def test_empty_query_file(capsys, tmp_path):
    q = tmp_path / "q.krss"
    q.write_text("; nothing to ask\n")
    code, out, _ = run(capsys, "query", "--corpus", "intended", "-q", str(q))
    assert code == 0 and out == ""


def test_line_json_output(capsys, tmp_path):
    q = tmp_path / "q.krss"
    q.write_text("(concept-instances (and WindTurbine (some isLocated Dobrogea)))\n(describe-individual wt1)\n")
    code, out, _ = run(capsys, "--format", "line-json", "query", "--corpus", "intended", "-q", str(q))
    assert code == 0
    rows = [json.loads(line) for line in out.splitlines()]
    assert rows[0]["answer"] == ["wt1", "wt2"]
    assert {"role": "isLocated", "object": "Romania", "materialized": True} in rows[1]["answer"]["roles"]


def test_cq_suite(capsys):
    code, out, _ = run(capsys, "cq-suite", "--corpus", "intended")
    assert code == 0 and "CQ6" in out


def test_ingest_output_reloads(capsys, tmp_path):
    csv = resources.files("windkb.corpus").joinpath("wind-map-sample.csv")
    target = tmp_path / "points.krss"
    code, _, _ = run(capsys, "ingest", "wind-map", str(csv), "-o", str(target), "--abox", "map")
    assert code == 0 and target.read_text().startswith("(init-abox map)")
    q = tmp_path / "q.krss"
    q.write_text("(concept-instances ExcellentPotentialat50)\n")
    code, out, _ = run(capsys, "query", "--corpus", "intended", str(target), "-q", str(q))
    assert code == 0 and "point_3" in out


def test_fuzz_oracle(capsys, tmp_path):
    code, out, _ = run(capsys, "fuzz-oracle", "--cases", "100")
    assert code == 0 and "0 disagreements" in out
    code, out, _ = run(
        capsys, "fuzz-oracle", "--cases", "500", "--profile", "transitive",
        "--inject-fault", "skip_forall_plus", "--stop-after", "1", "--repro-dir", str(tmp_path),
    )
    assert code == 1
    assert list(tmp_path.glob("*.krss"))


def test_usage_errors_exit_2(capsys):
    assert main(["no-such-command"]) == 2
    assert main(["compliance", "--threshold", "abc"]) == 2
    assert "invalid" in capsys.readouterr().err


def test_flags_work_before_and_after_the_subcommand(capsys):
    a = run(capsys, "--threshold", "250", "compliance", "--corpus", "intended")
    b = run(capsys, "compliance", "--corpus", "intended", "--threshold", "250")
    assert a == b and a[0] == 0
