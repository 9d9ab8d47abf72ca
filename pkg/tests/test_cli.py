import json

import pytest

from minerror import cli

from conftest import CORPUS


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_localize_running_example(capsys):
    code, out, _ = run(capsys, str(CORPUS / "running_example.ml"))
    assert code == 1
    assert "cost 1" in out and "line 4, col 18-23: first" in out


def test_json_report(capsys):
    code, out, _ = run(capsys, str(CORPUS / "running_example.ml"), "--json")
    rep = json.loads(out)
    assert code == 1
    assert rep["version"] == cli.REPORT_VERSION
    assert rep["cost"] == 1 and rep["iterations"] == 1
    assert rep["sources"][0]["snippet"] == "first"
    assert rep["sources"][0]["location"] == "1.1.0.0.0.0"
    assert set(rep["timing"]) >= {"parse", "index", "generate", "solve"}


def test_well_typed_exit_zero(capsys):
    code, out, _ = run(capsys, str(CORPUS / "well_typed_id.ml"))
    assert code == 0 and "well typed" in out


def test_algorithms_agree(capsys):
    costs = []
    for algo in ("iterative", "naive"):
        _, out, _ = run(capsys, str(CORPUS / "inc_bool.ml"), "--json", "--algo", algo)
        costs.append(json.loads(out)["cost"])
    _, out, _ = run(capsys, str(CORPUS / "inc_bool.ml"), "--json", "--algo", "brute")
    costs.append(json.loads(out)["cost"])
    assert len(set(costs)) == 1


def test_parse_error_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.ml"
    bad.write_text("let x = in")
    code, _, err = run(capsys, str(bad))
    assert code == 2 and "unexpected" in err


def test_usage_errors(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "--algo", "magic", "x.ml")[0] == 2
    assert run(capsys, "/nonexistent.ml")[0] == 2


def test_check_mode(capsys):
    code, out, _ = run(capsys, "--check", str(CORPUS / "well_typed_id.ml"))
    assert code == 0 and "int * bool" in out
    assert run(capsys, "--check", str(CORPUS / "running_example.ml"))[0] == 1


def test_emit_constraints(tmp_path, capsys):
    out = tmp_path / "inst.txt"
    code, msg, _ = run(capsys, str(CORPUS / "running_example.ml"), "--emit-constraints", str(out))
    assert code == 0 and "16 assertions" in msg
    text = out.read_text()
    assert text.startswith("c minerror-instance 1") and "P[1.1.0] <=>" in text


def test_generate(capsys):
    code, out, _ = run(capsys, "--gen-depth", "2", "--seed", "3")
    assert code == 0 and out.startswith("let f0 x = x + 1\n")


def test_bench_single_file(tmp_path, capsys):
    (tmp_path / "one.ml").write_text((CORPUS / "inc_bool.ml").read_text())
    code, out, _ = run(capsys, "--bench", str(tmp_path), "--json")
    rep = json.loads(out)
    assert code == 0 and len(rep["rows"]) == 1
    row = rep["rows"][0]
    _, single, _ = run(capsys, str(tmp_path / "one.ml"), "--json")
    single = json.loads(single)
    assert row["iterative_cost"] == single["cost"]
    assert row["iterative_assertions"] == single["assertions"][-1]


def test_bench_empty_directory(tmp_path, capsys):
    code, out, _ = run(capsys, "--bench", str(tmp_path), "--json")
    assert code == 0 and json.loads(out)["rows"] == []


def test_bench_skips_unparseable(tmp_path, capsys):
    (tmp_path / "bad.ml").write_text("let")
    (tmp_path / "ok.ml").write_text("1 true")
    code, out, err = run(capsys, "--bench", str(tmp_path))
    assert code == 0 and "skipping" in err


def test_gen_family_bench(tmp_path, capsys):
    code, out, _ = run(capsys, "--bench", str(tmp_path / "fam"), "--gen-depth", "3", "--json", "--jobs", "2")
    rows = json.loads(out)["rows"]
    assert code == 0 and len(rows) == 3
    naive = [r["naive_assertions"] for r in rows]
    assert naive == sorted(naive)


def _strip_timing(rep):
    rep = dict(rep)
    rep.pop("timing")
    return rep


@pytest.mark.parametrize("name", sorted(p.name for p in CORPUS.glob("*.ml")))
def test_json_is_deterministic(name, capsys):
    _, a, _ = run(capsys, str(CORPUS / name), "--json")
    _, b, _ = run(capsys, str(CORPUS / name), "--json")
    assert _strip_timing(json.loads(a)) == _strip_timing(json.loads(b))
