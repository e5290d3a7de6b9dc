import csv
import io
import json
import subprocess
import sys

import pytest

from sadic.cli import main
from sadic.fixtures import fixture


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


@pytest.fixture
def fib_file(tmp_path):
    path = tmp_path / "fib.txt"
    path.write_text(fixture("fibonacci").generate(2000).to_text() + "\n")
    return str(path)


def test_morph_info_csv():
    code, text = run("morph-info", "mu")
    info = {r["property"]: r["value"] for r in rows(text)}
    assert code == 0 and info["primitive"] == "True" and info["growth"]


def test_morph_info_json_from_file(tmp_path):
    path = tmp_path / "m.txt"
    path.write_text("phi = [01, 0]\n")
    code, text = run("morph-info", str(path), "--format", "json")
    assert code == 0 and any(r["property"] == "domain" and r["value"] == "2" for r in json.loads(text))
    path.write_text("0 -> 01, 1 -> 0\n")
    assert run("morph-info", str(path))[0] == 2


def test_morph_info_unknown():
    assert run("morph-info", "no-such-morphism")[0] == 2


def test_gen_to_stdout_and_zero_length():
    code, text = run("gen", "--fixture", "thue-morse", "--length", "8")
    assert code == 0 and text == "01101001\n"
    assert run("gen", "--fixture", "thue-morse", "--length", "0") == (0, "")


def test_gen_out_writes_sidecar(tmp_path):
    target = tmp_path / "w.txt"
    code, _ = run("gen", "--fixture", "gamma-mu", "--length", "500", "--out", str(target))
    sidecar = json.loads((tmp_path / "w.txt.json").read_text())
    assert code == 0 and len(target.read_text().strip()) == 500 and sidecar["directive"] == "gamma-mu"


def test_gen_round_trips_directive_json(tmp_path):
    d = fixture("pi-family").directive
    path = tmp_path / "d.json"
    path.write_text(json.dumps(d.to_json()))
    code, text = run("gen", "--directive", str(path), "--length", "300")
    assert code == 0 and text.strip() == fixture("pi-family").generate(300).to_text()


def test_gen_malformed_directive(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run("gen", "--directive", str(path), "--length", "10")[0] == 2
    path.write_text(json.dumps({"morphisms": {}, "blocks": []}))
    assert run("gen", "--directive", str(path), "--length", "10")[0] == 2


def test_gen_memory_cap(monkeypatch):
    assert run("gen", "--fixture", "fibonacci", "--length", "5000", "--mem-cap", "100")[0] == 2
    monkeypatch.setenv("SADIC_MEM_CAP", "100")
    assert run("gen", "--fixture", "fibonacci", "--length", "5000")[0] == 2


def test_complexity_from_file(fib_file):
    code, text = run("complexity", "--input", fib_file, "--nmax", "10")
    table = rows(text)
    assert code == 0 and [int(r["p"]) for r in table] == list(range(1, 12))


def test_complexity_json_has_horizon():
    code, text = run("complexity", "--fixture", "thue-morse", "--prefix", "4096", "--nmax", "8", "--format", "json")
    payload = json.loads(text)
    assert code == 0 and payload["validity_horizon"] >= 8 and payload["prefix_length"] == 4096


def test_complexity_needs_input():
    assert run("complexity", "--nmax", "4")[0] == 2
    assert run("complexity", "--fixture", "fibonacci", "--nmax", "4")[0] == 2


def test_special_and_bispecial(fib_file):
    code, text = run("special", "--input", fib_file, "--n", "3")
    assert code == 0 and [r["factor"] for r in rows(text)] == ["010"]
    code, text = run("bispecial", "--input", fib_file, "--nmax", "6")
    assert code == 0 and "010" in [r["factor"] for r in rows(text)]


def test_returns_by_factor_and_length(fib_file):
    code, text = run("returns", "--input", fib_file, "--factor", "0")
    assert code == 0 and rows(text)[0]["returns"] == "0;01"
    code, text = run("returns", "--input", fib_file, "--length", "4")
    assert code == 0 and all(r["count"] == "2" for r in rows(text))


def test_pow_formats(fib_file):
    assert run("pow", "--input", fib_file, "--factor", "0", "--cap", "5", "--format", "json") == (
        0,
        '{"u": "0", "pow": [1, 2], "cap": 5}\n',
    )
    code, text = run("pow", "--input", fib_file, "--factor", "0", "--cap", "5")
    assert code == 0 and rows(text)[0]["pow"] == "1 2"


def test_classify_morphism_and_word(fib_file):
    code, text = run("classify", "--morphism", "mu")
    info = {r["property"]: r["value"] for r in rows(text)}
    assert code == 0 and info["recurrence"]
    code, text = run("classify", "--fixture", "fibonacci", "--prefix", "100000", "--nmax", "2000")
    info = {r["property"]: r["value"] for r in rows(text)}
    assert code == 0 and info["best_model"] == "linear"


def test_verify_sturmian_passes(capsys):
    code, text = run("verify", "sturmian", "--k", "1,1,1,1", "--format", "json")
    payload = json.loads(text)
    assert code == 0 and payload["targets"]["sturmian"]["passed"]
    assert all(r["passed"] for r in payload["rows"])
    assert "[PASS]" in capsys.readouterr().err


def test_verify_is_deterministic():
    first = run("verify", "sturmian", "--k", "2,1,3,1")[1]
    second = run("verify", "sturmian", "--k", "2,1,3,1")[1]
    assert first == second and first


def test_verify_failure_exit_code():
    # Chacon's complexity is 2n - 1 beyond n = 1, so the 2n + 1 claim fails
    assert run("verify", "chacon")[0] == 1


def test_verify_usage_errors():
    assert run("verify", "nope")[0] == 2
    assert run("verify", "chacon", "--k", "1")[0] == 2


def test_argparse_errors_exit_two():
    assert run("gen", "--length", "-3")[0] == 2
    assert run()[0] == 2


def test_module_entry_point(fib_file):
    proc = subprocess.run(
        [sys.executable, "-m", "sadic", "pow", "--input", "-", "--factor", "0", "--cap", "3"],
        input=fixture("fibonacci").generate(300).to_text(),
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0 and proc.stdout.splitlines()[1] == "0,1 2,3"
