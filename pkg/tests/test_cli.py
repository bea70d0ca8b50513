import csv
import io
import json
import subprocess
import sys

import pytest

import oracles
from friable import cli
from friable.config import TABLE_LIMIT_ENV, RunConfig
from friable.errors import ArgumentError


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, _ = call(*argv)
    assert code == 0, out
    return json.loads(out)


def test_psi_exact_example():
    code, out, _ = call("psi", "exact", "--x", "100", "--y", "5")
    assert code == 0
    assert out == '{"x":100,"y":5,"count":34}\n'


def test_sunit_bound_example():
    code, out, _ = call("sunit", "bound", "--s", "1")
    assert (code, out) == (0, '{"s":1,"exponent":32,"value":"4294967296"}\n')
    assert call_json("sunit", "bound", "--s", "25") == {"s": 25, "exponent": 416}
    assert call_json("sunit", "bound", "--s", "25", "--materialize")["value"] == str(2**416)


def test_verify_inverted_window_is_argument_error():
    code, out, err = call("decomp", "verify", "--set", "0,1,2,3", "--B", "0,1", "--C", "0,2",
                          "--lo", "3", "--hi", "0")
    assert code == 2 and out == "" and "inverted" in err


def test_verify_valid_certificate():
    rep = call_json("decomp", "verify", "--set", "1,2,3,6", "--B", "1,2", "--C", "1,3",
                    "--mode", "multiplicative")
    assert rep["valid"] is True


def test_unknown_flag_and_subcommand(capsys):
    assert cli.run(["psi", "exact", "--x", "10", "--y", "2", "--bogus"]) == 2
    assert "usage" in capsys.readouterr().err
    assert cli.run(["nonsense"]) == 2
    assert cli.run([]) == 2


def test_capacity_exit_codes():
    code, _, err = call("sieve", "gpf", "--n", "1000", "--table-limit", "100")
    assert code == 3 and "capacity" in err
    code, out, _ = call("decomp", "search", "--set", ",".join(map(str, range(40))), "--max-nodes", "3")
    assert code == 3 and json.loads(out)["status"] == "budget-exceeded"
    code, _, _ = call("sunit", "solve", "--U", "1", "--V", "-1", "--S", "2,3,5,7", "--bound", "10",
                      "--enumeration-budget", "100")
    assert code == 3


def test_sieve_commands():
    assert call_json("sieve", "gpf", "--n", "97")["gpf"] == 97
    rep = call_json("sieve", "window", "--y", "3", "--lo", "1", "--hi", "30")
    assert rep["elements"] == oracles.brute_friable(1, 30, 3)
    shifted = call_json("sieve", "window", "--y", "3", "--lo", "1", "--hi", "30", "--shifted")
    assert shifted["elements"] == [n + 1 for n in oracles.brute_friable(1, 29, 3)]
    assert call_json("sieve", "primecount", "--y", "100")["pi"] == 25


def test_psi_commands():
    assert call_json("psi", "base2", "--x", "1000")["count"] == 10
    rep = call_json("psi", "debruijn", "--x", "1000", "--y", "5")
    assert rep["count"] == oracles.brute_psi(1000, 5)
    assert 0.3 <= rep["ratio"] <= 3.0


def test_sunit_solve_schema():
    rep = call_json("sunit", "solve", "--U", "1", "--V", "-1", "--S", "2,3", "--bound", "7",
                    "--domain", "positive-integers")
    assert rep["M"] == 4
    first = rep["solutions"][0]
    assert set(first) == {"X", "Y"}
    assert set(first["X"]) == {"sign", "exponents", "numerator", "denominator"}
    assert [(s["X"]["numerator"], s["Y"]["numerator"]) for s in rep["solutions"]] == \
        [(2, 1), (3, 2), (4, 3), (9, 8)]
    assert rep["certification"]["certified"] is True


def test_sunit_pairs_and_mpairs():
    rep = call_json("sunit", "pairs", "--y", "3", "--d", "5", "--hi", "100")
    assert [(s["X"]["numerator"], s["Y"]["numerator"]) for s in rep["solutions"]] == \
        [(6, 1), (8, 3), (9, 4), (32, 27)]
    rep = call_json("sunit", "mpairs", "--a1", "2", "--a2", "3", "--y", "5", "--n0", "1", "--N", "10")
    assert rep["b_values"] == [1, 2, 3]


def test_decomp_search_and_csv():
    rep = call_json("decomp", "search", "--set", "1,2,3,6", "--mode", "multiplicative")
    assert rep["status"] == "complete"
    assert [(c["B"], c["C"]) for c in rep["certificates"]] == [([1, 2], [1, 3])]
    rep = call_json("decomp", "search", "--set", "[0,1,3]")
    assert rep["status"] == "exhausted" and rep["certificates"] == []
    code, out, _ = call("decomp", "search", "--set", "0,1,2,3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and {"B": "0 1", "C": "0 2"}.items() <= rows[0].items()


def test_decomp_set_file(tmp_path):
    f = tmp_path / "set.txt"
    f.write_text("6\n1\n3\n2\n")
    rep = call_json("decomp", "search", "--set-file", str(f), "--mode", "multiplicative")
    assert rep["certificates"][0]["B"] == [1, 2]


def test_growth_and_classify():
    rep = call_json("decomp", "growth", "--A", "1,2,4,8", "--B", "1,2,4,8", "--m", "2", "--D-max", "10")
    assert rep["D"] == list(range(1, 11))
    assert call_json("report", "classify", "--log-N", "230.2585", "--y", "3")["case"] == "CASE1"
    code, _, _ = call("report", "classify", "--log-N", "1", "--y", "3")
    assert code == 2


def test_report_theorem1():
    rep = call_json("report", "theorem1", "--y", "3", "--a1", "1", "--a2", "2", "--n0", "1",
                    "--N", "100000")
    assert (rep["M"], rep["s"], rep["rhs_exponent"]) == (4, 2, 48)
    assert rep["contradiction_reached"] is False
    assert rep["psi"] == 1 + sum(1 for a in range(17) for b in range(11) if 0 < 2**a * 3**b <= 100000) - 1
    rep = call_json("report", "theorem2", "--y", "3", "--a1", "1", "--a2", "2", "--n0", "2",
                    "--N", "20", "--m", "2")
    assert rep["M"] == 1 and rep["b_values"] == [5]


def test_text_format():
    code, out, _ = call("sieve", "window", "--y", "2", "--hi", "20", "--format", "text")
    assert code == 0 and out == "1\n2\n4\n8\n16\n"


@pytest.mark.parametrize("argv", [
    ["psi", "exact", "--x", "5000", "--y", "7"],
    ["decomp", "search", "--set", "0,1,2,3,4,5"],
    ["sunit", "solve", "--U", "1/2", "--V", "1/2", "--S", "2,3", "--bound", "3"],
    ["report", "theorem1", "--y", "5", "--a1", "1", "--a2", "3", "--n0", "1", "--N", "5000"],
])
def test_byte_identical_repeats(argv):
    first = call(*argv)
    assert first[0] == 0
    assert call(*argv) == first
    assert call(*argv, "--threads", "1") == call(*argv, "--threads", "4")


def test_config_precedence(tmp_path, monkeypatch):
    cfg_file = tmp_path / "cfg.json"
    cfg_file.write_text(json.dumps({"table_limit": 500, "format": "text"}))
    env = {TABLE_LIMIT_ENV: "200"}
    assert RunConfig.load(environ=env).table_limit == 200
    assert RunConfig.load(cfg_file, environ=env).table_limit == 500
    assert RunConfig.load(cfg_file, {"table_limit": 900}, environ=env).table_limit == 900
    assert RunConfig.load(environ={}).table_limit == RunConfig().table_limit

    monkeypatch.setenv(TABLE_LIMIT_ENV, "50")
    assert call("sieve", "gpf", "--n", "60")[0] == 3
    assert call("sieve", "gpf", "--n", "60", "--table-limit", "100")[0] == 0
    code, out, _ = call("sieve", "gpf", "--n", "60", "--config", str(cfg_file))
    assert code == 0 and "gpf: 5" in out


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"nope": 1}')
    with pytest.raises(ArgumentError):
        RunConfig.load(bad, environ={})
    with pytest.raises(ArgumentError):
        RunConfig(corridor_lo=2.0, corridor_hi=1.0)
    with pytest.raises(ArgumentError):
        RunConfig.load(environ={TABLE_LIMIT_ENV: "lots"})
    assert call("psi", "exact", "--x", "10", "--y", "2", "--config", str(bad))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "friable", "psi", "exact", "--x", "100", "--y", "5"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == {"x": 100, "y": 5, "count": 34}
