import json
import subprocess
import sys

import pytest

from stellarank.cli import main
from stellarank.tableio import read_csv, read_json

QUICK = ["--grid", "9", "--refine", "2", "--starts", "2", "--threads", "1"]


@pytest.fixture(scope="module")
def fock2(tmp_path_factory):
    out = tmp_path_factory.mktemp("fock2")
    assert main(["thresholds", "--family", "fock", "--k", "2", "--mmax", "2", "--out", str(out)]) == 0
    return out / "fock_k2.json"


def test_thresholds_writes_files(fock2, capsys):
    table, manifest = read_json(fock2)
    assert table.raw[0] == pytest.approx(1.156, abs=0.005)
    assert table.raw[1] == pytest.approx(0.545, abs=0.005)
    assert table.raw[2] == 0.0
    assert manifest.outputs["json"] == str(fock2)
    rows = read_csv(fock2.with_suffix(".csv"))
    assert len(rows) == 3


def test_thresholds_prints_four_decimals(tmp_path, capsys):
    assert main(["thresholds", "--family", "fock", "--k", "1", "--mmax", "0", "--out", str(tmp_path)] + QUICK) == 0
    out = capsys.readouterr().out
    assert "0.6110" in out or "0.611" in out
    assert "fock_k1.csv" in out


def test_thresholds_json_output(tmp_path, capsys):
    assert main(["thresholds", "--family", "fock", "--k", "1", "--mmax", "1", "--out", str(tmp_path), "--json"] + QUICK) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["table"]["raw"][1] == 0.0


def test_certify_fock_example(fock2, capsys):
    assert main(["certify", "--table", str(fock2), "--value", "0.50", "--scale", "raw"]) == 0
    assert "stellar rank >= 2" in capsys.readouterr().out


def test_certify_above_limit(fock2, capsys):
    assert main(["certify", "--table", str(fock2), "--value", "1.2", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["certified_min_rank"] == 0
    assert doc["crossed_threshold"] is None


def test_certify_inline_family(capsys):
    assert main(["certify", "--family", "fock", "--k", "1", "--mmax", "1", "--value", "0.3", "--scale", "raw"] + QUICK) == 0
    assert "stellar rank >= 1" in capsys.readouterr().out


def test_certify_missing_table(tmp_path):
    assert main(["certify", "--table", str(tmp_path / "nope.json"), "--value", "0.1"]) == 1


def test_certify_negative_value_is_usage_error(fock2):
    assert main(["certify", "--table", str(fock2), "--value", "-0.5"]) == 2


def test_certify_needs_source():
    assert main(["certify", "--value", "0.5"]) == 2


def test_fock_without_k():
    assert main(["thresholds", "--family", "fock", "--mmax", "0"]) == 2


def test_invalid_flag_exits_2():
    with pytest.raises(SystemExit) as info:
        main(["thresholds", "--family", "banana"])
    assert info.value.code == 2


def test_bad_grid_is_usage_error(tmp_path):
    assert main(["thresholds", "--family", "fock", "--k", "1", "--mmax", "0", "--grid", "1", "--out", str(tmp_path)]) == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"optimizer": {"grid": 7, "starts": 3}}))
    out = tmp_path / "o"
    assert main(["thresholds", "--family", "fock", "--k", "1", "--mmax", "0", "--out", str(out),
                 "--config", str(cfg), "--grid", "9", "--threads", "1"]) == 0
    _, manifest = read_json(out / "fock_k1.json")
    assert manifest.optimizer["grid"] == 9
    assert manifest.optimizer["starts"] == 3


def test_reproduce_subset(tmp_path, capsys):
    code = main(["reproduce", "--family", "fock", "--k", "2", "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "11/11 cells within 0.005" in out
    assert (tmp_path / "reproduce_report.csv").exists()


def test_reproduce_flags_failures(capsys):
    # a deliberately crude search misses the k=3 cells by far more than 1e-6
    code = main(["reproduce", "--family", "fock", "--k", "3", "--tolerance", "1e-6", "--grid", "3",
                 "--refine", "0", "--starts", "1", "--threads", "1"])
    assert code == 1
    assert "FAIL" in capsys.readouterr().out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "stellarank.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0
    assert "stellarank" in res.stdout
