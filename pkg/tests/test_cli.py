from __future__ import annotations

import json
import subprocess
import sys

import pytest

from dimgroups.certify import CertReport, Classification
from dimgroups.cli import main
from dimgroups.verdict import from_plain


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "period, code",
    [("2x+3", 0), ("2+2x", 1), ("1+x", 2)],
)
def test_certify_exit_codes(capsys, period, code):
    assert run_cli(capsys, "certify", "--period", period)[0] == code


def test_certify_structured_round_trip(capsys):
    code, out, _ = run_cli(capsys, "certify", "--period", "2x+3", "--format", "structured")
    data = json.loads(out)
    report = CertReport.from_dict(data)
    assert code == 0 and report.classification is Classification.ANTI_FD
    assert report.to_dict()["conditions"] == data["conditions"]
    assert data["bifurcation"]["kind"] == "DiscreteFiniteRank"


def test_output_is_deterministic(capsys):
    outs = {run_cli(capsys, "initial-hom", "--pairs", "5,2;17,2", "--dim", "2", "--format", "structured")[1] for _ in range(2)}
    assert len(outs) == 1


def test_usage_errors(capsys):
    assert run_cli(capsys, "initial-hom", "--pairs", "4,6")[0] == 3
    assert run_cli(capsys, "nosuch")[0] == 3
    assert run_cli(capsys, "certify")[0] == 3
    assert run_cli(capsys, "certify", "--period", "2x+3", "--stage-cap", "0")[0] == 3


def test_initial_hom_verify(capsys):
    code, out, _ = run_cli(capsys, "initial-hom", "--pairs", "5,2;17,2;257,2", "--dim", "2", "--verify", "--format", "structured")
    data = from_plain(json.loads(out))
    assert code == 0 and data["verification"] == {"failures": [], "norm_inequality": True}
    assert [len(row) for row in data["table"]] == [1, 2, 3, 4]


def test_traces_with_element(capsys):
    code, out, _ = run_cli(capsys, "traces", "--period", "2x+3", "--trace-stages", "4", "--element", "3-2x", "--element-stage", "1")
    assert code == 1 and "tau_zero_range" in out


def test_tree_dot_to_file(capsys, tmp_path):
    target = tmp_path / "t.dot"
    code, out, _ = run_cli(capsys, "tree", "--weights", "2,3", "--depth", "2", "--export-dot", "--out", str(target))
    assert code == 0 and out == ""
    assert target.read_text().startswith("digraph tree {")


def test_tree_checks(capsys):
    assert run_cli(capsys, "tree", "--weights", "2,3", "--depth", "3")[0] == 0
    assert run_cli(capsys, "tree", "--weights", "2,4", "--depth", "3")[0] == 1


def test_lab_and_approx(capsys):
    code, out, _ = run_cli(capsys, "lab", "--example", "tower", "--format", "structured")
    data = json.loads(out)
    assert code == 0 and data["second_coordinate_c"] == {"frac": "1/32"} and data["numeric"]["min_norm"] < 0.05
    code, out, _ = run_cli(capsys, "approx", "--format", "structured")
    assert code == 0 and json.loads(out)["certified"]
    code, _, err = run_cli(capsys, "approx", "--interval", "1/2,3/2")
    assert code == 3 and "error" in err


def test_config_file(capsys, tmp_path):
    p = tmp_path / "c.toml"
    p.write_text('subcommand = "certify"\n[sequence]\nperiod = ["2+2x"]\n')
    assert run_cli(capsys, "certify", "--config", str(p))[0] == 1
    assert run_cli(capsys, "certify", "--config", str(p), "--period", "2x+3")[0] == 0


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dimgroups.cli", "certify", "--period", "2x+3"], capture_output=True, text=True)
    assert proc.returncode == 0 and "AntiFD" in proc.stdout
