import json

from prflow.cli import main
from prflow.verify import observed_order, run_suite


def test_observed_order():
    hs = [0.1, 0.05, 0.025]
    assert abs(observed_order(hs, [h**2 for h in hs]) - 2.0) < 1e-12


def test_suite_passes():
    failed = [r for r in run_suite() if not r.passed]
    assert not failed, failed


def test_verify_command(tmp_path):
    assert main(["verify", "--out", str(tmp_path), "--run-id", "v"]) == 0
    data = json.loads((tmp_path / "v" / "verify.json").read_text())
    assert all(r["passed"] for r in data)
