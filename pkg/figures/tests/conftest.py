import json
import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "levi_ramsey"]


def run_primary(*args, cwd):
    """Invoke the primary tool through its CLI; the only interface used here."""
    res = subprocess.run(CLI + list(args), cwd=cwd, capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    return res


@pytest.fixture(scope="session")
def fresh_outputs(tmp_path_factory):
    """CSV outputs from a fresh primary-component run."""
    root = tmp_path_factory.mktemp("primary_run")
    fig2 = root / "fig2.json"
    fig2.write_text(json.dumps({"dimensionless": {"l": 0.5, "dl": 0.05}}))
    run_primary("trajectory", str(fig2), "--samples", "64",
                "-o", "trajectory.csv", cwd=root)
    run_primary("fringe", "--steps", "41", "--contrast", "on",
                "-o", "fringe.csv", cwd=root)
    run_primary("thermal", "--nbar", "40", "--samples", "300", "--seed", "5",
                "-o", "thermal.csv", "--summary", "thermal.json", cwd=root)
    return root
