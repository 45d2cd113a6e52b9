import subprocess
import sys

import pytest


def run_bhchaos(*args):
    proc = subprocess.run([sys.executable, "-m", "bhchaos", *args],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


def vline_positions(ax):
    out = set()
    for line in ax.lines:
        xdata = line.get_xdata()
        if len(xdata) == 2 and xdata[0] == xdata[1]:
            out.add(float(xdata[0]))
    return out


@pytest.fixture(scope="session")
def d1_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("d1")
    run_bhchaos("sweep-d1", "--n", "5", "--l", "5",
                "--grid-min", "0.1", "--grid-max", "10", "--grid-count", "3",
                "--state", "staggered", "--windows", "8", "--window-size", "10",
                "--out", str(out))
    run_bhchaos("thresholds", "--n", "5", "--l", "5", "--out", str(out))
    return out


@pytest.fixture(scope="session")
def dynamics_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("dyn")
    run_bhchaos("sweep-dynamics", "--n", "7", "--l", "7",
                "--grid-min", "0.5", "--grid-max", "5", "--grid-count", "3",
                "--state", "staggered", "--tmax", "30", "--dt-sample", "0.5",
                "--out", str(out))
    run_bhchaos("thresholds", "--n", "7", "--l", "7", "--out", str(out))
    return out
