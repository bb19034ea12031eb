import subprocess
import sys
from pathlib import Path

import pytest

PLOTS_DIR = Path(__file__).resolve().parents[1]
DATA_DIR = PLOTS_DIR.parent / "data"

# The renderer is a standalone script next to this test tree.
sys.path.insert(0, str(PLOTS_DIR))


@pytest.fixture(scope="session")
def historical_csv() -> Path:
    return DATA_DIR / "sample_2020.csv"


@pytest.fixture(scope="session")
def experiment_outputs(tmp_path_factory, historical_csv) -> Path:
    """Run the simulation pipeline once; figures are rendered from its files."""
    out = tmp_path_factory.mktemp("experiment")
    cmd = [sys.executable, "-m", "itolab.cli", "experiment",
           "--calibration-input", str(DATA_DIR / "sample_calibration.csv"),
           "--historical", str(historical_csv),
           "--mode", "paper", "--paths", "40", "--seed", "3",
           "--out-dir", str(out)]
    result = subprocess.run(cmd, capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    return out
