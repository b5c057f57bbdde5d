import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

REPO_ROOT = Path(__file__).resolve().parent.parent
DATA_ROOT = REPO_ROOT / "data" / "synthetic"
CONFIGS_ROOT = REPO_ROOT / "configs"

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")

# Acceptance outcomes, echoed in the terminal summary so the pass/fail lines
# are visible in a default (captured) pytest run.
ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, ok in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}")


@pytest.fixture(scope="session")
def dataset_entries():
    from inkcode.evalharness.manifest import load_manifest

    return load_manifest(DATA_ROOT / "manifest.json")


@pytest.fixture(scope="session")
def expected_scores():
    return json.loads((DATA_ROOT / "expected_scores.json").read_text(encoding="utf-8"))
