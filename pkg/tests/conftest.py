import numpy as np
import pytest

from fmcloss.experiment import SynthConfig, synth_generate
from fmcloss.features import assemble



@pytest.fixture(scope="session")
def small_dataset():
    """A few stations over 40 days; enough for several CV periods."""
    cfg = SynthConfig(n_stations=8, span_days=40, seed=3, dry_window=(20, 10))
    return assemble(synth_generate(cfg))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def regression_data(rng, n=200, p=9):
    X = rng.normal(size=(n, p))
    y = 10 + 2 * X[:, 0] - X[:, 1] + np.where(X[:, 2] > 0, 3.0, 0.0) + rng.normal(0, 0.5, n)
    return X, y


def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, after the usual summary."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::test_criterion_" not in getattr(rep, "nodeid", ""):
                continue
            if rep.when != "call" and outcome != "error":
                continue
            name = rep.nodeid.split("::test_criterion_")[1]
            num = int(name.split("_")[0])
            detail = dict(rep.user_properties).get("detail", "")
            lines.append((num, f"criterion {num} {name.split('_', 1)[1]}: "
                               f"{'PASS' if outcome == 'passed' else 'FAIL'}"
                               + (f"  ({detail})" if detail else "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
