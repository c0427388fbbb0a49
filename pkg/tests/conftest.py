"""Shared fixtures and the acceptance-summary hook.

Session-scoped fixtures load the bundled sample dataset once and train a
single reference model on it so the heavier suites (boosting, shapley,
cli, acceptance) do not each pay the fitting cost.
"""

from __future__ import annotations

from pathlib import Path

import pytest

SAMPLE_DIR = Path(__file__).resolve().parents[1] / "data" / "sample"

# test_acceptance.py appends one "[criterion N] ..." line per criterion;
# the terminal-summary hook below prints them after the run so the verdicts
# are visible without -s.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def sample_dir() -> Path:
    return SAMPLE_DIR


@pytest.fixture(scope="session")
def sample_rows():
    from buzzcast.features import load_engagement_csv

    return load_engagement_csv(SAMPLE_DIR / "engagement.csv")


@pytest.fixture(scope="session")
def sample_events():
    from buzzcast.events import load_viewership_csv

    return load_viewership_csv(SAMPLE_DIR / "events.csv")


@pytest.fixture(scope="session")
def prepared(sample_rows):
    from buzzcast.preprocess import prepare_run

    return prepare_run(sample_rows, seed=42)


@pytest.fixture(scope="session")
def trained(prepared):
    from buzzcast.boosting import HyperParams, fit_gbm

    params = HyperParams(
        n_estimators=200,
        learning_rate=0.05,
        max_depth=3,
        min_samples_split=2,
        subsample=0.8,
    )
    model = fit_gbm(prepared.X_train, prepared.y_train_log, params, seed=42)
    return model.with_states(
        feature_names=prepared.feature_names,
        scaler=prepared.scaler,
        encoder=prepared.encoder,
    )


@pytest.fixture(scope="session")
def acceptance_log() -> list[str]:
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
