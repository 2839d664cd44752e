"""Shared fixtures and the acceptance-summary report.

Tests in test_acceptance.py are named ``test_a<N>_<slug>``; after the run a
one-line PASS/FAIL verdict per criterion is appended to the terminal summary.
"""

import re

import numpy as np
import pytest

from csrnet.model import ModelConfig, build_model

_ACCEPTANCE_RE = re.compile(r"test_acceptance\.py::test_(a\d+)_(\w+)")

_TITLES = {
    "a1": "parameter budget",
    "a2": "operation-MLP equivalence",
    "a3": "gradient correctness",
    "a4": "overfit smoke test",
    "a5": "metric sanity",
    "a6": "interpolation endpoints",
    "a7": "pixel independence & crop equivariance",
    "a8": "determinism & persistence",
    "a9": "condition-only finetune",
    "a11": "service contract",
}


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def default_params():
    """Fresh default model; session-scoped, treat as read-only."""
    return build_model(ModelConfig(), seed=0)


@pytest.fixture
def perturbed_params():
    """Default model with non-identity modulation so every path carries signal."""
    params = build_model(ModelConfig(), seed=0)
    prng = np.random.default_rng(100)
    for name in params.group_names("heads"):
        if name.endswith("weight"):
            t = params.tensors[name]
            params.tensors[name] = (t + prng.normal(0.0, 0.05, t.shape)).astype(t.dtype)
    return params


def pytest_terminal_summary(terminalreporter):
    verdicts = {}
    for status, label in (("passed", "PASS"), ("failed", "FAIL"), ("error", "FAIL"),
                          ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(status, []):
            match = _ACCEPTANCE_RE.search(getattr(report, "nodeid", ""))
            if match and getattr(report, "when", "call") in ("call", "setup"):
                verdicts[match.group(1)] = label
    if not verdicts:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(verdicts, key=lambda k: int(k[1:])):
        title = _TITLES.get(key, "")
        dots = "." * max(2, 46 - len(key) - len(title))
        terminalreporter.write_line(f"{key.upper()} {title} {dots} {verdicts[key]}")
