import numpy as np
import pytest

# verdict lines from the acceptance suite, echoed after the run so they
# survive pytest's output capture
ACCEPTANCE_VERDICTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)

from stablefpt import (
    RngStream,
    SkeletonConfig,
    first_passage_batch,
    make_params,
    supremum_fixed_batch,
)

# shared small pools so unit tests don't re-simulate the same thing


@pytest.fixture(scope="session")
def params_default():
    return make_params(1.5, 0.5)


@pytest.fixture(scope="session")
def t1_pool_small(params_default):
    """4000 first-passage samples at x=1, dt=1e-3, moderate horizon."""
    cfg = SkeletonConfig(dt=1e-3, max_time=2e4, tail_dt=0.5, tail_switch=20.0)
    return first_passage_batch(params_default, 1.0, cfg, RngStream(1234, 1), 4000)


@pytest.fixture(scope="session")
def s1_pool_small(params_default):
    """20000 supremum-at-1 samples, dt=1e-3."""
    return supremum_fixed_batch(params_default, 1.0, 1e-3, RngStream(1234, 2), 20_000)
