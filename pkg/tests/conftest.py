import numpy as np
import pytest

SEED = 20260809


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


def assert_check(check_fn, k_max=401, seed=SEED):
    """Run a verify-battery check and assert it passed, showing its report line."""
    result = check_fn(k_max, seed)
    assert result.passed, result.line()
    return result
