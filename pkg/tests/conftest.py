import numpy as np
import pytest

from dctnet.synthetic import make_synthetic_dataset


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """Three clips per class; enough for plumbing, not for accuracy claims."""
    return make_synthetic_dataset(str(tmp_path_factory.mktemp("small")), n_per_class=3, seed=11)


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line; the test still fails through its own assert."""
    def record(name, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
        _CRITERIA.append(line)
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
