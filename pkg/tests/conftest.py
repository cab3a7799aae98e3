import sys
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cbos.dataset import Dataset, make_blobs


def row_multiset(X) -> Counter:
    return Counter(np.asarray(row, dtype=float).tobytes() for row in np.asarray(X, dtype=float))


def make_dataset(X, y, minority_label=None) -> Dataset:
    X = np.asarray(X, dtype=float)
    return Dataset(X, np.asarray(y), tuple(f"f{i}" for i in range(X.shape[1])), "label", minority_label)


@pytest.fixture
def blobs() -> Dataset:
    return make_blobs(90, 10, 3, 2, 1.0, seed=11)


@pytest.fixture
def big_blobs() -> Dataset:
    return make_blobs(300, 40, 5, 2, 1.0, seed=3)


_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _ACCEPTANCE[name] = ("PASS" if rep.passed else "FAIL", item.function.__doc__.strip().splitlines()[0])


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s[1:])):
        status, text = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{status}  {name}  {text}")
