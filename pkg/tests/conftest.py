import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

SLOW = os.environ.get("QUDITBELL_SLOW", "") not in ("", "0")


def pytest_collection_modifyitems(config, items):
    if SLOW:
        return
    skip = pytest.mark.skip(reason="long optimizer run; set QUDITBELL_SLOW=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
