import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from friable.smooth_core import build_factor_table  # noqa: E402


@pytest.fixture(scope="session")
def table_1e5():
    return build_factor_table(10**5)


@pytest.fixture(scope="session")
def table_1e6():
    return build_factor_table(10**6)
