# SPDX-License-Identifier: Apache-2.0
import os
from pathlib import Path

import pytest

FIXTURES = Path(os.environ.get("DELTA_LCA_FIXTURE_DIR", Path(__file__).resolve().parents[2] / "fixtures"))


@pytest.fixture
def fixtures() -> Path:
    return FIXTURES
