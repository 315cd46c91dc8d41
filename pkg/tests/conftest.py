import os

import numpy as np
import pytest

# Configure environment for tests
# This must be done before importing ncdp modules
os.environ["NCDP_PROGRESS"] = "false"
os.environ["NCDP_WORKERS"] = "1"
os.environ["NCDP_LOG_LEVEL"] = "WARNING"


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
