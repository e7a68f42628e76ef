import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import random_model  # noqa: E402


@pytest.fixture(scope="session")
def corpus_rng():
    return np.random.default_rng(0xC0FFEE)


@pytest.fixture(scope="session")
def small_models():
    """Fifty random models with n <= 12 for module-level checks."""
    rng = np.random.default_rng(7)
    return [random_model(rng, max_n=12) for _ in range(50)]
