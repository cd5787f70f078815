import json
import math
from pathlib import Path

import numpy as np
import pytest

GOLDEN_PATH = Path(__file__).with_name("golden.json")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


@pytest.fixture(scope="session")
def golden():
    return json.loads(GOLDEN_PATH.read_text())


def random_disc_points(rng, n, rmax=0.99, avoid=None, min_dist=0.0):
    """Uniform points in the disc |z| < rmax, optionally at distance >= min_dist from avoid(z)."""
    out = []
    while len(out) < n:
        r = rmax * math.sqrt(rng.uniform())
        z = r * complex(math.cos(t := rng.uniform(0, 2 * math.pi)), math.sin(t))
        if avoid is None or avoid(z) >= min_dist:
            out.append(z)
    return out
