import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from liemaxwell import lie_algebra as la
from liemaxwell import solver


@pytest.fixture(scope="session")
def cat():
    return la.catalog()


@pytest.fixture(scope="session")
def by_name():
    return la.entry_by_name


def draw_admissible(entry, rng):
    """One admissible (algebra, metric) draw for property sweeps."""
    ap = solver.sample_algebra_params(entry, rng)
    mp = solver.sample_metric_params(entry, rng)
    L = la.instantiate(entry, ap)
    g = la.metric_from_params(entry, mp)
    return L, g


def admissible_draws(n, seed=0, entries=None):
    """Yield n (entry, L, g) draws cycling through catalog entries."""
    pool = entries if entries is not None else la.catalog()
    rng = np.random.default_rng(seed)
    out = []
    for k in range(n):
        entry = pool[k % len(pool)]
        L, g = draw_admissible(entry, rng)
        out.append((entry, L, g))
    return out
