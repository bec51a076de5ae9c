import numpy as np
import pytest

import mnls


@pytest.fixture(scope="session")
def profiles():
    """Session-wide cache of solved radial profiles keyed by (dim, p, overrides)."""
    cache = {}

    def get(dim, p, **kwargs):
        key = (dim, p, tuple(sorted(kwargs.items())))
        if key not in cache:
            cache[key] = mnls.solve_profile(mnls.ProfileConfig(dim=dim, p=p, **kwargs))
        return cache[key]

    return get


def build_groundstate(profile, rows, seed=0):
    k = mnls.new_coupling(len(rows), rows)
    part = mnls.detect_partition(k)
    cands = mnls.solve_all_supports(k, profile.config.p, part, seed=seed)
    sel = mnls.select_minimal(cands, profile.i1)
    return mnls.assemble(profile, sel, k), sel


@pytest.fixture(scope="session")
def gs_m1_critical(profiles):
    """Single-component critical instance: dim 1, p 2, k = 1."""
    gs, _ = build_groundstate(profiles(1, 2.0), [[1.0]])
    return gs


@pytest.fixture(scope="session")
def gs_m2_critical(profiles):
    """Two purely cross-coupled components at the critical exponent; the
    minimizer has unit amplitudes on both."""
    gs, _ = build_groundstate(profiles(1, 2.0), [[0.0, 1.0], [1.0, 0.0]])
    return gs


@pytest.fixture(scope="session")
def grid_1024():
    return mnls.Grid(dim=1, length=32.0, n=1024)
