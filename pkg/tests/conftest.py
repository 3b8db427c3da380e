import time

import pytest

from umbralwalk import WalkConfig, Walk, simulate_hit, simulate_taboo

CANONICAL_SEED = 20240


@pytest.fixture(scope="session")
def canonical_mc():
    """The three canonical simulations at full defaults, run once.

    Returns name -> (config, estimate, reference, elapsed_seconds).
    """
    import math

    cases = {
        "rbm_hit": (
            WalkConfig(
                walk=Walk.REFLECTED_1D, start=0.0, target=1.0, z=0.5,
                seed=CANONICAL_SEED,
            ),
            1.0 / math.cosh(1.0),
            simulate_hit,
        ),
        "bessel_hit": (
            WalkConfig(
                walk=Walk.BESSEL_3D, start=0.0, target=1.0, z=0.5,
                seed=CANONICAL_SEED,
            ),
            1.0 / math.sinh(1.0),
            simulate_hit,
        ),
        "rbm_taboo": (
            WalkConfig(
                walk=Walk.REFLECTED_1D, start=1.0, target=2.0, z=0.5,
                taboo=0.0, seed=CANONICAL_SEED,
            ),
            math.sinh(1.0) / math.sinh(2.0),
            simulate_taboo,
        ),
    }
    results = {}
    for name, (cfg, reference, runner) in cases.items():
        t0 = time.monotonic()
        est = runner(cfg)
        elapsed = time.monotonic() - t0
        results[name] = (cfg, est, reference, elapsed)
    return results
