"""Deterministic random-source derivation for parallel Monte Carlo runs.

Every sampler in this package takes an explicit ``numpy.random.Generator``.
Experiments derive one generator per trial from a master seed, so results
are bit-identical no matter how trials are batched across workers.
"""

from __future__ import annotations

import numpy as np

__all__ = ["trial_rng"]


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    """Random source for one trial.

    The stream is seeded from ``SeedSequence((master_seed, trial_index))``,
    which is the documented splitting rule for this package: trial ``i`` of a
    run with a given master seed always sees the same stream, independent of
    parallelism degree or execution order.
    """
    return np.random.default_rng(np.random.SeedSequence((master_seed, trial_index)))
