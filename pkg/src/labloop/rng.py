"""Deterministic random streams.

Every stochastic draw in the engine comes from a PCG64 generator keyed by an
integer tuple through numpy's SeedSequence, which hashes the key
platform-independently. The substream rule is: campaigns derive one child
stream per trial index via ``(base_seed, trial_index)``; within an experiment
further integer tags may be appended for independent purposes. Identical keys
always reproduce identical draw sequences on any platform.
"""
from __future__ import annotations

import numpy as np

GENERATOR_NAME = "pcg64"


def make_rng(*key: int) -> np.random.Generator:
    """Return the generator for an integer substream key."""
    if not key:
        raise ValueError("substream key must contain at least one integer")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(key)))


def trial_rng(base_seed: int, trial_index: int) -> np.random.Generator:
    """One independent stream per campaign trial index."""
    return make_rng(base_seed, trial_index)


def derive_seed(base_seed: int, trial_index: int) -> int:
    """A stable per-trial integer seed (for configs that embed a seed)."""
    ss = np.random.SeedSequence((base_seed, trial_index))
    return int(ss.generate_state(1, dtype=np.uint64)[0])
