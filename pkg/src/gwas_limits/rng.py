"""Seeded, portable random streams.

Every random draw in an experiment comes from a substream keyed by
``(master_seed, trial_index, stage)``. The key is mixed by
:class:`numpy.random.SeedSequence` and drives a PCG64 generator, so results
do not depend on execution order or the number of workers.
"""
import enum

import numpy as np


class Stage(enum.IntEnum):
    SAMPLE = 1  # the hidden (s, f)
    DATA = 2  # genomes and noise
    TIEBREAK = 3  # decoder tie-breaks and fallbacks
    REFINE = 4  # refinement-stage tie-breaks


def substream(master_seed: int, trial_index: int = 0, stage: int = 0) -> np.random.Generator:
    if master_seed < 0 or trial_index < 0:
        raise ValueError("seeds and trial indices must be non-negative")
    seq = np.random.SeedSequence([int(master_seed) & (2**64 - 1), int(trial_index), int(stage)])
    return np.random.Generator(np.random.PCG64(seq))


def as_generator(rng) -> np.random.Generator:
    """Accept ``None``, an int seed or a Generator."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.default_rng()
    return substream(int(rng))
