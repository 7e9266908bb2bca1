"""Random streams.

Every stream is a numpy Generator over the Philox4x32-10 counter-based bit
generator, keyed by (seed, stream tag). The tag keeps the engines from sharing
noise with each other while the same seed always reproduces the same noise
within one engine, whatever the learning rate.
"""

import numpy as np

PRNG_NAME = "philox4x32-10/numpy-seedsequence-v1"

DISCRETE = 1
CONTINUOUS = 2
SCALAR = 3


def make_rng(seed: int, tag: int = 0) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(tag)])))
