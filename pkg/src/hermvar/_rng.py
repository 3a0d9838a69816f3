"""Seeding helpers.

Every random draw in the package goes through :func:`generator`, which keys a
counter-based Philox bit generator directly with a 64-bit seed.  Replication
``r`` of an experiment with base seed ``s`` uses ``replication_seed(s, r) =
s XOR r`` so results never depend on scheduling order.
"""

import numpy as np

SEED_MASK = (1 << 64) - 1


def generator(seed: int) -> np.random.Generator:
    """Return a Philox-backed generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & SEED_MASK))


def replication_seed(base_seed: int, rep: int) -> int:
    return (int(base_seed) ^ int(rep)) & SEED_MASK
