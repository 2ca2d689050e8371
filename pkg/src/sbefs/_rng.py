"""Named random streams derived from a single integer seed.

Each consumer asks for its own stream by name, so adding a new consumer never
shifts the draws seen by existing ones.
"""
import zlib

import numpy as np


def _key(name):
    return zlib.crc32(name.encode("utf-8"))


def stream(seed, *names):
    """Return a Generator for the stream identified by ``names`` under ``seed``."""
    keys = tuple(_key(str(n)) for n in names)
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=keys))


def derive_seed(seed, *names):
    """A 63-bit integer seed for consumers that take plain ints."""
    return int(stream(seed, *names).integers(0, 2**63 - 1))
