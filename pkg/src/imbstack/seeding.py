"""Deterministic seed derivation.

Every random decision in a run draws from a generator whose seed is a pure
function of the master seed and the identity of the task, so scheduling and
worker count never change results.
"""
import hashlib

import numpy as np

_MASK = (1 << 63) - 1


def derive_seed(*parts) -> int:
    """Hash an arbitrary tuple of str/int parts into a 63-bit seed."""
    text = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & _MASK


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK))
