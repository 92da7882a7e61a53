"""Binary symmetric channel: corrupt a codeword for decoder input.

Error patterns are returned as sorted arrays of flipped variable indices.
"""

from __future__ import annotations

import numpy as np

from .errors import ParameterError

__all__ = ["corrupt_fixed_count", "corrupt_iid", "apply_pattern"]


def apply_pattern(bits, flipped_indices) -> np.ndarray:
    """Flip the given indices; applying the same pattern twice is the identity."""
    out = np.array(bits, dtype=np.uint8, copy=True)
    out[np.asarray(flipped_indices, dtype=np.int64)] ^= 1
    return out


def corrupt_fixed_count(codeword, t: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Flip exactly t distinct uniformly chosen bits.  Deterministic per seed."""
    codeword = np.asarray(codeword, dtype=np.uint8)
    n = codeword.shape[0]
    if not 0 <= t <= n:
        raise ParameterError(f"need 0 <= t <= {n}, got t={t}")
    rng = np.random.default_rng(seed)
    flipped = np.sort(rng.choice(n, size=t, replace=False).astype(np.int64))
    return apply_pattern(codeword, flipped), flipped


def corrupt_iid(codeword, p: float, seed) -> tuple[np.ndarray, np.ndarray]:
    """Flip each bit independently with probability p."""
    codeword = np.asarray(codeword, dtype=np.uint8)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"need 0 <= p <= 1, got p={p}")
    rng = np.random.default_rng(seed)
    flipped = np.flatnonzero(rng.random(codeword.shape[0]) < p).astype(np.int64)
    return apply_pattern(codeword, flipped), flipped
