"""Seed derivation from a single root seed.

Every random draw in a run (restart starts, sampling, generator calls) gets
its own seed derived from the root seed and a label path, so results do not
depend on evaluation order.
"""

from __future__ import annotations

import zlib
from typing import Union

import numpy as np

Label = Union[int, str]

_MASK64 = (1 << 64) - 1


def _label_key(label: Label) -> int:
    # even keys are integers, odd keys are strings
    if isinstance(label, int):
        return 2 * (label & _MASK64)
    return 2 * zlib.crc32(label.encode("utf-8")) + 1


def derive_seed(root: int, *labels: Label) -> int:
    """Return a 64-bit seed for the path ``labels`` under ``root``.

    Args:
    ----
        root: Root seed of the run
        *labels: Stage names and counters, e.g. ``("train", 2, "restart", 5)``

    Returns:
    -------
        Deterministic nonnegative 64-bit integer

    """
    sequence = np.random.SeedSequence(
        entropy=root & _MASK64, spawn_key=tuple(_label_key(label) for label in labels)
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(root: int, *labels: Label) -> np.random.Generator:
    """Return a numpy Generator seeded by :func:`derive_seed`."""
    return np.random.default_rng(derive_seed(root, *labels))
