"""Deterministic random substreams for reproducible parallel sampling.

Every stochastic routine in the package draws from a generator obtained
through :func:`substream`, keyed by the master seed plus a structured key
(purpose tag, neuron, trial, surrogate index, ...).  Two calls with the
same key always yield the same stream, and streams with different keys
are statistically independent, so results do not depend on how work is
scheduled across workers.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["substream"]

_MASK64 = (1 << 64) - 1


def _key_part(part: int | str) -> int:
    if isinstance(part, str):
        digest = hashlib.blake2s(part.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    return int(part) & _MASK64


def substream(seed: int, *key: int | str) -> np.random.Generator:
    """Return the generator for the substream identified by ``key``.

    Parameters
    ----------
    seed : int
        Master seed of the experiment.
    *key : int or str
        Structured stream key, e.g. ``("surrogate", index, neuron)``.
        Strings are hashed with BLAKE2s so the mapping is stable across
        processes and Python versions.
    """
    spawn_key = tuple(_key_part(p) for p in key)
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK64, spawn_key=spawn_key)
    return np.random.default_rng(ss)
