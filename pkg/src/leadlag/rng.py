"""Deterministic, splittable random streams.

Every stochastic routine in the package draws from a counter-based Philox
generator keyed by ``(base_seed, *key)`` through numpy's ``SeedSequence``
spawn-key mechanism.  Distinct keys give statistically independent streams,
and the mapping from key to stream is a pure function, so results never
depend on scheduling or on how many worker threads participated in a run.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError

__all__ = ["seed_sequence", "generator", "seed_fingerprint"]


def _check_component(value: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise DomainError(f"{name} must be nonnegative, got {value}")
    return int(value)


def seed_sequence(base_seed, *key: int) -> np.random.SeedSequence:
    """Seed sequence for the stream identified by ``(base_seed, *key)``.

    ``base_seed`` may itself be a SeedSequence, in which case the key extends
    its spawn key, so derivations compose: stream (s, a, b) equals stream
    derived from (s, a) with key b.
    """
    spawn = tuple(_check_component(k, "seed key component") for k in key)
    if isinstance(base_seed, np.random.SeedSequence):
        return np.random.SeedSequence(
            entropy=base_seed.entropy, spawn_key=tuple(base_seed.spawn_key) + spawn
        )
    base = _check_component(base_seed, "base_seed")
    return np.random.SeedSequence(entropy=base, spawn_key=spawn)


def generator(base_seed, *key: int) -> np.random.Generator:
    """Philox generator on the stream identified by ``(base_seed, *key)``."""
    return np.random.Generator(np.random.Philox(seed_sequence(base_seed, *key)))


def seed_fingerprint(seed) -> int:
    """Stable integer identifying a seed for provenance fields.

    Plain integers pass through; a SeedSequence maps to its first generated
    state word, which is a pure function of (entropy, spawn_key).
    """
    if isinstance(seed, np.random.SeedSequence):
        return int(seed.generate_state(1)[0])
    return _check_component(seed, "seed")
