"""Seeded randomness.

All random draws in the package come from :func:`make_rng`. It hashes an
explicit 64-bit seed together with string labels (SHA-256) and seeds
Python's Mersenne Twister (``random.Random``, MT19937) with the digest, so
independent sub-streams (per prime, per trial, ...) are reproducible and do
not overlap in practice.
"""

from __future__ import annotations

import hashlib
import random

SEED_MASK = (1 << 64) - 1


def make_rng(seed: int, *labels) -> random.Random:
    seed = int(seed) & SEED_MASK
    h = hashlib.sha256(seed.to_bytes(8, "big"))
    for label in labels:
        h.update(b"\x00")
        h.update(str(label).encode())
    return random.Random(int.from_bytes(h.digest(), "big"))
