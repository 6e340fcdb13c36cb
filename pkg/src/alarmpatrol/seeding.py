"""Deterministic derivation of per-component RNG streams from one root seed."""

from __future__ import annotations

import hashlib
import random


def derive_seed(seed: int, *labels: object) -> int:
    """Derive a child seed from a root seed and a sequence of labels.

    Uses SHA-256 so the derivation is stable across processes and platforms
    (``hash()`` on strings is salted per interpreter run and must not be used).
    """
    text = ":".join([str(int(seed)), *[str(x) for x in labels]])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def stream(seed: int, *labels: object) -> random.Random:
    """A ``random.Random`` seeded from ``derive_seed(seed, *labels)``."""
    return random.Random(derive_seed(seed, *labels))
