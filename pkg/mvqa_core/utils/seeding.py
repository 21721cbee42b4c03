"""Seed derivation.

Every random stream in the engine is keyed by a tuple of parts, e.g.
``("scene", seed, theme_id, spec_index, object_index, attempt)``. The key is
hashed with SHA-256 (Python's ``hash()`` is salted per process and must not be
used), and the first 8 bytes become the 64-bit seed of a numpy ``Generator``.
"""
import hashlib

import numpy as np

SEED_MASK = (1 << 64) - 1


def _encode_part(part):
    if isinstance(part, float):
        return repr(float(part))
    if isinstance(part, (tuple, list)):
        return "(" + ",".join(_encode_part(p) for p in part) + ")"
    return str(part)


def derive_seed(*parts):
    key = "\x1f".join(_encode_part(p) for p in parts)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") & SEED_MASK


def make_rng(*parts):
    return np.random.default_rng(derive_seed(*parts))
