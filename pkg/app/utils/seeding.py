import hashlib
import numpy as np


def derive_seed(campaign_seed: int, *parts) -> int:
    """Derive a 64-bit seed from the campaign seed and a run key.

    The key is hashed as text, so any subset of a campaign reproduces the
    same streams regardless of which other runs are scheduled.
    """
    key = ":".join([str(int(campaign_seed))] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(seed: int) -> np.random.Generator:
    """Random stream for a single run"""
    return np.random.default_rng(np.random.SeedSequence(int(seed)))
