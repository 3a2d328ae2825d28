"""Deterministic seed derivation for nested sampling stages.

All randomness flows through numpy SeedSequence paths so that any stage
(ensemble draw, feature k's functional, feature k's threshold) is a pure
function of the root seed and its integer path.
"""

from __future__ import annotations

import numpy as np


def derive_seed(root, *path: int) -> np.random.SeedSequence:
    """Child seed for an integer path under a root seed.

    Identical (root, path) pairs always produce the same stream; distinct
    paths produce independent ones.  A root that is itself a derived seed
    keeps its own path, so derivations nest without collisions.
    """
    if isinstance(root, np.random.SeedSequence):
        base, prefix = root.entropy, tuple(root.spawn_key)
    else:
        base, prefix = root, ()
    if base is None:
        raise ValueError("derive_seed needs an explicit root seed")
    return np.random.SeedSequence(
        entropy=base, spawn_key=prefix + tuple(int(p) for p in path)
    )
