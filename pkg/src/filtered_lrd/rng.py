import numpy as np

SEED_MASK = (1 << 64) - 1


def derive_seed(base_seed: int, stream: int) -> int:
    """
    Derive the 64-bit seed of an independent stream.

    Streams are children of `SeedSequence(base_seed)` addressed by `spawn_key=(stream,)`,
    so the mapping is stable across runs, platforms and worker counts.
    """
    sequence = np.random.SeedSequence(base_seed & SEED_MASK, spawn_key=(stream,))
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed & SEED_MASK)
