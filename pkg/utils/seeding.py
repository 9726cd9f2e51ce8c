"""
Deterministic random streams.

Every stochastic component draws from its own numpy Generator, derived from
the master seed plus a spawn key. Keys identify what the stream is for and
which cell of the experiment it belongs to, so a cell's streams do not depend
on iteration order or on how many other cells ran before it.
"""
from enum import IntEnum
from typing import Union

import numpy as np

SeedLike = Union[int, np.random.Generator, np.random.SeedSequence, None]


class Stream(IntEnum):
    DISTRIBUTION = 0
    CUSTOMER = 1
    STRATEGY = 2
    BREAKDOWN = 3
    TRIGGER = 4
    CHOICE = 5
    SHOP_COSTS = 6


def derive_rng(master_seed: int, stream: int, *cell: int) -> np.random.Generator:
    """
    Generator for `stream` (a Stream member, or any int label outside the
    sweep) in the experiment cell `cell`
    (e.g. distribution index, customer index, threshold index).
    """
    seq = np.random.SeedSequence(
        entropy=int(master_seed),
        spawn_key=(int(stream), *(int(c) for c in cell)),
    )
    return np.random.default_rng(seq)


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def derive_seed(master_seed: int, stream: int, *cell: int) -> int:
    """Plain integer seed for `stream` in `cell`, for objects that record their seed."""
    seq = np.random.SeedSequence(
        entropy=int(master_seed),
        spawn_key=(int(stream), *(int(c) for c in cell)),
    )
    return int(seq.generate_state(1, dtype=np.uint32)[0])
