from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import FrozenSet, Iterable, Iterator, List, Tuple

import numpy as np

DEFAULT_GOODS = 10
MAX_ENUMERABLE_GOODS = 24


class EnumerationLimitError(ValueError):
    """Raised when the number of goods is beyond the brute-force bound."""


def check_enumerable(n: int) -> None:
    if not 1 <= n <= MAX_ENUMERABLE_GOODS:
        raise EnumerationLimitError(
            f"n={n} goods cannot be enumerated (allowed 1..{MAX_ENUMERABLE_GOODS})."
        )


@dataclass(frozen=True, order=True)
class Bundle:
    """
    Nonempty subset of the shop's n goods, stored as an n-bit mask.

    Bit i set means good i (0-based) is in the bundle. Ordering compares the
    mask first, which is the canonical order used for iteration and ties.
    """
    mask: int
    n: int = DEFAULT_GOODS

    def __post_init__(self):
        check_enumerable(self.n)
        if self.mask <= 0:
            raise ValueError("A bundle must contain at least one good.")
        if self.mask >> self.n:
            raise ValueError(f"Mask {self.mask:#b} has bits beyond n={self.n}.")

    @classmethod
    def from_goods(cls, goods: Iterable[int], n: int = DEFAULT_GOODS) -> "Bundle":
        mask = 0
        for g in goods:
            if not 0 <= g < n:
                raise ValueError(f"Good index {g} outside 0..{n - 1}.")
            mask |= 1 << g
        return cls(mask, n)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Bundle":
        bits = list(bits)
        return cls.from_goods((i for i, b in enumerate(bits) if b), n=len(bits))

    @property
    def goods(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.n) if self.mask >> i & 1)

    @property
    def size(self) -> int:
        return bin(self.mask).count("1")

    def __contains__(self, good: int) -> bool:
        return 0 <= good < self.n and bool(self.mask >> good & 1)

    def bits(self) -> np.ndarray:
        return (self.mask >> np.arange(self.n)) & 1

    def bitstring(self) -> str:
        """Good 0 first, e.g. '1010' for goods {0, 2} with n=4."""
        return "".join(str(b) for b in self.bits())

    def __str__(self) -> str:
        return "{" + ",".join(str(g) for g in self.goods) + "}"


class Originator(str, Enum):
    CUSTOMER = "customer"
    SHOP = "shop"


@dataclass(frozen=True)
class Offer:
    bundle: Bundle
    price: float
    originator: Originator
    round: int = 0


def neighborhood(bundle: Bundle) -> FrozenSet[Bundle]:
    """
    Bundles at Hamming distance 1: one good removed or one good added.
    The empty bundle is not a bundle, so a singleton has n - 1 neighbours.
    """
    out = set()
    for i in range(bundle.n):
        flipped = bundle.mask ^ (1 << i)
        if flipped:
            out.add(Bundle(flipped, bundle.n))
    return frozenset(out)


def all_bundles(n: int) -> Iterator[Bundle]:
    """All 2^n - 1 bundles in canonical order."""
    check_enumerable(n)
    for mask in range(1, 1 << n):
        yield Bundle(mask, n)


@lru_cache(maxsize=8)
def _transform(n: int) -> np.ndarray:
    masks = np.arange(1, 1 << n, dtype=np.int64)
    matrix = ((masks[:, None] >> np.arange(n)) & 1).astype(np.float64)
    matrix.setflags(write=False)
    return matrix


def bundle_transform(n: int) -> np.ndarray:
    """
    (2^n - 1) x n binary matrix; row k is the bit pattern of mask k + 1.

    Multiplying it with per-good values gives every bundle's value at once.
    """
    check_enumerable(n)
    return _transform(n)


def bundle_sizes(n: int) -> np.ndarray:
    return bundle_transform(n).sum(axis=1).astype(np.int64)


def row_index(bundle: Bundle) -> int:
    """Row of `bundle` in bundle_transform(bundle.n)."""
    return bundle.mask - 1


def bundles_from_rows(rows: Iterable[int], n: int) -> List[Bundle]:
    return [Bundle(int(r) + 1, n) for r in rows]


@dataclass(frozen=True)
class BundleTransform:
    """Row-per-bundle binary matrix for n goods (canonical order)."""
    n: int
    matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "matrix", bundle_transform(self.n))

    def row(self, bundle: Bundle) -> np.ndarray:
        return self.matrix[row_index(bundle)]
