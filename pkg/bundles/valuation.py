from dataclasses import dataclass, field
from typing import Callable, Protocol, Sequence, runtime_checkable

import numpy as np

from bundles.bundle import Bundle, all_bundles, bundle_transform, row_index


@runtime_checkable
class BundleValuation(Protocol):
    """Anything that can value a bundle, one at a time or all at once."""

    n: int

    def value(self, bundle: Bundle) -> float:
        ...

    def values(self) -> np.ndarray:
        """Values of all 2^n - 1 bundles in canonical order."""
        ...


@dataclass(frozen=True, eq=False)
class ValuationTable:
    """
    Per-good monetary values of one customer.

    Bundle valuations are additive: v(b) = sum of v(i) over goods i in b.
    `rejected_draws` counts negative samples discarded while drawing it.
    """
    per_good: np.ndarray
    rejected_draws: int = 0

    def __post_init__(self):
        arr = np.asarray(self.per_good, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("per_good must be a nonempty 1-d array.")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "per_good", arr)

    @classmethod
    def of(cls, values: Sequence[float]) -> "ValuationTable":
        return cls(np.asarray(values, dtype=np.float64))

    @property
    def n(self) -> int:
        return int(self.per_good.size)

    def value(self, bundle: Bundle) -> float:
        return float(self.per_good[list(bundle.goods)].sum())

    def values(self) -> np.ndarray:
        return bundle_transform(self.n) @ self.per_good

    def mean(self) -> float:
        return float(self.per_good.mean())


@dataclass(frozen=True, eq=False)
class TabulatedValuation:
    """Arbitrary (possibly non-additive) valuation given as a full table."""
    n: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.asarray(self.table, dtype=np.float64)
        if arr.shape != ((1 << self.n) - 1,):
            raise ValueError(
                f"Expected {(1 << self.n) - 1} bundle values, got shape {arr.shape}."
            )
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    @classmethod
    def from_function(cls, n: int, fn: Callable[[Bundle], float]) -> "TabulatedValuation":
        return cls(n, np.array([fn(b) for b in all_bundles(n)], dtype=np.float64))

    def value(self, bundle: Bundle) -> float:
        return float(self.table[row_index(bundle)])

    def values(self) -> np.ndarray:
        return self.table
