from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from bundles.bundle import Bundle, bundle_sizes, bundle_transform, row_index
from data.preferences import PreferenceDistribution
from utils.seeding import SeedLike, as_generator


def draw_cost_scales(n: int, spread: float, seed: SeedLike = None) -> np.ndarray:
    """Per-good shop cost scales, uniform on [1 - spread, 1 + spread]."""
    if not 0.0 <= spread < 1.0:
        raise ValueError(f"cost spread must lie in [0, 1), got {spread}.")
    if spread == 0.0:
        return np.ones(n)
    return as_generator(seed).uniform(1.0 - spread, 1.0 + spread, size=n)


@dataclass(frozen=True, eq=False)
class ShopPricing:
    """
    The shop's (non-additive) bundle valuations for one distribution.

    v_s(b) = C(b) * (beta + gamma * (E[v_c(b)] - mean_k) / mean_k), where
    mean_k is the average expected customer valuation over all bundles of
    the same size k = |b| and C(b) = sum of cost_scales[i] * mu_i over the
    goods in b. With unit cost scales C(b) = E[v_c(b)]: bundles the average
    customer values above their size class are relatively expensive.
    Values are floored at floor_fraction * E[v_c(b)].
    """
    n: int
    beta: float
    gamma: float
    expected: np.ndarray = field(repr=False)
    size_means: np.ndarray = field(repr=False)
    floor_fraction: float = 0.05
    cost_basis: Optional[np.ndarray] = field(default=None, repr=False)
    table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}.")
        if self.gamma < 0.0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}.")
        if not 0.0 <= self.floor_fraction < self.beta:
            raise ValueError(f"floor_fraction must lie in [0, beta), got {self.floor_fraction}.")
        basis = self.expected if self.cost_basis is None else self.cost_basis
        if basis.shape != self.expected.shape:
            raise ValueError("cost_basis must have one entry per bundle.")
        sizes = bundle_sizes(self.n)
        class_mean = self.size_means[sizes - 1]
        raw = basis * (self.beta + self.gamma * (self.expected - class_mean) / class_mean)
        table = np.maximum(raw, self.floor_fraction * self.expected)
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @classmethod
    def for_distribution(
        cls,
        dist: PreferenceDistribution,
        beta: float = 0.7,
        gamma: float = 0.3,
        floor_fraction: float = 0.05,
        cost_scales: Optional[np.ndarray] = None,
    ) -> "ShopPricing":
        transform = bundle_transform(dist.n)
        expected = transform @ dist.mu
        sizes = bundle_sizes(dist.n)
        size_means = np.array([expected[sizes == k].mean() for k in range(1, dist.n + 1)])
        basis = None
        if cost_scales is not None:
            scales = np.asarray(cost_scales, dtype=float)
            if scales.shape != (dist.n,) or np.any(scales <= 0):
                raise ValueError(f"cost_scales must be {dist.n} positive numbers.")
            basis = transform @ (scales * dist.mu)
        return cls(dist.n, beta, gamma, expected, size_means, floor_fraction, basis)

    def value(self, bundle: Bundle) -> float:
        return float(self.table[row_index(bundle)])

    def values(self) -> np.ndarray:
        return self.table

    def expected_customer_value(self, bundle: Bundle) -> float:
        return float(self.expected[row_index(bundle)])


def shop_valuation(bundle: Bundle, pricing: ShopPricing) -> float:
    return pricing.value(bundle)
