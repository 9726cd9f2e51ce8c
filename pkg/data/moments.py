"""
Moments of bundle valuations and conditional expectations given a bid.

With additive valuations every bundle valuation is a linear function of the
per-good vector, so bundle moments follow from mu and sigma without building
the (2^n - 1)^2 bundle covariance. Conditioning on v_c(given) >= price
shifts each good's mean along its covariance with v_c(given), scaled by the
inverse Mills ratio of the truncation point.
"""
import math
import threading
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np
from scipy.special import erfcx

from app_logging.event_logger import get_logger
from bundles.bundle import Bundle, bundle_transform
from data.preferences import PreferenceDistribution

logger = get_logger(__name__)

# alpha above this means Pr[v_c(given) >= price] < 1e-15
MAX_TRUNCATION_ALPHA = 8.0
PRICE_BUCKET = 0.1
MAX_DENSE_GOODS = 12

_SQRT2 = math.sqrt(2.0)
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)


class VacuousConditionError(ValueError):
    """The conditioning event has negligible probability under the model."""

    def __init__(self, alpha: float):
        super().__init__(f"Conditioning event is vacuous (alpha={alpha:.3f} > {MAX_TRUNCATION_ALPHA}).")
        self.alpha = alpha


def inverse_mills(alpha: float) -> float:
    """
    phi(alpha) / (1 - Phi(alpha)) for the standard normal.

    Written as sqrt(2/pi) / erfcx(alpha / sqrt(2)), which stays accurate in
    both tails; alpha = -inf gives 0.
    """
    if alpha == -math.inf:
        return 0.0
    return _SQRT_2_OVER_PI / float(erfcx(alpha / _SQRT2))


def _goods_index(bundle: Bundle) -> list:
    return list(bundle.goods)


@dataclass(frozen=True)
class BundleMoments:
    """Lazy mean/covariance access for bundle valuations under `dist`."""
    dist: PreferenceDistribution

    def mean(self, bundle: Bundle) -> float:
        return float(self.dist.mu[_goods_index(bundle)].sum())

    def cov(self, first: Bundle, second: Bundle) -> float:
        return float(self.dist.sigma[np.ix_(_goods_index(first), _goods_index(second))].sum())

    def var(self, bundle: Bundle) -> float:
        return self.cov(bundle, bundle)

    def cov_with_goods(self, bundle: Bundle) -> np.ndarray:
        """Cov(z_i, v_c(bundle)) for every good i."""
        return self.dist.sigma[:, _goods_index(bundle)].sum(axis=1)

    def means(self) -> np.ndarray:
        """Mean valuation of every bundle, canonical order (T @ mu)."""
        return bundle_transform(self.dist.n) @ self.dist.mu

    def materialize(self) -> Tuple[np.ndarray, np.ndarray]:
        """(T mu, T sigma T') for small n; the covariance is (2^n - 1)^2."""
        n = self.dist.n
        if n > MAX_DENSE_GOODS:
            raise ValueError(
                f"Dense bundle covariance for n={n} is too large; use cov() per pair "
                f"(dense allowed up to n={MAX_DENSE_GOODS})."
            )
        t = bundle_transform(n)
        return t @ self.dist.mu, t @ self.dist.sigma @ t.T


def bundle_moments(dist: PreferenceDistribution) -> BundleMoments:
    return BundleMoments(dist)


def conditional_good_means(dist: PreferenceDistribution, given: Bundle, price: float) -> np.ndarray:
    """
    E[z_i | v_c(given) >= price] for every good i.

    Raises VacuousConditionError when the event is (numerically) impossible.
    """
    if math.isnan(price) or price == math.inf:
        raise ValueError(f"Price must be finite or -inf, got {price}.")
    moments = BundleMoments(dist)
    sd_given = math.sqrt(moments.var(given))
    alpha = (price - moments.mean(given)) / sd_given
    if alpha > MAX_TRUNCATION_ALPHA:
        raise VacuousConditionError(alpha)
    return dist.mu + moments.cov_with_goods(given) / sd_given * inverse_mills(alpha)


def conditional_expectation(
    dist: PreferenceDistribution,
    target: Bundle,
    given: Bundle,
    price: float,
) -> float:
    """E[v_c(target) | v_c(given) >= price], summed good by good."""
    return float(conditional_good_means(dist, given, price)[_goods_index(target)].sum())


def price_bucket(price: float) -> float:
    if price == -math.inf:
        return price
    return round(round(price / PRICE_BUCKET) * PRICE_BUCKET, 10)


@dataclass
class CustomerModel:
    """
    The shop's aggregate knowledge about customers: the distribution plus a
    memo of conditional good means keyed by (given bundle, price bucket).

    Each entry is the n-vector of per-good expectations, so the memo holds at
    most n * (2^n - 1) numbers per price bucket. Safe to share between threads.
    """
    dist: PreferenceDistribution
    _memo: Dict[Tuple[int, float], np.ndarray] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    vacuous_fallbacks: int = 0

    @property
    def n(self) -> int:
        return self.dist.n

    def good_means(self, given: Bundle, price: float) -> np.ndarray:
        """
        Conditional per-good means at the bucketed price; falls back to the
        unconditional means when the condition is vacuous.
        """
        key = (given.mask, price_bucket(price))
        with self._lock:
            cached = self._memo.get(key)
        if cached is not None:
            return cached
        try:
            values = conditional_good_means(self.dist, given, key[1])
        except VacuousConditionError as exc:
            logger.warning(f"{exc} given={given}; using unconditional expectation.")
            with self._lock:
                self.vacuous_fallbacks += 1
            values = self.dist.mu
        values = np.array(values)
        values.setflags(write=False)
        with self._lock:
            self._memo.setdefault(key, values)
            return self._memo[key]

    def expected_valuation(self, target: Bundle, given: Bundle, price: float) -> float:
        return float(self.good_means(given, price)[_goods_index(target)].sum())

    def cache_size(self) -> int:
        with self._lock:
            return len(self._memo)
