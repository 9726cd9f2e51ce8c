import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Tuple, Union

import numpy as np
from scipy.stats import norm

from app_logging.event_logger import get_logger
from bundles.valuation import ValuationTable
from utils.seeding import SeedLike, as_generator

logger = get_logger(__name__)

# mu / sd at or above this keeps Pr[valuation < 0] <= 0.0003 per good
MIN_MEAN_TO_SD = 3.432
MAX_CONSECUTIVE_REJECTIONS = 1000


class SamplingError(RuntimeError):
    """Raised when customer draws keep coming out negative."""


def decaying_correlation(n: int, decay: float = 0.5) -> np.ndarray:
    """corr[i, j] = decay ** |i - j|, positive definite for |decay| < 1."""
    if not -1.0 < decay < 1.0:
        raise ValueError(f"Correlation decay must lie in (-1, 1), got {decay}.")
    idx = np.arange(n)
    return decay ** np.abs(idx[:, None] - idx[None, :])


def _check_positive_definite(matrix: np.ndarray, name: str) -> None:
    if not np.allclose(matrix, matrix.T):
        raise ValueError(f"{name} is not symmetric.")
    try:
        np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError as exc:
        raise ValueError(f"{name} is not positive definite.") from exc


@dataclass(frozen=True, eq=False)
class PreferenceDistribution:
    """
    Multivariate normal over the customers' per-good valuations.

    sigma = D @ corr @ D with D = diag(sd). Arrays are read-only. Every
    good needs mu_i / sd_i >= min_mean_to_sd; None lifts the bound.
    """
    mu: np.ndarray
    sigma: np.ndarray
    corr: np.ndarray
    seed: Optional[int] = None
    min_mean_to_sd: Optional[float] = MIN_MEAN_TO_SD
    _chol: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mu = np.array(self.mu, dtype=np.float64)
        sigma = np.array(self.sigma, dtype=np.float64)
        corr = np.array(self.corr, dtype=np.float64)
        n = mu.size
        if mu.ndim != 1 or n == 0:
            raise ValueError("mu must be a nonempty vector.")
        if sigma.shape != (n, n) or corr.shape != (n, n):
            raise ValueError(f"sigma and corr must be {n}x{n}.")
        if not np.allclose(np.diag(corr), 1.0):
            raise ValueError("corr must have a unit diagonal.")
        if np.any(np.abs(corr) > 1.0 + 1e-12):
            raise ValueError("corr entries must lie in [-1, 1].")
        _check_positive_definite(corr, "corr")
        _check_positive_definite(sigma, "sigma")
        if self.min_mean_to_sd is not None:
            ratio = mu / np.sqrt(np.diag(sigma))
            low = np.flatnonzero(ratio < self.min_mean_to_sd * (1.0 - 1e-9))
            if low.size:
                raise ValueError(
                    f"mu / sd must be at least {self.min_mean_to_sd} for every good; "
                    f"goods {low.tolist()} have {np.round(ratio[low], 3).tolist()}."
                )
        for name, arr in (("mu", mu), ("sigma", sigma), ("corr", corr)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "_chol", np.linalg.cholesky(sigma))

    @classmethod
    def from_sd(cls, mu, sd, corr, seed: Optional[int] = None,
                min_mean_to_sd: Optional[float] = MIN_MEAN_TO_SD) -> "PreferenceDistribution":
        sd = np.asarray(sd, dtype=np.float64)
        corr = np.asarray(corr, dtype=np.float64)
        return cls(mu=mu, sigma=np.outer(sd, sd) * corr, corr=corr, seed=seed, min_mean_to_sd=min_mean_to_sd)

    @property
    def n(self) -> int:
        return int(self.mu.size)

    @property
    def sd(self) -> np.ndarray:
        return np.sqrt(np.diag(self.sigma))

    def negative_probability(self) -> np.ndarray:
        """Pr[Z_i < 0] per good."""
        return norm.cdf(-self.mu / self.sd)

    @property
    def cholesky(self) -> np.ndarray:
        return self._chol

    # ---- persistence ----

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mu": self.mu.tolist(),
            "sigma": self.sigma.tolist(),
            "corr": self.corr.tolist(),
            "seed": self.seed,
            "min_mean_to_sd": self.min_mean_to_sd,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PreferenceDistribution":
        dist = cls(mu=doc["mu"], sigma=doc["sigma"], corr=doc["corr"], seed=doc.get("seed"),
                   min_mean_to_sd=doc.get("min_mean_to_sd", MIN_MEAN_TO_SD))
        if "n" in doc and int(doc["n"]) != dist.n:
            raise ValueError(f"Document says n={doc['n']} but mu has {dist.n} entries.")
        return dist

    def dump(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.to_dict(), indent=2), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PreferenceDistribution":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def generate_distribution(
    seed: SeedLike,
    n: int = 10,
    mean_range: Tuple[float, float] = (40.0, 250.0),
    sd_floor_fraction: float = 0.05,
    min_mean_to_sd: float = MIN_MEAN_TO_SD,
    corr: Optional[np.ndarray] = None,
) -> PreferenceDistribution:
    """
    Random distribution: distinct means uniform on `mean_range`, standard
    deviations uniform on [sd_floor_fraction * mu_i, mu_i / min_mean_to_sd],
    and a fixed correlation matrix (0.5 ** |i - j| unless given).
    """
    if n < 1:
        raise ValueError(f"Need at least one good, got n={n}.")
    low, high = mean_range
    if not 0 < low < high:
        raise ValueError(f"Invalid mean range {mean_range}.")
    if not 0 < sd_floor_fraction < 1.0 / min_mean_to_sd:
        raise ValueError(
            f"sd_floor_fraction must lie in (0, {1.0 / min_mean_to_sd:.4f}), got {sd_floor_fraction}."
        )

    rng = as_generator(seed)
    mu = rng.uniform(low, high, size=n)
    while np.unique(mu).size < n:
        mu = rng.uniform(low, high, size=n)
    sd = rng.uniform(sd_floor_fraction * mu, mu / min_mean_to_sd)

    if corr is None:
        corr = decaying_correlation(n)
    corr = np.asarray(corr, dtype=np.float64)
    if corr.shape != (n, n):
        raise ValueError(f"corr must be {n}x{n}, got {corr.shape}.")

    int_seed = int(seed) if isinstance(seed, (int, np.integer)) else None
    return PreferenceDistribution.from_sd(mu, sd, corr, seed=int_seed, min_mean_to_sd=min_mean_to_sd)


def sample_valuations(
    dist: PreferenceDistribution,
    size: int,
    seed: SeedLike = None,
) -> Tuple[np.ndarray, int]:
    """
    `size` draws from N[mu, sigma] with every component positive, plus the
    number of draws rejected for having a negative component.
    """
    rng = as_generator(seed)
    accepted = []
    have = 0
    rejected = 0
    streak = 0
    while have < size:
        batch = max(size - have, 16)
        z = rng.standard_normal((batch, dist.n)) @ dist.cholesky.T + dist.mu
        ok = np.all(z > 0.0, axis=1)
        rejected += int(batch - ok.sum())
        streak = 0 if ok.any() else streak + batch
        if streak >= MAX_CONSECUTIVE_REJECTIONS:
            raise SamplingError(
                f"{streak} consecutive negative draws; distribution misconfigured?"
            )
        accepted.append(z[ok])
        have += int(ok.sum())
    return np.concatenate(accepted)[:size], rejected


def sample_customer(dist: PreferenceDistribution, seed: SeedLike = None) -> ValuationTable:
    """
    One customer drawn from N[mu, sigma]. Draws with a negative component are
    redrawn; after MAX_CONSECUTIVE_REJECTIONS in a row SamplingError is raised.
    """
    rng = as_generator(seed)
    rejected = 0
    while True:
        z = dist.mu + dist.cholesky @ rng.standard_normal(dist.n)
        if np.all(z > 0.0):
            if rejected:
                logger.info(f"Customer draw accepted after {rejected} rejected draws.")
            return ValuationTable(z, rejected_draws=rejected)
        rejected += 1
        if rejected >= MAX_CONSECUTIVE_REJECTIONS:
            raise SamplingError(
                f"{rejected} consecutive negative draws; distribution misconfigured?"
            )
