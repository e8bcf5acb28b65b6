"""Summary statistics and goodness-of-fit helpers used by the harness."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats as sps

__all__ = [
    "SummaryStats",
    "summarize",
    "ks_two_sample",
    "ks_one_sample_mixed",
    "mm1_wait_cdf",
    "z_pvalue",
]

Z95 = 1.96


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    variance: float
    vmr: float
    ci95_halfwidth: float
    n: int
    ks_statistic: Optional[float] = None

    @property
    def stderr(self) -> float:
        return math.sqrt(self.variance / self.n) if self.n > 0 else math.nan

    def covers(self, value: float) -> bool:
        return abs(self.mean - value) <= self.ci95_halfwidth

    def to_dict(self) -> dict:
        return asdict(self)


def summarize(values: Sequence[float], ks_statistic: Optional[float] = None) -> SummaryStats:
    x = np.asarray(values, dtype=float)
    n = x.size
    if n == 0:
        raise ValueError("cannot summarize an empty sample")
    mean = math.fsum(x) / n
    var = float(np.sum((x - mean) ** 2) / (n - 1)) if n > 1 else 0.0
    vmr = var / mean if mean > 0 else math.nan
    hw = Z95 * math.sqrt(var) / math.sqrt(n)
    return SummaryStats(mean, var, vmr, hw, n, ks_statistic)


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """Two-sample KS statistic and asymptotic p-value."""
    res = sps.ks_2samp(np.asarray(a, float), np.asarray(b, float), method="asymp")
    return float(res.statistic), float(res.pvalue)


def ks_one_sample_mixed(x: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray],
                        cdf_left: Optional[Callable[[np.ndarray], np.ndarray]] = None
                        ) -> tuple[float, float]:
    """One-sample KS against a CDF that may have atoms.

    ``cdf_left(x)`` is the left limit ``F(x-)``; it defaults to ``cdf`` (no
    atoms). The sup distance is taken over both one-sided limits at every
    distinct sample point, so ties at an atom are handled correctly. The
    p-value uses the Kolmogorov limit law, which is conservative when the
    target has atoms.
    """
    x = np.sort(np.asarray(x, dtype=float))
    n = x.size
    if cdf_left is None:
        cdf_left = cdf
    vals, first = np.unique(x, return_index=True)
    last = np.append(first[1:], n)
    emp_right = last / n
    emp_left = first / n
    d = max(np.max(np.abs(emp_right - cdf(vals))), np.max(np.abs(emp_left - cdf_left(vals))))
    return float(d), float(sps.kstwobign.sf(d * math.sqrt(n)))


def mm1_wait_cdf(rho: float, mu: float):
    """CDF and left-limit CDF of the stationary M/M/1 workload (atom ``1 - rho`` at 0)."""
    def cdf(x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, 1.0 - rho * np.exp(-mu * (1.0 - rho) * np.maximum(x, 0.0)), 0.0)

    def cdf_left(x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, 1.0 - rho * np.exp(-mu * (1.0 - rho) * np.maximum(x, 0.0)), 0.0)

    return cdf, cdf_left


def z_pvalue(z: float) -> float:
    """Two-sided normal p-value."""
    return float(2.0 * sps.norm.sf(abs(z)))
