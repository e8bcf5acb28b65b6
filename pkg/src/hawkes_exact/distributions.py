"""Positive laws with closed-form c.g.f. and closed-form exponential tilting.

Four families are supported: exponential, Erlang, point mass and uniform.
The first three are closed under exponential tilting; a tilted uniform is a
truncated exponential on the same support and is carried as a ``Uniform``
with a nonzero ``eta`` (``eta=0`` is the plain uniform).

Every law exposes

* ``cgf(theta)``          log E[exp(theta X)], raising :class:`DomainError`
                          at or beyond ``mgf_domain_bound``;
* ``tilt(eta)``           the law with density proportional to exp(eta t) f(t);
* ``sample(rng, size)``   exact draws from an explicit generator.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Union

import numpy as np

from .errors import DomainError, ModelError

__all__ = [
    "Exponential",
    "Erlang",
    "Deterministic",
    "Uniform",
    "DistributionSpec",
    "cgf",
    "tilt",
    "sample",
    "mgf_domain_bound",
    "from_dict",
]


def _check_domain(d, theta):
    bound = d.mgf_domain_bound()
    if not theta < bound:
        raise DomainError(f"{d!r}: c.g.f. is infinite at theta={theta} (bound {bound})")


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ModelError(f"Exponential rate must be positive, got {self.rate}")

    def mgf_domain_bound(self) -> float:
        return self.rate

    def cgf(self, theta: float) -> float:
        _check_domain(self, theta)
        return -math.log1p(-theta / self.rate)

    def tilt(self, eta: float) -> "Exponential":
        _check_domain(self, eta)
        return Exponential(self.rate - eta)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(1.0 / self.rate, size)

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def variance(self) -> float:
        return 1.0 / self.rate**2

    @property
    def monotone_density(self) -> bool:
        return True

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        return np.where(t >= 0, self.rate * np.exp(-self.rate * np.maximum(t, 0.0)), 0.0)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return -np.expm1(-self.rate * np.maximum(t, 0.0))

    def to_dict(self) -> dict:
        return {"kind": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class Erlang:
    shape: int
    rate: float

    def __post_init__(self):
        if int(self.shape) != self.shape or self.shape < 1:
            raise ModelError(f"Erlang shape must be a positive integer, got {self.shape}")
        if not (self.rate > 0 and math.isfinite(self.rate)):
            raise ModelError(f"Erlang rate must be positive, got {self.rate}")
        object.__setattr__(self, "shape", int(self.shape))

    def mgf_domain_bound(self) -> float:
        return self.rate

    def cgf(self, theta: float) -> float:
        _check_domain(self, theta)
        return -self.shape * math.log1p(-theta / self.rate)

    def tilt(self, eta: float) -> "Erlang":
        _check_domain(self, eta)
        return Erlang(self.shape, self.rate - eta)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size)

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def variance(self) -> float:
        return self.shape / self.rate**2

    @property
    def monotone_density(self) -> bool:
        return self.shape == 1

    def pdf(self, t):
        from scipy.stats import gamma

        return gamma.pdf(t, self.shape, scale=1.0 / self.rate)

    def cdf(self, t):
        from scipy.stats import gamma

        return gamma.cdf(t, self.shape, scale=1.0 / self.rate)

    def to_dict(self) -> dict:
        return {"kind": "erlang", "shape": self.shape, "rate": self.rate}


@dataclass(frozen=True)
class Deterministic:
    value: float

    def __post_init__(self):
        if not (self.value > 0 and math.isfinite(self.value)):
            raise ModelError(f"Deterministic value must be positive, got {self.value}")

    def mgf_domain_bound(self) -> float:
        return math.inf

    def cgf(self, theta: float) -> float:
        return theta * self.value

    def tilt(self, eta: float) -> "Deterministic":
        return self

    def sample(self, rng: np.random.Generator, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    @property
    def mean(self) -> float:
        return self.value

    @property
    def variance(self) -> float:
        return 0.0

    @property
    def monotone_density(self) -> bool:
        return False

    def cdf(self, t):
        return np.where(np.asarray(t, dtype=float) >= self.value, 1.0, 0.0)

    def to_dict(self) -> dict:
        return {"kind": "deterministic", "value": self.value}


def _log_mgf_uniform(s: float, lo: float, width: float) -> float:
    """log E[exp(s X)] for X ~ U[lo, lo + width]."""
    z = s * width
    if z == 0.0:
        return 0.0
    if abs(z) < 1e-8:
        return s * lo + z / 2.0 + z * z / 24.0
    if z > 0:
        return s * lo + z + math.log(-math.expm1(-z)) - math.log(z)
    return s * lo + math.log(math.expm1(z) / z)


@dataclass(frozen=True)
class Uniform:
    """Uniform law on ``[lo, hi]``, exponentially tilted by ``eta``.

    With ``eta != 0`` the density is ``eta exp(eta (t - lo)) / (exp(eta w) - 1)``
    on the same support, ``w = hi - lo``.
    """

    lo: float
    hi: float
    eta: float = 0.0

    def __post_init__(self):
        if not (self.lo >= 0 and self.hi > self.lo and math.isfinite(self.hi)):
            raise ModelError(f"Uniform needs 0 <= lo < hi < inf, got [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def mgf_domain_bound(self) -> float:
        return math.inf

    def cgf(self, theta: float) -> float:
        return (_log_mgf_uniform(theta + self.eta, self.lo, self.width)
                - _log_mgf_uniform(self.eta, self.lo, self.width))

    def tilt(self, eta: float) -> "Uniform":
        return Uniform(self.lo, self.hi, self.eta + eta)

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        return self._quantile(u)

    def _quantile(self, u):
        s, w = self.eta, self.width
        z = s * w
        if abs(z) < 1e-12:
            return self.lo + w * u
        if z > 0:
            # inverted from the upper end to avoid overflow of exp(z)
            return self.hi + np.log(u + (1.0 - u) * math.exp(-z)) / s
        return self.lo + np.log1p(u * math.expm1(z)) / s

    @property
    def mean(self) -> float:
        z = self.eta * self.width
        if abs(z) < 1e-8:
            return self.lo + self.width * (0.5 + z / 12.0)
        return self.lo + self.width * (-1.0 / math.expm1(-z) - 1.0 / z)

    @property
    def variance(self) -> float:
        z = self.eta * self.width
        w2 = self.width**2
        if abs(z) < 1e-4:
            return w2 * (1.0 / 12.0 - z * z / 720.0)
        # second derivative of log((e^z - 1)/z), scaled by w^2
        return w2 * (1.0 / z**2 - math.exp(-z) / math.expm1(-z) ** 2)

    @property
    def monotone_density(self) -> bool:
        return False

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= self.lo) & (t <= self.hi)
        log_dens = self.eta * t - _log_mgf_uniform(self.eta, self.lo, self.width) - math.log(self.width)
        return np.where(inside, np.exp(np.where(inside, log_dens, 0.0)), 0.0)

    def cdf(self, t):
        t = np.clip(np.asarray(t, dtype=float), self.lo, self.hi)
        s, w = self.eta, self.width
        z = s * w
        if abs(z) < 1e-12:
            return (t - self.lo) / w
        if z > 0:
            return (np.exp(s * (t - self.hi)) - math.exp(-z)) / -math.expm1(-z)
        return np.expm1(s * (t - self.lo)) / math.expm1(z)

    def to_dict(self) -> dict:
        out = {"kind": "uniform", "lo": self.lo, "hi": self.hi}
        if self.eta:
            out["eta"] = self.eta
        return out


DistributionSpec = Union[Exponential, Erlang, Deterministic, Uniform]

_KINDS = {
    "exponential": Exponential,
    "erlang": Erlang,
    "deterministic": Deterministic,
    "uniform": Uniform,
}


def cgf(d: DistributionSpec, theta: float) -> float:
    return d.cgf(theta)


def tilt(d: DistributionSpec, eta: float) -> DistributionSpec:
    return d.tilt(eta)


def sample(d: DistributionSpec, rng: np.random.Generator, size=None):
    return d.sample(rng, size)


def mgf_domain_bound(d: DistributionSpec) -> float:
    return d.mgf_domain_bound()


def from_dict(spec: dict[str, Any]) -> DistributionSpec:
    """Build a law from its config form, e.g. ``{"kind": "exponential", "rate": 2}``."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ModelError(f"distribution must be an object with a 'kind' field, got {spec!r}")
    params = dict(spec)
    kind = str(params.pop("kind")).lower()
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise ModelError(f"unknown distribution kind {kind!r}; expected one of {sorted(_KINDS)}") from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise ModelError(f"bad parameters for {kind}: {exc}") from None
