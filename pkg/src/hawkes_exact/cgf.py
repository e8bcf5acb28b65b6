"""Cumulant fixed points for Hawkes clusters.

Two compound-branching c.g.f.s drive the samplers:

* the total birth time ``B`` of a cluster solves
  ``x = h1 * exp(psi_f(eta) + x) - h1``;
* the total service ``K`` of a cluster solves
  ``k = psi_V(eta) + h1 * (exp(k) - 1)``.

Both have the shape ``x = c + a * exp(x) - h1`` with a convex right-hand
side, so there are zero, one (tangent) or two roots. The c.g.f. is always
the smallest nonnegative root; it is bracketed on ``[0, -log a]`` and found
by bisection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .distributions import DistributionSpec
from .errors import DegenerateEta, ModelError, NoRoot, TiltInfeasible

__all__ = [
    "HawkesParams",
    "QueueModel",
    "SolvedTilt",
    "solve_psi_B",
    "solve_psi_K",
    "psi_R",
    "cramer_root",
    "algorithm1_cost",
    "psi_B_boundary",
    "psi_K_boundary",
]

BISECTION_TOL = 1e-13
CRAMER_EPS = 1e-8


@dataclass(frozen=True)
class HawkesParams:
    """Linear Hawkes process with excitation ``h(t) = h1 * birth.pdf(t)``."""

    lambda0: float
    h1: float
    birth: DistributionSpec

    def __post_init__(self):
        if not (self.lambda0 > 0 and math.isfinite(self.lambda0)):
            raise ModelError(f"lambda0 must be positive, got {self.lambda0}")
        if not (0.0 <= self.h1 < 1.0):
            raise ModelError(f"branching ratio h1 must lie in [0, 1), got {self.h1}")

    @property
    def stationary_rate(self) -> float:
        return self.lambda0 / (1.0 - self.h1)

    @property
    def mean_cluster_size(self) -> float:
        return 1.0 / (1.0 - self.h1)


@dataclass(frozen=True)
class QueueModel:
    """Hawkes/GI/1 queue: Hawkes arrivals, i.i.d. services, one FIFO server."""

    hawkes: HawkesParams
    service: DistributionSpec

    @property
    def load(self) -> float:
        return self.hawkes.lambda0 * self.service.mean / (1.0 - self.hawkes.h1)

    @property
    def is_stable(self) -> bool:
        return self.load < 1.0

    def check_stable(self) -> None:
        if not self.is_stable:
            raise ModelError(
                f"queue is unstable: lambda0 * E[V] / (1 - h1) = {self.load:.6g} >= 1")

    @property
    def mean_cluster_service(self) -> float:
        return self.service.mean / (1.0 - self.hawkes.h1)

    @property
    def walk_drift(self) -> float:
        """Mean increment of the cluster-level walk: E[K] - 1/lambda0."""
        return self.mean_cluster_service - 1.0 / self.hawkes.lambda0


@dataclass(frozen=True)
class SolvedTilt:
    eta: float
    psi_value: float
    tilted_branching: float
    tilted_law: DistributionSpec
    residual: float
    critical: bool = False


def _smallest_root(c: float, a: float, h1: float) -> tuple[float, float, bool]:
    """Smallest nonnegative root of ``x = c + a e^x - h1`` (``a > 0``).

    Returns ``(root, residual, critical)``. ``c + a - h1 >= 0`` is assumed,
    which holds for every nonnegative tilt.
    """
    F = lambda x: c + a * math.exp(x) - h1 - x  # noqa: E731
    f0 = F(0.0)
    if f0 <= 0.0:
        return 0.0, abs(f0), False
    if a >= 1.0:
        raise TiltInfeasible(f"no fixed point: exp-coefficient {a:.6g} >= 1")
    x_tan = -math.log(a)
    f_tan = F(x_tan)
    if f_tan > 0.0:
        raise TiltInfeasible(
            f"no fixed point: minimum of the fixed-point gap is {f_tan:.3g} > 0")
    lo, hi = 0.0, x_tan
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if F(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return root, abs(F(root)), f_tan == 0.0


def solve_psi_B(p: HawkesParams, eta: float) -> SolvedTilt:
    """C.g.f. of the cluster total birth time at ``eta`` and the tilted cluster law."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    psi_f = p.birth.cgf(eta)
    tilted_birth = p.birth.tilt(eta)
    if eta == 0.0 or p.h1 == 0.0:
        return SolvedTilt(eta, 0.0, p.h1, tilted_birth, 0.0)
    a = p.h1 * math.exp(psi_f)
    x, res, critical = _smallest_root(0.0, a, p.h1)
    return SolvedTilt(eta, x, p.h1 + x, tilted_birth, res, critical)


def solve_psi_K(q: QueueModel, eta: float) -> SolvedTilt:
    """C.g.f. of the cluster total service at ``eta`` and the tilted service law."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    h1 = q.hawkes.h1
    psi_v = q.service.cgf(eta)
    tilted_service = q.service.tilt(eta)
    if eta == 0.0:
        return SolvedTilt(eta, 0.0, h1, tilted_service, 0.0)
    if h1 == 0.0:
        return SolvedTilt(eta, psi_v, 0.0, tilted_service, 0.0)
    k, res, critical = _smallest_root(psi_v, h1, h1)
    return SolvedTilt(eta, k, h1 * math.exp(k), tilted_service, res, critical)


def _bisect_increasing(g, lo: float, hi: float, tol: float = 1e-14) -> float:
    """Largest point in ``[lo, hi]`` with ``g <= 0`` for increasing ``g``."""
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if g(mid) <= 0.0:
            lo = mid
        else:
            hi = mid
    return lo


def _feasibility_boundary(cgf_fn, bound: float, target: float) -> float:
    """Sup of ``theta >= 0`` with ``cgf_fn(theta) <= target`` (cgf increasing, below ``bound``)."""
    if target < 0:
        return 0.0
    if math.isinf(bound):
        hi = 1.0
        while cgf_fn(hi) <= target:
            hi *= 2.0
            if hi > 1e12:
                return math.inf
    else:
        hi = bound * (1.0 - 1e-15)
        if cgf_fn(hi) <= target:
            return hi
    return _bisect_increasing(lambda t: cgf_fn(t) - target, 0.0, hi)


def psi_B_boundary(p: HawkesParams) -> float:
    """Largest tilt for which the total-birth-time c.g.f. is finite."""
    if p.h1 == 0.0:
        return p.birth.mgf_domain_bound()
    # tangency: h1 exp(psi_f) = exp(h1 - 1)
    return _feasibility_boundary(p.birth.cgf, p.birth.mgf_domain_bound(),
                                 p.h1 - 1.0 - math.log(p.h1))


def psi_K_boundary(q: QueueModel) -> float:
    """Largest tilt for which the total-service c.g.f. is finite."""
    h1 = q.hawkes.h1
    if h1 == 0.0:
        return q.service.mgf_domain_bound()
    return _feasibility_boundary(q.service.cgf, q.service.mgf_domain_bound(),
                                 h1 - 1.0 - math.log(h1))


def psi_R(q: QueueModel, theta: float) -> float:
    """C.g.f. of one walk increment ``K - Exp(lambda0)``."""
    lam = q.hawkes.lambda0
    return solve_psi_K(q, theta).psi_value + math.log(lam / (lam + theta))


def cramer_root(q: QueueModel) -> float:
    """Positive zero of :func:`psi_R` (requires a stable model)."""
    q.check_stable()
    boundary = psi_K_boundary(q)
    hi_limit = boundary - CRAMER_EPS if math.isfinite(boundary) else math.inf

    def f(t):
        return psi_R(q, t)

    lo = CRAMER_EPS
    if f(lo) >= 0.0:
        raise NoRoot("walk c.g.f. is not negative near zero; drift is not negative", boundary)
    hi = lo
    while True:
        nxt = hi * 2.0
        if nxt >= hi_limit:
            nxt = hi_limit
        try:
            val = f(nxt)
        except TiltInfeasible:
            val = math.inf
        if val > 0.0:
            hi = nxt
            break
        lo = nxt
        if nxt == hi_limit:
            raise NoRoot(f"walk c.g.f. stays negative up to the feasibility boundary {boundary:.6g}",
                         boundary)
        hi = nxt
    return brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)


def algorithm1_cost(p: HawkesParams, eta: float) -> float:
    """Expected number of variates drawn by one run of the N0 sampler at tilt ``eta``."""
    if eta == 0.0:
        return math.inf
    if eta < 0:
        raise DegenerateEta("eta must be positive")
    psi = solve_psi_B(p, eta).psi_value
    slack = 1.0 - p.h1 - psi
    if slack <= 0.0:
        raise TiltInfeasible(f"tilted cluster is critical at eta={eta}")
    return p.lambda0 * math.exp(psi) * (2.0 - p.h1 - psi) / (eta * slack)
