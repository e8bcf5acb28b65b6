"""Exact stationary sample paths of a linear Hawkes process.

The stationary process on ``[0, T]`` is the superposition of

* ``N0``: clusters whose immigrant arrived before 0 and whose last event
  falls after 0, and
* ``N1``: clusters whose immigrant arrives in ``[0, T]``.

``N1`` is a plain compound Poisson construction. ``N0`` is sampled without
ever evaluating the survival function of the cluster length: candidate
arrival times come from the dominating intensity
``lambda0 * exp(psi_B(eta) + eta t)`` on ``(-inf, 0]``, each candidate carries a
cluster drawn under the birth-time tilt, and a single accept/reject step
(``L > -tau`` and ``U <= exp(-eta (B + tau))``) turns the pair into the exact
thinned process.

Backward generation uses the fact that cluster departure times form a rate
``lambda0`` Poisson process: departures are laid down right to left and each
cluster is placed so its last event sits on its departure time.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cgf import HawkesParams, SolvedTilt, psi_B_boundary, solve_psi_B
from .cluster import ClusterRecord, generate_cluster
from .distributions import DistributionSpec
from .errors import TiltInfeasible

__all__ = [
    "N0Draw",
    "N0Sampler",
    "sample_N0",
    "StationaryWindow",
    "sample_stationary_forward",
    "backward_window",
    "extend_backward",
]


@dataclass
class N0Draw:
    clusters: list[ClusterRecord]
    rv_count: int
    candidates: int
    max_accept_exponent: float = -math.inf


class N0Sampler:
    """Draws the pre-zero clusters that survive past time 0.

    Solving the birth-time fixed point is done once at construction, so the
    sampler can be reused across replications.
    """

    def __init__(self, p: HawkesParams, eta: float):
        if not eta > 0:
            raise TiltInfeasible("the N0 sampler needs a strictly positive tilt")
        if eta >= psi_B_boundary(p) and p.h1 > 0:
            raise TiltInfeasible(
                f"eta={eta} is beyond the feasible tilt range (< {psi_B_boundary(p):.6g})")
        self.params = p
        self.eta = eta
        self.solved: SolvedTilt = solve_psi_B(p, eta)
        if self.solved.tilted_branching >= 1.0:
            raise TiltInfeasible(f"tilted cluster is critical at eta={eta}")
        self.branching = self.solved.tilted_branching
        self.birth = self.solved.tilted_law
        self.candidate_mean = p.lambda0 * math.exp(self.solved.psi_value) / eta

    def candidate_times(self, rng: np.random.Generator) -> np.ndarray:
        """Arrival times of the dominating process on ``(-inf, 0]``, unordered."""
        n = rng.poisson(self.candidate_mean)
        return np.log(rng.random(n)) / self.eta

    def process(self, taus, rng: np.random.Generator,
                service: Optional[DistributionSpec] = None) -> N0Draw:
        """Run the tilted-cluster accept/reject step over candidate times ``taus``."""
        eta = self.eta
        accepted = []
        rv = 0
        worst = -math.inf
        for tau in taus:
            c = generate_cluster(self.branching, self.birth, None, rng)
            u = rng.random()
            rv += c.size + 1
            if c.departure > -tau:
                expo = -eta * (c.total_birth + tau)
                worst = max(worst, expo)
                if u <= math.exp(expo):
                    c = c.shifted(tau)
                    if service is not None:
                        c = c.with_services(service.sample(rng, c.size).tolist())
                    accepted.append(c)
        return N0Draw(accepted, rv, len(taus), worst)

    def draw(self, rng: np.random.Generator,
             service: Optional[DistributionSpec] = None) -> N0Draw:
        return self.process(self.candidate_times(rng).tolist(), rng, service)


def sample_N0(p: HawkesParams, eta: float, service: Optional[DistributionSpec],
              rng: np.random.Generator) -> list[ClusterRecord]:
    """Clusters arriving before 0 and lasting past 0, exactly distributed."""
    return N0Sampler(p, eta).draw(rng, service).clusters


@dataclass
class StationaryWindow:
    """A stationary stretch of the process, forward on ``[0, horizon]`` or backward on ``[-horizon, 0]``."""

    params: HawkesParams
    n0_clusters: list[ClusterRecord]
    fresh_clusters: list[ClusterRecord] = field(default_factory=list)
    direction: str = "forward"
    horizon: float = 0.0
    rv_count: int = 0
    _next_departure: Optional[float] = None

    def clusters(self) -> list[ClusterRecord]:
        return self.n0_clusters + self.fresh_clusters

    def event_times(self) -> np.ndarray:
        """Sorted event times inside the window."""
        if self.direction == "forward":
            lo, hi = 0.0, self.horizon
        else:
            lo, hi = -self.horizon, 0.0
        out = [t for c in self.clusters() for t in c.times if lo <= t <= hi]
        out.sort()
        return np.asarray(out)

    def events_with_service(self) -> tuple[np.ndarray, np.ndarray]:
        if self.direction == "forward":
            lo, hi = 0.0, self.horizon
        else:
            lo, hi = -self.horizon, 0.0
        pairs = [(t, v) for c in self.clusters() for t, v in zip(c.times, c.services)
                 if lo <= t <= hi]
        pairs.sort()
        if not pairs:
            return np.empty(0), np.empty(0)
        t, v = zip(*pairs)
        return np.asarray(t), np.asarray(v)

    def count(self, a: float, b: float) -> int:
        """Number of events in ``[a, b]``."""
        times = self.event_times()
        return bisect.bisect_right(times.tolist(), b) - bisect.bisect_left(times.tolist(), a)

    def departures(self) -> list[float]:
        return [c.departure for c in self.fresh_clusters]


def sample_stationary_forward(p: HawkesParams, eta: float, horizon: float,
                              service: Optional[DistributionSpec], rng: np.random.Generator,
                              n0_sampler: Optional[N0Sampler] = None) -> StationaryWindow:
    """Stationary path on ``[0, horizon]``: N0 plus fresh clusters."""
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    sampler = n0_sampler or N0Sampler(p, eta)
    n0 = sampler.draw(rng, service)
    n_imm = rng.poisson(p.lambda0 * horizon)
    fresh = []
    for tau in (rng.random(n_imm) * horizon).tolist():
        fresh.append(generate_cluster(p.h1, p.birth, service, rng).shifted(tau))
    return StationaryWindow(p, n0.clusters, fresh, "forward", horizon, n0.rv_count)


def backward_window(p: HawkesParams, eta: float, service: Optional[DistributionSpec],
                    rng: np.random.Generator,
                    n0_sampler: Optional[N0Sampler] = None) -> StationaryWindow:
    """Empty backward window seeded with an exact N0 draw."""
    sampler = n0_sampler or N0Sampler(p, eta)
    n0 = sampler.draw(rng, service)
    return StationaryWindow(p, n0.clusters, [], "backward", 0.0, n0.rv_count)


def extend_backward(w: StationaryWindow, until: float, service: Optional[DistributionSpec],
                    rng: np.random.Generator) -> StationaryWindow:
    """Add clusters departing in ``[until, -horizon)`` and move the window edge to ``until``.

    The first departure past ``until`` is kept on the window, so repeated
    calls generate the same path as one call with the smallest ``until``.
    """
    if w.direction != "backward":
        raise ValueError("extend_backward needs a backward window")
    if until >= 0:
        raise ValueError("until must be negative")
    if -until <= w.horizon:
        return w
    p = w.params
    nxt = w._next_departure
    if nxt is None:
        last = w.fresh_clusters[-1].departure if w.fresh_clusters else 0.0
        nxt = last - rng.exponential(1.0 / p.lambda0)
    while nxt >= until:
        c = generate_cluster(p.h1, p.birth, service, rng)
        w.fresh_clusters.append(c.shifted(nxt - c.departure))
        w.rv_count += c.size + 1
        nxt -= rng.exponential(1.0 / p.lambda0)
    w._next_departure = nxt
    w.horizon = -until
    return w
