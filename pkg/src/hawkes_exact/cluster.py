"""Branching clusters of a Hawkes process.

A cluster is an immigrant plus all of its descendants. Every event spawns a
Poisson(branching) number of children, each displaced from its parent by an
independent birth offset. Clusters are built breadth first from an explicit
work list, so deep (near-critical) trees never touch the recursion limit.

Event indices are 1-based and the immigrant is event 1 with parent 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .cgf import HawkesParams, solve_psi_B
from .distributions import DistributionSpec, Exponential
from .errors import EnvelopeUnavailable, HardCapExceeded

__all__ = [
    "EventRecord",
    "ClusterRecord",
    "generate_cluster",
    "tilted_cluster_law",
    "ogata_simulate",
    "cluster_counts_on_window",
    "EVENT_CAP",
]

EVENT_CAP = 10**8


@dataclass(frozen=True)
class EventRecord:
    index: int
    time: float
    parent: int
    birth: float
    service: Optional[float] = None


class ClusterRecord:
    """One cluster with absolute event times and its summary statistics.

    ``times``, ``parents``, ``births`` and (optionally) ``services`` are
    parallel lists in generation order; entry ``i`` is event ``i + 1``.
    """

    __slots__ = ("times", "parents", "births", "services", "arrival", "departure",
                 "total_birth", "total_service")

    def __init__(self, times, parents, births, services=None):
        self.times = times
        self.parents = parents
        self.births = births
        self.services = services
        self.arrival = times[0]
        self.departure = max(times)
        self.total_birth = math.fsum(births)
        self.total_service = math.fsum(services) if services is not None else math.nan

    @property
    def length(self) -> float:
        return self.departure - self.arrival

    @property
    def size(self) -> int:
        return len(self.times)

    def __len__(self) -> int:
        return len(self.times)

    def __repr__(self) -> str:
        return (f"ClusterRecord(size={self.size}, arrival={self.arrival:.6g}, "
                f"departure={self.departure:.6g}, B={self.total_birth:.6g})")

    @property
    def events(self) -> list[EventRecord]:
        svc = self.services
        return [EventRecord(i + 1, t, p, b, None if svc is None else svc[i])
                for i, (t, p, b) in enumerate(zip(self.times, self.parents, self.births))]

    def shifted(self, dt: float) -> "ClusterRecord":
        """Copy with every event moved by ``dt``."""
        out = ClusterRecord.__new__(ClusterRecord)
        out.times = [t + dt for t in self.times]
        out.parents = self.parents
        out.births = self.births
        out.services = self.services
        out.arrival = self.arrival + dt
        out.departure = self.departure + dt
        out.total_birth = self.total_birth
        out.total_service = self.total_service
        return out

    def count_within(self, t: float) -> int:
        """Number of events in ``[arrival, arrival + t]``."""
        if t < 0:
            return 0
        edge = self.arrival + t
        return sum(1 for x in self.times if x <= edge)

    def with_services(self, services: Sequence[float]) -> "ClusterRecord":
        if len(services) != self.size:
            raise ValueError("one service mark per event is required")
        out = self.shifted(0.0)
        out.services = list(services)
        out.total_service = math.fsum(out.services)
        return out


def generate_cluster(branching: float, birth: DistributionSpec,
                     service: Optional[DistributionSpec], rng: np.random.Generator,
                     cap: int = EVENT_CAP) -> ClusterRecord:
    """Draw one cluster with its immigrant at time 0."""
    if not 0.0 <= branching < 1.0:
        raise ValueError(f"branching ratio must lie in [0, 1), got {branching}")
    times = [0.0]
    parents = [0]
    births = [0.0]
    poisson = rng.poisson
    k = 0
    while k < len(times):
        n = poisson(branching) if branching > 0.0 else 0
        if n:
            if len(times) + n > cap:
                raise HardCapExceeded(f"cluster exceeded {cap} events")
            t0 = times[k]
            offs = birth.sample(rng, n)
            for b in offs.tolist():
                times.append(t0 + b)
                parents.append(k + 1)
                births.append(b)
        k += 1
    services = None
    if service is not None:
        services = service.sample(rng, len(times)).tolist()
    return ClusterRecord(times, parents, births, services)


def tilted_cluster_law(p: HawkesParams, eta: float) -> tuple[float, DistributionSpec]:
    """Cluster parameters under exponential tilting of the total birth time."""
    solved = solve_psi_B(p, eta)
    return solved.tilted_branching, solved.tilted_law


def ogata_simulate(p: HawkesParams, horizon: float, rng: np.random.Generator) -> np.ndarray:
    """Event times on ``[0, horizon]`` by Ogata thinning, starting from an empty history.

    The kernel must be monotone decreasing so the intensity right after the
    last event or rejection bounds the intensity until the next one.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    birth = p.birth
    if not getattr(birth, "monotone_density", False):
        raise EnvelopeUnavailable(
            f"{type(birth).__name__} birth law has no monotone thinning envelope")
    lam0, h1 = p.lambda0, p.h1
    if isinstance(birth, Exponential) or getattr(birth, "shape", None) == 1:
        # exponential kernel: the excitation decays by exp(-rate dt) between events
        rate = birth.rate
        events: list[float] = []
        t = 0.0
        excite = 0.0
        while True:
            bound = lam0 + excite
            w = rng.exponential(1.0 / bound)
            t += w
            if t > horizon:
                break
            excite *= math.exp(-rate * w)
            if rng.random() * bound <= lam0 + excite:
                events.append(t)
                excite += h1 * rate
        return np.asarray(events)
    raise EnvelopeUnavailable(f"no thinning envelope for {birth!r}")  # pragma: no cover


def cluster_counts_on_window(p: HawkesParams, horizon: float, rng: np.random.Generator) -> int:
    """N(horizon) for the process started empty at 0, built from clusters."""
    n_imm = rng.poisson(p.lambda0 * horizon)
    total = 0
    for tau in (rng.random(n_imm) * horizon).tolist():
        c = generate_cluster(p.h1, p.birth, None, rng)
        edge = horizon - tau
        total += sum(1 for x in c.times if x <= edge)
    return total
