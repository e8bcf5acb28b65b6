"""Steady-state waiting time of a Hawkes/GI/1 queue.

The stationary workload equals ``max_{k>=0} R(k)`` where, going backward in
time from 0, ``R(k)`` is the service brought by the ``k`` most recent
customers minus the time back to the ``k``-th of them. ``R`` has dependent
increments, so it is dominated by the cluster-level walk

    walk(m) = (total service of backward clusters 1..m) + departure(m)

plus an overhang ``J(m)``: the service of customers that arrived before
``departure(m)`` but belong to clusters departing at or after it. Once the
walk has dropped by ``J`` and the record indicator says it never climbs back
above the current slack, the maximum of ``R`` seen so far is final.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .cgf import QueueModel
from .cluster import ClusterRecord, generate_cluster
from .errors import HardCapExceeded, IncompleteLedger
from .record import RecordBreaker
from .stationary import N0Sampler, sample_stationary_forward

__all__ = [
    "WalkLedger",
    "WSample",
    "PerfectSampler",
    "sample_w_infinity",
    "naive_transient_w",
    "naive_workload_path",
    "workload_at",
    "ROUND_CAP",
]

ROUND_CAP = 10**6


class WalkLedger:
    """Backward-time bookkeeping of clusters, customers and the two walks.

    Index conventions: cluster ``m`` (1-based) is the ``m``-th cluster to
    depart before 0; ``departures[0] = 0``, ``walk[0] = 0``, ``km[0] = 0``.
    Customer ``k`` (1-based) is the ``k``-th most recent arrival before 0, and
    ``R[0] = 0``. Lists indexed by ``m`` have ``len(clusters) + 1`` entries.
    """

    def __init__(self, n0: Sequence[ClusterRecord] = ()):
        self.n0 = list(n0)
        self.clusters: list[ClusterRecord] = []
        self.departures = [0.0]
        self.walk = [0.0]
        self.km = [0]
        self.cust_times: list[float] = []
        self.cust_services: list[float] = []
        self.R = [0.0]
        self.Rmax = [0.0]
        self._heap: list[tuple[float, float]] = []
        self._served = 0.0
        j0 = 0.0
        for c in self.n0:
            for t, v in zip(c.times, c.services):
                if t < 0.0:
                    heapq.heappush(self._heap, (-t, v))
                    j0 += v
        self._mass = j0
        self.J = [j0]

    @property
    def m(self) -> int:
        return len(self.clusters)

    @property
    def k(self) -> int:
        return len(self.cust_times)

    def add_cluster(self, cluster: ClusterRecord, gap: float) -> ClusterRecord:
        """Append a cluster departing ``gap`` before the previous departure.

        ``cluster`` may sit anywhere in time; it is shifted so its last event
        falls on the new departure time. Returns the placed cluster.
        """
        target = self.departures[-1] - gap
        placed = cluster.shifted(target - cluster.departure)
        self._append(placed)
        return placed

    def place(self, cluster: ClusterRecord) -> None:
        """Append a cluster given in absolute time (must depart before the last one)."""
        if not cluster.departure < self.departures[-1]:
            raise ValueError("clusters must be appended in decreasing departure order")
        self._append(cluster)

    def _append(self, c: ClusterRecord) -> None:
        dep = c.departure
        heap = self._heap
        for t, v in zip(c.times, c.services):
            heapq.heappush(heap, (-t, v))
        served = self._served
        times, svcs, R, Rmax = self.cust_times, self.cust_services, self.R, self.Rmax
        top = Rmax[-1]
        while heap and -heap[0][0] >= dep:
            nt, v = heapq.heappop(heap)
            t = -nt
            served += v
            times.append(t)
            svcs.append(v)
            r = served + t
            R.append(r)
            if r > top:
                top = r
            Rmax.append(top)
        self._served = served
        self._mass += c.total_service
        self.clusters.append(c)
        self.departures.append(dep)
        self.walk.append(self.walk[-1] + c.total_service + dep - self.departures[-2])
        self.km.append(len(times))
        self.J.append(self._mass - served)

    def compute_R(self, k: int) -> float:
        if k < 0 or k > self.k:
            raise IncompleteLedger(f"R({k}) requested, ledger complete up to k={self.k}")
        return self.R[k]

    def compute_J(self, m: int) -> float:
        if m < 0 or m > self.m:
            raise IncompleteLedger(f"J({m}) requested, ledger complete up to m={self.m}")
        return self.J[m]

    def max_R(self, k: int) -> float:
        """``max_{0 <= j <= k} R(j)``."""
        if k < 0 or k > self.k:
            raise IncompleteLedger(f"max R up to {k} requested, ledger complete up to k={self.k}")
        return self.Rmax[k]

    def walk_from_clusters(self) -> list[float]:
        """Recompute the cluster walk from stored clusters (consistency check)."""
        out = [0.0]
        total = 0.0
        for c in self.clusters:
            total += c.total_service
            out.append(total + c.departure)
        return out


@dataclass
class WSample:
    """One stationary workload draw with its cost diagnostics.

    ``path_length`` is minus the departure time of the last cluster the
    sampler generated, counting the final (rejected) record proposal laid
    out after the ledger; ``horizon`` is the part of it kept in the ledger.
    """

    value: float
    path_length: float
    rounds: int
    rv_count: int
    horizon: float = 0.0
    ledger: Optional[WalkLedger] = None
    m1: int = 0
    m2: int = 0
    max_accept_exponent: float = -math.inf


class PerfectSampler:
    """Exact draws of the stationary workload for one queue model.

    ``eta`` is the birth-time tilt used for the pre-zero clusters; the walk
    tilt is fixed at the Cramer root and solved once here.
    """

    def __init__(self, q: QueueModel, eta: float):
        q.check_stable()
        self.model = q
        self.n0_sampler = N0Sampler(q.hawkes, eta)
        self.record = RecordBreaker(q)

    def draw(self, rng: np.random.Generator, keep_ledger: bool = False) -> WSample:
        q = self.model
        p, service = q.hawkes, q.service
        h1, birth = p.h1, p.birth
        gap_scale = 1.0 / p.lambda0
        n0 = self.n0_sampler.draw(rng, service)
        rv = n0.rv_count + sum(c.size for c in n0.clusters)
        worst = n0.max_accept_exponent
        led = WalkLedger(n0.clusters)
        walk, km = led.walk, led.km
        m1 = 0
        slack = led.J[0]
        rounds = 0
        while True:
            rounds += 1
            if rounds > ROUND_CAP:
                raise HardCapExceeded(f"perfect sampler exceeded {ROUND_CAP} rounds")
            base = walk[m1]
            m2 = m1
            while walk[m2] - base > -slack:
                c = generate_cluster(h1, birth, service, rng)
                led.add_cluster(c, rng.exponential(gap_scale))
                rv += 2 * c.size + 1
                m2 += 1
            best = led.Rmax[km[m2]]
            level = best - led.R[km[m1]]
            assert level >= 0.0
            rec = self.record.draw(level, rng)
            rv += rec.rv_count
            worst = max(worst, rec.accept_exponent)
            if not rec.b:
                assert walk[m2] - walk[m1] <= -slack
                horizon = 0.0 - led.departures[m2]
                return WSample(best, horizon + rec.span, rounds, rv, horizon,
                               led if keep_ledger else None, m1, m2, worst)
            for c, g in zip(rec.segment.clusters, rec.segment.gaps):
                led.add_cluster(c, g)
            m1 = led.m
            slack = led.J[m1]


def sample_w_infinity(q: QueueModel, eta_alg1: float, rng: np.random.Generator) -> WSample:
    """One exact draw of the stationary virtual waiting time."""
    return PerfectSampler(q, eta_alg1).draw(rng)


def workload_at(arrivals: Sequence[float], services: Sequence[float],
                grid: Iterable[float]) -> np.ndarray:
    """Workload at each time in ``grid`` (sorted), starting empty at 0."""
    grid = list(grid)
    out = np.zeros(len(grid))
    w = 0.0
    t_prev = 0.0
    i = 0
    n = len(arrivals)
    for j, g in enumerate(grid):
        while i < n and arrivals[i] <= g:
            w = max(w - (arrivals[i] - t_prev), 0.0) + services[i]
            t_prev = arrivals[i]
            i += 1
        out[j] = max(w - (g - t_prev), 0.0)
    return out


def naive_workload_path(q: QueueModel, grid: Sequence[float], eta_alg1: float,
                        rng: np.random.Generator, n0_sampler: Optional[N0Sampler] = None
                        ) -> np.ndarray:
    """Workload from an empty start, fed by a stationary arrival stream, at each grid time."""
    grid = sorted(grid)
    horizon = grid[-1]
    if horizon <= 0:
        return np.zeros(len(grid))
    window = sample_stationary_forward(q.hawkes, eta_alg1, horizon, q.service, rng,
                                       n0_sampler=n0_sampler)
    t, v = window.events_with_service()
    return workload_at(t.tolist(), v.tolist(), grid)


def naive_transient_w(q: QueueModel, T: float, eta_alg1: float, rng: np.random.Generator,
                      n0_sampler: Optional[N0Sampler] = None) -> float:
    """W(T) for the queue started empty at time 0."""
    if T < 0:
        raise ValueError("T must be nonnegative")
    if T == 0:
        return 0.0
    return float(naive_workload_path(q, [T], eta_alg1, rng, n0_sampler)[0])
