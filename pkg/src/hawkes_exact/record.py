"""Exact joint draw of a record indicator and its conditional path.

For the cluster-level walk ``S(m) = sum_{n<=m} (K_n - G_n)`` (``K`` the total
service of a nominal cluster, ``G ~ Exp(lambda0)`` the gap between departures)
we need ``B = 1{max_{m>=0} S(m) > M}`` and, when ``B = 1``, the path up to the
first passage over ``M``.

At the positive root ``eta*`` of the increment c.g.f., the tilted walk has
positive drift and the likelihood ratio at the first passage index ``T`` is
``exp(-eta* S(T))``. Running the tilted walk to ``T`` and accepting with that
probability gives ``P(B = 1)`` exactly, and an accepted path follows the
nominal law conditioned on the record. Under the tilt, clusters have
branching ``h1 exp(psi_K(eta*))``, untilted birth offsets and tilted
services, and departures are spaced ``Exp(lambda0 + eta*)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cgf import QueueModel, cramer_root, psi_R, solve_psi_K
from .cluster import ClusterRecord, generate_cluster
from .distributions import DistributionSpec
from .errors import HardCapExceeded, SupercriticalTilt

__all__ = ["ConditionalSegment", "RecordDraw", "TiltedQueueLaw", "tilted_queue_law",
           "RecordBreaker", "draw_record", "STEP_CAP"]

STEP_CAP = 10**7


@dataclass(frozen=True)
class TiltedQueueLaw:
    lam: float
    branching: float
    birth: DistributionSpec
    service: DistributionSpec

    def __iter__(self):
        return iter((self.lam, self.branching, self.birth, self.service))


def tilted_queue_law(q: QueueModel, eta: float) -> TiltedQueueLaw:
    """Cluster-walk law after tilting by ``exp(eta * S(n))``."""
    solved = solve_psi_K(q, eta)
    branching = q.hawkes.h1 * math.exp(solved.psi_value)
    if branching >= 1.0 or solved.critical:
        raise SupercriticalTilt(f"tilted branching ratio {branching:.6g} >= 1 at eta={eta}")
    return TiltedQueueLaw(q.hawkes.lambda0 + eta, branching, q.hawkes.birth, solved.tilted_law)


@dataclass
class ConditionalSegment:
    """Clusters (relative to their own departure) and gaps up to the first passage."""

    clusters: list[ClusterRecord]
    gaps: list[float]
    increments: list[float]
    level: float

    @property
    def delta(self) -> int:
        return len(self.clusters)

    @property
    def terminal(self) -> float:
        return math.fsum(self.increments)

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.increments)


@dataclass
class RecordDraw:
    """Outcome of one record draw.

    ``span`` is the time covered by the proposal path (sum of its gaps),
    kept even when the proposal is rejected.
    """

    b: int
    segment: Optional[ConditionalSegment]
    rv_count: int
    span: float
    terminal: float
    accept_exponent: float


class RecordBreaker:
    """Record-indicator sampler for one queue model, tilted at the Cramer root."""

    def __init__(self, q: QueueModel, eta: Optional[float] = None):
        q.check_stable()
        self.model = q
        self.eta = cramer_root(q) if eta is None else eta
        self.law = tilted_queue_law(q, self.eta)
        self.root_residual = abs(psi_R(q, self.eta))

    def draw(self, level: float, rng: np.random.Generator, cap: int = STEP_CAP) -> RecordDraw:
        """Sample ``B`` for record level ``level``, with the conditional path when ``B = 1``."""
        if level < 0:
            raise ValueError(f"record level must be nonnegative, got {level}")
        lam, branching, birth, service = self.law
        scale = 1.0 / lam
        s = 0.0
        clusters, gaps, incs = [], [], []
        rv = 0
        while s <= level:
            if len(incs) >= cap:
                raise HardCapExceeded(f"tilted walk needed more than {cap} steps")
            c = generate_cluster(branching, birth, service, rng)
            g = rng.exponential(scale)
            inc = c.total_service - g
            s += inc
            rv += 2 * c.size + 1
            clusters.append(c)
            gaps.append(g)
            incs.append(inc)
        expo = -self.eta * s
        assert expo <= -self.eta * level <= 0.0, "acceptance probability above one"
        rv += 1
        span = math.fsum(gaps)
        if rng.random() <= math.exp(expo):
            return RecordDraw(1, ConditionalSegment(clusters, gaps, incs, level), rv, span, s, expo)
        return RecordDraw(0, None, rv, span, s, expo)


def draw_record(q: QueueModel, level: float, rng: np.random.Generator
                ) -> tuple[int, Optional[ConditionalSegment]]:
    out = RecordBreaker(q).draw(level, rng)
    return out.b, out.segment
