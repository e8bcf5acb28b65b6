"""Exact sampling of stationary Hawkes processes and Hawkes/GI/1 waiting times."""
from .cgf import (HawkesParams, QueueModel, SolvedTilt, algorithm1_cost, cramer_root, psi_R,
                  solve_psi_B, solve_psi_K)
from .cluster import ClusterRecord, EventRecord, generate_cluster, ogata_simulate, tilted_cluster_law
from .distributions import Deterministic, Erlang, Exponential, Uniform
from .errors import (DomainError, EnvelopeUnavailable, HardCapExceeded, HawkesExactError,
                     IncompleteLedger, ModelError, NoRoot, SupercriticalTilt, TiltInfeasible)
from .queue import PerfectSampler, WalkLedger, WSample, naive_transient_w, sample_w_infinity
from .record import RecordBreaker, draw_record, tilted_queue_law
from .rng import make_stream, split
from .stationary import (N0Sampler, StationaryWindow, extend_backward, sample_N0,
                         sample_stationary_forward)

__version__ = "0.1.0"

__all__ = [
    "HawkesParams",
    "QueueModel",
    "SolvedTilt",
    "algorithm1_cost",
    "cramer_root",
    "psi_R",
    "solve_psi_B",
    "solve_psi_K",
    "ClusterRecord",
    "EventRecord",
    "generate_cluster",
    "ogata_simulate",
    "tilted_cluster_law",
    "Deterministic",
    "Erlang",
    "Exponential",
    "Uniform",
    "DomainError",
    "EnvelopeUnavailable",
    "HardCapExceeded",
    "HawkesExactError",
    "IncompleteLedger",
    "ModelError",
    "NoRoot",
    "SupercriticalTilt",
    "TiltInfeasible",
    "PerfectSampler",
    "WalkLedger",
    "WSample",
    "naive_transient_w",
    "sample_w_infinity",
    "RecordBreaker",
    "draw_record",
    "tilted_queue_law",
    "make_stream",
    "split",
    "N0Sampler",
    "StationaryWindow",
    "extend_backward",
    "sample_N0",
    "sample_stationary_forward",
]
