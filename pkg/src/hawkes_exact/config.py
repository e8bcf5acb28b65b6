"""Experiment configuration: JSON ingestion, validation and tilt selection.

Config schema (JSON object)::

    {
      "lambda0": 1.0,
      "h1": 0.5,
      "birth":   {"kind": "exponential", "rate": 2.0},
      "service": {"kind": "exponential", "rate": 3.0},   # queue commands only
      "eta": 0.2,                 # or "auto"
      "replications": 10000,
      "seed": 20240101,
      "output": "out.csv",
      "format": "csv",            # or "jsonl"
      "horizon": 1.0,             # sample-hawkes window length
      "mixing_times": [5, 10, ..., 100],
      "jobs": 1
    }
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from .cgf import HawkesParams, QueueModel, algorithm1_cost, psi_B_boundary
from .distributions import DistributionSpec, from_dict
from .errors import ModelError, TiltInfeasible

__all__ = ["ExperimentConfig", "load_config", "config_from_dict", "choose_eta", "DEFAULT_SEED"]

DEFAULT_SEED = 20190815
DEFAULT_MIXING_TIMES = tuple(float(t) for t in range(5, 105, 5))
_KNOWN = {"lambda0", "h1", "birth", "service", "eta", "replications", "seed", "output",
          "format", "horizon", "mixing_times", "jobs", "histogram_bins"}


@dataclass(frozen=True)
class ExperimentConfig:
    hawkes: HawkesParams
    service: Optional[DistributionSpec] = None
    eta: Union[float, str] = "auto"
    replications: int = 1000
    seed: int = DEFAULT_SEED
    output: Optional[str] = None
    format: str = "csv"
    horizon: float = 1.0
    mixing_times: tuple[float, ...] = DEFAULT_MIXING_TIMES
    jobs: int = 1
    histogram_bins: tuple[float, ...] = tuple(float(x) for x in range(0, 105, 5))

    def __post_init__(self):
        if self.replications < 1:
            raise ModelError(f"replications must be >= 1, got {self.replications}")
        if self.format not in ("csv", "jsonl"):
            raise ModelError(f"format must be 'csv' or 'jsonl', got {self.format!r}")
        if self.jobs < 1:
            raise ModelError(f"jobs must be >= 1, got {self.jobs}")
        if self.horizon <= 0:
            raise ModelError(f"horizon must be positive, got {self.horizon}")
        if not (0 <= self.seed < 2**64):
            raise ModelError("seed must be a 64-bit unsigned integer")
        if isinstance(self.eta, str) and self.eta != "auto":
            raise ModelError(f"eta must be a number or 'auto', got {self.eta!r}")
        if not isinstance(self.eta, str):
            bound = psi_B_boundary(self.hawkes)
            if not 0 < self.eta < bound:
                raise ModelError(
                    f"eta={self.eta} outside the feasible tilt range (0, {bound:.6g}) "
                    f"for this Hawkes model; use a smaller eta or 'auto'")

    @property
    def queue(self) -> QueueModel:
        if self.service is None:
            raise ModelError("this command needs a 'service' distribution in the config")
        q = QueueModel(self.hawkes, self.service)
        if not q.is_stable:
            raise ModelError(
                f"queue is unstable: lambda0 * E[V] / (1 - h1) = {q.load:.6g} >= 1; "
                "lower lambda0 or h1, or use faster service")
        return q

    @property
    def resolved_eta(self) -> float:
        return choose_eta(self.hawkes) if self.eta == "auto" else float(self.eta)

    def with_overrides(self, **kw) -> "ExperimentConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        return replace(self, **kw)

    def model_dict(self) -> dict[str, Any]:
        out = {"lambda0": self.hawkes.lambda0, "h1": self.hawkes.h1,
               "birth": self.hawkes.birth.to_dict()}
        if self.service is not None:
            out["service"] = self.service.to_dict()
        return out


def choose_eta(p: HawkesParams, n_grid: int = 50) -> float:
    """Cost-minimizing tilt on a log grid inside the feasible range (ties go to smaller eta)."""
    bound = psi_B_boundary(p)
    if not math.isfinite(bound):
        bound = 50.0
    grid = np.geomspace(bound * 1e-3, bound * (1.0 - 1e-3), n_grid)
    best, best_cost = None, math.inf
    for eta in grid:
        try:
            cost = algorithm1_cost(p, float(eta))
        except TiltInfeasible:
            continue
        if cost < best_cost:
            best, best_cost = float(eta), cost
    if best is None:
        raise TiltInfeasible("no feasible tilt on the search grid")
    return best


def config_from_dict(raw: dict[str, Any]) -> ExperimentConfig:
    unknown = set(raw) - _KNOWN
    if unknown:
        raise ModelError(f"unknown config keys: {sorted(unknown)}")
    for key in ("lambda0", "h1", "birth"):
        if key not in raw:
            raise ModelError(f"config is missing required key {key!r}")
    hawkes = HawkesParams(float(raw["lambda0"]), float(raw["h1"]), from_dict(raw["birth"]))
    kw: dict[str, Any] = {"hawkes": hawkes}
    if raw.get("service") is not None:
        kw["service"] = from_dict(raw["service"])
    if "eta" in raw:
        kw["eta"] = raw["eta"] if isinstance(raw["eta"], str) else float(raw["eta"])
    for key, conv in (("replications", int), ("seed", int), ("output", str), ("format", str),
                      ("horizon", float), ("jobs", int)):
        if key in raw:
            kw[key] = conv(raw[key])
    if "mixing_times" in raw:
        kw["mixing_times"] = tuple(float(t) for t in raw["mixing_times"])
    if "histogram_bins" in raw:
        kw["histogram_bins"] = tuple(float(t) for t in raw["histogram_bins"])
    return ExperimentConfig(**kw)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(raw)
