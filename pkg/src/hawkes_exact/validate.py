"""Cross-oracle validation suites run by ``hawkes-exact validate``.

Each suite checks one sampler against an independent construction and
reports its sample size, statistic and p-value. ``perturb_eta`` runs the N0
intensity suite with candidate arrival times drawn at a wrong tilt, as a
negative control showing the check has power.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import stats as sps

from .cgf import HawkesParams, QueueModel, solve_psi_B, solve_psi_K
from .cluster import cluster_counts_on_window, generate_cluster, ogata_simulate
from .distributions import Deterministic, Erlang, Exponential, Uniform
from .queue import PerfectSampler, WalkLedger
from .record import RecordBreaker
from .rng import make_stream
from .stationary import N0Sampler
from .stats import ks_two_sample, z_pvalue

__all__ = ["SuiteResult", "run_validation", "SUITES", "n0_intensity_check",
           "dominance_violations"]

ALPHA = 0.01
ROUNDING_SLACK = 1e-12
BASE_MODEL = HawkesParams(1.0, 0.5, Exponential(2.0))
BASE_QUEUE = QueueModel(BASE_MODEL, Exponential(3.0))


@dataclass
class SuiteResult:
    name: str
    passed: bool
    n: int
    p_value: Optional[float] = None
    statistic: Optional[float] = None
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        self.passed = bool(self.passed)
        self.n = int(self.n)
        for name in ("p_value", "statistic"):
            val = getattr(self, name)
            if val is not None:
                setattr(self, name, float(val))

    def to_dict(self) -> dict:
        return asdict(self)


def _tilting_identity(seed: int, scale: float) -> SuiteResult:
    laws = [Exponential(2.0), Erlang(3, 1.5), Deterministic(0.5), Uniform(0.2, 1.7)]
    worst = 0.0
    n = 0
    for d in laws:
        bound = d.mgf_domain_bound()
        top = min(bound, 4.0)
        for eta in np.linspace(0.0, 0.45 * top, 7):
            td = d.tilt(eta)
            for theta in np.linspace(-1.0, 0.45 * top, 9):
                lhs = td.cgf(theta)
                rhs = d.cgf(theta + eta) - d.cgf(eta)
                worst = max(worst, abs(lhs - rhs))
                n += 1
    return SuiteResult("tilting_identity", worst < 1e-12, n, None, worst)


def _fixed_point_residuals(seed: int, scale: float) -> SuiteResult:
    worst = 0.0
    n = 0
    for h1 in (0.1, 0.3, 0.5, 0.7, 0.9):
        p = HawkesParams(1.0, h1, Exponential(2.0))
        q = QueueModel(p, Exponential(3.0))
        for eta in np.linspace(0.0, 0.3, 13):
            for solved, rhs in (
                (lambda e: solve_psi_B(p, e), lambda s: h1 * math.exp(p.birth.cgf(s.eta) + s.psi_value) - h1),
                (lambda e: solve_psi_K(q, e), lambda s: q.service.cgf(s.eta) + h1 * math.expm1(s.psi_value)),
            ):
                try:
                    s = solved(float(eta))
                except Exception:
                    continue
                worst = max(worst, abs(s.psi_value - rhs(s)))
                n += 1
    return SuiteResult("fixed_point_residuals", worst <= 1e-12, n, None, worst)


def _b_ge_l(seed: int, scale: float) -> SuiteResult:
    rng = make_stream(seed, 101)
    n = int(20000 * scale)
    violations = 0
    br, law = solve_psi_B(BASE_MODEL, 0.3).tilted_branching, BASE_MODEL.birth.tilt(0.3)
    for i in range(n):
        c = generate_cluster(0.5, BASE_MODEL.birth, None, rng) if i % 2 else \
            generate_cluster(br, law, None, rng)
        # times accumulate births one addition at a time; allow for that rounding
        if c.total_birth < c.length - ROUNDING_SLACK * max(1.0, c.length):
            violations += 1
    return SuiteResult("b_ge_l", violations == 0, n, None, float(violations))


def _definition_equivalence(seed: int, scale: float) -> SuiteResult:
    rng = make_stream(seed, 102)
    n = int(20000 * scale)
    a = [ogata_simulate(BASE_MODEL, 1.0, rng).size for _ in range(n)]
    b = [cluster_counts_on_window(BASE_MODEL, 1.0, rng) for _ in range(n)]
    d, p = ks_two_sample(a, b)
    return SuiteResult("definition_equivalence", p > ALPHA, n, p, d,
                       {"mean_ogata": float(np.mean(a)), "mean_cluster": float(np.mean(b))})


def n0_intensity_check(p: HawkesParams, eta: float, runs: int, reference: int,
                       rng: np.random.Generator, arrival_eta: Optional[float] = None,
                       edges=(0.0, 0.5, 1.0, 2.0, math.inf)) -> SuiteResult:
    """Accepted N0 arrivals per age bin against ``lambda0 * int p(s) ds`` from nominal clusters.

    ``arrival_eta`` (if given) draws candidate ages at that tilt while the
    rest of the sampler keeps ``eta``; used as a negative control.
    """
    sampler = N0Sampler(p, eta)
    ages = []
    for _ in range(runs):
        n = rng.poisson(sampler.candidate_mean)
        taus = np.log(rng.random(n)) / (arrival_eta or eta)
        for c in sampler.process(taus.tolist(), rng).clusters:
            ages.append(-c.arrival)
    ages = np.asarray(ages)
    lengths = np.array([generate_cluster(p.h1, p.birth, None, rng).length
                        for _ in range(reference)])
    chi2 = 0.0
    bins = []
    for a, b in zip(edges[:-1], edges[1:]):
        occupancy = np.clip(lengths - a, 0.0, b - a)
        expected = runs * p.lambda0 * occupancy.mean()
        var_expected = (runs * p.lambda0) ** 2 * occupancy.var() / reference
        observed = int(np.sum((ages >= a) & (ages < b)))
        z = (observed - expected) / math.sqrt(expected + var_expected)
        chi2 += z * z
        bins.append({"lo": a, "hi": b, "observed": observed, "expected": expected, "z": z})
    pval = float(sps.chi2.sf(chi2, len(bins)))
    return SuiteResult("n0_intensity", pval > ALPHA, runs, pval, chi2, {"bins": bins})


def _n0_intensity(seed: int, scale: float, perturb: float = 0.0) -> SuiteResult:
    rng = make_stream(seed, 103)
    eta = 0.2
    res = n0_intensity_check(BASE_MODEL, eta, int(20000 * scale), int(100000 * scale), rng,
                             arrival_eta=eta * (1.0 + perturb) if perturb else None)
    res.detail["perturb_eta"] = perturb
    return res


def dominance_violations(led: WalkLedger) -> tuple[int, int]:
    """Check ``R(k) <= R(k_m1) + J(m1) + walk(m2) - walk(m1)`` over all admissible triples."""
    checked = bad = 0
    m_tot = led.m
    R, km, walk, J = led.R, led.km, led.walk, led.J
    for m1 in range(0, m_tot):
        base = R[km[m1]] + J[m1] - walk[m1]
        for m2 in range(m1, m_tot):
            bound = base + walk[m2] + 1e-9
            for k in range(km[m2], km[m2 + 1]):
                checked += 1
                if R[k] > bound:
                    bad += 1
    return checked, bad


def _dominance(seed: int, scale: float) -> SuiteResult:
    rng = make_stream(seed, 104)
    q = BASE_QUEUE
    sampler = N0Sampler(q.hawkes, 0.2)
    n = int(200 * scale)
    checked = bad = 0
    for _ in range(n):
        led = WalkLedger(sampler.draw(rng, q.service).clusters)
        for _ in range(50):
            c = generate_cluster(q.hawkes.h1, q.hawkes.birth, q.service, rng)
            led.add_cluster(c, rng.exponential(1.0 / q.hawkes.lambda0))
        c_, b_ = dominance_violations(led)
        checked += c_
        bad += b_
    return SuiteResult("pathwise_dominance", bad == 0, n, None, float(bad), {"triples": checked})


def _pk_degenerate(seed: int, scale: float) -> SuiteResult:
    q = QueueModel(HawkesParams(1.0, 1e-6, Exponential(2.0)), Exponential(3.0))
    sampler = PerfectSampler(q, 0.2)
    n = int(4000 * scale)
    w = np.array([sampler.draw(make_stream(seed, 105, i)).value for i in range(n)])
    se = w.std(ddof=1) / math.sqrt(n)
    z = (w.mean() - 1.0 / 6.0) / se
    return SuiteResult("pk_degenerate", abs(z) <= 3.0, n, z_pvalue(z), z,
                       {"mean": float(w.mean()), "target": 1.0 / 6.0})


def _record_marginal(seed: int, scale: float) -> SuiteResult:
    q = QueueModel(HawkesParams(1.0, 1e-6, Exponential(2.0)), Exponential(3.0))
    rb = RecordBreaker(q)
    rng = make_stream(seed, 106)
    n = int(20000 * scale)
    level = 1.0
    hits = sum(rb.draw(level, rng).b for _ in range(n))
    target = math.exp(-2.0 * level) / 3.0
    z = (hits / n - target) / math.sqrt(target * (1 - target) / n)
    return SuiteResult("record_marginal", abs(z) <= 3.0, n, z_pvalue(z), z,
                       {"frequency": hits / n, "target": target})


SUITES: dict[str, Callable[[int, float], SuiteResult]] = {
    "tilting_identity": _tilting_identity,
    "fixed_point_residuals": _fixed_point_residuals,
    "b_ge_l": _b_ge_l,
    "definition_equivalence": _definition_equivalence,
    "n0_intensity": _n0_intensity,
    "pathwise_dominance": _dominance,
    "pk_degenerate": _pk_degenerate,
    "record_marginal": _record_marginal,
}


def run_validation(seed: int, scale: float = 1.0, perturb_eta: float = 0.0,
                   only: Optional[list[str]] = None) -> list[SuiteResult]:
    out = []
    for name, fn in SUITES.items():
        if only and name not in only:
            continue
        if name == "n0_intensity":
            out.append(_n0_intensity(seed, scale, perturb_eta))
        else:
            out.append(fn(seed, scale))
    return out
