import numpy as np
import pytest

from hawkes_exact import (ClusterRecord, Exponential, HawkesParams, N0Sampler, PerfectSampler,
                          QueueModel, WalkLedger, generate_cluster, naive_transient_w,
                          sample_w_infinity)
from hawkes_exact.errors import IncompleteLedger, ModelError
from hawkes_exact.queue import workload_at
from hawkes_exact.validate import dominance_violations

from conftest import within_se


def fixed(times, services):
    births = [0.0] + [t - times[0] for t in times[1:]]
    return ClusterRecord(list(times), [0] + [1] * (len(times) - 1), births, list(services))


def random_ledger(q, rng, m=50, eta=0.2):
    n0 = N0Sampler(q.hawkes, eta).draw(rng, q.service).clusters
    led = WalkLedger(n0)
    for _ in range(m):
        c = generate_cluster(q.hawkes.h1, q.hawkes.birth, q.service, rng)
        led.add_cluster(c, rng.exponential(1.0 / q.hawkes.lambda0))
    return led


def brute_R(led):
    """Sort every generated event at or after the last departure and accumulate."""
    edge = led.departures[-1]
    ev = [(t, v) for c in led.n0 + led.clusters for t, v in zip(c.times, c.services)
          if edge <= t < 0.0]
    ev.sort(key=lambda e: -e[0])
    out = [0.0]
    tot = 0.0
    for t, v in ev:
        tot += v
        out.append(tot + t)
    return out


def brute_J(led, m):
    d = led.departures[m]
    members = led.n0 + led.clusters[:m]
    return sum(v for c in members if c.departure >= d
               for t, v in zip(c.times, c.services) if t < d)


def test_R_zero_and_single_customer():
    led = WalkLedger()
    assert led.compute_R(0) == 0.0
    led.place(fixed([-2.5], [0.75]))
    assert led.compute_R(1) == pytest.approx(0.75 - 2.5, abs=1e-15)
    with pytest.raises(IncompleteLedger):
        led.compute_R(2)
    with pytest.raises(IncompleteLedger):
        led.compute_J(2)


def test_empty_n0_J_is_zero():
    assert WalkLedger().compute_J(0) == 0.0


def test_R_against_sort_and_sum(base_queue, rng):
    for _ in range(20):
        led = random_ledger(base_queue, rng, m=300)
        ref = brute_R(led)
        assert led.k == len(ref) - 1
        assert led.k >= 100
        for k in range(min(led.k, 1000) + 1):
            assert abs(led.compute_R(k) - ref[k]) < 1e-12 * max(1.0, abs(ref[k]))
            assert led.max_R(k) == pytest.approx(max(ref[:k + 1]), abs=1e-12)


def test_J_fixture_two_clusters():
    # B: events at -2 and +0.5 (pre-zero cluster); A: events at -3 and -1 (departs at -1)
    b = fixed([-2.0, 0.5], [1.0, 1.0])
    a = fixed([-3.0, -1.0], [1.0, 1.0])
    led = WalkLedger([b])
    assert led.compute_J(0) == 1.0
    led.place(a)
    assert led.departures[1] == -1.0
    # customers before -1 from clusters departing at or after -1: B's -2 and A's own -3
    assert led.compute_J(1) == 2.0
    # counting only clusters departing strictly after -1 would give B's event alone
    other = sum(v for c in (b,) for t, v in zip(c.times, c.services) if t < -1.0)
    assert other == 1.0


def test_J_without_own_cluster_breaks_dominance():
    # cluster 1's early heavy customer must be covered by J(1), or R overtakes the bound
    led = WalkLedger()
    led.place(fixed([-3.0, -1.0], [10.0, 1.0]))
    led.place(fixed([-5.0], [1.0]))
    k1 = led.km[1]
    assert k1 == 1 and led.km[2] == 3
    r_k = led.compute_R(2)
    assert r_k == pytest.approx(8.0)
    assert r_k <= led.compute_R(k1) + led.compute_J(1)
    assert not r_k <= led.compute_R(k1) + 0.0
    assert dominance_violations(led) == (5, 0)


def test_J_against_double_loop(base_queue, rng):
    for _ in range(1000):
        led = random_ledger(base_queue, rng, m=8)
        for m in range(led.m + 1):
            assert led.compute_J(m) == pytest.approx(brute_J(led, m), abs=1e-9)
            assert led.compute_J(m) >= -1e-12


def test_ledger_invariants(base_queue, rng):
    for _ in range(200):
        led = random_ledger(base_queue, rng)
        assert np.allclose(led.walk, led.walk_from_clusters(), atol=1e-9)
        assert all(a <= b for a, b in zip(led.km, led.km[1:]))
        assert all(a > b for a, b in zip(led.departures, led.departures[1:]))
        for m in range(1, led.m + 1):
            assert led.cust_times[led.km[m] - 1] == led.departures[m]
        assert all(a >= b for a, b in zip(led.cust_times, led.cust_times[1:]))


def test_place_requires_decreasing_departures():
    led = WalkLedger()
    led.place(fixed([-2.0], [1.0]))
    with pytest.raises(ValueError):
        led.place(fixed([-1.0], [1.0]))


def test_pathwise_dominance(base_queue, rng):
    total = 0
    for _ in range(200):
        checked, bad = dominance_violations(random_ledger(base_queue, rng))
        assert bad == 0
        total += checked
    assert total > 10000


def test_walk_increment_drift(base_queue, rng):
    inc = [generate_cluster(0.5, base_queue.hawkes.birth, base_queue.service, rng).total_service
           - rng.exponential(1.0) for _ in range(100000)]
    ok, mean, se = within_se(inc, -1.0 / 3.0)
    assert ok, (mean, se)


def test_perfect_sampler_returns_on_condition_a(base_queue, rng):
    s = PerfectSampler(base_queue, 0.2)
    for _ in range(500):
        d = s.draw(rng, keep_ledger=True)
        led = d.ledger
        assert d.value >= 0.0
        assert led.walk[d.m2] - led.walk[d.m1] <= -led.J[d.m1]
        assert d.value == led.max_R(led.km[d.m2])
        assert d.horizon == -led.departures[d.m2]
        assert d.path_length >= d.horizon
        assert d.max_accept_exponent <= 1e-12
        assert d.rounds >= 1 and d.rv_count > 0


def test_perfect_sampler_reproducible(base_queue):
    from hawkes_exact.rng import split
    s = PerfectSampler(base_queue, 0.2)
    a = [s.draw(split(3, i)).value for i in range(50)]
    b = [sample_w_infinity(base_queue, 0.2, split(3, i)).value for i in range(50)]
    assert a == b


def test_perfect_sampler_pk_mean(mm1_queue):
    from hawkes_exact.rng import split
    s = PerfectSampler(mm1_queue, 0.2)
    w = [s.draw(split(11, i)).value for i in range(10000)]
    ok, mean, se = within_se(w, 1.0 / 6.0)
    assert ok, (mean, se)


def test_perfect_sampler_rejects_unstable():
    q = QueueModel(HawkesParams(2.0, 0.5, Exponential(2.0)), Exponential(3.0))
    with pytest.raises(ModelError):
        PerfectSampler(q, 0.2)


def test_workload_recursion_hand_example():
    w = workload_at([1.0, 2.0], [1.5, 1.0], [0.0, 1.0, 2.0, 3.0, 5.0])
    assert w.tolist() == [0.0, 1.5, 1.5, 0.5, 0.0]
    assert workload_at([], [], [5.0]).tolist() == [0.0]


def test_naive_zero_horizon(base_queue, rng):
    assert naive_transient_w(base_queue, 0.0, 0.2, rng) == 0.0


def test_naive_no_arrivals_is_zero(rng):
    # tiny background rate: almost every window is empty
    q = QueueModel(HawkesParams(1e-9, 1e-6, Exponential(2.0)), Exponential(3.0))
    assert naive_transient_w(q, 1.0, 0.2, rng) == 0.0


def test_naive_pk_mean(mm1_queue, rng):
    s = N0Sampler(mm1_queue.hawkes, 0.2)
    w = [naive_transient_w(mm1_queue, 100.0, 0.2, rng, s) for _ in range(10000)]
    ok, mean, se = within_se(w, 1.0 / 6.0)
    assert ok, (mean, se)
