import math

import numpy as np
import pytest

from corefair import (
    InfeasibleError,
    Instance,
    Packing,
    RoundingConfig,
    ValidationError,
    chernoff_mixture_bound,
    generate,
    grouping,
    normalize_utilities,
    round_outcome,
    solve_packing,
    violation_sets,
)
from corefair.rounding import (
    level_schedule,
    log_star,
    mixed_sampling_probs,
    packing_alpha_target,
    simulate_mixture_lower_tail,
    trial_rng,
)


def capacity_instance(seed, m=160, rows=3, scale=50.0):
    """Random packing with every capacity equal to scale * ln(rows)."""
    gen = np.random.default_rng(seed)
    A = gen.uniform(0.2, 1.0, size=(rows, m))
    b = np.full(rows, scale * math.log(rows))
    u = gen.random((6, m))
    return normalize_utilities(Instance(u, Packing(A, b)))


class TestConfig:
    def test_gamma_is_delta_over_eight(self):
        config = RoundingConfig(delta=0.5, seed=1)
        assert config.gamma == pytest.approx(0.0625)

    def test_delta_range_enforced(self):
        with pytest.raises(ValidationError):
            RoundingConfig(delta=1.0, seed=1)


class TestLogStar:
    def test_values(self):
        assert log_star(1.0) == 0
        assert log_star(math.e) == 1
        assert log_star(math.exp(16)) == 4


class TestLevels:
    def test_recurrence_matches_hand_computation(self):
        # scalar oracle: iterate q -> 2 ln q by hand from q0 = 16
        q0 = 16.0
        q1 = 2 * math.log(q0)
        q2 = 2 * math.log(q1)
        q3 = 2 * math.log(q2)
        assert 2 * math.log(q3) < 2.0  # next level falls below the floor
        assert level_schedule(16.0, 2.0) == pytest.approx([q0, q1, q2, q3])

    def test_floor_respected(self):
        levels = level_schedule(16.0, 6.0)
        assert levels == pytest.approx([16.0])


class TestGrouping:
    def test_groups_partition_agents(self):
        inst = generate("random_knapsack", seed=4, n=6, m=10)
        config = RoundingConfig(delta=0.5, seed=0)
        diag = grouping(inst, config, guarantee_value=2.0)
        assert sorted(i for g in diag.groups() for i in g) == list(range(6))

    def test_equal_optima_land_in_one_group(self):
        inst = normalize_utilities(
            Instance(np.ones((4, 6)), Packing(np.ones((1, 6)), np.array([3.0])))
        )
        config = RoundingConfig(delta=0.5, seed=0)
        diag = grouping(inst, config, guarantee_value=2.0)
        groups = [g for g in diag.groups() if g]
        assert len(groups) == 1 and len(groups[0]) == 4

    def test_trivial_when_vmax_at_most_one(self):
        inst = normalize_utilities(
            Instance(np.eye(2), Packing(np.ones((1, 2)), np.array([1.0])))
        )
        config = RoundingConfig(delta=0.5, seed=0)
        diag = grouping(inst, config, guarantee_value=1.0)
        assert diag.flagged_trivial
        assert diag.light_index == 0


class TestSampling:
    def test_mixing_identity(self):
        x = np.array([0.2, 0.8, 0.5])
        y = np.array([1.0, 0.0, 0.5])
        gamma = 0.125
        z = (1 - gamma) * x + gamma * y
        assert np.allclose(mixed_sampling_probs(x, y, gamma), (1 - gamma) * z)

    def test_empirical_marginals_within_three_sigma(self):
        gen = np.random.default_rng(7)
        m = 12
        x = gen.uniform(0.1, 0.9, m)
        y = gen.uniform(0.0, 1.0, m)
        gamma = 0.0625
        probs = mixed_sampling_probs(x, y, gamma)
        draws = 20000
        counts = np.zeros(m)
        for t in range(draws):
            counts += trial_rng(99, t).random(m) < probs
        freq = counts / draws
        sigma = np.sqrt(probs * (1 - probs) / draws)
        assert np.all(np.abs(freq - probs) <= 3 * sigma + 1e-12)

    def test_all_zero_weights_round_to_empty(self):
        inst = generate("random_knapsack", seed=1, n=3, m=6)
        config = RoundingConfig(delta=0.5, seed=5)
        zeros = np.zeros(inst.n_elements)
        report = round_outcome(inst, zeros, zeros, config, guarantee_value=1.0)
        assert report.outcome == ()
        assert report.iterations == 1

    def test_feasibility_acceptance_rate(self):
        # large capacities: nearly every draw satisfies the constraints
        inst = capacity_instance(seed=21)
        A, b = inst.constraint.A, inst.constraint.b
        scale = float(np.min(b / (A @ np.ones(inst.n_elements))))
        x = np.full(inst.n_elements, min(1.0, scale))  # tight feasible point
        gamma = 0.9 / 8
        probs = mixed_sampling_probs(x, x, gamma)
        accepted = 0
        trials = 400
        for t in range(trials):
            draw = trial_rng(31, t).random(inst.n_elements) < probs
            accepted += bool(np.all(A @ draw.astype(float) <= b + 1e-9))
        assert accepted / trials >= 0.9

    def test_retries_exhausted_raises_with_fraction(self):
        gen = np.random.default_rng(3)
        # tiny capacity: every draw with at least one element violates, and
        # high sampling weights make the empty draw vanishingly unlikely
        m = 8
        inst = normalize_utilities(
            Instance(
                gen.random((2, m)),
                Packing(np.ones((1, m)), np.array([0.5])),
            )
        )
        config = RoundingConfig(delta=0.5, seed=2, retries=10)
        ones = np.ones(m)
        with pytest.raises(InfeasibleError) as err:
            round_outcome(inst, ones, ones, config, guarantee_value=1.0)
        assert err.value.failure_fraction == 1.0
        assert err.value.attempts == 10


class TestViolations:
    def test_integral_x_has_no_violations(self):
        inst = generate("random_knapsack", seed=13, n=5, m=9)
        config = RoundingConfig(delta=0.5, seed=1)
        x = np.zeros(inst.n_elements)
        x[[0, 2, 4]] = 1.0
        if not np.all(inst.constraint.A @ x <= inst.constraint.b):
            pytest.skip("seed produced a tight instance")
        diag = grouping(inst, config, guarantee_value=2.0)
        done = violation_sets(inst, x, (0, 2, 4), diag, config)
        assert all(len(v) == 0 for v in done.violations)
        assert done.heavy_bound_ok and done.light_bound_ok

    def test_violations_subset_of_groups(self):
        inst = generate("random_knapsack", seed=17, n=6, m=10)
        config = RoundingConfig(delta=0.5, seed=3)
        report = solve_packing(inst, delta=0.5, seed=3)
        diag = report.diagnostics["grouping"]
        sizes = diag["group_sizes"]
        for violation, size in zip(diag["violations"], sizes):
            assert len(violation) <= size


class TestChernoffMixture:
    def test_parameter_range(self):
        with pytest.raises(ValidationError):
            chernoff_mixture_bound(1.0, 1.0, 0.5)
        with pytest.raises(ValidationError):
            chernoff_mixture_bound(-1.0, 1.0, 0.1)

    def test_vanishing_gamma_gives_trivial_bound(self):
        assert chernoff_mixture_bound(5.0, 5.0, 1e-6) == pytest.approx(1.0, abs=1e-9)

    def test_zero_target_never_fails(self):
        tail = simulate_mixture_lower_tail(0.0, 3.0, 0.2, trials=2000, seed=5)
        assert tail == 0.0
        assert tail <= chernoff_mixture_bound(0.0, 3.0, 0.2)

    def test_large_mixture_tail_below_bound(self):
        a = b = 200.0
        gamma = 0.2
        bound = chernoff_mixture_bound(a, b, gamma)
        tail = simulate_mixture_lower_tail(a, b, gamma, trials=100000, seed=12)
        sigma = math.sqrt(bound * (1 - bound) / 100000)
        assert tail <= bound + 3 * sigma


class TestPipeline:
    def test_report_contains_alpha_target_and_scores(self):
        inst = generate("random_knapsack", seed=23, n=5, m=10, capacity=5.0)
        report = solve_packing(inst, delta=0.5, seed=23)
        diag = report.diagnostics
        assert diag["certificate_score"] <= diag["certificate_threshold"] + 1e-9
        assert diag["alpha_target"] >= 0
        config = RoundingConfig(delta=0.5, seed=23)
        regroup = grouping(inst, config, diag["guarantee_value"])
        assert diag["alpha_target"] == pytest.approx(
            packing_alpha_target(regroup, config.gamma)
        )

    def test_identical_seed_reproduces_outcome(self):
        inst = generate("random_knapsack", seed=29, n=4, m=9, capacity=4.0)
        first = solve_packing(inst, delta=0.5, seed=7)
        second = solve_packing(inst, delta=0.5, seed=7)
        assert first.outcome == second.outcome
        assert first.to_json() == second.to_json()
