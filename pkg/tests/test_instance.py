import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from corefair import (
    GraphicMatroid,
    Instance,
    Matching,
    Packing,
    PartitionMatroid,
    PrivateGoods,
    UniformMatroid,
    UnsupportedConstraintError,
    ValidationError,
    generate,
    is_basis,
    is_feasible,
    max_agent_utility,
    normalize_utilities,
    outcome_utilities,
    utility,
    width,
)


def simple_instance(utilities, constraint=None):
    u = np.asarray(utilities, dtype=float)
    if constraint is None:
        constraint = UniformMatroid(u.shape[1])
    return Instance(u, constraint)


class TestNormalization:
    def test_row_divided_by_max(self):
        inst = normalize_utilities(simple_instance([[2.0, 4.0, 1.0]]))
        assert np.allclose(inst.utilities, [[0.5, 1.0, 0.25]])

    def test_zero_row_flagged_and_unchanged(self):
        inst = normalize_utilities(simple_instance([[0.0, 0.0], [1.0, 2.0]]))
        assert inst.zero_agents == (0,)
        assert np.array_equal(inst.utilities[0], [0.0, 0.0])

    def test_example1_rows_already_normalized(self):
        inst = generate("example1", m=3)
        again = normalize_utilities(inst)
        assert np.array_equal(inst.utilities, again.utilities)
        # diffuse agents hold 1/m on every first alternative
        assert inst.utilities[3, 0] == pytest.approx(1.0 / 3.0)

    def test_negative_entry_rejected(self):
        with pytest.raises(ValidationError):
            simple_instance([[-1.0, 2.0]])

    @settings(max_examples=50, deadline=None)
    @given(
        arrays(
            float,
            (3, 4),
            elements=st.floats(0, 10, allow_nan=False, allow_infinity=False),
        )
    )
    def test_idempotent(self, raw):
        inst = normalize_utilities(simple_instance(raw))
        twice = normalize_utilities(inst)
        assert np.allclose(inst.utilities, twice.utilities, atol=1e-12)
        assert inst.zero_agents == twice.zero_agents


class TestUtility:
    def test_empty_outcome_is_zero(self):
        inst = simple_instance([[1.0, 2.0]])
        assert utility(inst, 0, ()) == 0.0

    def test_example1_all_firsts_gives_everyone_one(self):
        inst = generate("example1", m=4)
        firsts = tuple(2 * t for t in range(4))
        values = outcome_utilities(inst, firsts)
        assert np.allclose(values, 1.0)

    def test_additive_over_disjoint_sets(self, rng):
        inst = normalize_utilities(simple_instance(rng.random((4, 8))))
        left, right = (0, 2, 5), (1, 7)
        for agent in range(4):
            assert utility(inst, agent, left + right) == pytest.approx(
                utility(inst, agent, left) + utility(inst, agent, right)
            )

    def test_fractional_weights(self):
        inst = simple_instance([[1.0, 0.5]])
        assert utility(inst, 0, np.array([0.5, 1.0])) == pytest.approx(1.0)

    def test_out_of_range_rejected(self):
        inst = simple_instance([[1.0]])
        with pytest.raises(ValidationError):
            utility(inst, 0, (3,))
        with pytest.raises(ValidationError):
            utility(inst, 5, (0,))

    def test_uniform_low_weights_meet_width_share(self):
        # putting weight 1/width on every element guarantees each agent a
        # 1/width share of its fractional optimum
        inst = generate("bipartite_is", m=8)
        rho = width(inst.constraint)
        w = np.full(inst.n_elements, 1.0 / rho)
        values = outcome_utilities(inst, w)
        for agent in range(inst.n_agents):
            best = max_agent_utility(inst, agent, mode="fractional")
            assert values[agent] >= best / rho - 1e-9


class TestFeasibility:
    def test_matching_disjoint_edges(self):
        k22 = generate("k22")
        assert is_feasible((0, 3), k22.constraint)
        assert not is_feasible((0, 1), k22.constraint)

    def test_packing_one_side_of_bipartite(self):
        inst = generate("bipartite_is", m=8)
        assert is_feasible(tuple(range(4)), inst.constraint)
        assert not is_feasible((0, 4), inst.constraint)

    def test_partition_one_per_group(self):
        c = PartitionMatroid(((0, 1), (2, 3)))
        assert is_feasible((0, 2), c)
        assert not is_feasible((0, 1), c)
        assert is_basis((0, 3), c)
        assert not is_basis((0,), c)

    def test_graphic_forest(self):
        c = GraphicMatroid(3, ((0, 1), (1, 2), (0, 2)))
        assert is_feasible((0, 1), c)
        assert not is_feasible((0, 1, 2), c)
        assert is_basis((0, 2), c)

    def test_private_goods_one_copy_per_good(self):
        c = PrivateGoods(agents=2, goods=2)
        assert is_feasible((0, 3), c)  # good 0 to agent 0, good 1 to agent 1
        assert not is_feasible((0, 1), c)  # good 0 assigned twice
        assert is_basis((1, 2), c)

    def test_uniform(self):
        c = UniformMatroid(2)
        assert is_feasible((0,), c)
        assert not is_feasible((0, 1, 2), c)


class TestWidth:
    def test_unit_knapsack(self):
        c = Packing(np.ones((1, 6)), np.array([3.0]))
        assert width(c) == pytest.approx(2.0)

    def test_bipartite_edge_rows(self):
        inst = generate("bipartite_is", m=8)
        assert width(inst.constraint) == pytest.approx(2.0)

    def test_whole_budget(self):
        c = Packing(np.ones((1, 5)), np.array([5.0]))
        assert width(c) == pytest.approx(1.0)

    def test_non_packing_rejected(self):
        with pytest.raises(UnsupportedConstraintError):
            width(UniformMatroid(2))


class TestAgentOptima:
    def test_example1_diffuse_agent_reaches_m(self):
        inst = generate("example1", m=4)
        assert max_agent_utility(inst, 4, mode="integral") == pytest.approx(4.0)

    def test_single_element(self):
        inst = simple_instance([[1.0]], Packing(np.ones((1, 1)), np.array([1.0])))
        assert max_agent_utility(inst, 0, mode="integral") == pytest.approx(1.0)

    def test_bipartite_fractional_optimum_is_half_m(self):
        inst = generate("bipartite_is", m=8)
        assert max_agent_utility(inst, 0, mode="fractional") == pytest.approx(4.0)

    def test_fractional_dominates_integral_for_packing(self, rng):
        for seed in range(8):
            inst = generate("random_knapsack", seed=seed, n=3, m=8)
            for agent in range(inst.n_agents):
                frac = max_agent_utility(inst, agent, mode="fractional")
                integral = max_agent_utility(inst, agent, mode="integral")
                assert frac >= integral - 1e-7

    def test_matching_brute_force_agrees_with_enumeration(self, rng):
        from conftest import brute_force_matchings

        inst = generate("random_matching", seed=3, n=3)
        edges = inst.constraint.edges
        for agent in range(inst.n_agents):
            best = max(
                sum(inst.utilities[agent][j] for j in matching)
                for matching in brute_force_matchings(edges)
            )
            assert max_agent_utility(inst, agent) == pytest.approx(best)

    def test_size_cap_named(self, monkeypatch):
        from corefair.errors import SizeCapError

        monkeypatch.setenv("COREFAIR_SIZE_CAPS", '{"matching_value_edges": 2}')
        inst = generate("random_matching", seed=3, n=3)
        with pytest.raises(SizeCapError) as err:
            max_agent_utility(inst, 0)
        assert err.value.cap_name == "matching_value_edges"


class TestValidation:
    def test_packing_entries_must_be_unit_scaled(self):
        with pytest.raises(ValidationError):
            Packing(np.array([[2.0]]), np.array([1.0]))

    def test_overlapping_groups_rejected(self):
        with pytest.raises(ValidationError):
            PartitionMatroid(((0, 1), (1, 2)))

    def test_matching_constraint_needs_edge_per_element(self):
        with pytest.raises(ValidationError):
            Instance(np.ones((1, 3)), Matching(4, ((0, 1),)))
