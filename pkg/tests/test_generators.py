import math

import numpy as np
import pytest

from corefair import (
    Matching,
    Packing,
    PartitionMatroid,
    ValidationError,
    generate,
    generator_names,
    instance_from_json,
    instance_to_json,
    width,
)
from corefair.generators import random_private_goods


class TestExample1:
    def test_shape_and_utility_table(self):
        inst = generate("example1", m=3)
        assert inst.n_agents == 6 and inst.n_elements == 6
        assert isinstance(inst.constraint, PartitionMatroid)
        # focused agents: one-hot on their own first alternative
        for t in range(3):
            row = inst.utilities[t]
            assert row[2 * t] == 1.0 and row.sum() == 1.0
        # diffuse agents: 1/m on firsts, 1 on seconds
        for i in range(3, 6):
            for t in range(3):
                assert inst.utilities[i, 2 * t] == pytest.approx(1 / 3)
                assert inst.utilities[i, 2 * t + 1] == 1.0

    def test_parameter_validation(self):
        with pytest.raises(ValidationError):
            generate("example1", m=1)


class TestLemma4:
    def test_issue_structure(self):
        inst = generate("lemma4", n=4)
        groups = inst.constraint.groups
        assert len(groups) == 4  # two unit-value issues plus two pair issues
        assert len(groups[0]) == 4 and len(groups[1]) == 4
        assert len(groups[2]) == 6 and len(groups[3]) == 6
        assert inst.n_elements == 20

    def test_pair_alternatives_pay_both_agents(self):
        inst = generate("lemma4", n=4)
        pair_group = inst.constraint.groups[2]
        for j in pair_group:
            assert inst.utilities[:, j].sum() == 2.0

    def test_odd_n_rejected(self):
        with pytest.raises(ValidationError):
            generate("lemma4", n=5)


class TestK22:
    def test_two_disjoint_perfect_matchings(self):
        inst = generate("k22")
        assert isinstance(inst.constraint, Matching)
        assert inst.n_agents == 2 and inst.n_elements == 4
        assert np.array_equal(inst.utilities[0] > 0, [True, False, False, True])
        assert np.array_equal(inst.utilities[1] > 0, [False, True, True, False])
        edges = inst.constraint.edges
        first = {edges[0], edges[3]}
        second = {edges[1], edges[2]}
        assert not ({v for e in first for v in e} - {0, 1, 2, 3})
        assert first | second == set(edges)


class TestBipartiteIs:
    def test_width_is_two_and_sides_are_feasible(self):
        inst = generate("bipartite_is", m=8)
        assert width(inst.constraint) == pytest.approx(2.0)
        assert inst.constraint.A.shape == (16, 8)

    def test_two_agents_value_opposite_sides(self):
        inst = generate("bipartite_is", m=8)
        assert inst.utilities[0, :4].sum() == 4.0
        assert inst.utilities[0, 4:].sum() == 0.0
        assert inst.utilities[1, 4:].sum() == 4.0


class TestKnapsackSmoothing:
    def test_structure(self):
        inst = generate("knapsack_smoothing", budget=256)
        big = 4
        assert inst.n_elements == big + 256
        assert inst.n_agents == math.ceil(4 * big * math.log(512))
        specials = np.nonzero(inst.utilities[:, big:].sum(axis=1))[0]
        assert len(specials) == 1
        # sizes scaled into [0, 1] against the budget
        row = inst.constraint.A[0]
        assert row[:big] == pytest.approx(256 ** 0.75 / 256)
        assert row[big:] == pytest.approx(1 / 256)

    def test_needs_fourth_power(self):
        with pytest.raises(ValidationError):
            generate("knapsack_smoothing", budget=100)


class TestCyclic:
    def test_table_and_sizes(self):
        inst = generate("cyclic_pb")
        expected = np.array([[1, 0.5, 0], [0, 1, 0.5], [0.5, 0, 1]])
        assert np.allclose(inst.utilities, expected)
        assert isinstance(inst.constraint, Packing)
        # every element consumes two thirds of the budget: only singletons fit
        assert np.allclose(inst.constraint.A, 2 / 3)


class TestRandomPools:
    def test_seed_determinism(self):
        for name in ("random_matroid", "random_matching", "random_knapsack"):
            a = generate(name, seed=99)
            b = generate(name, seed=99)
            assert a == b
            assert a != generate(name, seed=100)

    def test_normalized_rows(self):
        for seed in range(10):
            inst = generate("random_matroid", seed=seed)
            row_max = inst.utilities.max(axis=1)
            positive = row_max > 0
            assert np.allclose(row_max[positive], 1.0)

    def test_private_pool_shapes(self):
        inst = random_private_goods(3, n=3, goods=4)
        assert inst.n_elements == 12
        assert inst.constraint.agents == 3

    def test_unknown_name_rejected(self):
        with pytest.raises(ValidationError):
            generate("mystery")
        with pytest.raises(ValidationError):
            generate("example1", bogus=3)


class TestRoundTrip:
    def test_named_generators_round_trip(self):
        cases = [
            generate("example1", m=3),
            generate("lemma4", n=4),
            generate("k22"),
            generate("bipartite_is", m=6),
            generate("cyclic_pb"),
        ]
        for inst in cases:
            again = instance_from_json(instance_to_json(inst))
            assert again == inst

    @pytest.mark.parametrize("seed", range(30))
    def test_random_instances_round_trip(self, seed):
        name = ("random_matroid", "random_matching", "random_knapsack")[seed % 3]
        inst = generate(name, seed=seed)
        again = instance_from_json(instance_to_json(inst))
        assert again == inst

    def test_private_goods_round_trip(self):
        inst = random_private_goods(8)
        again = instance_from_json(instance_to_json(inst))
        assert again == inst

    def test_unknown_constraint_type_rejected(self):
        text = instance_to_json(generate("k22")).replace(
            '"type": "matching"', '"type": "hypergraph"'
        )
        with pytest.raises(ValidationError):
            instance_from_json(text)

    def test_byte_stable_emission(self):
        assert instance_to_json(generate("k22")) == instance_to_json(generate("k22"))


def test_generator_name_listing():
    assert "example1" in generator_names()
    assert "cyclic_pb" in generator_names()
