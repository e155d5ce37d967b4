"""Local search over matroid bases for the smoothed Nash welfare objective.

The solver swaps one element at a time, accepting the first swap (scanning
removals then additions in ascending index order) whose objective gain meets
the improvement threshold, and stops at a local optimum. With smoothing
shift 1 and threshold derived from the tolerance ``epsilon``, the local
optimum approximates the core with additive slack ``2 + epsilon``.
"""

import math

import numpy as np

from .errors import ConvergenceError, UnsupportedConstraintError, ValidationError
from .instance import (
    GraphicMatroid,
    PartitionMatroid,
    PrivateGoods,
    UniformMatroid,
    graphic_rank,
    normalize_utilities,
    outcome_utilities,
)
from .objective import smooth_nash, swap_gain
from .reports import SolverReport

MATROID_SHIFT = 1.0


class MatroidOracle:
    """Independence oracle over elements 0..m-1."""

    def __init__(self, ground_size, rank):
        self.ground_size = ground_size
        self.rank = rank

    def is_independent(self, chosen):
        raise NotImplementedError

    def is_basis(self, chosen):
        chosen = set(chosen)
        return len(chosen) == self.rank and self.is_independent(chosen)


class _PartitionOracle(MatroidOracle):
    def __init__(self, constraint, m):
        super().__init__(m, constraint.rank)
        self.group_of = np.full(m, -1, dtype=int)
        for gi, g in enumerate(constraint.groups):
            for j in g:
                self.group_of[j] = gi

    def is_independent(self, chosen):
        used = set()
        for j in chosen:
            gi = self.group_of[j]
            if gi < 0 or gi in used:
                return False
            used.add(gi)
        return True


class _UniformOracle(MatroidOracle):
    def __init__(self, constraint, m):
        super().__init__(m, constraint.rank)

    def is_independent(self, chosen):
        return len(set(chosen)) <= self.rank


class _GraphicOracle(MatroidOracle):
    def __init__(self, constraint, m):
        super().__init__(m, graphic_rank(constraint))
        self.edges = constraint.edges
        self.vertices = constraint.vertices

    def is_independent(self, chosen):
        parent = list(range(self.vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for j in chosen:
            u, v = self.edges[j]
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[ru] = rv
        return True


class _PrivateGoodsOracle(MatroidOracle):
    """One clone per good: the partition matroid induced by cloning."""

    def __init__(self, constraint, m):
        super().__init__(m, constraint.goods)
        self.agents = constraint.agents

    def is_independent(self, chosen):
        goods = [j // self.agents for j in chosen]
        return len(goods) == len(set(goods))


def matroid_oracle(constraint, ground_size):
    """Build the independence oracle matching a matroid-family constraint."""
    if isinstance(constraint, PartitionMatroid):
        return _PartitionOracle(constraint, ground_size)
    if isinstance(constraint, UniformMatroid):
        return _UniformOracle(constraint, ground_size)
    if isinstance(constraint, GraphicMatroid):
        return _GraphicOracle(constraint, ground_size)
    if isinstance(constraint, PrivateGoods):
        return _PrivateGoodsOracle(constraint, ground_size)
    raise UnsupportedConstraintError(
        f"{type(constraint).__name__} is not a matroid family"
    )


def initial_basis(oracle, inst):
    """Greedy basis by descending total utility, ties broken by index."""
    totals = inst.utilities.sum(axis=0)
    order = np.lexsort((np.arange(oracle.ground_size), -totals))
    chosen = []
    for j in order:
        if oracle.is_independent(chosen + [int(j)]):
            chosen.append(int(j))
            if len(chosen) == oracle.rank:
                break
    if len(chosen) != oracle.rank:
        raise ValidationError("matroid has no basis of full rank")
    return frozenset(chosen)


def find_improving_swap(inst, outcome, oracle, threshold, shift=MATROID_SHIFT):
    """First swap meeting the gain threshold while preserving the basis.

    Scans removal candidates in ascending index order, then addition
    candidates in ascending order. Returns ``(remove, add, gain)`` or None.
    """
    chosen = set(outcome)
    outside = [j for j in range(oracle.ground_size) if j not in chosen]
    for remove in sorted(chosen):
        rest = chosen - {remove}
        for add in outside:
            gain = swap_gain(inst, chosen, remove, add, shift)
            if gain >= threshold and oracle.is_independent(rest | {add}):
                return remove, add, gain
    return None


def local_search_matroid(inst, epsilon, oracle=None):
    """Swap local search on the shift-1 smoothed Nash welfare over bases.

    Terminates when no swap improves the objective by at least
    ``n * gamma / m`` with ``gamma = epsilon / (4 m)``; the iteration count
    is bounded by ``4 m^2 ln(1+m) / epsilon``.
    """
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    inst = normalize_utilities(inst)
    n, m = inst.n_agents, inst.n_elements
    if oracle is None:
        oracle = matroid_oracle(inst.constraint, m)
    gamma = epsilon / (4 * m)
    threshold = n * gamma / m
    max_iterations = math.ceil(4 * m * m * math.log(1 + m) / epsilon) + 1

    outcome = initial_basis(oracle, inst)
    value = smooth_nash(inst, outcome, MATROID_SHIFT)
    trace = [value]
    swaps = []
    for _ in range(max_iterations):
        move = find_improving_swap(inst, outcome, oracle, threshold)
        if move is None:
            return SolverReport(
                solver="matroid-local-search",
                outcome=tuple(sorted(outcome)),
                objective_trace=tuple(trace),
                iterations=len(swaps),
                seed=None,
                diagnostics={
                    "epsilon": epsilon,
                    "gamma": gamma,
                    "threshold": threshold,
                    "swaps": swaps,
                    "shift": MATROID_SHIFT,
                },
            )
        remove, add, gain = move
        outcome = (outcome - {remove}) | {add}
        value += gain
        trace.append(value)
        swaps.append((remove, add))
    raise ConvergenceError(
        "matroid local search exceeded its iteration bound; this indicates "
        "an objective arithmetic bug",
        last_score=value,
    )


def exchange_bijection(oracle, basis_a, basis_b):
    """Bijection f from one basis to another with every single swap a basis.

    Built as a perfect matching on the bipartite swap-feasibility graph.
    Used as a test oracle only; the solver never needs it. Failure to find a
    perfect matching means the oracle violates the matroid exchange axiom.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_bipartite_matching

    a = sorted(basis_a)
    b = sorted(basis_b)
    if not (oracle.is_basis(a) and oracle.is_basis(b)):
        raise ValidationError("exchange bijection requires two bases")
    rows, cols = [], []
    for ia, j in enumerate(a):
        rest = set(a) - {j}
        for ib, jp in enumerate(b):
            if jp == j or oracle.is_independent(rest | {jp}):
                rows.append(ia)
                cols.append(ib)
    graph = csr_matrix(
        (np.ones(len(rows)), (rows, cols)), shape=(len(a), len(b))
    )
    match = maximum_bipartite_matching(graph, perm_type="column")
    if np.any(match < 0):
        raise ValidationError(
            "no perfect swap matching between bases: the independence oracle "
            "violates the matroid exchange axiom"
        )
    return {a[ia]: b[match[ia]] for ia in range(len(a))}


def removal_drop_total(inst, outcome, shift=MATROID_SHIFT):
    """Sum over chosen elements of the objective drop from removing each.

    For any outcome this total is at most the number of agents; regression
    tests assert it on solver outputs.
    """
    u = outcome_utilities(inst, outcome)
    total = 0.0
    for j in outcome:
        total += float(
            np.sum(np.log(shift + u) - np.log(shift + u - inst.utilities[:, j]))
        )
    return total
