"""Instance generators: named counterexample families and seeded random pools.

The named families reproduce the finite constructions used throughout the
test suite exactly as printed; the random generators draw reproducible desk-
scale instances from a seed. Every generator returns a normalized instance.
"""

import itertools
import math

import numpy as np

from .errors import ValidationError
from .instance import (
    GraphicMatroid,
    Instance,
    Matching,
    Packing,
    PartitionMatroid,
    PrivateGoods,
    UniformMatroid,
    normalize_utilities,
)


def example1(m=4):
    """Two-alternative decision instance splitting focused and diffuse agents.

    Issue t has alternatives at indices 2t (first) and 2t+1 (second). Agents
    0..m-1 each care only about their own issue's first alternative; agents
    m..2m-1 value every second alternative at 1 and every first at 1/m.
    """
    m = int(m)
    if m < 2:
        raise ValidationError("example1 requires m >= 2")
    u = np.zeros((2 * m, 2 * m))
    for t in range(m):
        u[t, 2 * t] = 1.0
        u[m:, 2 * t] = 1.0 / m
        u[m:, 2 * t + 1] = 1.0
    groups = tuple((2 * t, 2 * t + 1) for t in range(m))
    return normalize_utilities(Instance(u, PartitionMatroid(groups)))


def lemma4(n=4):
    """Pair-issue instance with no low-slack core outcome.

    ``n - 2`` private issues give one agent a unit each; ``n / 2`` pair
    issues offer one alternative per agent pair worth a unit to both.
    """
    n = int(n)
    if n < 2 or n % 2:
        raise ValidationError("lemma4 requires an even n >= 2")
    pairs = list(itertools.combinations(range(n), 2))
    groups = []
    columns = []
    for t in range(n - 2):
        groups.append(tuple(range(len(columns), len(columns) + n)))
        for i in range(n):
            col = np.zeros(n)
            col[i] = 1.0
            columns.append(col)
    for _ in range(n // 2):
        groups.append(tuple(range(len(columns), len(columns) + len(pairs))))
        for i, j in pairs:
            col = np.zeros(n)
            col[i] = 1.0
            col[j] = 1.0
            columns.append(col)
    u = np.column_stack(columns)
    return normalize_utilities(Instance(u, PartitionMatroid(tuple(groups))))


def k22():
    """Two agents valuing the two disjoint perfect matchings of K_{2,2}."""
    edges = ((0, 2), (0, 3), (1, 2), (1, 3))
    u = np.array([[1.0, 0.0, 0.0, 1.0], [0.0, 1.0, 1.0, 0.0]])
    return normalize_utilities(Instance(u, Matching(vertices=4, edges=edges)))


def bipartite_is(m=8):
    """Independent sets of a complete bipartite graph via edge constraints.

    Vertices are the elements; each edge contributes a row x_u + x_v <= 1,
    so feasible outcomes are subsets of one side. Agent 0 values the left
    side, agent 1 the right.
    """
    m = int(m)
    if m < 2 or m % 2:
        raise ValidationError("bipartite_is requires an even m >= 2")
    half = m // 2
    rows = []
    for u in range(half):
        for v in range(half, m):
            row = np.zeros(m)
            row[u] = 1.0
            row[v] = 1.0
            rows.append(row)
    util = np.zeros((2, m))
    util[0, :half] = 1.0
    util[1, half:] = 1.0
    return normalize_utilities(
        Instance(util, Packing(np.array(rows), np.ones(len(rows))))
    )


def knapsack_smoothing(budget=4096):
    """Knapsack family on which any fixed smoothing shift picks large items.

    ``budget**(1/4)`` large elements of size ``budget**(3/4)`` are valued by
    everyone; ``budget`` unit-size small elements are valued only by one
    special agent out of ``ceil(4 * budget**(1/4) * ln(2 * budget))``.
    """
    budget = int(budget)
    big = round(budget ** 0.25)
    if big**4 != budget or budget < 16:
        raise ValidationError("knapsack_smoothing needs a fourth power >= 16")
    large_size = budget // big  # budget**(3/4)
    m = big + budget
    n = math.ceil(4 * big * math.log(2 * budget))
    specials = max(1, int(n / (4 * big * math.log(2 * budget))))
    sizes = np.concatenate([np.full(big, float(large_size)), np.ones(budget)])
    u = np.zeros((n, m))
    u[:, :big] = 1.0
    u[:specials, big:] = 1.0
    constraint = Packing((sizes / budget)[None, :], np.array([1.0]))
    return normalize_utilities(Instance(u, constraint))


def knapsack_smoothing_candidates(budget):
    """The efficient frontier of the smoothing family, as outcomes.

    Candidate r swaps r large elements for ``r * budget**(3/4)`` small ones;
    every feasible outcome is weakly dominated by some candidate, so the
    exact maximizer of any monotone objective lies among them.
    """
    budget = int(budget)
    big = round(budget ** 0.25)
    large_size = budget // big
    candidates = []
    for r in range(big + 1):
        larges = tuple(range(big - r))
        smalls = tuple(range(big, big + r * large_size))
        candidates.append(larges + smalls)
    return candidates


def cyclic_pb():
    """Three half-budget elements with cyclically rotated values."""
    u = np.array([[1.0, 0.5, 0.0], [0.0, 1.0, 0.5], [0.5, 0.0, 1.0]])
    constraint = Packing(np.full((1, 3), 2.0 / 3.0), np.array([1.0]))
    return normalize_utilities(Instance(u, constraint))


def approval(utilities, budget):
    """Approval-voting instance: binary utilities, unit sizes, one budget row."""
    u = np.asarray(utilities, dtype=float)
    if not np.all((u == 0) | (u == 1)):
        raise ValidationError("approval utilities must be binary")
    m = u.shape[1]
    constraint = Packing(np.ones((1, m)), np.array([float(budget)]))
    return normalize_utilities(Instance(u, constraint))


# ---------------------------------------------------------------------------
# seeded random pools


def _sparse_utilities(rng, n, m, density=0.8):
    u = rng.random((n, m)) * (rng.random((n, m)) < density)
    # guarantee at least one positive entry in most rows; leave genuine
    # zero rows possible only when density is low
    for i in range(n):
        if u[i].max() == 0 and density >= 0.5:
            u[i, int(rng.integers(m))] = rng.random() + 0.5
    return u


def random_matroid(seed, n=None, m=None, kind=None):
    """Random partition, uniform, or graphic matroid instance."""
    rng = np.random.default_rng(int(seed))
    n = int(n) if n is not None else int(rng.integers(2, 9))
    m = int(m) if m is not None else int(rng.integers(4, 11))
    kind = kind or ("partition", "uniform", "graphic")[int(rng.integers(3))]
    if kind == "partition":
        order = rng.permutation(m)
        g = int(rng.integers(2, min(m, 5) + 1))
        cuts = sorted(rng.choice(range(1, m), size=g - 1, replace=False)) if g > 1 else []
        groups = tuple(
            tuple(int(j) for j in part)
            for part in np.split(order, cuts)
            if len(part)
        )
        constraint = PartitionMatroid(groups)
    elif kind == "uniform":
        constraint = UniformMatroid(int(rng.integers(1, m + 1)))
    elif kind == "graphic":
        v = int(rng.integers(3, 7))
        edges = tuple(
            tuple(sorted(rng.choice(v, size=2, replace=False).tolist()))
            for _ in range(m)
        )
        constraint = GraphicMatroid(v, edges)
    else:
        raise ValidationError(f"unknown matroid kind {kind!r}")
    u = _sparse_utilities(rng, n, m)
    return normalize_utilities(Instance(u, constraint))


def random_matching(seed, n=None, m=None):
    """Random matching instance on a small graph with distinct edges."""
    rng = np.random.default_rng(int(seed))
    n = int(n) if n is not None else int(rng.integers(2, 7))
    r = int(rng.integers(4, 9))
    all_pairs = list(itertools.combinations(range(r), 2))
    m_max = min(10, len(all_pairs))
    m = int(m) if m is not None else int(rng.integers(4, m_max + 1))
    picked = rng.choice(len(all_pairs), size=min(m, len(all_pairs)), replace=False)
    edges = tuple(all_pairs[int(i)] for i in sorted(picked))
    u = _sparse_utilities(rng, n, len(edges))
    return normalize_utilities(Instance(u, Matching(r, edges)))


def random_knapsack(seed, n=None, m=None, rows=1, capacity=None):
    """Random packing instance; one row by default, capacity a row fraction."""
    rng = np.random.default_rng(int(seed))
    n = int(n) if n is not None else int(rng.integers(2, 9))
    m = int(m) if m is not None else int(rng.integers(6, 15))
    rows = int(rows)
    A = rng.uniform(0.2, 1.0, size=(rows, m))
    if capacity is None:
        b = A.sum(axis=1) * rng.uniform(0.35, 0.7, size=rows)
    else:
        b = np.full(rows, float(capacity))
    u = _sparse_utilities(rng, n, m)
    return normalize_utilities(Instance(u, Packing(A, b)))


def random_private_goods(seed, n=None, goods=None):
    """Random private-goods instance in the cloned-element encoding."""
    rng = np.random.default_rng(int(seed))
    n = int(n) if n is not None else int(rng.integers(2, 5))
    goods = int(goods) if goods is not None else int(rng.integers(2, 7))
    values = rng.random((n, goods)) * (rng.random((n, goods)) < 0.85)
    for i in range(n):
        if values[i].max() == 0:
            values[i, int(rng.integers(goods))] = rng.random() + 0.5
    u = np.zeros((n, goods * n))
    for good in range(goods):
        for agent in range(n):
            u[agent, good * n + agent] = values[agent, good]
    return normalize_utilities(Instance(u, PrivateGoods(agents=n, goods=goods)))


_GENERATORS = {
    "example1": example1,
    "lemma4": lemma4,
    "k22": k22,
    "bipartite_is": bipartite_is,
    "knapsack_smoothing": knapsack_smoothing,
    "cyclic_pb": cyclic_pb,
    "random_matroid": random_matroid,
    "random_matching": random_matching,
    "random_knapsack": random_knapsack,
}


def generator_names():
    return sorted(_GENERATORS)


def generate(name, **params):
    """Build a named instance; unknown names or parameters are rejected."""
    if name not in _GENERATORS:
        raise ValidationError(
            f"unknown generator {name!r}; expected one of {generator_names()}"
        )
    try:
        return _GENERATORS[name](**params)
    except TypeError as exc:
        raise ValidationError(f"bad parameters for {name!r}: {exc}") from exc
