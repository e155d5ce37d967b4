"""Problem instances: utility matrices plus one feasibility constraint.

An instance holds a dense nonnegative utility matrix (rows = agents, columns
= elements) and a constraint describing which element subsets are feasible.
Six constraint families are supported: partition, uniform, and graphic
matroids; matchings in an undirected graph; packing systems ``A x <= b`` with
entries in [0, 1]; and private goods, where each good is cloned once per
agent and an outcome assigns each good to at most one agent.

All types are treated as immutable after construction; every operation here
is a pure function.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .caps import cap
from .errors import SizeCapError, UnsupportedConstraintError, ValidationError

TOL = 1e-9


# ---------------------------------------------------------------------------
# constraint specifications


@dataclass(frozen=True)
class PartitionMatroid:
    """Disjoint element groups; a basis picks exactly one element per group.

    Elements not covered by any group are loops and can never be chosen.
    """

    groups: tuple

    def __post_init__(self):
        groups = tuple(tuple(int(j) for j in g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        seen = set()
        for g in groups:
            for j in g:
                if j < 0:
                    raise ValidationError(f"negative element index {j} in group")
                if j in seen:
                    raise ValidationError(f"element {j} appears in two groups")
                seen.add(j)

    @property
    def rank(self):
        return sum(1 for g in self.groups if g)


@dataclass(frozen=True)
class UniformMatroid:
    """Sets of at most ``rank`` elements are independent."""

    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise ValidationError("uniform matroid rank must be >= 0")


@dataclass(frozen=True)
class GraphicMatroid:
    """Elements are edges; independent sets are forests, bases spanning forests."""

    vertices: int
    edges: tuple

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        for u, v in edges:
            if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                raise ValidationError(f"edge ({u},{v}) has a vertex out of range")


@dataclass(frozen=True)
class Matching:
    """Elements are edges of an undirected graph; outcomes must be matchings."""

    vertices: int
    edges: tuple

    def __post_init__(self):
        edges = tuple((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        for u, v in edges:
            if u == v:
                raise ValidationError(f"self-loop ({u},{v}) cannot be matched")
            if not (0 <= u < self.vertices and 0 <= v < self.vertices):
                raise ValidationError(f"edge ({u},{v}) has a vertex out of range")


@dataclass(eq=False)
class Packing:
    """Linear packing system ``A x <= b`` with coefficients in [0, 1]."""

    A: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.b = np.asarray(self.b, dtype=float).ravel()
        if self.A.shape[0] != self.b.shape[0]:
            raise ValidationError("packing matrix and capacity vector disagree")
        if np.any(self.A < -TOL) or np.any(self.A > 1 + TOL):
            raise ValidationError("packing coefficients must lie in [0, 1]")
        if np.any(self.b <= 0):
            raise ValidationError("packing capacities must be positive")

    def __eq__(self, other):
        return (
            isinstance(other, Packing)
            and np.array_equal(self.A, other.A)
            and np.array_equal(self.b, other.b)
        )


@dataclass(frozen=True)
class PrivateGoods:
    """Goods cloned per agent: element ``g * agents + i`` assigns good g to agent i."""

    agents: int
    goods: int

    def __post_init__(self):
        if self.agents <= 0 or self.goods <= 0:
            raise ValidationError("private goods need positive agent and good counts")

    def element(self, good, agent):
        return good * self.agents + agent


CONSTRAINT_CLASSES = (
    PartitionMatroid,
    UniformMatroid,
    GraphicMatroid,
    Matching,
    Packing,
    PrivateGoods,
)


# ---------------------------------------------------------------------------
# instance


@dataclass(eq=False)
class Instance:
    """Utility matrix plus constraint. Treat as immutable once built."""

    utilities: np.ndarray
    constraint: object
    normalized: bool = False
    zero_agents: tuple = field(default_factory=tuple)

    def __post_init__(self):
        self.utilities = np.atleast_2d(np.asarray(self.utilities, dtype=float))
        if self.utilities.ndim != 2 or self.utilities.size == 0:
            raise ValidationError("utilities must be a nonempty 2-d matrix")
        if np.any(self.utilities < 0):
            raise ValidationError("utilities must be nonnegative")
        if not isinstance(self.constraint, CONSTRAINT_CLASSES):
            raise ValidationError(f"unknown constraint type {type(self.constraint)!r}")
        m = self.utilities.shape[1]
        c = self.constraint
        if isinstance(c, PartitionMatroid):
            if any(j >= m for g in c.groups for j in g):
                raise ValidationError("partition group index exceeds element count")
        elif isinstance(c, UniformMatroid):
            if c.rank > m:
                raise ValidationError("uniform matroid rank exceeds element count")
        elif isinstance(c, (GraphicMatroid, Matching)):
            if len(c.edges) != m:
                raise ValidationError("edge count must equal element count")
        elif isinstance(c, Packing):
            if c.A.shape[1] != m:
                raise ValidationError("packing matrix width must equal element count")
        elif isinstance(c, PrivateGoods):
            if c.agents * c.goods != m:
                raise ValidationError("private goods need agents*goods elements")
            if c.agents != self.utilities.shape[0]:
                raise ValidationError("private goods agent count must match utilities")

    @property
    def n_agents(self):
        return self.utilities.shape[0]

    @property
    def n_elements(self):
        return self.utilities.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, Instance)
            and np.array_equal(self.utilities, other.utilities)
            and self.constraint == other.constraint
        )


def normalize_utilities(inst):
    """Scale each agent row with a positive entry so its maximum is exactly 1.

    All-zero rows are left unchanged and recorded in ``zero_agents``.
    Idempotent: normalizing a normalized instance returns an equal instance.
    """
    u = inst.utilities
    row_max = u.max(axis=1)
    zero = row_max == 0
    scale = np.where(zero, 1.0, row_max)
    return replace(
        inst,
        utilities=u / scale[:, None],
        normalized=True,
        zero_agents=tuple(int(i) for i in np.nonzero(zero)[0]),
    )


# ---------------------------------------------------------------------------
# utilities of outcomes


def _as_weights(outcome, m):
    """Interpret an outcome as a weight vector. Index sets become 0/1 vectors."""
    if isinstance(outcome, np.ndarray) and outcome.dtype.kind == "f":
        w = np.asarray(outcome, dtype=float)
        if w.shape != (m,):
            raise ValidationError(f"weight vector has shape {w.shape}, wanted ({m},)")
        return w
    chosen = list(outcome)
    w = np.zeros(m)
    for j in chosen:
        j = int(j)
        if not 0 <= j < m:
            raise ValidationError(f"element index {j} out of range")
        w[j] = 1.0
    return w


def utility(inst, agent, outcome):
    """Additive utility of one agent for an integral or fractional outcome."""
    if not 0 <= agent < inst.n_agents:
        raise ValidationError(f"agent index {agent} out of range")
    return float(inst.utilities[agent] @ _as_weights(outcome, inst.n_elements))


def outcome_utilities(inst, outcome):
    """Utility vector of all agents for the given outcome."""
    return inst.utilities @ _as_weights(outcome, inst.n_elements)


# ---------------------------------------------------------------------------
# feasibility


def _forest_check(edges, chosen, vertices):
    parent = list(range(vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j in chosen:
        u, v = edges[j]
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def graphic_rank(constraint):
    """Size of a spanning forest: vertices minus connected components."""
    parent = list(range(constraint.vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    rank = 0
    for u, v in constraint.edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            rank += 1
    return rank


def is_feasible(outcome, constraint, n_elements=None):
    """True iff the element set is feasible for the constraint.

    Matroid families test independence (hereditary feasibility); use
    :func:`is_basis` when maximality is required, as the local-search solvers
    do. Matchings test vertex-disjointness, packing tests ``A x <= b``, and
    private goods test that no good is assigned twice.
    """
    chosen = sorted(int(j) for j in set(outcome))
    if chosen and chosen[0] < 0:
        raise ValidationError(f"element index {chosen[0]} out of range")
    if n_elements is not None and chosen and chosen[-1] >= n_elements:
        raise ValidationError(f"element index {chosen[-1]} out of range")
    c = constraint
    if isinstance(c, PartitionMatroid):
        group_of = {}
        for gi, g in enumerate(c.groups):
            for j in g:
                group_of[j] = gi
        used = set()
        for j in chosen:
            gi = group_of.get(j)
            if gi is None or gi in used:
                return False
            used.add(gi)
        return True
    if isinstance(c, UniformMatroid):
        return len(chosen) <= c.rank
    if isinstance(c, GraphicMatroid):
        if chosen and chosen[-1] >= len(c.edges):
            raise ValidationError("edge index out of range")
        return _forest_check(c.edges, chosen, c.vertices)
    if isinstance(c, Matching):
        if chosen and chosen[-1] >= len(c.edges):
            raise ValidationError("edge index out of range")
        used = set()
        for j in chosen:
            u, v = c.edges[j]
            if u in used or v in used:
                return False
            used.update((u, v))
        return True
    if isinstance(c, Packing):
        x = np.zeros(c.A.shape[1])
        if chosen and chosen[-1] >= x.shape[0]:
            raise ValidationError("element index out of range")
        x[chosen] = 1.0
        return bool(np.all(c.A @ x <= c.b + TOL))
    if isinstance(c, PrivateGoods):
        goods_used = set()
        for j in chosen:
            if j >= c.agents * c.goods:
                raise ValidationError("element index out of range")
            g = j // c.agents
            if g in goods_used:
                return False
            goods_used.add(g)
        return True
    raise UnsupportedConstraintError(f"unknown constraint {type(c)!r}")


def constraint_rank(constraint):
    """Common size of all bases, for the families that have bases."""
    if isinstance(constraint, PartitionMatroid):
        return constraint.rank
    if isinstance(constraint, UniformMatroid):
        return constraint.rank
    if isinstance(constraint, GraphicMatroid):
        return graphic_rank(constraint)
    if isinstance(constraint, PrivateGoods):
        return constraint.goods
    raise UnsupportedConstraintError(
        f"{type(constraint).__name__} outcomes have no basis structure"
    )


def is_basis(outcome, constraint, n_elements=None):
    """True iff the outcome is a maximal independent set of a matroid family."""
    chosen = set(int(j) for j in outcome)
    return len(chosen) == constraint_rank(constraint) and is_feasible(
        chosen, constraint, n_elements
    )


def width(constraint):
    """Packing width: the largest row sum divided by its capacity."""
    if not isinstance(constraint, Packing):
        raise UnsupportedConstraintError("width is defined for packing constraints")
    return float(np.max(constraint.A.sum(axis=1) / constraint.b))


# ---------------------------------------------------------------------------
# per-agent optima


def _greedy_max_weight_basis(weights, constraint):
    from .matroid import matroid_oracle  # local import to avoid a cycle

    oracle = matroid_oracle(constraint, len(weights))
    order = np.lexsort((np.arange(len(weights)), -weights))
    chosen = []
    for j in order:
        if oracle.is_independent(chosen + [int(j)]):
            chosen.append(int(j))
            if len(chosen) == oracle.rank:
                break
    return chosen


def _max_matching_value(weights, constraint):
    if len(constraint.edges) > cap("matching_value_edges"):
        raise SizeCapError(
            f"matching brute force capped at {cap('matching_value_edges')} edges",
            "matching_value_edges",
            cap("matching_value_edges"),
        )
    edges = constraint.edges
    m = len(edges)
    best = 0.0

    def rec(start, used, value):
        nonlocal best
        best = max(best, value)
        for j in range(start, m):
            u, v = edges[j]
            if u in used or v in used:
                continue
            rec(j + 1, used | {u, v}, value + weights[j])

    rec(0, frozenset(), 0.0)
    return best


def _max_packing_value(weights, constraint):
    m = constraint.A.shape[1]
    if m > cap("packing_value_elements"):
        raise SizeCapError(
            f"packing brute force capped at {cap('packing_value_elements')} elements",
            "packing_value_elements",
            cap("packing_value_elements"),
        )
    A, b = constraint.A, constraint.b
    best = 0.0

    def rec(j, load, value):
        nonlocal best
        best = max(best, value)
        for k in range(j, m):
            new_load = load + A[:, k]
            if np.all(new_load <= b + TOL):
                rec(k + 1, new_load, value + weights[k])

    rec(0, np.zeros(A.shape[0]), 0.0)
    return best


def max_agent_utility(inst, agent, mode="integral"):
    """Best achievable utility for one agent.

    Integral mode is exact: greedy over matroid families (including private
    goods), brute force with size caps for matchings and packing. Fractional
    mode solves the LP relaxation and is only defined for packing.
    """
    if not 0 <= agent < inst.n_agents:
        raise ValidationError(f"agent index {agent} out of range")
    weights = inst.utilities[agent]
    c = inst.constraint
    if mode == "fractional":
        if not isinstance(c, Packing):
            raise UnsupportedConstraintError(
                "fractional optima are defined for packing constraints"
            )
        from .linprog import LinearProgram, solve_lp

        lp = LinearProgram(objective=weights, sense="max", A_ub=c.A, b_ub=c.b)
        return solve_lp(lp).value
    if mode != "integral":
        raise ValidationError(f"unknown mode {mode!r}")
    if isinstance(c, (PartitionMatroid, UniformMatroid, GraphicMatroid, PrivateGoods)):
        chosen = _greedy_max_weight_basis(weights, c)
        return float(weights[chosen].sum()) if chosen else 0.0
    if isinstance(c, Matching):
        return float(_max_matching_value(weights, c))
    if isinstance(c, Packing):
        return float(_max_packing_value(weights, c))
    raise UnsupportedConstraintError(f"unknown constraint {type(c)!r}")


def agent_optima(inst, mode="integral"):
    """Vector of per-agent optima."""
    return np.array([max_agent_utility(inst, i, mode) for i in range(inst.n_agents)])
