"""Exhaustive core verification, Pareto checks, and exact optimizers.

Everything here is an oracle for desk-scale instances: coalitions are scanned
in ascending size with early exit, and deviation outcomes are enumerated
exhaustively (with size caps) or, in fractional mode, optimized by one LP per
coalition. A blocking witness consists of a coalition, a deviating outcome,
and the per-agent slack values of the blocking inequalities; "at least one
strict" is applied as slack greater than 1e-9.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from .caps import cap
from .errors import SizeCapError, UnsupportedConstraintError, ValidationError
from .instance import (
    GraphicMatroid,
    Matching,
    Packing,
    PartitionMatroid,
    PrivateGoods,
    UniformMatroid,
    agent_optima,
    constraint_rank,
    normalize_utilities,
    outcome_utilities,
)
from .linprog import LinearProgram, solve_lp
from .reports import dump_json

STRICT_TOL = 1e-9
LP_STRICT_TOL = 1e-7


@dataclass
class CoreCertificate:
    """Verdict of a core check, with a witness when blocked."""

    verdict: str
    delta: float
    alpha: float
    mode: str
    coalition: tuple = None
    deviation: object = None
    slacks: tuple = None
    search: dict = field(default_factory=dict)

    @property
    def blocked(self):
        return self.verdict == "blocked"

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "delta": self.delta,
            "alpha": self.alpha,
            "mode": self.mode,
            "coalition": list(self.coalition) if self.coalition else None,
            "deviation": (
                list(self.deviation) if self.deviation is not None else None
            ),
            "slacks": list(self.slacks) if self.slacks else None,
            "search": self.search,
        }

    def to_json(self):
        return dump_json(self.to_dict())


# ---------------------------------------------------------------------------
# outcome enumeration


def _enum_matchings(edges):
    out = []

    def rec(start, stack, used):
        out.append(tuple(stack))
        for j in range(start, len(edges)):
            u, v = edges[j]
            if u in used or v in used:
                continue
            stack.append(j)
            rec(j + 1, stack, used | {u, v})
            stack.pop()

    rec(0, [], set())
    return out


def _enum_packing_sets(A, b):
    m = A.shape[1]
    out = []

    def rec(start, stack, load):
        out.append(tuple(stack))
        for j in range(start, m):
            new_load = load + A[:, j]
            if np.all(new_load <= b + STRICT_TOL):
                stack.append(j)
                rec(j + 1, stack, new_load)
                stack.pop()

    rec(0, [], np.zeros(A.shape[0]))
    return out


def _enum_forests(edges, vertices, exact_size=None):
    out = []

    def find(parent, x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def rec(start, stack, parent):
        if exact_size is None or len(stack) == exact_size:
            out.append(tuple(stack))
        for j in range(start, len(edges)):
            u, v = edges[j]
            p = list(parent)
            ru, rv = find(p, u), find(p, v)
            if ru == rv:
                continue
            p[ru] = rv
            stack.append(j)
            rec(j + 1, stack, p)
            stack.pop()

    rec(0, [], list(range(vertices)))
    return out


def _enum_partition(groups, full):
    """Bases (one per nonempty group) or independent sets (at most one)."""
    pools = [sorted(g) for g in groups if g]
    if not full:
        pools = [[None] + pool for pool in pools]
    out = []
    for combo in itertools.product(*pools):
        out.append(tuple(sorted(j for j in combo if j is not None)))
    return out


def _enum_private(constraint, full):
    n, g = constraint.agents, constraint.goods
    pools = []
    for good in range(g):
        copies = [good * n + i for i in range(n)]
        pools.append(copies if full else [None] + copies)
    out = []
    for combo in itertools.product(*pools):
        out.append(tuple(sorted(j for j in combo if j is not None)))
    return out


def _check_enum_caps(inst):
    c = inst.constraint
    if isinstance(c, PrivateGoods):
        if c.agents > cap("private_agents") or c.goods > cap("private_goods"):
            raise SizeCapError(
                "private-goods enumeration capped at "
                f"{cap('private_agents')} agents x {cap('private_goods')} goods",
                "private_goods",
                cap("private_goods"),
            )
    elif inst.n_elements > cap("deviation_elements"):
        raise SizeCapError(
            f"deviation enumeration capped at {cap('deviation_elements')} elements",
            "deviation_elements",
            cap("deviation_elements"),
        )


def feasible_outcomes(inst, space="deviation", allow_independent=False):
    """Enumerate outcomes, sorted lexicographically on sorted index tuples.

    ``space="solver"`` is the search space of the solvers: bases for the
    matroid families, every matching or packing-feasible set otherwise.
    ``space="deviation"`` is what a coalition may deviate to; it matches the
    solver space except that committee (uniform-matroid) deviations may have
    any size up to the rank, and ``allow_independent=True`` relaxes the
    remaining matroid families from bases to independent sets.
    """
    _check_enum_caps(inst)
    c = inst.constraint
    m = inst.n_elements
    if space not in ("solver", "deviation"):
        raise ValidationError(f"unknown outcome space {space!r}")
    want_bases = space == "solver" or not allow_independent
    if isinstance(c, PartitionMatroid):
        outs = _enum_partition(c.groups, full=want_bases)
    elif isinstance(c, UniformMatroid):
        if space == "solver":
            outs = [tuple(t) for t in itertools.combinations(range(m), c.rank)]
        else:
            outs = [
                tuple(t)
                for size in range(c.rank + 1)
                for t in itertools.combinations(range(m), size)
            ]
    elif isinstance(c, GraphicMatroid):
        size = constraint_rank(c) if want_bases else None
        outs = _enum_forests(c.edges, c.vertices, exact_size=size)
    elif isinstance(c, Matching):
        outs = _enum_matchings(c.edges)
    elif isinstance(c, Packing):
        outs = _enum_packing_sets(c.A, c.b)
    elif isinstance(c, PrivateGoods):
        outs = _enum_private(c, full=want_bases)
    else:
        raise UnsupportedConstraintError(f"unknown constraint {type(c)!r}")
    return sorted(outs)


def utility_table(inst, outcomes):
    """Matrix of agent utilities, one row per enumerated outcome."""
    table = np.zeros((len(outcomes), inst.n_agents))
    for row, chosen in enumerate(outcomes):
        if chosen:
            table[row] = inst.utilities[:, list(chosen)].sum(axis=1)
    return table


# ---------------------------------------------------------------------------
# blocking coalitions


def _lex_min_coalition(eligible, strict, size):
    """Lexicographically smallest size-subset of eligible hitting strict."""
    chosen = []
    have_strict = False
    for idx, agent in enumerate(eligible):
        if len(chosen) == size:
            break
        rest = eligible[idx + 1 :]
        need_after = size - len(chosen) - 1
        takes_strict = have_strict or agent in strict
        strict_later = any(a in strict for a in rest)
        if len(rest) < need_after:
            continue
        if not takes_strict and not (need_after >= 1 and strict_later):
            continue
        chosen.append(agent)
        have_strict = takes_strict
    return tuple(chosen)


def _blocked_certificate(inst, outcome, delta, alpha, mode, s, deviation, scaled, base):
    ok = [int(i) for i in np.nonzero(scaled >= base - STRICT_TOL)[0]]
    strict = {int(i) for i in np.nonzero(scaled > base + STRICT_TOL)[0]}
    coalition = _lex_min_coalition(ok, strict, s)
    slacks = tuple(float(scaled[i] - base[i]) for i in coalition)
    return CoreCertificate(
        verdict="blocked",
        delta=delta,
        alpha=alpha,
        mode=mode,
        coalition=coalition,
        deviation=deviation,
        slacks=slacks,
    )


def find_blocking_coalition(
    inst, outcome, delta, alpha, mode="integral", allow_independent=False
):
    """Search for a coalition and deviation blocking the outcome.

    Integral mode enumerates every deviation outcome; coalition sizes are
    scanned in ascending order and the reported witness is the first one in
    (size, deviation, lexicographic-coalition) order. Fractional mode solves
    one LP per coalition over the packing polytope and declares blocking
    when the maximin slack exceeds 1e-7.
    """
    inst = normalize_utilities(inst)
    n = inst.n_agents
    if n > cap("coalition_agents"):
        raise SizeCapError(
            f"coalition search capped at {cap('coalition_agents')} agents",
            "coalition_agents",
            cap("coalition_agents"),
        )
    base = (1.0 + delta) * outcome_utilities(inst, outcome) + alpha

    if mode == "integral":
        outs = feasible_outcomes(inst, "deviation", allow_independent)
        table = utility_table(inst, outs)
        for s in range(1, n + 1):
            scaled = (s / n) * table
            ok_counts = np.count_nonzero(scaled >= base - STRICT_TOL, axis=1)
            any_strict = np.any(scaled > base + STRICT_TOL, axis=1)
            rows = np.nonzero((ok_counts >= s) & any_strict)[0]
            if rows.size:
                row = int(rows[0])
                return _blocked_certificate(
                    inst, outcome, delta, alpha, mode, s, outs[row], scaled[row], base
                )
        return CoreCertificate(
            verdict="clean",
            delta=delta,
            alpha=alpha,
            mode=mode,
            search={"coalitions": 2**n - 1, "deviations": len(outs)},
        )

    if mode == "fractional":
        if not isinstance(inst.constraint, Packing):
            raise UnsupportedConstraintError(
                "fractional verification requires a packing constraint"
            )
        A, b = inst.constraint.A, inst.constraint.b
        m = inst.n_elements
        checked = 0
        for s in range(1, n + 1):
            req = (n / s) * base
            for coalition in itertools.combinations(range(n), s):
                checked += 1
                rows = np.hstack(
                    [-inst.utilities[list(coalition)], np.ones((s, 1))]
                )
                a_ub = np.vstack([rows, np.hstack([A, np.zeros((A.shape[0], 1))])])
                b_ub = np.concatenate([-req[list(coalition)], b])
                objective = np.zeros(m + 1)
                objective[-1] = 1.0
                bounds = [(0.0, 1.0)] * m + [(None, None)]
                sol = solve_lp(
                    LinearProgram(
                        objective=objective, A_ub=a_ub, b_ub=b_ub, bounds=bounds
                    )
                )
                if sol.value > LP_STRICT_TOL:
                    weights = sol.x[:m]
                    scaled = (s / n) * (inst.utilities @ weights)
                    slacks = tuple(float(scaled[i] - base[i]) for i in coalition)
                    return CoreCertificate(
                        verdict="blocked",
                        delta=delta,
                        alpha=alpha,
                        mode=mode,
                        coalition=coalition,
                        deviation=weights,
                        slacks=slacks,
                    )
        return CoreCertificate(
            verdict="clean",
            delta=delta,
            alpha=alpha,
            mode=mode,
            search={"coalitions": checked},
        )

    raise ValidationError(f"unknown verification mode {mode!r}")


def alpha_achieved(inst, outcome, delta, allow_independent=False):
    """Smallest additive slack at which no coalition strictly blocks.

    The outcome is a (delta, alpha)-core outcome exactly for alpha at or
    above the returned value (strictness resolved by the 1e-9 convention).
    """
    inst = normalize_utilities(inst)
    n = inst.n_agents
    base = (1.0 + delta) * outcome_utilities(inst, outcome)
    outs = feasible_outcomes(inst, "deviation", allow_independent)
    table = utility_table(inst, outs)
    best = -np.inf
    for s in range(1, n + 1):
        gains = (s / n) * table - base
        kth = np.partition(gains, n - s, axis=1)[:, n - s]
        best = max(best, float(kth.max()))
    return best


# ---------------------------------------------------------------------------
# proportionality, Pareto, exact optimum


def is_proportional(inst, outcome, beta=1.0):
    """Whether every agent reaches beta times its fair share V_i / n.

    Returns ``(ok, margins)`` with per-agent margins
    ``u_i(outcome) - beta * V_i / n``.
    """
    inst = normalize_utilities(inst)
    achieved = outcome_utilities(inst, outcome)
    optima = agent_optima(inst, mode="integral")
    margins = achieved - beta * optima / inst.n_agents
    return bool(np.all(margins >= -STRICT_TOL)), margins


def is_pareto_optimal(inst, outcome, allow_independent=False):
    """Whether no feasible outcome weakly dominates this one.

    Equivalent to a full-coalition core check at zero slack. Returns
    ``(ok, witness)`` with a dominating outcome when one exists.
    """
    inst = normalize_utilities(inst)
    achieved = outcome_utilities(inst, outcome)
    outs = feasible_outcomes(inst, "deviation", allow_independent)
    table = utility_table(inst, outs)
    dominating = np.all(table >= achieved - STRICT_TOL, axis=1) & np.any(
        table > achieved + STRICT_TOL, axis=1
    )
    rows = np.nonzero(dominating)[0]
    if rows.size:
        return False, outs[int(rows[0])]
    return True, None


def exact_smooth_mnw(inst, shift):
    """Global maximizer of the smoothed Nash welfare over the solver space.

    Shift zero applies the two-tier convention: maximize the number of
    agents with positive utility first, the product over them second. Ties
    break to the lexicographically smallest outcome.
    """
    inst = normalize_utilities(inst)
    outs = feasible_outcomes(inst, "solver")
    table = utility_table(inst, outs)
    if shift == 0:
        positive = table > 0
        counts = positive.sum(axis=1)
        logs = np.where(positive, np.log(np.where(positive, table, 1.0)), 0.0)
        logsum = logs.sum(axis=1)
        best_row = 0
        for row in range(1, len(outs)):
            # ties (within tolerance) keep the earlier, lexicographically
            # smaller outcome
            if (counts[row], logsum[row]) > (
                counts[best_row],
                logsum[best_row] + STRICT_TOL,
            ):
                best_row = row
        return frozenset(outs[best_row])
    scores = np.sum(np.log(shift + table), axis=1)
    return frozenset(outs[int(np.argmax(scores))])
