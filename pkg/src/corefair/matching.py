"""Local search over matchings using bounded-size augmentations.

An augmentation is a matching T disjoint from the current one; applying it
removes the current edges that share a vertex with T and inserts T. The
solver scans augmentations of size at most ``kappa = ceil(2 / delta)`` in
lexicographic order on sorted edge indices, accepting the first one that
improves the smoothed objective (shift ``1 + 2 kappa``) by at least
``n / (kappa r)``. The local optimum approximates the core at
``(delta, 8 + 6/delta)``.
"""

import math

import numpy as np

from .errors import ConvergenceError, UnsupportedConstraintError, ValidationError
from .instance import Matching, normalize_utilities, outcome_utilities
from .objective import smooth_nash
from .reports import SolverReport

TOL = 1e-9


def augmentation_params(delta, n_agents, vertices):
    """Derive (kappa, shift, threshold) from the multiplicative tolerance."""
    if not 0 < delta <= 1:
        raise ValidationError("delta must lie in (0, 1]")
    kappa = math.ceil(2.0 / delta)
    shift = 1.0 + 2 * kappa
    threshold = n_agents / (kappa * vertices)
    return kappa, shift, threshold


def conflicting_edges(edges, current, augmentation):
    """Edges of the current matching sharing a vertex with the augmentation."""
    touched = set()
    for j in augmentation:
        touched.update(edges[j])
    return frozenset(
        j for j in current if edges[j][0] in touched or edges[j][1] in touched
    )


def enumerate_augmentations(edges, current, kappa):
    """Yield every augmentation of size 1..kappa with its conflict set.

    Order is lexicographic on sorted edge-index tuples: (0,), (0,1), (0,2),
    ..., (1,), (1,2), and so on. Each yielded T is a matching disjoint from
    the current edge set.
    """
    current = frozenset(current)
    m = len(edges)
    matched_at = {}
    for j in current:
        u, v = edges[j]
        matched_at[u] = j
        matched_at[v] = j
    candidates = [j for j in range(m) if j not in current]

    def rec(start, stack, used_vertices, conflicts):
        for idx in range(start, len(candidates)):
            j = candidates[idx]
            u, v = edges[j]
            if u in used_vertices or v in used_vertices:
                continue
            new_conflicts = conflicts | {
                matched_at[w] for w in (u, v) if w in matched_at
            }
            stack.append(j)
            yield tuple(stack), frozenset(new_conflicts)
            if len(stack) < kappa:
                yield from rec(idx + 1, stack, used_vertices | {u, v}, new_conflicts)
            stack.pop()

    yield from rec(0, [], set(), set())


def local_search_matching(inst, delta):
    """Augmentation local search on the smoothed objective over matchings."""
    if not isinstance(inst.constraint, Matching):
        raise UnsupportedConstraintError("matching solver needs a matching constraint")
    inst = normalize_utilities(inst)
    edges = inst.constraint.edges
    n, m, r = inst.n_agents, inst.n_elements, inst.constraint.vertices
    kappa, shift, threshold = augmentation_params(delta, n, r)
    max_iterations = math.ceil(kappa * r * math.log(1 + m / shift)) + 1

    outcome = frozenset()
    u = outcome_utilities(inst, outcome)
    value = smooth_nash(inst, outcome, shift)
    trace = [value]
    moves = []
    for _ in range(max_iterations):
        accepted = None
        for aug, conflicts in enumerate_augmentations(edges, outcome, kappa):
            delta_u = inst.utilities[:, list(aug)].sum(axis=1)
            if conflicts:
                delta_u = delta_u - inst.utilities[:, list(conflicts)].sum(axis=1)
            gain = float(np.sum(np.log(shift + u + delta_u) - np.log(shift + u)))
            if gain >= threshold:
                accepted = (aug, conflicts, delta_u, gain)
                break
        if accepted is None:
            return SolverReport(
                solver="matching-local-search",
                outcome=tuple(sorted(outcome)),
                objective_trace=tuple(trace),
                iterations=len(moves),
                seed=None,
                diagnostics={
                    "delta": delta,
                    "kappa": kappa,
                    "shift": shift,
                    "threshold": threshold,
                    "moves": moves,
                },
            )
        aug, conflicts, delta_u, gain = accepted
        outcome = (outcome - conflicts) | set(aug)
        u = u + delta_u
        value += gain
        trace.append(value)
        moves.append((sorted(aug), sorted(conflicts)))
    raise ConvergenceError(
        "matching local search exceeded its iteration bound; this indicates "
        "an objective arithmetic bug",
        last_score=value,
    )


def _difference_components(edges, current, target):
    """Paths and cycles of the symmetric difference, edges in traversal order."""
    diff = sorted(set(current) ^ set(target))
    incident = {}
    for j in diff:
        for w in edges[j]:
            incident.setdefault(w, []).append(j)
    unvisited = set(diff)
    components = []
    # walk paths first (start at degree-1 vertices), then leftover cycles
    starts = sorted(w for w, js in incident.items() if len(js) == 1)
    for source in list(starts) + sorted(incident):
        for j0 in incident.get(source, ()):
            if j0 not in unvisited:
                continue
            ordered = []
            vertex, edge = source, j0
            while edge is not None and edge in unvisited:
                unvisited.discard(edge)
                ordered.append(edge)
                u, v = edges[edge]
                vertex = v if u == vertex else u
                edge = next(
                    (k for k in incident.get(vertex, ()) if k in unvisited), None
                )
            components.append(ordered)
    return components


def build_opt_multiset(edges, current, target, kappa, w, w_prime):
    """Multiset of small augmentations toward a target matching.

    Decomposes the symmetric difference into alternating paths and cycles.
    Components contributing at most ``kappa`` target edges are repeated
    ``kappa`` times; longer ones are cut into all cyclic windows of ``kappa``
    consecutive target edges. The result satisfies: every member is a subset
    of the target with size at most ``kappa``; the multiset has at most
    ``kappa * vertices`` members; and the total gain is at least
    ``kappa * W' - (kappa + 1) * W`` for edge weights ``w >= w_prime``.
    """
    w = np.asarray(w, dtype=float)
    w_prime = np.asarray(w_prime, dtype=float)
    if kappa < 1:
        raise ValidationError("kappa must be at least 1")
    if np.any(w + TOL < w_prime):
        raise ValidationError("weights must dominate the primed weights")
    current = frozenset(current)
    target = frozenset(target)
    multiset = []
    for ordered in _difference_components(edges, current, target):
        t_edges = [j for j in ordered if j in target]
        t = len(t_edges)
        if t == 0:
            continue
        if t <= kappa:
            multiset.extend([tuple(t_edges)] * kappa)
        else:
            for start in range(t):
                window = tuple(t_edges[(start + i) % t] for i in range(kappa))
                multiset.append(window)
    return multiset


def multiset_gain(edges, current, multiset, w, w_prime):
    """Total gain of a multiset of augmentations."""
    total = 0.0
    for aug in multiset:
        conflicts = conflicting_edges(edges, current, aug)
        total += sum(w_prime[j] for j in aug) - sum(w[j] for j in conflicts)
    return total
