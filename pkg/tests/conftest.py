"""Shared independent oracles for cross-checking the package under test.

These helpers deliberately re-derive results with plain loops and brute
force so that the vectorized implementations are checked against something
slower but obviously faithful to the definitions.
"""

import itertools

import numpy as np
import pytest

from corefair import outcome_utilities


def naive_blocking_exists(inst, outcome, delta, alpha, deviations):
    """Reference core check: explicit loops over coalitions and deviations."""
    n = inst.n_agents
    base = (1.0 + delta) * outcome_utilities(inst, outcome) + alpha
    tables = [outcome_utilities(inst, c) for c in deviations]
    for s in range(1, n + 1):
        for coalition in itertools.combinations(range(n), s):
            for uc in tables:
                scaled = (s / n) * uc
                weak = all(scaled[i] >= base[i] - 1e-9 for i in coalition)
                strict = any(scaled[i] > base[i] + 1e-9 for i in coalition)
                if weak and strict:
                    return True
    return False


def box_polytope_vertices(A, b):
    """All vertices of {w : A w <= b, 0 <= w <= 1} by basis enumeration."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    m = A.shape[1]
    rows = np.vstack([A, np.eye(m), -np.eye(m)])
    rhs = np.concatenate([np.asarray(b, dtype=float).ravel(), np.ones(m), np.zeros(m)])
    vertices = []
    for combo in itertools.combinations(range(rows.shape[0]), m):
        sub = rows[list(combo)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        v = np.linalg.solve(sub, rhs[list(combo)])
        if np.all(rows @ v <= rhs + 1e-8):
            if not any(np.allclose(v, w, atol=1e-8) for w in vertices):
                vertices.append(v)
    return vertices


def brute_force_matchings(edges):
    """Every matching as a sorted tuple of edge indices, via subset filter."""
    m = len(edges)
    result = []
    for size in range(m + 1):
        for combo in itertools.combinations(range(m), size):
            seen = set()
            ok = True
            for j in combo:
                u, v = edges[j]
                if u in seen or v in seen:
                    ok = False
                    break
                seen.update((u, v))
            if ok:
                result.append(combo)
    return result


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
