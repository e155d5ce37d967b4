"""Fractional benchmarks over packing polytopes.

Two solvers live here. The first maximizes the shifted Nash welfare
``sum_i ln(U_i + eps')`` by Frank-Wolfe ascent with exact line search and
stops once a checkable certificate holds: the best total utility-improvement
ratio any deviation can achieve, ``max_w sum_i (u_i(w)+eps')/(U_i+eps')``,
is at most ``n + delta``. That inequality alone makes the outcome a
fractional (delta, epsilon)-core point, independent of how it was found.

The second computes the best uniform fair-share guarantee: the least ``r``
such that some fractional outcome gives every agent ``V_i / r - 1``, where
``V_i`` is the agent's LP optimum. Both the guarantee value and the witness
outcome come from one LP after the per-agent optima are known.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, UnsupportedConstraintError, ValidationError
from .instance import Packing, agent_optima, normalize_utilities, width
from .linprog import LinearProgram, solve_lp

EPS_PRIME_FLOOR = 1e-9


@dataclass
class MnwCertificate:
    """Evidence that a fractional outcome approximates the core.

    ``score`` is the ratio sum achieved by ``worst_deviation`` against the
    returned utilities; ``score <= threshold`` (= n + delta) certifies a
    fractional (delta, epsilon)-core outcome.
    """

    utilities: np.ndarray
    score: float
    threshold: float
    worst_deviation: np.ndarray
    epsilon_prime: float
    ascent_trace: tuple


@dataclass
class MpfResult:
    """Fair-share benchmark: guarantee value, witness outcome, slacks."""

    value: float
    outcome: np.ndarray
    slacks: np.ndarray
    agent_optima: np.ndarray
    degenerate: bool = False


def _packing(inst):
    if not isinstance(inst.constraint, Packing):
        raise UnsupportedConstraintError(
            "fractional solvers require a packing constraint; supply an "
            "explicit packing relaxation for other families"
        )
    return inst.constraint.A, inst.constraint.b


def _line_search(u_now, u_step, eps_prime):
    """Maximize sum(log(u_now + t * u_step + eps')) over t in [0, 1]."""

    def slope(t):
        return float(np.sum(u_step / (u_now + t * u_step + eps_prime)))

    if slope(1.0) >= 0:
        return 1.0
    if slope(0.0) <= 0:
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def fractional_mnw(inst, delta, epsilon, max_rounds=5000):
    """Certified fractional core approximation over a packing polytope.

    Returns ``(weights, certificate)``. Raises ConvergenceError carrying the
    last score if the certificate is not reached within ``max_rounds``.
    """
    if delta <= 0 or epsilon <= 0:
        raise ValidationError("delta and epsilon must be positive")
    inst = normalize_utilities(inst)
    A, b = _packing(inst)
    n, m = inst.n_agents, inst.n_elements
    eps_prime = max(epsilon / (1.0 + delta), EPS_PRIME_FLOOR)
    threshold = n + delta

    # start at the uniformly scaled-down outcome, feasible by the width bound
    rho = max(width(inst.constraint), 1.0)
    w = np.full(m, min(1.0, 1.0 / rho))
    u_of = inst.utilities
    utils = u_of @ w
    trace = [float(np.sum(np.log(utils + eps_prime)))]
    score = None
    for _ in range(max_rounds):
        inv = 1.0 / (utils + eps_prime)
        gradient = u_of.T @ inv
        best = solve_lp(LinearProgram(objective=gradient, A_ub=A, b_ub=b))
        score = best.value + float(eps_prime * np.sum(inv))
        if score <= threshold:
            certificate = MnwCertificate(
                utilities=utils,
                score=score,
                threshold=threshold,
                worst_deviation=best.x,
                epsilon_prime=eps_prime,
                ascent_trace=tuple(trace),
            )
            return w, certificate
        step_utils = u_of @ best.x - utils
        t = _line_search(utils, step_utils, eps_prime)
        w = w + t * (best.x - w)
        utils = utils + t * step_utils
        value = float(np.sum(np.log(utils + eps_prime)))
        if value < trace[-1] - 1e-9:
            raise ConvergenceError(
                "ascent invariant violated in fractional solver", last_score=score
            )
        trace.append(value)
    raise ConvergenceError(
        f"certificate not reached after {max_rounds} rounds "
        f"(last score {score:.6f}, threshold {threshold:.6f})",
        last_score=score,
    )


def certificate_score(inst, utilities, deviation, eps_prime):
    """Re-evaluate the ratio sum of a deviation against given utilities."""
    inst = normalize_utilities(inst)
    dev_utils = inst.utilities @ np.asarray(deviation, dtype=float)
    return float(np.sum((dev_utils + eps_prime) / (utilities + eps_prime)))


def mpf(inst, optima=None):
    """Best fair-share guarantee value, witness outcome, and slacks.

    Solves one LP per agent for the optima ``V_i`` and one more for the
    guarantee. An all-zero instance has no meaningful guarantee; it is
    returned flagged, with the null outcome and value ``V_max`` (= 0).
    """
    inst = normalize_utilities(inst)
    A, b = _packing(inst)
    n, m = inst.n_agents, inst.n_elements
    if optima is None:
        optima = agent_optima(inst, mode="fractional")
    optima = np.asarray(optima, dtype=float)
    v_max = float(optima.max()) if n else 0.0
    if v_max <= 0:
        return MpfResult(
            value=v_max,
            outcome=np.zeros(m),
            slacks=np.ones(n),
            agent_optima=optima,
            degenerate=True,
        )
    # variables (w_1..w_m, r_hat); maximize r_hat with u_i . w >= V_i r_hat - 1
    objective = np.zeros(m + 1)
    objective[-1] = 1.0
    rows = np.hstack([-inst.utilities, optima[:, None]])
    a_ub = np.vstack([rows, np.hstack([A, np.zeros((A.shape[0], 1))])])
    b_ub = np.concatenate([np.ones(n), b])
    bounds = [(0.0, 1.0)] * m + [(0.0, None)]
    sol = solve_lp(
        LinearProgram(objective=objective, A_ub=a_ub, b_ub=b_ub, bounds=bounds)
    )
    r_hat = sol.value
    outcome = sol.x[:m]
    value = 1.0 / r_hat
    slacks = inst.utilities @ outcome - (optima / value - 1.0)
    return MpfResult(
        value=value, outcome=outcome, slacks=slacks, agent_optima=optima
    )
