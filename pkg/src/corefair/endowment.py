"""Endowment-scaled core: deviating coalitions get budget, not utility, scaled.

Under this notion a coalition of size s may pick any outcome that fits the
budget scaled by ``(1 - delta) * s / n``, and blocks when every member gains
``(1 + delta)``-fold plus an additive term. The checker scans coalitions
ascending in size against exhaustively enumerated scaled-budget outcomes.

Dependent rounding turns a fractional point into an integral one while
preserving marginals exactly, keeping the selected count within the budget,
and making the indicators negatively correlated.
"""

import math

import numpy as np

from .caps import cap
from .errors import (
    SizeCapError,
    UnsupportedConstraintError,
    ValidationError,
)
from .instance import Packing, normalize_utilities, outcome_utilities
from .verifier import (
    STRICT_TOL,
    CoreCertificate,
    _enum_packing_sets,
    _lex_min_coalition,
    utility_table,
)

_SNAP = 1e-9


def dependent_round(weights, budget, seed):
    """Round a fractional vector to 0/1 preserving marginals and the sum.

    Repeatedly takes the two lowest-index fractional coordinates and shifts
    mass between them by the largest step that makes one of them integral,
    choosing the direction with probabilities that keep expectations exact.
    The rounded sum lands on the floor or ceiling of the fractional sum, so
    integral budgets at least the fractional sum are always respected.
    """
    x = np.asarray(weights, dtype=float).copy()
    if np.any(x < -_SNAP) or np.any(x > 1 + _SNAP):
        raise ValidationError("weights must lie in [0, 1]")
    if x.sum() > budget + _SNAP:
        raise ValidationError("fractional sum exceeds the budget")
    rng = np.random.default_rng(seed)

    def snap(j):
        if abs(x[j]) < _SNAP:
            x[j] = 0.0
        elif abs(x[j] - 1.0) < _SNAP:
            x[j] = 1.0

    for j in range(len(x)):
        snap(j)
    while True:
        frac = [j for j in range(len(x)) if 0.0 < x[j] < 1.0]
        if len(frac) < 2:
            break
        i, j = frac[0], frac[1]
        up = min(1.0 - x[i], x[j])
        down = min(x[i], 1.0 - x[j])
        if rng.random() < down / (up + down):
            x[i] += up
            x[j] -= up
        else:
            x[i] -= down
            x[j] += down
        snap(i)
        snap(j)
    frac = [j for j in range(len(x)) if 0.0 < x[j] < 1.0]
    if frac:
        j = frac[0]
        x[j] = 1.0 if rng.random() < x[j] else 0.0
    return x.astype(int)


def scaled_budget_outcomes(constraint, fraction):
    """Integral outcomes feasible for the budget scaled down to a fraction."""
    if not isinstance(constraint, Packing):
        raise UnsupportedConstraintError(
            "endowment checks require a packing constraint"
        )
    return sorted(_enum_packing_sets(constraint.A, constraint.b * fraction))


def endowment_core_check(inst, outcome, delta, alpha):
    """Certificate for the endowment-scaled core at (delta, alpha).

    A coalition S blocks with c' feasible under the budget scaled by
    ``(1 - delta) |S| / n`` when every member has
    ``u_i(c') >= (1 + delta) u_i(outcome) + alpha`` and one inequality is
    strict. Returns the first witness in (size, deviation) order, or a clean
    certificate naming the search bounds.
    """
    inst = normalize_utilities(inst)
    n = inst.n_agents
    if n > cap("coalition_agents"):
        raise SizeCapError(
            f"coalition search capped at {cap('coalition_agents')} agents",
            "coalition_agents",
            cap("coalition_agents"),
        )
    if inst.n_elements > cap("deviation_elements"):
        raise SizeCapError(
            f"deviation enumeration capped at {cap('deviation_elements')} elements",
            "deviation_elements",
            cap("deviation_elements"),
        )
    base = (1.0 + delta) * outcome_utilities(inst, outcome) + alpha
    scanned = 0
    for s in range(1, n + 1):
        fraction = (1.0 - delta) * s / n
        outs = scaled_budget_outcomes(inst.constraint, fraction)
        table = utility_table(inst, outs)
        scanned += len(outs)
        ok_counts = np.count_nonzero(table >= base - STRICT_TOL, axis=1)
        any_strict = np.any(table > base + STRICT_TOL, axis=1)
        rows = np.nonzero((ok_counts >= s) & any_strict)[0]
        if rows.size:
            row = int(rows[0])
            ok = [int(i) for i in np.nonzero(table[row] >= base - STRICT_TOL)[0]]
            strict = {int(i) for i in np.nonzero(table[row] > base + STRICT_TOL)[0]}
            coalition = _lex_min_coalition(ok, strict, s)
            return CoreCertificate(
                verdict="blocked",
                delta=delta,
                alpha=alpha,
                mode="endowment",
                coalition=coalition,
                deviation=outs[row],
                slacks=tuple(float(table[row][i] - base[i]) for i in coalition),
            )
    return CoreCertificate(
        verdict="clean",
        delta=delta,
        alpha=alpha,
        mode="endowment",
        search={"coalitions": 2**n - 1, "deviations": scanned},
    )


def endowment_additive_bound(delta, budget):
    """Additive approximation scale for unit-size approval instances.

    With ``gamma = delta / 5`` the guarantee kicks in at
    ``(2 / gamma^4) * ln(4 budget / gamma)``; agents whose fractional
    utility sits below this value keep it trivially after rounding.
    """
    if not 0 < delta <= 1:
        raise ValidationError("delta must lie in (0, 1]")
    gamma = delta / 5.0
    return (2.0 / gamma**4) * math.log(4.0 * budget / gamma)
