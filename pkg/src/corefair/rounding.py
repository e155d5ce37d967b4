"""Randomized rounding of fractional outcomes under packing constraints.

The rounding mixes a small amount of the fair-share outcome into the
fractional core point, scales down by ``1 - gamma`` with ``gamma = delta/8``,
and samples elements independently. Feasibility is retried with per-trial
substreams derived from ``(seed, trial)``. Diagnostics group the agents by
exponentially shrinking optimum scales and record which agents fell far
below their fractional utility; the diagnostics never gate acceptance, only
feasibility does.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InfeasibleError, UnsupportedConstraintError, ValidationError
from .fractional import fractional_mnw, mpf
from .instance import Packing, agent_optima, normalize_utilities, outcome_utilities
from .reports import SolverReport

TOL = 1e-9


@dataclass(frozen=True)
class RoundingConfig:
    delta: float
    seed: int
    retries: int = 200

    def __post_init__(self):
        if not 0 < self.delta < 1:
            raise ValidationError("delta must lie in (0, 1)")
        if self.retries < 1:
            raise ValidationError("retries must be positive")

    @property
    def gamma(self):
        return self.delta / 8.0


def log_star(x):
    """Iterations of ln until the value drops to 1 or below."""
    count = 0
    x = float(x)
    while x > 1.0:
        x = math.log(x)
        count += 1
    return count


@dataclass
class GroupingDiagnostics:
    """Agent groups by optimum scale, with violation sets once completed.

    ``levels`` holds the scale cutoffs; agents in group ``g < light_index``
    have log-optimum between ``levels[g+1]`` and ``levels[g]``, the light
    group collects the rest. ``violations`` and the bound flags are filled
    in by :func:`violation_sets` after a rounded outcome is available.
    """

    levels: tuple
    light_index: int
    group_of: tuple
    stop_threshold: float
    flagged_trivial: bool = False
    violations: tuple = None
    heavy_bound_ok: bool = None
    light_bound_ok: bool = None
    multiplicative_slack: float = None
    additive_slack: float = None

    def groups(self):
        out = [[] for _ in range(self.light_index + 1)]
        for agent, g in enumerate(self.group_of):
            out[g].append(agent)
        return [tuple(g) for g in out]

    def to_dict(self):
        payload = {
            "levels": list(self.levels),
            "light_index": self.light_index,
            "group_sizes": [len(g) for g in self.groups()],
            "stop_threshold": self.stop_threshold,
            "flagged_trivial": self.flagged_trivial,
        }
        if self.violations is not None:
            payload.update(
                {
                    "violations": [list(v) for v in self.violations],
                    "violation_fractions": [
                        len(v) / len(g) if g else 0.0
                        for v, g in zip(self.violations, self.groups())
                    ],
                    "heavy_bound_ok": self.heavy_bound_ok,
                    "light_bound_ok": self.light_bound_ok,
                }
            )
        return payload


def level_schedule(q0, floor):
    """The cutoff recurrence: start at q0, then double-log until below floor."""
    levels = [float(q0)]
    while True:
        nxt = 2.0 * math.log(levels[-1]) if levels[-1] > 0 else float("-inf")
        if nxt >= floor:
            levels.append(nxt)
        else:
            return levels


def grouping(inst, config, guarantee_value, optima=None):
    """Assign agents to scale groups given the fair-share guarantee value.

    The deepest cutoff is the last recurrence value at least
    ``max(2, ln(R * max(1, log* V_max) / gamma^3))``; everything below it is
    the light group. Instances with ``V_max <= 1`` collapse to a single
    light group, flagged.
    """
    inst = normalize_utilities(inst)
    if optima is None:
        optima = agent_optima(inst, mode="fractional")
    optima = np.asarray(optima, dtype=float)
    v_max = float(optima.max()) if optima.size else 0.0
    gamma = config.gamma
    if v_max <= 1.0:
        return GroupingDiagnostics(
            levels=(math.log(v_max) if v_max > 0 else float("-inf"),),
            light_index=0,
            group_of=tuple(0 for _ in range(inst.n_agents)),
            stop_threshold=float("nan"),
            flagged_trivial=True,
        )
    stars = max(1.0, float(log_star(v_max)))
    stop = max(2.0, math.log(max(guarantee_value, TOL) * stars / gamma**3))
    levels = level_schedule(math.log(v_max), stop)
    light = len(levels) - 1
    log_v = np.where(optima > 0, np.log(np.maximum(optima, TOL)), float("-inf"))
    group_of = []
    for lv in log_v:
        g = light
        for idx in range(light):
            if lv >= levels[idx + 1]:
                g = idx
                break
        group_of.append(g)
    return GroupingDiagnostics(
        levels=tuple(levels),
        light_index=light,
        group_of=tuple(group_of),
        stop_threshold=stop,
    )


def violation_sets(inst, fractional, rounded, diagnostics, config):
    """Complete the diagnostics with per-group violation sets and bound flags.

    A heavy-group agent violates when its rounded utility falls below
    ``(1 - 3 gamma)`` times its fractional utility; a light-group agent must
    also fall more than the additive slack below it.
    """
    inst = normalize_utilities(inst)
    gamma = config.gamma
    target = outcome_utilities(inst, np.asarray(fractional, dtype=float))
    achieved = outcome_utilities(inst, rounded)
    light = diagnostics.light_index
    q_light = diagnostics.levels[light]
    additive = (
        4.0 * q_light / gamma**4 if math.isfinite(q_light) else float("inf")
    )
    groups = diagnostics.groups()
    violations = []
    for g, members in enumerate(groups):
        bad = []
        for i in members:
            short = achieved[i] < (1.0 - 3.0 * gamma) * target[i] - TOL
            if g == light:
                short = short and achieved[i] < target[i] - additive - TOL
            if short:
                bad.append(i)
        violations.append(tuple(bad))
    heavy_ok = all(
        len(violations[g]) <= len(groups[g]) / (2.0 * light * math.exp(diagnostics.levels[g]))
        for g in range(light)
    )
    light_ok = len(violations[light]) <= (
        len(groups[light]) / (2.0 * math.exp(q_light)) if math.isfinite(q_light) else 0
    ) or len(violations[light]) == 0
    return replace(
        diagnostics,
        violations=tuple(violations),
        heavy_bound_ok=heavy_ok,
        light_bound_ok=bool(light_ok),
        multiplicative_slack=1.0 - 3.0 * gamma,
        additive_slack=additive,
    )


def mixed_sampling_probs(x, y, gamma):
    """Per-element sampling probabilities: (1-gamma) * ((1-gamma) x + gamma y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (1.0 - gamma) * ((1.0 - gamma) * x + gamma * y)


def trial_rng(seed, trial):
    """Deterministic substream for one retry, independent across trials."""
    return np.random.default_rng([int(seed), int(trial)])


def round_outcome(inst, x, y, config, guarantee_value=None, optima=None):
    """Sample an integral outcome from the mixed fractional point.

    Retries until the packing constraints hold or the retry budget is
    exhausted, in which case an infeasibility error carries the empirical
    failure fraction. The report contains the accepted draw, the retry
    count, and completed grouping diagnostics.
    """
    inst = normalize_utilities(inst)
    if not isinstance(inst.constraint, Packing):
        raise UnsupportedConstraintError("rounding requires a packing constraint")
    A, b = inst.constraint.A, inst.constraint.b
    probs = mixed_sampling_probs(x, y, config.gamma)
    if optima is None:
        optima = agent_optima(inst, mode="fractional")
    if guarantee_value is None:
        guarantee_value = mpf(inst, optima=optima).value
    chosen = None
    for trial in range(config.retries):
        rng = trial_rng(config.seed, trial)
        draw = rng.random(inst.n_elements) < probs
        if np.all(A @ draw.astype(float) <= b + TOL):
            chosen = tuple(int(j) for j in np.nonzero(draw)[0])
            break
    if chosen is None:
        raise InfeasibleError(
            f"no feasible draw in {config.retries} retries; capacities are "
            "likely too small for concentration",
            failure_fraction=1.0,
            attempts=config.retries,
        )
    diagnostics = grouping(inst, config, guarantee_value, optima=optima)
    diagnostics = violation_sets(inst, x, chosen, diagnostics, config)
    return SolverReport(
        solver="packing-rounding",
        outcome=chosen,
        objective_trace=(),
        iterations=trial + 1,
        seed=config.seed,
        diagnostics={
            "delta": config.delta,
            "gamma": config.gamma,
            "retries_used": trial + 1,
            "retry_budget": config.retries,
            "guarantee_value": guarantee_value,
            "grouping": diagnostics.to_dict(),
        },
    )


def chernoff_mixture_bound(a, b, gamma):
    """Lower-tail bound for a sum with mean ``(1-gamma) a + gamma b``.

    The probability that the sum falls below ``(1 - 2 gamma) a`` is at most
    ``exp(-(gamma^3 / 2) * max(b, a / 2))``.
    """
    if not 0 < gamma < 0.5:
        raise ValidationError("gamma must lie in (0, 1/2)")
    if a < 0 or b < 0:
        raise ValidationError("tail bound arguments must be nonnegative")
    return math.exp(-(gamma**3 / 2.0) * max(b, a / 2.0))


def simulate_mixture_lower_tail(a, b, gamma, trials, seed):
    """Monte-Carlo estimate of the tail the bound controls.

    Draws sums of independent Bernoulli variables with the prescribed mean
    and returns the empirical frequency of falling below ``(1 - 2 gamma) a``.
    """
    mean = (1.0 - gamma) * a + gamma * b
    if mean <= 0:
        return 0.0
    q = max(int(math.ceil(2.0 * mean)), 1)
    p = mean / q
    rng = np.random.default_rng(seed)
    sums = rng.binomial(q, p, size=trials)
    return float(np.mean(sums < (1.0 - 2.0 * gamma) * a))


def packing_alpha_target(diagnostics, gamma):
    """Additive approximation target implied by the light-group cutoff."""
    q_light = diagnostics.levels[diagnostics.light_index]
    if not math.isfinite(q_light):
        return 0.0
    return 5.0 * max(q_light, 0.0) / gamma**4


def solve_packing(inst, delta, seed, retries=200, epsilon=0.01, max_rounds=5000):
    """Full pipeline: fractional core point, fair-share outcome, rounding.

    The report carries the additive target the rounded outcome is expected
    to satisfy together with the certificate score and guarantee value of
    the two fractional stages.
    """
    inst = normalize_utilities(inst)
    config = RoundingConfig(delta=delta, seed=seed, retries=retries)
    x, certificate = fractional_mnw(inst, delta, epsilon, max_rounds=max_rounds)
    optima = agent_optima(inst, mode="fractional")
    fair = mpf(inst, optima=optima)
    report = round_outcome(
        inst, x, fair.outcome, config, guarantee_value=fair.value, optima=optima
    )
    diagnostics = grouping(inst, config, fair.value, optima=optima)
    report.solver = "packing-pipeline"
    report.diagnostics.update(
        {
            "alpha_target": packing_alpha_target(diagnostics, config.gamma),
            "certificate_score": certificate.score,
            "certificate_threshold": certificate.threshold,
            "epsilon": epsilon,
            "guarantee_value": fair.value,
            "fractional_utilities": list(certificate.utilities),
        }
    )
    return report
