"""Universal strongly convex optimization: a guess-and-check scheme that
detects usable smoothness from observed gradients, its preset configurations,
and a grid search over the unknown strong-convexity modulus."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core_math import AllSpace, ConvexityError, Domain, as_vector, inner, norm
from .problems import GradientOracle, Objective
from .traces import GridSearchResult, GuessCheckPass, GuessCheckTrace

DEGENERATE_DIVERGENCE = 1e-14
NEGATIVE_DIVERGENCE = 1e-12


def empirical_smoothness(
    objective: Objective,
    a,
    b,
    gradient_a: Optional[np.ndarray] = None,
    gradient_b: Optional[np.ndarray] = None,
) -> Optional[float]:
    """Observed smoothness ||g(a) - g(b)||^2 / (2 * divergence(a, b)).

    Returns None when the divergence is numerically zero relative to the
    function values (degenerate pair; any growth ratio is acceptable, as if
    the smoothness were zero). Raises ConvexityError when the divergence is
    negative beyond round-off. Pass precomputed gradients to reuse oracle
    answers instead of re-evaluating.
    """
    a = as_vector(a)
    b = as_vector(b)
    value_a = float(objective.value(a))
    value_b = float(objective.value(b))
    if gradient_a is None:
        gradient_a = objective.gradient(a)
    if gradient_b is None:
        gradient_b = objective.gradient(b)
    divergence = value_a - value_b - inner(gradient_b, a - b)
    scale = max(1.0, abs(value_a), abs(value_b))
    if divergence < -NEGATIVE_DIVERGENCE * scale:
        raise ConvexityError(
            f"negative divergence {divergence:.3e} (non-convex objective or broken gradient)"
        )
    if divergence <= DEGENERATE_DIVERGENCE * scale:
        return None
    return norm(gradient_a - gradient_b) ** 2 / (2.0 * divergence)


CHECK_SLACK = 1e-9


def check_passes(ratio: float, smoothness_estimate: Optional[float], modulus: float) -> bool:
    """Growth-ratio test: 4 * L * ratio^2 <= modulus (degenerate L always passes).

    A relative slack keeps boundary cases (the estimate landing exactly on the
    threshold) from flapping under round-off.
    """
    if smoothness_estimate is None:
        return True
    return 4.0 * smoothness_estimate * ratio * ratio <= modulus * (1.0 + CHECK_SLACK)


def guess_check_run(
    objective: Objective,
    domain: Domain,
    modulus: float,
    ratio_init: float,
    ratio_floor: float,
    budget: int,
    start,
) -> GuessCheckTrace:
    """Core guess-and-check loop.

    State tracks the play x_t, the weighted average of plays, and surrogate
    gradients built from the latest queried gradient at the average. Each
    inner pass guesses a weight-growth ratio, takes a one-step optimistic
    update with step 1/(modulus * total_weight), forms the candidate average,
    and queries its gradient (one query per pass, accepted or not). A guess is
    accepted when it equals the floor, or when the observed smoothness between
    consecutive averages allows it; otherwise the ratio is halved (never below
    the floor) and the pass repeats. The returned trace ends at the last
    accepted average when the budget runs out.

    The recursion is evaluated in weight-normalized form (all surrogate
    vectors divided by the running weight total), which is the same algebra
    with every intermediate bounded; raw weight totals grow geometrically and
    would overflow floats on long smooth runs. Absolute totals are kept for
    the trace, in both linear (possibly saturating) and log form.
    """
    if modulus <= 0:
        raise ValueError("strong-convexity modulus must be positive")
    if not (0.0 < ratio_init <= 1.0):
        raise ValueError("initial ratio must lie in (0, 1]")
    if not (0.0 <= ratio_floor <= ratio_init):
        raise ValueError("ratio floor must lie in [0, ratio_init]")
    if budget < 1:
        raise ValueError("budget must be a positive integer")
    start = as_vector(start)
    if norm(domain.project(start) - start) > 1e-12:
        raise ValueError("initial point must lie in the domain")

    oracle = GradientOracle(objective, budget)
    play = start
    average = start
    grad_average = oracle.gradient(average)
    # weight_share = alpha_t / alpha_{1:t}; optimism_unit = M_t / alpha_t
    weight_share = 1.0
    optimism_unit = np.zeros(objective.dim)
    weight_total = 1.0
    log_weight_total = 0.0
    ratio = ratio_init

    trace = GuessCheckTrace(ratio_floor=ratio_floor)
    trace.accepted_averages.append(average)
    trace.accepted_queries.append(oracle.queries_used)
    trace.accepted_ratios.append(math.nan)
    trace.weight_totals.append(weight_total)
    trace.log_weight_totals.append(log_weight_total)
    trace.step_sizes.append(math.exp(-math.log(modulus) - log_weight_total))
    iteration = 1

    while oracle.remaining > 0:
        # g_t / alpha_{1:t}
        surrogate_unit = weight_share * (grad_average + modulus * (play - average))
        accepted = False
        while oracle.remaining > 0:
            probe = (average + ratio * play) / (1.0 + ratio)
            # M_{t+1} / alpha_{t+1}
            optimism_next_unit = grad_average + modulus * (play - probe)
            eta = math.exp(-math.log(modulus) - log_weight_total)
            # eta_t * (g_t - M_t + M_{t+1}) with all terms relative to alpha_{1:t}
            direction = (
                surrogate_unit
                - weight_share * optimism_unit
                + ratio * optimism_next_unit
            ) / modulus
            play_next = domain.project(play - direction)
            average_next = (average + ratio * play_next) / (1.0 + ratio)
            grad_next = oracle.gradient(average_next)
            shortcut = ratio == ratio_floor
            if shortcut:
                smoothness_estimate = None
                passed = True
            else:
                smoothness_estimate = empirical_smoothness(
                    objective,
                    average,
                    average_next,
                    gradient_a=grad_average,
                    gradient_b=grad_next,
                )
                passed = check_passes(ratio, smoothness_estimate, modulus)
            trace.passes.append(
                GuessCheckPass(
                    candidate_iteration=iteration + 1,
                    query_count=oracle.queries_used,
                    ratio=ratio,
                    accepted=passed,
                    smoothness_estimate=smoothness_estimate,
                    threshold_shortcut=shortcut,
                    step_size=eta,
                )
            )
            if passed:
                iteration += 1
                play = play_next
                average = average_next
                grad_average = grad_next
                optimism_unit = optimism_next_unit
                weight_share = ratio / (1.0 + ratio)
                weight_total = weight_total * (1.0 + ratio)
                log_weight_total += math.log1p(ratio)
                trace.accepted_averages.append(average)
                trace.accepted_queries.append(oracle.queries_used)
                trace.accepted_ratios.append(ratio)
                trace.weight_totals.append(weight_total)
                trace.log_weight_totals.append(log_weight_total)
                trace.step_sizes.append(math.exp(-math.log(modulus) - log_weight_total))
                accepted = True
                break
            ratio = max(ratio / 2.0, ratio_floor)
        if not accepted:
            trace.exhausted_mid_guess = True
            break
    trace.total_queries = oracle.queries_used
    return trace


def safeguard_ratio_floor(budget: int) -> float:
    """Floor exp(ln(budget)/budget) - 1, small enough to keep the weight total
    polynomial in the budget while never stalling the weight growth."""
    if budget < 1:
        raise ValueError("budget must be a positive integer")
    return math.expm1(math.log(budget) / budget)


def minimize_with_safeguard(
    objective: Objective, domain: Domain, modulus: float, budget: int, start
) -> GuessCheckTrace:
    """Configuration for unknown smoothness that may not exist at all: start
    at ratio 1 with the budget-dependent safeguard floor. Accelerates on
    smooth objectives, degrades gracefully on nonsmooth ones."""
    return guess_check_run(
        objective,
        domain,
        modulus,
        ratio_init=1.0,
        ratio_floor=safeguard_ratio_floor(budget),
        budget=budget,
        start=start,
    )


def minimize_known_smoothness(
    objective: Objective,
    domain: Domain,
    modulus: float,
    smoothness: float,
    budget: int,
    start,
) -> GuessCheckTrace:
    """Configuration for a known smoothness constant: pin the ratio at
    sqrt(modulus / (4 * smoothness)) so the check loop never halves."""
    if smoothness < modulus:
        raise ValueError("smoothness constant cannot be below the strong-convexity modulus")
    ratio = math.sqrt(modulus / (4.0 * smoothness))
    return guess_check_run(
        objective,
        domain,
        modulus,
        ratio_init=ratio,
        ratio_floor=ratio,
        budget=budget,
        start=start,
    )


def minimize_unknown_smoothness(
    objective: Objective, domain: Domain, modulus: float, budget: int, start
) -> GuessCheckTrace:
    """Configuration for smooth objectives with unknown constant: ratio floor 0,
    so every accepted step passes the observed-smoothness check. May spend the
    whole budget halving on genuinely nonsmooth inputs (trace flags that)."""
    return guess_check_run(
        objective,
        domain,
        modulus,
        ratio_init=1.0,
        ratio_floor=0.0,
        budget=budget,
        start=start,
    )


def grid_search_minimize(objective: Objective, budget: int, start) -> GridSearchResult:
    """Search over dyadic guesses of the strong-convexity modulus.

    Probes the gradient at two nearby points to get a curvature scale, runs
    the unknown-smoothness configuration once per guess 2^-i * scale on an
    equal share of the budget, and returns the candidate (including the start
    point) with the lowest objective value, ties to the lowest index.
    """
    start = as_vector(start)
    instances = math.ceil(2.0 * math.log2(budget))
    if budget < 2 * instances:
        raise ValueError("budget too small for the number of grid instances")
    domain = AllSpace(start.shape[0])

    grad_start = objective.gradient(start)
    probe_queries = 1
    curvature = 0.0
    offset = np.zeros(start.shape[0])
    for attempt in range(64):
        offset = np.zeros(start.shape[0])
        offset[0] = 2.0**attempt
        grad_offset = objective.gradient(start + offset)
        probe_queries += 1
        gap = norm(grad_start - grad_offset)
        if gap > 0.0:
            curvature = gap / norm(offset)
            break
    else:
        raise ValueError("gradient probe is degenerate: gradients agree at 64 spacings")

    instance_budget = budget // instances
    grid = [2.0**-i * curvature for i in range(1, instances + 1)]
    traces = [
        guess_check_run(
            objective,
            domain,
            modulus=guess,
            ratio_init=1.0,
            ratio_floor=0.0,
            budget=instance_budget,
            start=start,
        )
        for guess in grid
    ]
    candidates = [start] + [trace.final_average for trace in traces]
    values = [float(objective.value(c)) for c in candidates]
    chosen = int(np.argmin(values))
    return GridSearchResult(
        estimate=candidates[chosen],
        chosen_index=chosen,
        curvature_probe=curvature,
        curvature_grid=grid,
        instance_traces=traces,
        candidate_values=values,
        instance_budget=instance_budget,
        total_queries=probe_queries + sum(t.total_queries for t in traces),
    )
