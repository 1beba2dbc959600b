"""Online-to-batch conversion with stabilized gradient evaluation, and the
universal convex optimizer built on it."""

from __future__ import annotations

import math
from typing import Optional, Sequence

import numpy as np

from .core_math import Domain, as_vector, inner
from .online_learners import AdaGradSchedule, DEFAULT_FLOOR, OptimisticOGD
from .problems import GradientOracle, Objective
from .traces import ConversionTrace

RECOMPUTE_EVERY = 1024


class WeightedRunningAverage:
    """Incrementally maintained weighted mean of pushed points.

    Every RECOMPUTE_EVERY pushes the running sums are rebuilt from the stored
    history, which bounds floating-point drift in long runs.
    """

    def __init__(self, dim: int):
        self._weights: list[float] = []
        self._points: list[np.ndarray] = []
        self._sum = np.zeros(dim)
        self._total = 0.0

    @property
    def count(self) -> int:
        return len(self._weights)

    @property
    def weight_total(self) -> float:
        return self._total

    def push(self, weight: float, point: np.ndarray) -> None:
        if weight <= 0:
            raise ValueError("weights must be positive")
        self._weights.append(float(weight))
        self._points.append(point)
        self._sum = self._sum + weight * point
        self._total += float(weight)
        if len(self._weights) % RECOMPUTE_EVERY == 0:
            self._recompute()

    def _recompute(self) -> None:
        stacked = np.stack(self._points)
        weights = np.asarray(self._weights)
        self._sum = weights @ stacked
        self._total = float(np.sum(weights))

    def mean(self) -> np.ndarray:
        return self._sum / self._total

    def virtual_mean(self, weight: float, point: np.ndarray) -> np.ndarray:
        """Mean that would result from pushing (weight, point), without committing."""
        return (self._sum + weight * point) / (self._total + weight)


def o2b_run(learner, oracle: GradientOracle, weights: Sequence[float], rounds: int) -> ConversionTrace:
    """Generic conversion loop around any gradient-step learner.

    Per round: form the weighted running average of plays, query the gradient
    there, and feed weight * gradient to the learner as a linear loss. The
    learner exposes ``point`` (current play) and ``step(loss_gradient)``.
    Oracle exhaustion ends the loop after the last completed round.
    """
    weights = [float(w) for w in weights]
    if len(weights) < rounds:
        raise ValueError("need one positive weight per round")
    if any(w <= 0 for w in weights):
        raise ValueError("weights must be positive")
    average = WeightedRunningAverage(oracle.objective.dim)
    trace = ConversionTrace()
    for t in range(1, rounds + 1):
        if oracle.remaining == 0:
            break
        weight = weights[t - 1]
        play = learner.point.copy()
        average.push(weight, play)
        mean = average.mean()
        grad = oracle.gradient(mean)
        eta = learner.current_step_size()
        learner.step(weight * grad)
        trace.weights.append(weight)
        trace.points.append(play)
        trace.averages.append(mean)
        trace.probes.append(None)
        trace.average_gradients.append(grad)
        trace.probe_gradients.append(None)
        trace.step_sizes.append(eta)
        trace.accumulators.append(getattr(learner.schedule, "accumulator", 0.0))
        trace.queries_after.append(oracle.queries_used)
        trace.complete.append(True)
    return trace


class ProjectedGradientLearner:
    """Plain projected gradient steps x <- proj(x - eta_t * g), the baseline
    learner for the generic conversion."""

    def __init__(self, domain: Domain, start, schedule):
        start = as_vector(start)
        projected = domain.project(start)
        if float(np.linalg.norm(projected - start)) > 1e-12:
            raise ValueError("initial point must lie in the domain")
        self.domain = domain
        self.schedule = schedule
        self.point = projected
        self.round = 1

    def current_step_size(self) -> float:
        return self.schedule.step_size(self.round)

    def step(self, loss_gradient) -> np.ndarray:
        gradient = as_vector(loss_gradient)
        eta = self.current_step_size()
        self.point = self.domain.project(self.point - eta * gradient)
        self.schedule.accumulate(float(np.dot(gradient, gradient)))
        self.round += 1
        return self.point


def universal_convex_optimize(
    objective: Objective,
    domain: Domain,
    budget: int,
    noise_std: float = 0.0,
    seed: Optional[int] = None,
    start=None,
    floor: float = DEFAULT_FLOOR,
) -> ConversionTrace:
    """Accelerated conversion with growing weights and probe-point optimism.

    Weights grow linearly (weight t at round t). Each round after the first
    queries the oracle twice: once at a probe average that pretends the
    previous play repeats, to form the optimism, and once at the true running
    average, to build the round's linear loss. Step sizes follow the adagrad
    accumulator of weighted gradient gaps, so no curvature constants are
    needed. A budget of T queries yields ceil((T+1)/2) averaged iterates; if
    the budget ends right after a probe, the last round records its average
    without an update.
    """
    if not math.isfinite(domain.diameter):
        raise ValueError("conversion requires a domain with finite diameter")
    if floor <= 0:
        raise ValueError("floor must be positive")
    oracle = GradientOracle(objective, budget, noise_std=noise_std, seed=seed)
    start = domain.anchor() if start is None else as_vector(start)
    schedule = AdaGradSchedule(domain.diameter, floor)
    learner = OptimisticOGD(domain, start, schedule)
    average = WeightedRunningAverage(objective.dim)
    trace = ConversionTrace()

    # Round 1: zero optimism, single query at the (trivial) average.
    eta = learner.current_step_size()
    play = learner.predict(np.zeros(objective.dim))
    average.push(1.0, play)
    mean = average.mean()
    grad_mean = oracle.gradient(mean)
    learner.update(1.0 * grad_mean)
    trace.weights.append(1.0)
    trace.points.append(play)
    trace.averages.append(mean)
    trace.probes.append(None)
    trace.average_gradients.append(grad_mean)
    trace.probe_gradients.append(None)
    trace.step_sizes.append(eta)
    trace.accumulators.append(schedule.accumulator)
    trace.queries_after.append(oracle.queries_used)
    trace.complete.append(True)

    t = 2
    previous_play = play
    while oracle.remaining > 0:
        weight = float(t)
        probe = average.virtual_mean(weight, previous_play)
        grad_probe = oracle.gradient(probe)
        optimism = weight * grad_probe
        eta = learner.current_step_size()
        play = learner.predict(optimism)
        average.push(weight, play)
        mean = average.mean()
        trace.weights.append(weight)
        trace.points.append(play)
        trace.averages.append(mean)
        trace.probes.append(probe)
        trace.step_sizes.append(eta)
        trace.probe_gradients.append(grad_probe)
        if oracle.remaining == 0:
            trace.average_gradients.append(None)
            trace.accumulators.append(schedule.accumulator)
            trace.queries_after.append(oracle.queries_used)
            trace.complete.append(False)
            break
        grad_mean = oracle.gradient(mean)
        learner.update(weight * grad_mean)
        trace.average_gradients.append(grad_mean)
        trace.accumulators.append(schedule.accumulator)
        trace.queries_after.append(oracle.queries_used)
        trace.complete.append(True)
        previous_play = play
        t += 1
    return trace


def weighted_regret(trace: ConversionTrace, comparator) -> float:
    """sum_t weight_t * <grad at average_t, play_t - comparator> over complete rounds."""
    comparator = as_vector(comparator)
    total = 0.0
    for weight, play, grad, complete in zip(
        trace.weights, trace.points, trace.average_gradients, trace.complete
    ):
        if not complete or grad is None:
            continue
        total += weight * inner(grad, play - comparator)
    return total


def stabilization_residuals(trace: ConversionTrace) -> np.ndarray:
    """Per-round residual of the averaging identity
    prior_total * (avg_{t-1} - avg_t) = weight_t * (avg_t - play_t),
    normalized by the scale of the two sides."""
    out = []
    prior_total = trace.weights[0]
    for t in range(1, trace.rounds):
        weight = trace.weights[t]
        lhs = prior_total * (trace.averages[t - 1] - trace.averages[t])
        rhs = weight * (trace.averages[t] - trace.points[t])
        scale = 1.0 + max(
            float(np.max(np.abs(lhs))), float(np.max(np.abs(rhs)))
        )
        out.append(float(np.max(np.abs(lhs - rhs))) / scale)
        prior_total += weight
    return np.asarray(out)
