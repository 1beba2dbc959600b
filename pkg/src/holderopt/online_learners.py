"""Optimistic online gradient descent in two-step and one-step form, with
pluggable step-size schedules, plus full-loop drivers for convex and strongly
convex online sequences."""

from __future__ import annotations

import math
from typing import Optional

import numpy as np

from .core_math import Domain, as_vector, norm
from .problems import OnlineSequence
from .traces import OnlineTrace

DEFAULT_FLOOR = 1e-12


class ProtocolError(RuntimeError):
    """predict/update were not interleaved correctly."""


class AdaGradSchedule:
    """Step sizes diameter / (2 * sqrt(floor + A)) where A accumulates squared
    gaps between observed gradients and the optimism used that round.

    The floor keeps the first step finite (the accumulator starts empty) and
    perturbs later steps negligibly.
    """

    kind = "adagrad"

    def __init__(self, diameter: float, floor: float = DEFAULT_FLOOR):
        if not (math.isfinite(diameter) and diameter > 0):
            raise ValueError("adagrad schedule needs a finite positive diameter")
        if floor < 0:
            raise ValueError("floor must be nonnegative")
        self.diameter = float(diameter)
        self.floor = float(floor)
        self.accumulator = 0.0

    def step_size(self, round_index: int) -> float:
        base = self.floor + self.accumulator
        if base == 0.0:
            return math.inf
        return self.diameter / (2.0 * math.sqrt(base))

    def accumulate(self, gap_squared: float) -> None:
        self.accumulator += float(gap_squared)


class StronglyConvexSchedule:
    """Step sizes factor / (modulus * t)."""

    kind = "strongly_convex"

    def __init__(self, modulus: float, factor: float = 6.0):
        if modulus <= 0:
            raise ValueError("strong-convexity modulus must be positive")
        self.modulus = float(modulus)
        self.factor = float(factor)

    def step_size(self, round_index: int) -> float:
        return self.factor / (self.modulus * round_index)

    def accumulate(self, gap_squared: float) -> None:
        pass


class ConstantSchedule:
    kind = "constant"

    def __init__(self, eta: float):
        if eta <= 0:
            raise ValueError("constant step size must be positive")
        self.eta = float(eta)

    def step_size(self, round_index: int) -> float:
        return self.eta

    def accumulate(self, gap_squared: float) -> None:
        pass


class OptimisticOGD:
    """Two-step learner: play the anchor nudged by the optimism, then move the
    anchor by the observed gradient.

        x_t      = proj(anchor - eta_t * optimism)
        anchor'  = proj(anchor - eta_t * gradient)

    Both steps of a round share the same eta_t. predict and update must
    alternate, starting with predict.
    """

    def __init__(self, domain: Domain, start, schedule):
        start = as_vector(start)
        projected = domain.project(start)
        if norm(projected - start) > 1e-12:
            raise ValueError("initial point must lie in the domain")
        self.domain = domain
        self.schedule = schedule
        self.anchor = projected
        self.round = 1
        self._awaiting_update = False
        self._optimism: Optional[np.ndarray] = None
        self.last_play: Optional[np.ndarray] = None

    def current_step_size(self) -> float:
        return self.schedule.step_size(self.round)

    def predict(self, optimism) -> np.ndarray:
        if self._awaiting_update:
            raise ProtocolError("predict called twice without an update")
        optimism = as_vector(optimism)
        eta = self.current_step_size()
        if float(np.linalg.norm(optimism)) == 0.0:
            play = self.anchor.copy()
        else:
            play = self.domain.project(self.anchor - eta * optimism)
        self._optimism = optimism
        self.last_play = play
        self._awaiting_update = True
        return play

    def update(self, gradient) -> None:
        if not self._awaiting_update:
            raise ProtocolError("update called without a preceding predict")
        gradient = as_vector(gradient)
        eta = self.current_step_size()
        self.anchor = self.domain.project(self.anchor - eta * gradient)
        self.schedule.accumulate(norm(gradient - self._optimism) ** 2)
        self.round += 1
        self._awaiting_update = False


def one_step_update(point, gradient, optimism, optimism_next, step_size: float, domain: Domain) -> np.ndarray:
    """Single-sequence variant: proj(x - eta * (gradient - optimism + optimism_next)).

    On an unconstrained domain with a constant step size this reproduces the
    two-step played sequence exactly.
    """
    if step_size <= 0:
        raise ValueError("step size must be positive")
    point = as_vector(point)
    direction = as_vector(gradient) - as_vector(optimism) + as_vector(optimism_next)
    return domain.project(point - step_size * direction)


def _run_online(sequence: OnlineSequence, domain: Domain, rounds: int, schedule, start) -> OnlineTrace:
    learner = OptimisticOGD(domain, start, schedule)
    trace = OnlineTrace(family=sequence.family)
    optimism = np.zeros(sequence.dim)
    adagrad = isinstance(schedule, AdaGradSchedule)
    for t in range(1, rounds + 1):
        eta = learner.current_step_size()
        play = learner.predict(optimism)
        f_t = sequence.function(t)
        grad = f_t.gradient(play)
        loss = f_t.value(play)
        learner.update(grad)
        trace.points.append(play)
        trace.losses.append(float(loss))
        trace.gradients.append(grad)
        trace.optimisms.append(optimism)
        trace.step_sizes.append(eta)
        if adagrad:
            trace.accumulators.append(schedule.accumulator)
        optimism = grad
    return trace


def run_online_convex(
    sequence: OnlineSequence,
    domain: Domain,
    rounds: int,
    start=None,
    floor: float = DEFAULT_FLOOR,
) -> OnlineTrace:
    """Optimistic OGD with last-gradient optimism and accumulator-driven steps.

    Needs a bounded domain; the step sizes scale with its diameter.
    """
    if not math.isfinite(domain.diameter):
        raise ValueError("online driver requires a domain with finite diameter")
    if rounds < 1:
        raise ValueError("rounds must be positive")
    if floor <= 0:
        raise ValueError("floor must be positive for a runnable schedule")
    start = domain.anchor() if start is None else as_vector(start)
    schedule = AdaGradSchedule(domain.diameter, floor)
    return _run_online(sequence, domain, rounds, schedule, start)


def run_online_strongly_convex(
    sequence: OnlineSequence,
    domain: Domain,
    modulus: float,
    rounds: int,
    start=None,
    factor: float = 6.0,
) -> OnlineTrace:
    """Optimistic OGD with last-gradient optimism and steps factor/(modulus*t)."""
    if modulus <= 0:
        raise ValueError("strong-convexity modulus must be positive")
    if rounds < 1:
        raise ValueError("rounds must be positive")
    start = domain.anchor() if start is None else as_vector(start)
    schedule = StronglyConvexSchedule(modulus, factor)
    return _run_online(sequence, domain, rounds, schedule, start)


def self_confident_bound_holds(gaps_squared, floor: float = DEFAULT_FLOOR) -> bool:
    """Check sum_t a_t / sqrt(floor + sum_{s<=t} a_s) <= 2 sqrt(floor + sum_t a_t)."""
    gaps = np.asarray(gaps_squared, dtype=float)
    partial = floor + np.cumsum(gaps)
    lhs = float(np.sum(gaps / np.sqrt(partial)))
    rhs = 2.0 * math.sqrt(floor + float(np.sum(gaps)))
    return lhs <= rhs * (1.0 + 1e-12)
