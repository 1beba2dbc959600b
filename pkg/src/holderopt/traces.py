"""Run traces: full-resolution records of what each driver did, round by round."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


@dataclass
class OnlineTrace:
    """One online-learning run: played points, losses, gradients, schedule state."""

    family: str
    points: List[np.ndarray] = field(default_factory=list)
    losses: List[float] = field(default_factory=list)
    gradients: List[np.ndarray] = field(default_factory=list)
    optimisms: List[np.ndarray] = field(default_factory=list)
    step_sizes: List[float] = field(default_factory=list)
    accumulators: List[float] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.points)

    @property
    def total_queries(self) -> int:
        return len(self.gradients)

    def cumulative_losses(self) -> np.ndarray:
        return np.cumsum(np.asarray(self.losses, dtype=float))

    @property
    def final_point(self) -> np.ndarray:
        return self.points[-1]


@dataclass
class ConversionTrace:
    """One online-to-batch run: plays, running averages, probes, and query ledger."""

    weights: List[float] = field(default_factory=list)
    points: List[np.ndarray] = field(default_factory=list)
    averages: List[np.ndarray] = field(default_factory=list)
    probes: List[Optional[np.ndarray]] = field(default_factory=list)
    average_gradients: List[Optional[np.ndarray]] = field(default_factory=list)
    probe_gradients: List[Optional[np.ndarray]] = field(default_factory=list)
    step_sizes: List[float] = field(default_factory=list)
    accumulators: List[float] = field(default_factory=list)
    queries_after: List[int] = field(default_factory=list)
    complete: List[bool] = field(default_factory=list)

    @property
    def rounds(self) -> int:
        return len(self.points)

    @property
    def complete_rounds(self) -> int:
        return sum(1 for flag in self.complete if flag)

    @property
    def total_queries(self) -> int:
        return self.queries_after[-1] if self.queries_after else 0

    @property
    def final_average(self) -> np.ndarray:
        return self.averages[-1]

    def weight_total(self, upto: Optional[int] = None) -> float:
        upto = self.rounds if upto is None else upto
        return float(np.sum(np.asarray(self.weights[:upto], dtype=float)))


@dataclass
class GuessCheckPass:
    """One inner-loop pass of the guess-and-check optimizer (one gradient query)."""

    candidate_iteration: int
    query_count: int
    ratio: float
    accepted: bool
    smoothness_estimate: Optional[float]
    threshold_shortcut: bool
    step_size: float = 0.0


@dataclass
class GuessCheckTrace:
    """One guess-and-check run: every pass, plus state at the accepted iterations."""

    ratio_floor: float
    passes: List[GuessCheckPass] = field(default_factory=list)
    accepted_averages: List[np.ndarray] = field(default_factory=list)
    accepted_queries: List[int] = field(default_factory=list)
    accepted_ratios: List[float] = field(default_factory=list)
    weight_totals: List[float] = field(default_factory=list)
    log_weight_totals: List[float] = field(default_factory=list)
    step_sizes: List[float] = field(default_factory=list)
    total_queries: int = 0
    exhausted_mid_guess: bool = False

    @property
    def iterations(self) -> int:
        return len(self.accepted_averages)

    @property
    def final_average(self) -> np.ndarray:
        return self.accepted_averages[-1]

    @property
    def rejected_passes(self) -> int:
        return sum(1 for p in self.passes if not p.accepted)


@dataclass
class GridSearchResult:
    """Output of the curvature grid search: chosen point and per-instance traces."""

    estimate: np.ndarray
    chosen_index: int
    curvature_probe: float
    curvature_grid: List[float]
    instance_traces: List[GuessCheckTrace]
    candidate_values: List[float]
    instance_budget: int
    total_queries: int
