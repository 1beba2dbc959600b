"""Experiment execution: bind a validated config to a driver, emit a trace CSV
and a summary JSON (written atomically, 17 significant digits, byte-stable
under identical config + seed)."""

from __future__ import annotations

import json
import os
import tempfile
import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import metrics
from .config import ExperimentConfig
from .conversion import (
    ProjectedGradientLearner,
    o2b_run,
    universal_convex_optimize,
    weighted_regret,
)
from .core_math import Domain
from .online_learners import (
    AdaGradSchedule,
    run_online_convex,
    run_online_strongly_convex,
)
from .problems import GradientOracle, Objective
from .strongly_convex import (
    grid_search_minimize,
    minimize_known_smoothness,
    minimize_unknown_smoothness,
    minimize_with_safeguard,
)

CSV_HEADER = "round,queries,subopt,regret_partial,eta,beta,accepted"

# round, queries, subopt, regret_partial, eta, beta, accepted
Row = Tuple[int, int, Optional[float], Optional[float], Optional[float], Optional[float], Optional[int]]


def format_number(x: float) -> str:
    return f"{x:.17g}"


def rows_to_csv(rows: Sequence[Row]) -> str:
    lines = [CSV_HEADER]
    for r, q, subopt, reg, eta, beta, accepted in rows:
        lines.append(
            ",".join(
                [
                    str(r),
                    str(q),
                    "" if subopt is None else format_number(subopt),
                    "" if reg is None else format_number(reg),
                    "" if eta is None else format_number(eta),
                    "" if beta is None else format_number(beta),
                    "" if accepted is None else str(accepted),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> List[Row]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("unexpected trace header")
    rows: List[Row] = []
    for line in lines[1:]:
        parts = line.split(",")
        rows.append(
            (
                int(parts[0]),
                int(parts[1]),
                float(parts[2]) if parts[2] else None,
                float(parts[3]) if parts[3] else None,
                float(parts[4]) if parts[4] else None,
                float(parts[5]) if parts[5] else None,
                int(parts[6]) if parts[6] else None,
            )
        )
    return rows


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_holderopt_")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _constrained_optimum(objective: Objective, domain: Domain) -> Optional[float]:
    """Known minimum value over the domain, or None when not certified."""
    if objective.optimum_point is None:
        return None
    if domain.contains(objective.optimum_point):
        return float(objective.optimum_value)
    return None


def _thin(rows: List[Row], stride: int) -> List[Row]:
    if stride <= 1 or len(rows) <= 2:
        return rows
    kept = rows[::stride]
    if kept[-1] is not rows[-1]:
        kept.append(rows[-1])
    return kept


def _conversion_rows(trace, objective: Objective, domain: Domain) -> List[Row]:
    optimum = _constrained_optimum(objective, domain)
    comparator = objective.optimum_point if optimum is not None else None
    rows: List[Row] = []
    running_regret = 0.0
    for i in range(trace.rounds):
        subopt = None
        if optimum is not None:
            subopt = float(objective.value(trace.averages[i])) - optimum
        reg = None
        if comparator is not None and trace.average_gradients[i] is not None:
            running_regret += trace.weights[i] * float(
                np.dot(trace.average_gradients[i], trace.points[i] - comparator)
            )
            reg = running_regret
        rows.append(
            (
                i + 1,
                trace.queries_after[i],
                subopt,
                reg,
                trace.step_sizes[i],
                None,
                None,
            )
        )
    return rows


def _online_rows(trace, sequence, domain: Domain) -> List[Row]:
    exact = metrics.exact_regret_series(sequence, trace, domain)
    rows: List[Row] = []
    for i in range(trace.rounds):
        rows.append(
            (
                i + 1,
                i + 1,
                None,
                float(exact[i]) if exact is not None else None,
                trace.step_sizes[i],
                None,
                None,
            )
        )
    return rows


def _guess_check_rows(trace, objective: Objective, domain: Domain) -> List[Row]:
    optimum = _constrained_optimum(objective, domain)
    rows: List[Row] = []
    accepted_iter = iter(zip(trace.accepted_queries, trace.accepted_averages))
    next(accepted_iter)  # the start point, recorded before any pass
    current_average = trace.accepted_averages[0]
    subopt = None
    if optimum is not None:
        subopt = float(objective.value(current_average)) - optimum
    rows.append((1, trace.accepted_queries[0], subopt, None, None, None, 1))
    for p in trace.passes:
        if p.accepted:
            _, current_average = next(accepted_iter)
        subopt = None
        if optimum is not None:
            subopt = float(objective.value(current_average)) - optimum
        rows.append(
            (
                p.candidate_iteration,
                p.query_count,
                subopt,
                None,
                p.step_size,
                p.ratio,
                1 if p.accepted else 0,
            )
        )
    return rows


def _grid_rows(result, objective: Objective, domain: Domain) -> List[Row]:
    optimum = _constrained_optimum(objective, domain)
    rows: List[Row] = []
    queries = result.total_queries - sum(t.total_queries for t in result.instance_traces)
    rows.append(
        (
            0,
            queries,
            None if optimum is None else result.candidate_values[0] - optimum,
            None,
            None,
            None,
            1 if result.chosen_index == 0 else 0,
        )
    )
    for i, trace in enumerate(result.instance_traces, start=1):
        queries += trace.total_queries
        rows.append(
            (
                i,
                queries,
                None if optimum is None else result.candidate_values[i] - optimum,
                None,
                None,
                None,
                1 if result.chosen_index == i else 0,
            )
        )
    return rows


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: List[Row]
    summary: dict
    final_point: np.ndarray


def summarize_rows(rows: Sequence[Row]) -> dict:
    """Statistics derivable from the emitted rows alone (round-trip stable)."""
    final_subopt = rows[-1][2]
    total_queries = rows[-1][1]
    positive = [(q, s) for _, q, s, *_ in rows if s is not None and s > 0]
    slope = None
    rate = None
    r_squared = None
    if len(positive) >= 4:
        qs = [p[0] for p in positive]
        vs = [p[1] for p in positive]
        if len(set(qs)) >= 4:
            try:
                slope = metrics.loglog_slope(qs, vs)
            except ValueError:
                slope = None
            try:
                fit = metrics.geometric_rate(qs, vs)
                rate, r_squared = fit.rate, fit.r_squared
            except ValueError:
                pass
    return {
        "final_suboptimality": final_subopt,
        "total_queries": total_queries,
        "rounds": rows[-1][0],
        "loglog_slope": slope,
        "geometric_rate": rate,
        "geometric_r_squared": r_squared,
    }


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    start_time = time.perf_counter()
    algorithm = config.algorithm
    extra: dict = {}

    if algorithm == "o2b_convex_universal":
        trace = universal_convex_optimize(
            config.objective,
            config.domain,
            config.budget,
            noise_std=config.noise_std,
            seed=config.seed,
            start=config.start,
        )
        rows = _conversion_rows(trace, config.objective, config.domain)
        final_point = trace.final_average
    elif algorithm == "baseline_ogd":
        oracle = GradientOracle(
            config.objective, config.budget, noise_std=config.noise_std, seed=config.seed
        )
        start = config.domain.anchor() if config.start is None else config.start
        learner = ProjectedGradientLearner(
            config.domain, start, AdaGradSchedule(config.domain.diameter)
        )
        trace = o2b_run(learner, oracle, [1.0] * config.budget, config.budget)
        rows = _conversion_rows(trace, config.objective, config.domain)
        final_point = trace.final_average
    elif algorithm == "online_convex":
        trace = run_online_convex(config.sequence, config.domain, config.budget, start=config.start)
        rows = _online_rows(trace, config.sequence, config.domain)
        final_point = trace.final_point
        report = metrics.regret(config.sequence, trace, config.domain)
        extra["regret"] = report.value
        extra["regret_comparator_exact"] = report.exact
        variation = metrics.gradient_variation(config.sequence, config.budget, config.domain)
        extra["gradient_variation"] = variation.value
        extra["gradient_variation_exact"] = variation.exact
    elif algorithm == "online_strongly_convex":
        modulus = config.strong_convexity or config.sequence.strong_convexity
        trace = run_online_strongly_convex(
            config.sequence, config.domain, modulus, config.budget, start=config.start
        )
        rows = _online_rows(trace, config.sequence, config.domain)
        final_point = trace.final_point
        report = metrics.regret(config.sequence, trace, config.domain)
        extra["regret"] = report.value
        extra["regret_comparator_exact"] = report.exact
        variation = metrics.gradient_variation(config.sequence, config.budget, config.domain)
        extra["gradient_variation"] = variation.value
        extra["gradient_variation_exact"] = variation.exact
    elif algorithm == "alg2_thm4":
        start = config.domain.anchor() if config.start is None else config.start
        trace = minimize_with_safeguard(
            config.objective, config.domain, config.strong_convexity, config.budget, start
        )
        rows = _guess_check_rows(trace, config.objective, config.domain)
        final_point = trace.final_average
        extra["rejected_passes"] = trace.rejected_passes
    elif algorithm == "alg2_cor1_known_L":
        start = config.domain.anchor() if config.start is None else config.start
        trace = minimize_known_smoothness(
            config.objective,
            config.domain,
            config.strong_convexity,
            config.smoothness,
            config.budget,
            start,
        )
        rows = _guess_check_rows(trace, config.objective, config.domain)
        final_point = trace.final_average
        extra["rejected_passes"] = trace.rejected_passes
    elif algorithm == "alg2_cor1_unknown_L":
        start = config.domain.anchor() if config.start is None else config.start
        trace = minimize_unknown_smoothness(
            config.objective, config.domain, config.strong_convexity, config.budget, start
        )
        rows = _guess_check_rows(trace, config.objective, config.domain)
        final_point = trace.final_average
        extra["rejected_passes"] = trace.rejected_passes
        extra["exhausted_mid_guess"] = trace.exhausted_mid_guess
    elif algorithm == "alg3_grid_search":
        start = config.domain.anchor() if config.start is None else config.start
        result = grid_search_minimize(config.objective, config.budget, start)
        rows = _grid_rows(result, config.objective, config.domain)
        final_point = result.estimate
        extra["chosen_index"] = result.chosen_index
        extra["curvature_probe"] = result.curvature_probe
        extra["instance_budget"] = result.instance_budget
    else:
        raise ValueError(f"unhandled algorithm {algorithm!r}")

    rows = _thin(rows, config.stride)
    summary = summarize_rows(rows)
    summary.update(extra)
    summary["algorithm"] = algorithm
    summary["final_value"] = (
        float(config.objective.value(final_point)) if config.objective is not None else None
    )
    summary["wall_time_seconds"] = time.perf_counter() - start_time
    summary["config"] = config.echo
    return ExperimentResult(config=config, rows=rows, summary=summary, final_point=final_point)


def write_outputs(result: ExperimentResult) -> None:
    if result.config.trace_path:
        atomic_write(result.config.trace_path, rows_to_csv(result.rows))
    if result.config.summary_path:
        atomic_write(
            result.config.summary_path,
            json.dumps(result.summary, indent=2, sort_keys=True, default=float) + "\n",
        )


def sweep_budgets(
    config: ExperimentConfig, budgets: Sequence[int], max_workers: int = 1
) -> dict:
    """Run the experiment once per budget; emit per-budget outputs (suffix _T<budget>)
    and an aggregate record with the log-log slope of final suboptimality."""
    from concurrent.futures import ThreadPoolExecutor
    from dataclasses import replace

    def job(budget: int) -> ExperimentResult:
        sub = replace(
            config,
            budget=budget,
            trace_path=_suffixed(config.trace_path, budget),
            summary_path=_suffixed(config.summary_path, budget),
        )
        result = run_experiment(sub)
        write_outputs(result)
        return result

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(job, budgets))
    else:
        results = [job(b) for b in budgets]

    finals = [r.summary["final_suboptimality"] for r in results]
    aggregate: dict = {
        "budgets": list(budgets),
        "final_suboptimality": finals,
        "algorithm": config.algorithm,
    }
    if all(v is not None and v > 0 for v in finals) and len(finals) >= 4:
        aggregate["loglog_slope"] = metrics.loglog_slope(list(budgets), finals)
    else:
        aggregate["loglog_slope"] = None
    return aggregate


def _suffixed(path: Optional[str], budget: int) -> Optional[str]:
    if path is None:
        return None
    root, ext = os.path.splitext(path)
    return f"{root}_T{budget}{ext}"
