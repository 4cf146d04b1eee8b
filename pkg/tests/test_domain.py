import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hypertruss.domain import (ArcStep, DecompositionPlan, SearchDomain, arc_direction_ok,
                               arc_equality_residual, arc_feasible, clamp, informed_decomposition,
                               variable_range_report, with_control_interval)
from hypertruss.model import Candidate
from hypertruss.optimizers import OptimizerConfig

coord = st.floats(-1e3, 1e3, allow_nan=False)


def test_along_control_maps_downward_travel(eight):
    dom = SearchDomain.along_control(eight, (0, 3000), (-0.2, 1))
    np.testing.assert_array_equal(dom.lower, [0, 0, -3000, -0.2])
    np.testing.assert_array_equal(dom.upper, [3000, 3000, 0, 1])


def test_control_interval_and_mismatch(eight):
    dom = SearchDomain.uniform(eight, (-10, 10), (0, 1))
    cut = with_control_interval(eight, dom, (2, 5))
    assert (cut.lower[2], cut.upper[2]) == (-5, -2)
    with pytest.raises(ValueError):
        SearchDomain([0, 0], [1, 1]).check(eight)


def test_domain_rejects_reversed_bounds():
    with pytest.raises(ValueError):
        SearchDomain([1.0], [0.0])


def test_clamp_examples(eight):
    dom = SearchDomain.uniform(eight, (-1, 1), (0, 1))
    c = clamp(Candidate([5, -5, 0.5], 2.0), dom)
    np.testing.assert_array_equal(c.to_vector(), [1, -1, 0.5, 1])
    with pytest.raises(ValueError):
        clamp(np.zeros(3), dom)


@given(st.lists(coord, min_size=4, max_size=4))
def test_clamp_idempotent_and_inside(x):
    dom = SearchDomain([-1, -2, -3, 0], [1, 2, 3, 1])
    y = clamp(np.array(x), dom)
    assert dom.contains(y)
    np.testing.assert_array_equal(clamp(y, dom), y)


def test_arc_first_step_has_no_direction_constraint():
    step = ArcStep(0.0, 0.0, 5.0)
    assert arc_direction_ok((-3.0, -4.0), step)
    assert arc_equality_residual((3.0, 4.0), step) == pytest.approx(0.0)
    assert arc_feasible((3.0, 4.0), step)
    assert not arc_feasible((30.0, 4.0), step)


def test_arc_rejects_backtracking():
    step = ArcStep(10.0, 0.5, 5.0, d_prev=5.0, lambda_prev=0.4)
    assert arc_direction_ok((15.0, 0.6), step)
    assert not arc_direction_ok((6.0, 0.45), step)


def test_arc_step_validation():
    with pytest.raises(ValueError):
        ArcStep(0, 0, 0.0)
    with pytest.raises(ValueError):
        ArcStep(0, 0, 1.0, d_prev=1.0)


@given(coord, coord, coord, coord, st.floats(0.01, 100))
def test_arc_residual_is_distance_minus_step(d, lam, dt, lt, delta):
    step = ArcStep(d, lam, delta)
    assert arc_equality_residual((dt, lt), step) == pytest.approx(
        math.dist((d, lam), (dt, lt)) - delta, abs=1e-9)


def test_plan_rejects_overlap_and_empty():
    with pytest.raises(ValueError):
        DecompositionPlan([(0, 10), (5, 20)])
    with pytest.raises(ValueError):
        DecompositionPlan([])
    with pytest.raises(ValueError):
        DecompositionPlan([(3, 1)])


def test_plan_cells_restrict_control_and_stages(eight):
    base = SearchDomain.along_control(eight, (0, 3000), (-0.2, 1))
    plan = DecompositionPlan([(0, 100), (100, 200)], variable_stages=[(-5, 5), (-50, 50)])
    cells = list(plan.cells(eight, base))
    assert len(cells) == 4
    interval, stage, dom = cells[3]
    assert interval == (100, 200) and stage == 1
    np.testing.assert_array_equal(dom.lower[:3], [-50, -50, -200])
    np.testing.assert_array_equal(dom.upper[:3], [50, 50, -100])


def test_informed_decomposition_reports_cells(eight):
    base = SearchDomain.along_control(eight, (0, 3000), (-0.2, 1))
    plan = DecompositionPlan.even(0, 3000, 3, trials_per_cell=2)
    recs = informed_decomposition(eight, base, plan, OptimizerConfig(max_generations=300, seed=4))
    assert [r.cell for r in recs] == [0, 0, 1, 1, 2, 2]
    for r in recs:
        lo, hi = r.interval
        assert lo - 1e-9 <= -r.best.u[2] <= hi + 1e-9
    rep = variable_range_report(recs, 1e-5)
    assert rep["count"] == sum(r.final_objective <= 1e-5 for r in recs)
    assert variable_range_report(recs, 0.0) == {}
