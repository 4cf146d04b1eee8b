import numpy as np
import pytest

from hypertruss.benchmarks import build_benchmark, get_benchmark, von_mises_load_factor
from hypertruss.domain import SearchDomain
from hypertruss.hypersphere import (EXHAUSTED, REACHED, STALL, Hypersphere, HypersphereTracer,
                                    NoForwardTrialError, NoOptimalTrialError, RadiusExhausted,
                                    SeedSphereError, SphereSchedule, adapt_radius,
                                    select_center_directional, select_center_initial,
                                    sphere_domain, trace_path)
from hypertruss.model import Candidate, objective
from hypertruss.optimizers import OptimizerConfig

FAST = OptimizerConfig(population_size=20, max_generations=500, seed=0)


@pytest.fixture(scope="module")
def two_bar_trace():
    b = get_benchmark("two-bar-oracle")
    return HypersphereTracer(FAST, SphereSchedule("fixed", 5.0), trials_per_sphere=3,
                             d_max=120.0, seed_box=b.seed_box,
                             lambda_ratio=b.lambda_ratio).fit(b.build())


def test_adapt_radius_schedules():
    assert adapt_radius(4.0, SphereSchedule("halving")) == 2.0
    assert adapt_radius(4.0, SphereSchedule("additive", additive_increment=3)) == 7.0
    assert adapt_radius(4.0, SphereSchedule("fixed")) == 4.0
    with pytest.raises(RadiusExhausted):
        adapt_radius(0.15, SphereSchedule("halving", min_radius=0.1))
    with pytest.raises(ValueError):
        adapt_radius(0.0, SphereSchedule())
    with pytest.raises(ValueError):
        SphereSchedule("spiral")


def test_sphere_domain_box_and_clip(eight):
    c = Candidate([1.0, 2.0, -3.0], 0.5)
    dom = sphere_domain(Hypersphere(c, 5.0), SearchDomain.uniform(eight, (-100, 100), (-1, 1)))
    np.testing.assert_allclose(dom.lower, [-4, -3, -8, 0.3])
    np.testing.assert_allclose(dom.upper, [6, 7, 2, 0.7])
    clipped = sphere_domain(Hypersphere(c, 5.0), SearchDomain.uniform(eight, (0, 100), (0, 1)))
    assert clipped.lower[2] == 0 and clipped.upper[2] == 2
    with pytest.raises(ValueError):
        Hypersphere(c, 0.0)


def test_initial_selection_prefers_forward_and_farthest():
    pts = [(-8.0, -0.1), (3.0, 0.1), (6.0, 0.2), (9.0, 0.0)]
    obj = [0.0, 0.0, 0.0, 1.0]
    # the backward point is farther but only forward points compete
    assert select_center_initial(pts, obj, (0.0, 0.0), 1e-5) == 2
    with pytest.raises(NoOptimalTrialError):
        select_center_initial(pts, [1.0] * 4, (0.0, 0.0), 1e-5)


def test_directional_selection_excludes_backward():
    pts = [(4.0, 0.0), (12.0, 0.0), (14.0, 0.0)]
    obj = [0.0, 0.0, 2.0]
    assert select_center_directional(pts, obj, (10.0, 0.0), (5.0, 0.0), 1e-5) == 1
    with pytest.raises(NoForwardTrialError):
        select_center_directional([(6.0, 0.0)], [0.0], (10.0, 0.0), (5.0, 0.0), 1e-5)


def test_lambda_weight_decides_whether_a_fold_is_forward():
    # the trial steps back slightly in d while lambda keeps rising
    args = ([(11.9, 0.2)], [0.0], (12.0, 0.08), (10.0, 0.0), 1e-5)
    with pytest.raises(NoForwardTrialError):
        select_center_directional(*args)
    assert select_center_directional(*args, lambda_scale=25.0) == 0


def test_trace_follows_the_analytic_curve(two_bar_trace):
    model = build_benchmark("two-bar-oracle")
    P = two_bar_trace.result_.path(model)
    assert two_bar_trace.termination_ == REACHED
    assert len(P) > 20 and P[-1, 0] >= 120.0
    assert np.all(np.diff(P[:, 0]) > 0)
    lam = von_mises_load_factor(P[:, 0], 1e5, 1000.0, 100.0, 40.0)
    assert np.max(np.abs(P[:, 1] - lam)) < 1e-3
    # the limit point at d ~ 42 mm is passed, so lambda rises then falls
    assert P[:, 1].argmax() not in (0, len(P) - 1)


def test_trace_centers_are_equilibria_and_indexed(two_bar_trace):
    res = two_bar_trace.result_
    model = build_benchmark("two-bar-oracle")
    assert all(objective(model, c) <= 1e-5 for c in res.centers)
    assert len(res.efforts) == len(res.radii)
    assert res.efforts[0] == 0.0
    assert res.total_generations == sum(r.generations_used for r in res.records)
    assert res.center_spheres == sorted(res.center_spheres)
    found_in = {id(c): s for c, s in zip(res.all_optimal, res.optimal_spheres)}
    assert all(found_in[id(c)] == s for c, s in zip(res.centers[1:], res.center_spheres[1:]))
    assert {r.cell for r in res.records} <= set(range(len(res.efforts)))


def test_direction_condition_along_trace(two_bar_trace):
    P = two_bar_trace.result_.path(build_benchmark("two-bar-oracle"))
    for k in range(2, len(P)):
        assert np.dot(P[k] - P[k - 1], P[k - 2] - P[k - 1]) < 0


def test_max_spheres_and_resume():
    b = get_benchmark("two-bar-oracle")
    model = b.build()
    short = HypersphereTracer(FAST, trials_per_sphere=3, max_spheres=4, seed_box=b.seed_box,
                              lambda_ratio=b.lambda_ratio).fit(model)
    assert short.termination_ == EXHAUSTED and len(short.efforts_) == 4
    resumed = HypersphereTracer(FAST, trials_per_sphere=3, max_spheres=3, seed_box=b.seed_box,
                                lambda_ratio=b.lambda_ratio).fit(model, start=short.centers_[-2:])
    assert resumed.centers_[0] is not short.centers_[-2]
    assert resumed.result_.efforts[0] > 0  # no seed entry when resuming
    assert resumed.result_.path(model)[-1, 0] > short.result_.path(model)[-1, 0]


def test_same_seed_same_trace():
    b = get_benchmark("two-bar-oracle")
    kw = dict(trials_per_sphere=2, max_spheres=5, seed_box=b.seed_box, lambda_ratio=0.04)
    a = HypersphereTracer(FAST, **kw).fit(b.build()).result_.path(b.build())
    c = HypersphereTracer(FAST, **kw).fit(b.build()).result_.path(b.build())
    np.testing.assert_array_equal(a, c)


def test_halving_stalls_when_no_trial_converges():
    b = get_benchmark("two-bar-oracle")
    hopeless = OptimizerConfig(population_size=5, max_generations=1, target_objective=1e-12)
    start = [Candidate([-5.0], float(von_mises_load_factor(5.0, 1e5, 1000, 100, 40)))]
    tr = HypersphereTracer(hopeless, SphereSchedule("halving", 1.0, min_radius=0.3),
                           trials_per_sphere=1, tol_opt=1e-14, lambda_ratio=0.04)
    tr.fit(b.build(), start=start)
    assert tr.termination_ == STALL
    assert len(tr.efforts_) == 2  # r = 1 and r = 0.5; 0.25 is below the floor


def test_seed_failure_raises():
    model = build_benchmark("two-bar-oracle")
    hopeless = OptimizerConfig(population_size=5, max_generations=1, target_objective=1e-12)
    with pytest.raises(SeedSphereError):
        HypersphereTracer(hopeless, trials_per_sphere=1, tol_opt=1e-12,
                          seed_box=(10.0, 0.5)).fit(model)


def test_trace_path_wrapper():
    b = get_benchmark("two-bar-oracle")
    model = b.build()
    res = trace_path(model, None, SphereSchedule(), FAST, trials_per_sphere=2, max_spheres=3,
                     seed_box=b.seed_box, lambda_ratio=0.04)
    assert len(res.efforts) == 3
