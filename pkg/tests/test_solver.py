"""Constraint projection, the descent solver, and geometry diagnostics."""

import dataclasses

import numpy as np
import pytest

from fracground import (
    BracketFailure,
    Field,
    NotInEPlus,
    SolverOptions,
    StatePair,
    ValidationFailed,
    coupled_quadratic,
    energy,
    integrate,
    mountain_pass_diagnostics,
    nehari_project,
    nehari_value,
    solve_ground_state,
    solve_scalar_ground_state,
    solve_with_restarts,
)
from helpers import constant_problem, smooth_pair


FAST = SolverOptions(max_iters=4000)


# ---------------------------------------------------------------------------
# projection onto the constraint set


def test_projection_zeroes_the_constraint():
    prob = constant_problem()
    for seed in range(5):
        state = smooth_pair(prob, seed)
        t0, proj = nehari_project(state, prob)
        assert t0 > 0.0
        q = coupled_quadratic(proj, prob)
        assert abs(nehari_value(proj, prob)) <= 1e-10 * q


def test_projection_is_ray_maximum():
    prob = constant_problem()
    state = smooth_pair(prob, 1)
    _, proj = nehari_project(state, prob)
    ref = energy(proj, prob).total
    for t in np.concatenate([np.linspace(0.1, 0.997, 12), np.linspace(1.003, 10.0, 12)]):
        assert energy(proj.scaled(t), prob).total < ref


def test_projection_idempotent():
    prob = constant_problem()
    state = smooth_pair(prob, 2)
    _, proj = nehari_project(state, prob)
    t1, again = nehari_project(proj, prob)
    assert t1 == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(again.u.values, proj.u.values, rtol=0, atol=1e-10)


def test_projection_closed_form_quartic():
    # for the quartic nonlinearity the projected scale solves
    # t^2 = Q / int((u+)^4 + (v+)^4) in closed form
    prob = constant_problem(nl_kind="pure_power", p=4.0, s=0.8, lam=0.3)
    for seed in range(5):
        state = smooth_pair(prob, seed)
        q = coupled_quadratic(state, prob)
        g = prob.grid
        quartic = integrate(Field(g, np.maximum(state.u.values, 0.0) ** 4)) + integrate(
            Field(g, np.maximum(state.v.values, 0.0) ** 4)
        )
        expected = np.sqrt(q / quartic)
        t0, _ = nehari_project(state, prob)
        assert t0 == pytest.approx(expected, rel=1e-10)


def test_projection_requires_positive_part():
    prob = constant_problem()
    g = prob.grid
    bad = StatePair(Field(g, -np.ones(g.shape)), Field(g, np.zeros(g.shape)))
    with pytest.raises(NotInEPlus):
        nehari_project(bad, prob)


def test_projection_fails_when_quadratic_form_degenerate():
    # coupling above the geometric mean of the potentials makes the
    # quadratic form negative along u = v, so no projected scale exists
    prob = constant_problem(v1=1.0, v2=1.0, lam=1.2)
    g = prob.grid
    state = smooth_pair(prob, 0)
    same = StatePair(state.u, state.u)
    assert coupled_quadratic(same, prob) < 0.0
    with pytest.raises(BracketFailure):
        nehari_project(same, prob)


# ---------------------------------------------------------------------------
# the solver


def test_solve_refuses_invalid_problem():
    prob = constant_problem(v1=1.0, v2=1.0, lam=1.2)
    with pytest.raises(ValidationFailed):
        solve_ground_state(prob, opts=FAST)


@pytest.fixture(scope="module")
def baseline_report():
    return solve_ground_state(constant_problem(), opts=FAST)


def test_solve_baseline_converges(baseline_report):
    rep = baseline_report
    assert rep.converged
    assert not rep.stalled
    assert rep.iterations > 0
    assert rep.gradient_residual < FAST.tol_residual
    assert rep.nehari_residual < 1e-8


def test_solve_report_level_matches_state(baseline_report):
    rep = baseline_report
    prob = constant_problem()
    assert rep.level == pytest.approx(energy(rep.state, prob).total, rel=1e-12)
    assert rep.level > 0.0


def test_solve_respects_positivity(baseline_report):
    rep = baseline_report
    assert rep.state.u.values.min() >= -1e-12
    assert rep.state.v.values.min() >= -1e-12
    assert rep.positive_fraction_u == 1.0
    assert rep.positive_fraction_v == 1.0


def test_solve_tracks_projection_history(baseline_report):
    rep = baseline_report
    assert len(rep.t_history) == rep.iterations + 1
    assert all(t > 0 for t in rep.t_history)
    text = rep.summary()
    assert "level" in text and "converged = True" in text


def test_solve_symmetric_problem_gives_symmetric_pair():
    prob = constant_problem(v1=1.0, v2=1.0, lam=0.5)
    rep = solve_ground_state(prob, opts=FAST)
    assert rep.converged
    diff = np.linalg.norm(rep.state.u.values - rep.state.v.values)
    norm = np.linalg.norm(rep.state.u.values)
    assert diff / norm < 1e-4


def test_solve_zero_coupling_recovers_scalar_level():
    prob = constant_problem(lam=0.0)
    rep = solve_ground_state(prob, opts=FAST)
    s1 = solve_scalar_ground_state(1, prob, opts=FAST)
    s2 = solve_scalar_ground_state(2, prob, opts=FAST)
    assert rep.converged and s1.converged and s2.converged
    target = min(s1.level, s2.level)
    assert rep.level == pytest.approx(target, rel=1e-6)


def test_solver_deterministic():
    prob = constant_problem()
    a = solve_ground_state(prob, opts=FAST)
    b = solve_ground_state(prob, opts=FAST)
    assert a.level == b.level
    assert a.iterations == b.iterations
    assert np.array_equal(a.state.u.values, b.state.u.values)
    assert np.array_equal(a.state.v.values, b.state.v.values)


def test_solve_not_converged_when_starved():
    rep = solve_ground_state(constant_problem(), opts=SolverOptions(max_iters=3))
    assert not rep.converged


def test_solve_reports_stall_on_unreachable_tolerance():
    opts = SolverOptions(max_iters=4000, tol_residual=1e-300)
    rep = solve_ground_state(constant_problem(n=16), opts=opts)
    assert not rep.converged
    assert rep.stalled


def test_scalar_solver_leaves_other_component_zero():
    prob = constant_problem()
    rep1 = solve_scalar_ground_state(1, prob, opts=FAST)
    assert rep1.converged
    assert np.all(rep1.state.v.values == 0.0)
    assert rep1.state.u.values.max() > 0.0
    rep2 = solve_scalar_ground_state(2, prob, opts=FAST)
    assert rep2.converged
    assert np.all(rep2.state.u.values == 0.0)
    with pytest.raises(ValueError):
        solve_scalar_ground_state(3, prob, opts=FAST)


def test_scalar_levels_order_with_potential():
    # the component with the larger potential pays more, so its scalar
    # level is strictly higher
    prob = constant_problem(v1=1.0, v2=1.5)
    s1 = solve_scalar_ground_state(1, prob, opts=FAST)
    s2 = solve_scalar_ground_state(2, prob, opts=FAST)
    assert s1.converged and s2.converged
    assert s1.level < s2.level


def test_restarts_keep_best_level():
    prob = constant_problem()
    single = solve_ground_state(prob, opts=FAST)
    multi = solve_with_restarts(prob, opts=FAST, restarts=3)
    assert multi.restarts == 3
    assert multi.converged
    assert multi.level <= single.level + 1e-12 * abs(single.level)
    with pytest.raises(ValueError):
        solve_with_restarts(prob, opts=FAST, restarts=0)


def test_warm_start_accepted():
    prob = constant_problem()
    cold = solve_ground_state(prob, opts=FAST)
    warm = solve_ground_state(prob, init=cold.state, opts=FAST)
    assert warm.converged
    assert warm.iterations <= cold.iterations
    assert warm.level == pytest.approx(cold.level, rel=1e-10)


# ---------------------------------------------------------------------------
# geometry diagnostics


@pytest.fixture(scope="module")
def diagnosed():
    prob = constant_problem()
    rep = solve_ground_state(prob, opts=FAST)
    diag = mountain_pass_diagnostics(prob, rep.state, opts=FAST, reference_level=rep.level)
    return rep, diag


def test_diagnostics_witness_geometry(diagnosed):
    _, diag = diagnosed
    assert diag.small_sphere_witnessed
    assert diag.geometry_witnessed
    assert diag.radii[0] == pytest.approx(1e-4, rel=1e-12)
    assert np.all(diag.min_energy_per_radius > 0.0)
    assert diag.witness_radius == pytest.approx(1e-4, rel=1e-12)


def test_diagnostics_witness_negative_ray(diagnosed):
    _, diag = diagnosed
    assert diag.negative_ray_witnessed
    assert diag.t_negative is not None
    assert diag.t_negative > 1.0


def test_diagnostics_ray_maximum_is_level(diagnosed):
    rep, diag = diagnosed
    assert diag.ray_max == pytest.approx(rep.level, rel=1e-8)
    assert diag.ray_argmax == pytest.approx(1.0, abs=1e-6)
    assert diag.level_consistent
    assert diag.level_gap is not None and diag.level_gap < 1e-8 * rep.level


def test_diagnostics_flag_inconsistent_reference(diagnosed):
    rep, _ = diagnosed
    prob = constant_problem()
    diag = mountain_pass_diagnostics(
        prob, rep.state, opts=FAST, reference_level=rep.level * 2.0
    )
    assert not diag.level_consistent


def test_diagnostics_summary_renders(diagnosed):
    _, diag = diagnosed
    text = diag.summary()
    assert "small_sphere_witnessed = True" in text
    assert "ray_max" in text
