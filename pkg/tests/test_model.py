"""Nonlinearities, sampled weights, problem specs, and hypothesis checks."""

import dataclasses

import numpy as np
import pytest
from scipy.integrate import quad

from fracground import (
    NonlinearitySpec,
    ProblemSpec,
    ScalarFunctionSpec,
    make_grid,
    nonlinearity_eval,
    sample_function,
    validate_assumptions,
)
from fracground.model import gaussian_bump, perturbation_values
from helpers import constant_problem, constant_spec


# ---------------------------------------------------------------------------
# nonlinearity point values


def test_log_power_values_at_one():
    nl = NonlinearitySpec(kind="log_power", gamma=1.0)
    f, F, nq = nonlinearity_eval(nl, 1.0)
    assert f == pytest.approx(np.log(2.0), abs=1e-15)
    assert F == pytest.approx(0.25, abs=1e-15)
    assert nq == pytest.approx(np.log(2.0) - 0.5, abs=1e-15)


def test_pure_power_values():
    nl = NonlinearitySpec(kind="pure_power", p=4.0)
    f, F, nq = nonlinearity_eval(nl, 2.0)
    assert f == 8.0
    assert F == 4.0
    assert nq == 8.0
    nl3 = NonlinearitySpec(kind="pure_power", p=3.0)
    f, F, nq = nonlinearity_eval(nl3, 2.0)
    assert f == pytest.approx(4.0, rel=1e-15)
    assert F == pytest.approx(8.0 / 3.0, rel=1e-15)
    assert nq == pytest.approx(8.0 / 3.0, rel=1e-15)


@pytest.mark.parametrize("kind,kw", [("log_power", {"gamma": 2.0}), ("pure_power", {"p": 4.0})])
def test_nonlinearity_vanishes_on_nonpositive_input(kind, kw):
    nl = NonlinearitySpec(kind=kind, **kw)
    for t in (0.0, -0.5, -100.0):
        assert nonlinearity_eval(nl, t) == (0.0, 0.0, 0.0)
    arr = np.array([-1.0, 0.0, 1.0])
    assert np.all(nl.f(arr)[:2] == 0.0)
    assert nl.f(arr)[2] > 0.0


@pytest.mark.parametrize("gamma", [1.0, 1.5, 2.0, 3.0])
def test_log_power_primitive_matches_adaptive_quadrature(gamma):
    # independent oracle: adaptive quadrature of the defining integral
    nl = NonlinearitySpec(kind="log_power", gamma=gamma)
    for t in (1e-4, 1e-2, 0.5, 1.0, 3.0, 20.0, 500.0):
        expected, err = quad(
            lambda x: x * np.log1p(x) ** gamma,
            0.0,
            t,
            limit=200,
            epsabs=1e-13 * t,
            epsrel=1e-12,
        )
        # agreement within the target tolerance or the oracle's own
        # reported uncertainty, whichever is larger
        assert abs(nl.F(t) - expected) <= max(1e-10 * expected, 2.0 * err)


@pytest.mark.parametrize(
    "kind,kw",
    [
        ("log_power", {"gamma": 1.0}),
        ("log_power", {"gamma": 2.5}),
        ("pure_power", {"p": 3.5}),
    ],
)
def test_primitive_derivative_is_f(kind, kw):
    nl = NonlinearitySpec(kind=kind, **kw)
    for t in (0.01, 0.1, 1.0, 10.0, 100.0):
        h = 1e-5 * t
        fd = (nl.F(t + h) - nl.F(t - h)) / (2.0 * h)
        assert fd == pytest.approx(nl.f(t), rel=1e-6)


@pytest.mark.parametrize(
    "kind,kw",
    [
        ("log_power", {"gamma": 1.0}),
        ("log_power", {"gamma": 2.0}),
        ("pure_power", {"p": 3.0}),
        ("pure_power", {"p": 4.0}),
    ],
)
def test_nonquadratic_part_positive_and_increasing(kind, kw):
    nl = NonlinearitySpec(kind=kind, **kw)
    t = np.geomspace(1e-4, 1e4, 1000)
    nq = nl.nq(t)
    assert np.all(nq > 0.0)
    assert np.all(np.diff(nq) > 0.0)
    ratio = nl.f(t) / t
    assert np.all(np.diff(ratio) > 0.0)


def test_nonquadratic_identity():
    # nq must equal f(t) t - 2 F(t) for both families
    t = np.geomspace(1e-3, 1e3, 50)
    for nl in (
        NonlinearitySpec(kind="log_power", gamma=1.0),
        NonlinearitySpec(kind="log_power", gamma=2.0),
        NonlinearitySpec(kind="pure_power", p=4.0),
    ):
        direct = nl.nq(t)
        combined = nl.f(t) * t - 2.0 * nl.F(t)
        assert np.max(np.abs(direct - combined)) <= 1e-12 * np.max(np.abs(direct))


def test_nonlinearity_spec_validation():
    with pytest.raises(ValueError, match="gamma"):
        NonlinearitySpec(kind="log_power", gamma=0.5)
    with pytest.raises(ValueError, match="p > 2"):
        NonlinearitySpec(kind="pure_power", p=2.0)
    with pytest.raises(ValueError, match="kind"):
        NonlinearitySpec(kind="cubic")


# ---------------------------------------------------------------------------
# sampled weights


def test_sample_constant():
    g = make_grid(2, 16, 8.0)
    f = sample_function(constant_spec(1.5), g, include_perturbation=True)
    assert np.all(f.values == 1.5)


def test_sample_trig_range():
    g = make_grid(2, 32, 8.0)
    spec = ScalarFunctionSpec(
        kind="periodic_trig", base_constant=2.0, trig_amplitude=1.0, trig_periods=(1, 2)
    )
    f = sample_function(spec, g, include_perturbation=True)
    assert f.values.min() == pytest.approx(1.0, abs=1e-12)
    assert f.values.max() == pytest.approx(3.0, abs=1e-12)
    # value at the origin is base + amplitude
    assert f.values[0, 0] == pytest.approx(3.0, abs=1e-14)


def test_sample_trig_requires_whole_periods():
    g = make_grid(1, 32, 2.0 * np.pi)
    spec = ScalarFunctionSpec(
        kind="periodic_trig", base_constant=1.0, trig_amplitude=0.5, trig_periods=(1,)
    )
    with pytest.raises(ValueError, match="whole number"):
        sample_function(spec, g, include_perturbation=False)


def test_sample_perturbation_center_value():
    g = make_grid(2, 32, 8.0)
    spec = ScalarFunctionSpec(
        kind="periodic_plus_perturbation",
        base_constant=1.0,
        trig_amplitude=0.0,
        trig_periods=(1, 1),
        perturbation_amplitude=-0.25,
        perturbation_width=0.5,
    )
    full = sample_function(spec, g, include_perturbation=True)
    bare = sample_function(spec, g, include_perturbation=False)
    center = g.n_per_axis // 2
    assert full.values[center, center] == pytest.approx(0.75, abs=1e-14)
    assert np.all(bare.values == 1.0)


def test_perturbation_values_helper():
    g = make_grid(2, 32, 8.0)
    spec = ScalarFunctionSpec(
        kind="periodic_plus_perturbation",
        base_constant=1.0,
        perturbation_amplitude=-0.25,
        perturbation_width=0.5,
    )
    pert = perturbation_values(spec, g)
    assert pert is not None
    assert np.all(pert < 0.0)
    center = g.n_per_axis // 2
    assert pert[center, center] == pytest.approx(-0.25, abs=1e-15)
    # no declared perturbation means no array at all
    assert perturbation_values(constant_spec(1.0), g) is None
    flat = dataclasses.replace(spec, perturbation_amplitude=0.0)
    assert perturbation_values(flat, g) is None


def test_gaussian_bump_shape():
    g = make_grid(1, 64, 8.0)
    bump = gaussian_bump(g, 0.5)
    x = g.axis_coordinates()
    expected = np.exp(-(((x - 4.0) / 0.5) ** 2))
    assert np.max(np.abs(bump - expected)) <= 1e-15


def test_scaled_spec_scales_all_amplitudes():
    spec = ScalarFunctionSpec(
        kind="periodic_plus_perturbation",
        base_constant=2.0,
        trig_amplitude=0.4,
        trig_periods=(1, 1),
        perturbation_amplitude=0.3,
        perturbation_width=0.5,
    )
    half = spec.scaled(0.5)
    assert half.base_constant == 1.0
    assert half.trig_amplitude == 0.2
    assert half.perturbation_amplitude == 0.15
    assert half.perturbation_width == 0.5


def test_function_spec_validation():
    with pytest.raises(ValueError, match="kind"):
        ScalarFunctionSpec(kind="exotic")
    with pytest.raises(ValueError):
        ScalarFunctionSpec(kind="constant", trig_amplitude=0.5)
    with pytest.raises(ValueError):
        ScalarFunctionSpec(kind="periodic_trig", base_constant=1.0, perturbation_amplitude=0.1)
    with pytest.raises(ValueError):
        ScalarFunctionSpec(
            kind="periodic_trig", base_constant=1.0, trig_amplitude=0.1, trig_periods=(0,)
        )


# ---------------------------------------------------------------------------
# problem specs


def test_problem_spec_rejects_bad_orders():
    with pytest.raises(ValueError, match="s1"):
        constant_problem(s=0.0)
    with pytest.raises(ValueError, match="s1"):
        constant_problem(s=1.5)


def test_delta_eff_constant_weights():
    prob = constant_problem(v1=1.0, v2=1.0, lam=0.5)
    assert prob.delta_eff == pytest.approx(0.5, rel=1e-14)
    prob2 = constant_problem(v1=4.0, v2=1.0, lam=1.0)
    assert prob2.delta_eff == pytest.approx(0.5, rel=1e-14)


def test_with_coupling_scale_scales_delta():
    prob = constant_problem(v1=1.0, v2=1.0, lam=0.5)
    assert prob.with_coupling_scale(0.4).delta_eff == pytest.approx(0.2, rel=1e-12)
    assert prob.with_coupling_scale(0.0).delta_eff == 0.0


def test_delta_eff_degenerate_potential_is_infinite():
    prob = constant_problem(v1=0.0, v2=1.0, lam=0.5)
    assert prob.delta_eff == np.inf


def test_subcritical_bound():
    prob = constant_problem(dim=2, s=0.5)
    assert prob.subcritical_bound(0.5) == pytest.approx(4.0, rel=1e-14)
    assert prob.subcritical_bound(0.8) == pytest.approx(10.0, rel=1e-12)
    assert prob.subcritical_bound(1.0) == np.inf
    prob3 = constant_problem(dim=3, n=8, s=1.0)
    assert prob3.subcritical_bound(1.0) == pytest.approx(6.0, rel=1e-14)


def test_periodic_reference_switch():
    spec = ScalarFunctionSpec(
        kind="periodic_plus_perturbation",
        base_constant=1.0,
        perturbation_amplitude=-0.2,
        perturbation_width=0.5,
    )
    base = constant_problem()
    prob = dataclasses.replace(base, V1=spec)
    full = prob.with_periodic_reference(False)
    ref = prob.with_periodic_reference(True)
    center = tuple([base.grid.n_per_axis // 2] * 2)
    assert full.V1_field.values[center] == pytest.approx(0.8, abs=1e-14)
    assert ref.V1_field.values[center] == pytest.approx(1.0, abs=1e-14)


# ---------------------------------------------------------------------------
# hypothesis validation


def test_validator_passes_constant_baseline():
    report = validate_assumptions(constant_problem())
    assert report.all_passed
    assert report.failures() == []
    assert report.constants["delta_eff"] == pytest.approx(0.5 / np.sqrt(1.5), rel=1e-12)
    text = report.render()
    assert "[PASS]" in text and "[FAIL]" not in text


def test_validator_fitted_exponents_pure_power():
    # nq(t) = t^4 / 2 exactly, so the fitted exponent is 4 and the
    # witnessed constant is 1/2
    report = validate_assumptions(constant_problem(nl_kind="pure_power", p=4.0, s=0.8))
    assert report.all_passed
    assert report.constants["alpha_nl1"] == pytest.approx(4.0, abs=1e-9)
    assert report.constants["a2_nl1"] == pytest.approx(0.5, rel=1e-9)


def test_validator_flags_large_coupling():
    report = validate_assumptions(constant_problem(v1=1.0, v2=1.0, lam=1.0))
    assert not report.all_passed
    names = [c.name for c in report.failures()]
    assert "coupling_size_effective" in names
    assert report.constants["delta_eff"] == pytest.approx(1.0, rel=1e-14)
    assert "[FAIL]" in report.render()


def test_validator_flags_critical_growth():
    # in two dimensions the quartic power sits exactly at the critical
    # exponent for order one half, and below it for order 0.8
    bad = validate_assumptions(constant_problem(nl_kind="pure_power", p=4.0, s=0.5))
    names = [c.name for c in bad.failures()]
    assert "growth_subcritical_nl1" in names
    assert "growth_subcritical_nl2" in names
    good = validate_assumptions(constant_problem(nl_kind="pure_power", p=4.0, s=0.8))
    assert good.all_passed


def test_validator_flags_wrong_sign_perturbations():
    base = constant_problem()
    raised_potential = dataclasses.replace(
        base,
        V1=ScalarFunctionSpec(
            kind="periodic_plus_perturbation",
            base_constant=1.0,
            perturbation_amplitude=0.2,
            perturbation_width=0.5,
        ),
    )
    rep = validate_assumptions(raised_potential)
    assert "potential_perturbations_lower" in [c.name for c in rep.failures()]

    lowered_coupling = dataclasses.replace(
        base,
        coupling=ScalarFunctionSpec(
            kind="periodic_plus_perturbation",
            base_constant=0.5,
            perturbation_amplitude=-0.2,
            perturbation_width=0.5,
        ),
    )
    rep = validate_assumptions(lowered_coupling)
    assert "coupling_perturbation_raises" in [c.name for c in rep.failures()]


def test_validator_flags_slow_perturbation_decay():
    base = constant_problem()
    wide = dataclasses.replace(
        base,
        V1=ScalarFunctionSpec(
            kind="periodic_plus_perturbation",
            base_constant=1.0,
            perturbation_amplitude=-0.2,
            perturbation_width=4.0,
        ),
    )
    rep = validate_assumptions(wide)
    assert "perturbation_decay" in [c.name for c in rep.failures()]

    narrow = dataclasses.replace(
        base,
        V1=ScalarFunctionSpec(
            kind="periodic_plus_perturbation",
            base_constant=1.0,
            perturbation_amplitude=-0.2,
            perturbation_width=0.5,
        ),
    )
    assert validate_assumptions(narrow).all_passed


def test_validator_flags_nonpositive_potential():
    rep = validate_assumptions(constant_problem(v1=-1.0, v2=1.0, lam=0.1))
    names = [c.name for c in rep.failures()]
    assert "periodic_potentials_positive" in names
    assert rep.constants["V_p"] == -1.0


def test_validator_log_power_exponents():
    report = validate_assumptions(constant_problem())
    alpha = report.constants["alpha_nl1"]
    assert 1.5 < alpha < 3.0
    assert report.constants["alpha_threshold"] == pytest.approx(0.5, rel=1e-12)
    assert report.constants["p_nl1"] == 2.5
