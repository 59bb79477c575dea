"""Ground-state computation by projected descent on the ray constraint.

Each iterate is kept on the natural constraint set (nehari_value = 0) by a
one-dimensional projection along its own ray: t -> nehari_value(t x)/t^2 is
strictly decreasing for admissible nonlinearities, so the projection scalar
is the unique zero of a monotone function and bracketing plus bisection is
exact enough for the stated tolerances.  The outer iteration is a
preconditioned gradient descent with a backtracking line search on the
projected energy; convergence requires both energy stagnation and a small
preconditioned gradient residual.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy import fft as sfft

from .energy import (
    DEFAULT_NEHARI_TOL,
    StatePair,
    coupled_quadratic,
    energy,
    gradient,
    l2_norm_pair,
    nehari_value,
)
from .grid import Field, Grid, hs_quadratic_form
from .model import ProblemSpec, ValidationFailed, gaussian_bump, validate_assumptions

__all__ = [
    "SolverOptions",
    "SolveReport",
    "DiagnosticsReport",
    "NotInEPlus",
    "BracketFailure",
    "nehari_project",
    "default_initial_state",
    "solve_ground_state",
    "solve_scalar_ground_state",
    "solve_with_restarts",
    "mountain_pass_diagnostics",
]

# Line search gives up once the step has shrunk by this factor.
_STEP_FLOOR = 1.0e-14
# Bracket expansion gives up past t = 2^60.
_MAX_DOUBLINGS = 60
_BISECT_ITERS = 60
_BISECT_RELWIDTH = 1.0e-14


class NotInEPlus(ValueError):
    """Both components lack a positive part; no ray crosses the manifold."""


class BracketFailure(RuntimeError):
    """Projection could not bracket a sign change along the ray."""


@dataclass(frozen=True)
class SolverOptions:
    max_iters: int = 5000
    step_init: float = 1.0
    backtrack_factor: float = 0.5
    tol_energy: float = 1.0e-10
    tol_residual: float = 1.0e-8
    seed: int = 0
    positivity_clip: bool = True


@dataclass
class SolveReport:
    """Outcome of one ground-state solve."""

    state: StatePair
    level: float
    nehari_residual: float
    gradient_residual: float
    iterations: int
    positive_fraction_u: float
    positive_fraction_v: float
    converged: bool
    t_history: list = dc_field(default_factory=list)
    stalled: bool = False
    restarts: int = 1

    def summary(self) -> str:
        lines = [
            f"level = {self.level!r}",
            f"nehari_residual = {self.nehari_residual:.6e}",
            f"gradient_residual = {self.gradient_residual:.6e}",
            f"iterations = {self.iterations}",
            f"positive_fraction_u = {self.positive_fraction_u:.6f}",
            f"positive_fraction_v = {self.positive_fraction_v:.6f}",
            f"converged = {self.converged}",
            f"stalled = {self.stalled}",
            f"restarts = {self.restarts}",
        ]
        return "\n".join(lines)


def _require_valid(problem: ProblemSpec) -> None:
    report = validate_assumptions(problem)
    if not report.all_passed:
        names = ", ".join(c.name for c in report.failures())
        raise ValidationFailed(f"validation failed: {names}")


def nehari_project(state: StatePair, problem: ProblemSpec) -> tuple:
    """Scale a pair onto the constraint set.

    Returns (t0, scaled_state) with nehari_value(scaled_state) ~ 0.  The
    zero is bracketed by doubling/halving from t = 1 and then bisected;
    monotonicity of nehari_value(t x)/t^2 makes the root unique.
    """
    if not state.has_positive_part():
        raise NotInEPlus("state has no positive part in either component")
    Q = coupled_quadratic(state, problem)
    if Q <= 0.0:
        raise BracketFailure(
            f"coupled quadratic form is {Q:.3g}; no projection exists"
        )
    dV = problem.grid.cell_volume
    u, v = state.u.values, state.v.values
    f1, f2 = problem.nl1.f, problem.nl2.f

    def slope(t: float) -> float:
        # nehari_value(t x) / t^2
        a = t * u
        b = t * v
        nonlinear = dV * float(np.sum(f1(a) * a) + np.sum(f2(b) * b))
        return Q - nonlinear / (t * t)

    t_lo = t_hi = 1.0
    s1 = slope(1.0)
    if s1 > 0.0:
        for _ in range(_MAX_DOUBLINGS):
            t_hi *= 2.0
            if slope(t_hi) < 0.0:
                break
        else:
            raise BracketFailure("no sign change along the ray below t = 2^60")
        t_lo = 0.5 * t_hi
    elif s1 < 0.0:
        for _ in range(_MAX_DOUBLINGS):
            t_lo *= 0.5
            if slope(t_lo) > 0.0:
                break
        else:
            raise BracketFailure("no sign change along the ray above t = 2^-60")
        t_hi = 2.0 * t_lo
    else:
        return 1.0, state

    for _ in range(_BISECT_ITERS):
        if t_hi - t_lo <= _BISECT_RELWIDTH * t_lo:
            break
        mid = 0.5 * (t_lo + t_hi)
        if slope(mid) > 0.0:
            t_lo = mid
        else:
            t_hi = mid
    t0 = 0.5 * (t_lo + t_hi)
    return t0, state.scaled(t0)


def default_initial_state(problem: ProblemSpec, rng: np.random.Generator) -> StatePair:
    """Centered unit-amplitude bumps on both components, jittered by the rng."""
    g = problem.grid
    bump = gaussian_bump(g, 0.125 * g.box_length)
    u = bump * (1.0 + 0.05 * rng.standard_normal(g.shape))
    v = bump * (1.0 + 0.05 * rng.standard_normal(g.shape))
    return StatePair(Field(g, u), Field(g, v))


def _positive_fraction(values: np.ndarray) -> float:
    support = np.abs(values) > 1.0e-12
    if not np.any(support):
        return 1.0
    return float(np.count_nonzero(values[support] > 0.0) / np.count_nonzero(support))


def _finish_report(
    state: StatePair,
    problem: ProblemSpec,
    iterations: int,
    converged: bool,
    stalled: bool,
    t_history: list,
) -> SolveReport:
    level = energy(state, problem).total
    Q = coupled_quadratic(state, problem)
    nres = abs(nehari_value(state, problem)) / Q if Q > 0.0 else np.inf
    g = gradient(state, problem, preconditioned=True)
    gres = l2_norm_pair(g) / l2_norm_pair(state)
    return SolveReport(
        state=state,
        level=level,
        nehari_residual=nres,
        gradient_residual=gres,
        iterations=iterations,
        positive_fraction_u=_positive_fraction(state.u.values),
        positive_fraction_v=_positive_fraction(state.v.values),
        converged=converged,
        t_history=t_history,
        stalled=stalled,
    )


def solve_ground_state(
    problem: ProblemSpec,
    init: StatePair | None = None,
    opts: SolverOptions | None = None,
) -> SolveReport:
    """Minimize the energy over the constraint set from one starting pair."""
    opts = opts or SolverOptions()
    _require_valid(problem)
    if init is None:
        rng = np.random.default_rng(opts.seed)
        init = default_initial_state(problem, rng)
    if not init.has_positive_part():
        raise NotInEPlus("initial state has no positive part in either component")

    t0, state = nehari_project(init, problem)
    t_history = [t0]
    E = energy(state, problem).total
    last_decrease = np.inf
    converged = False
    stalled = False
    iterations = 0

    for _ in range(opts.max_iters):
        g = gradient(state, problem, preconditioned=True)
        residual = l2_norm_pair(g) / l2_norm_pair(state)
        if last_decrease < opts.tol_energy and residual < opts.tol_residual:
            converged = True
            break

        eta = opts.step_init
        accepted = False
        while eta >= _STEP_FLOOR * opts.step_init:
            cu = state.u.values - eta * g.u.values
            cv = state.v.values - eta * g.v.values
            if opts.positivity_clip:
                cu = np.maximum(cu, 0.0)
                cv = np.maximum(cv, 0.0)
            try:
                t0, cand = nehari_project(
                    StatePair(Field(problem.grid, cu), Field(problem.grid, cv)),
                    problem,
                )
            except (NotInEPlus, BracketFailure):
                eta *= opts.backtrack_factor
                continue
            Ec = energy(cand, problem).total
            if Ec < E:
                accepted = True
                break
            eta *= opts.backtrack_factor

        if not accepted:
            # No strict decrease is available; the energy is stationary to
            # machine precision, so the residual alone decides.
            if residual < opts.tol_residual:
                converged = True
            else:
                stalled = True
            break

        last_decrease = (E - Ec) / max(abs(E), abs(Ec), 1.0e-300)
        state, E = cand, Ec
        iterations += 1
        t_history.append(t0)

    return _finish_report(state, problem, iterations, converged, stalled, t_history)


def solve_scalar_ground_state(
    which: int,
    problem: ProblemSpec,
    opts: SolverOptions | None = None,
) -> SolveReport:
    """Ground state of one component alone (coupling off, other component 0)."""
    if which not in (1, 2):
        raise ValueError(f"which must be 1 or 2, got {which}")
    opts = opts or SolverOptions()
    decoupled = problem.with_coupling_scale(0.0)
    g = problem.grid
    rng = np.random.default_rng(opts.seed)
    bump = gaussian_bump(g, 0.125 * g.box_length)
    active = bump * (1.0 + 0.05 * rng.standard_normal(g.shape))
    zero = np.zeros(g.shape)
    if which == 1:
        init = StatePair(Field(g, active), Field(g, zero))
    else:
        init = StatePair(Field(g, zero), Field(g, active))
    return solve_ground_state(decoupled, init=init, opts=opts)


def solve_with_restarts(
    problem: ProblemSpec,
    opts: SolverOptions | None = None,
    restarts: int = 1,
) -> SolveReport:
    """Run several seeds and keep the lowest converged level."""
    opts = opts or SolverOptions()
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    best = None
    for k in range(restarts):
        rep = solve_ground_state(
            problem, opts=dataclasses.replace(opts, seed=opts.seed + k)
        )
        if best is None:
            best = rep
        elif (rep.converged, -rep.level) > (best.converged, -best.level):
            best = rep
    return dataclasses.replace(best, restarts=restarts)


def _smooth_random_field(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    """Band-limited noise: white samples filtered by a Gaussian in frequency."""
    noise = rng.standard_normal(grid.shape)
    scale = (grid.box_length / 16.0) ** 2
    filt = np.exp(-scale * grid.sq_wavenumber())
    return sfft.ifftn(filt * sfft.fftn(noise)).real


@dataclass
class DiagnosticsReport:
    """Sampled mountain-pass geometry along spheres and one ray."""

    radii: np.ndarray
    min_energy_per_radius: np.ndarray
    small_sphere_witnessed: bool
    witness_radius: float | None
    negative_ray_witnessed: bool
    t_negative: float | None
    ray_max: float
    ray_argmax: float
    level_consistent: bool | None
    level_gap: float | None

    @property
    def geometry_witnessed(self) -> bool:
        return self.small_sphere_witnessed and self.negative_ray_witnessed

    def summary(self) -> str:
        lines = ["radius   min energy over directions"]
        for r, e in zip(self.radii, self.min_energy_per_radius):
            lines.append(f"{r:9.3e}  {e: .6e}")
        lines.append(f"small_sphere_witnessed = {self.small_sphere_witnessed}"
                     f" (radius {self.witness_radius})")
        lines.append(f"negative_ray_witnessed = {self.negative_ray_witnessed}"
                     f" (t {self.t_negative})")
        lines.append(f"ray_max = {self.ray_max!r} at t = {self.ray_argmax!r}")
        if self.level_consistent is not None:
            lines.append(f"level_consistent = {self.level_consistent}"
                         f" (gap {self.level_gap:.3e})")
        return "\n".join(lines)


def mountain_pass_diagnostics(
    problem: ProblemSpec,
    probe: StatePair,
    opts: SolverOptions | None = None,
    reference_level: float | None = None,
) -> DiagnosticsReport:
    """Witness the two geometric conditions by sampling.

    (a) On spheres of several radii in the product norm the energy should be
    strictly positive for small radius; (b) along the probe ray the energy
    should turn negative for large t.  The ray maximum (the projected
    energy) upper-bounds the min-max level along this ray; at a converged
    ground state it reproduces the level with t close to 1.
    """
    opts = opts or SolverOptions()
    _require_valid(problem)
    if not probe.has_positive_part():
        raise NotInEPlus("probe has no positive part in either component")
    g = problem.grid
    rng = np.random.default_rng(opts.seed)

    directions = []
    for _ in range(32):
        du = _smooth_random_field(g, rng)
        dv = _smooth_random_field(g, rng)
        pair = StatePair(Field(g, du), Field(g, dv))
        norm = np.sqrt(
            hs_quadratic_form(pair.u, problem.s1, problem.V1_field)
            + hs_quadratic_form(pair.v, problem.s2, problem.V2_field)
        )
        directions.append(pair.scaled(1.0 / norm))

    radii = np.geomspace(1.0e-4, 1.0, 9)
    mins = np.empty_like(radii)
    for i, rho in enumerate(radii):
        mins[i] = min(
            energy(d.scaled(rho), problem).total for d in directions
        )
    witnessed = bool(np.any(mins > 0.0))
    witness_radius = float(radii[np.argmax(mins > 0.0)]) if witnessed else None

    t = 1.0
    t_negative = None
    for _ in range(_MAX_DOUBLINGS + 1):
        if energy(probe.scaled(t), problem).total < 0.0:
            t_negative = t
            break
        t *= 2.0

    t0, projected = nehari_project(probe, problem)
    ray_max = energy(projected, problem).total
    level_consistent = None
    level_gap = None
    if reference_level is not None:
        level_gap = ray_max - reference_level
        level_consistent = bool(
            ray_max >= reference_level - max(1.0e-8, 1.0e-8 * abs(reference_level))
        )

    return DiagnosticsReport(
        radii=radii,
        min_energy_per_radius=mins,
        small_sphere_witnessed=witnessed,
        witness_radius=witness_radius,
        negative_ray_witnessed=t_negative is not None,
        t_negative=t_negative,
        ray_max=ray_max,
        ray_argmax=t0,
        level_consistent=level_consistent,
        level_gap=level_gap,
    )
