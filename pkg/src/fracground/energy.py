"""Energy functional, gradient, and the ray constraint for coupled pairs.

For a pair (u, v) the functional is

    I(u, v) = 1/2 * (Q1(u) + Q2(v) - 2 int lambda u v) - int F1(u) - int F2(v)

where Qi(w) = int |(-Lap)^(si/2) w|^2 + Vi w^2 is the component quadratic
form.  Its derivative pairs a test pair (phi, psi) with

    G_u = (-Lap)^{s1} u + V1 u - f1(u) - lambda v
    G_v = (-Lap)^{s2} v + V2 v - f2(v) - lambda u.

nehari_value(u, v) = <I'(u,v), (u,v)> is the constraint whose zero set is
the natural manifold for ground-state minimization; it also equals the
derivative of t -> I(t u, t v) at t = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft

from .grid import Field, GridMismatch, hs_quadratic_form
from .model import ProblemSpec

__all__ = [
    "StatePair",
    "EnergyBreakdown",
    "energy",
    "gradient",
    "coupled_quadratic",
    "nehari_value",
    "l2_norm_pair",
    "DEFAULT_NEHARI_TOL",
]

# Default relative tolerance on |nehari_value| vs the coupled quadratic form.
DEFAULT_NEHARI_TOL = 1.0e-10


@dataclass(frozen=True)
class StatePair:
    """A candidate pair (u, v) on a common grid."""

    u: Field
    v: Field

    def __post_init__(self):
        if self.u.grid != self.v.grid:
            raise GridMismatch("u and v live on different grids")

    @property
    def grid(self):
        return self.u.grid

    def scaled(self, t: float) -> "StatePair":
        return StatePair(
            Field(self.grid, t * self.u.values),
            Field(self.grid, t * self.v.values),
        )

    def has_positive_part(self) -> bool:
        return bool(
            np.max(self.u.values, initial=-np.inf) > 0.0
            or np.max(self.v.values, initial=-np.inf) > 0.0
        )


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy terms; total is defined by the displayed combination."""

    quad_u: float
    quad_v: float
    coupling_term: float
    F1_integral: float
    F2_integral: float
    total: float


def _check_state(state: StatePair, problem: ProblemSpec) -> None:
    if state.grid != problem.grid:
        raise GridMismatch("state and problem live on different grids")


def energy(state: StatePair, problem: ProblemSpec) -> EnergyBreakdown:
    """Evaluate the functional and its term-by-term breakdown."""
    _check_state(state, problem)
    g = problem.grid
    dV = g.cell_volume
    u, v = state.u.values, state.v.values
    quad_u = hs_quadratic_form(state.u, problem.s1, problem.V1_field)
    quad_v = hs_quadratic_form(state.v, problem.s2, problem.V2_field)
    coupling_term = 2.0 * dV * float(np.sum(problem.coupling_field.values * u * v))
    F1_integral = dV * float(np.sum(problem.nl1.F(u)))
    F2_integral = dV * float(np.sum(problem.nl2.F(v)))
    total = 0.5 * (quad_u + quad_v - coupling_term) - F1_integral - F2_integral
    return EnergyBreakdown(quad_u, quad_v, coupling_term, F1_integral, F2_integral, total)


def coupled_quadratic(state: StatePair, problem: ProblemSpec) -> float:
    """Q(u, v) = Q1(u) + Q2(v) - 2 int lambda u v."""
    _check_state(state, problem)
    dV = problem.grid.cell_volume
    u, v = state.u.values, state.v.values
    quad_u = hs_quadratic_form(state.u, problem.s1, problem.V1_field)
    quad_v = hs_quadratic_form(state.v, problem.s2, problem.V2_field)
    return quad_u + quad_v - 2.0 * dV * float(np.sum(problem.coupling_field.values * u * v))


def nehari_value(state: StatePair, problem: ProblemSpec) -> float:
    """<I'(u,v), (u,v)>: the ray-constraint residual."""
    _check_state(state, problem)
    dV = problem.grid.cell_volume
    u, v = state.u.values, state.v.values
    nonlinear = dV * float(
        np.sum(problem.nl1.f(u) * u) + np.sum(problem.nl2.f(v) * v)
    )
    return coupled_quadratic(state, problem) - nonlinear


def gradient(
    state: StatePair, problem: ProblemSpec, preconditioned: bool = False
) -> StatePair:
    """L^2 gradient pair, optionally preconditioned.

    The preconditioner divides Fourier coefficients by |xi|^(2si) + mean(Vi),
    a positive symbol that tames the stiffness of the fractional operator
    without changing the set of stationary points.
    """
    _check_state(state, problem)
    g = problem.grid
    u, v = state.u.values, state.v.values
    lam = problem.coupling_field.values
    sym1 = g.symbol(problem.s1)
    sym2 = g.symbol(problem.s2)

    gu = sfft.ifftn(sym1 * sfft.fftn(u)).real
    gu += problem.V1_field.values * u - problem.nl1.f(u) - lam * v
    gv = sfft.ifftn(sym2 * sfft.fftn(v)).real
    gv += problem.V2_field.values * v - problem.nl2.f(v) - lam * u

    if preconditioned:
        gu = sfft.ifftn(sfft.fftn(gu) / (sym1 + problem.mean_potential(1))).real
        gv = sfft.ifftn(sfft.fftn(gv) / (sym2 + problem.mean_potential(2))).real

    return StatePair(Field(g, gu), Field(g, gv))


def l2_norm_pair(state: StatePair) -> float:
    """L^2 x L^2 norm of the pair."""
    dV = state.grid.cell_volume
    return float(
        np.sqrt(dV * (np.sum(state.u.values**2) + np.sum(state.v.values**2)))
    )
