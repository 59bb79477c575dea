"""Structural hypothesis checking for a perturbed periodic system.

Before any solve the library can audit a problem: positivity of the
potentials, relative coupling size below one, perturbation signs and
spatial decay, and superlinearity / subcriticality / nonquadraticity of
both nonlinearities, with the witnessed constants printed alongside.
"""

from fracground import (
    NonlinearitySpec,
    ProblemSpec,
    ScalarFunctionSpec,
    make_grid,
    validate_assumptions,
)


def build_problem(coupling_base):
    grid = make_grid(2, 64, 8.0)
    nl = NonlinearitySpec(kind="log_power", gamma=1.0)
    return ProblemSpec(
        grid=grid,
        s1=0.5,
        s2=0.5,
        V1=ScalarFunctionSpec(
            kind="periodic_plus_perturbation",
            base_constant=1.0,
            trig_amplitude=0.2,
            trig_periods=(1, 1),
            perturbation_amplitude=-0.2,
            perturbation_width=0.5,
        ),
        V2=ScalarFunctionSpec(
            kind="periodic_trig",
            base_constant=1.2,
            trig_amplitude=0.2,
            trig_periods=(1, 2),
        ),
        coupling=ScalarFunctionSpec(
            kind="periodic_plus_perturbation",
            base_constant=coupling_base,
            perturbation_amplitude=0.15,
            perturbation_width=0.5,
        ),
        nl1=nl,
        nl2=nl,
    )


def main():
    print("=== a well posed problem ===\n")
    report = validate_assumptions(build_problem(coupling_base=0.4))
    print(report.render())

    print("\n=== the same problem with the coupling pushed too high ===\n")
    report = validate_assumptions(build_problem(coupling_base=1.1))
    print(report.render())
    print(f"\nall_passed = {report.all_passed}")
    print("failing checks:", ", ".join(c.name for c in report.failures()))


if __name__ == "__main__":
    main()
