from math import comb, factorial

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from pla_forge import design
from pla_forge.sequences import PulseSequence, get, wrap

odd_phases = st.integers(1, 6).flatmap(
    lambda k: st.lists(st.floats(0, 2 * np.pi, allow_nan=False), min_size=2 * k + 1, max_size=2 * k + 1))


@pytest.mark.parametrize("name,n", [("F1", 1), ("PLA1_2", 1), ("PLA2_1", 2), ("PLA3_1", 3)])
def test_catalog_satisfies(name, n):
    rep = design.check_pla(get(name), n, tol=1e-10)
    assert rep.satisfied, rep


def test_knill_fails_first_order():
    rep = design.check_pla(get("knill"), 1)
    assert rep.failing_orders() == [1]
    assert np.isclose(rep.residuals[1], abs(-2.732 - 4.732j), rtol=1e-3)


@pytest.mark.parametrize("variant", ["F1", "PLA1_2"])
@pytest.mark.parametrize("sign", [1, -1])
def test_closed_forms(variant, sign):
    assert design.check_pla(design.closed_form_pla1(variant, sign), 1, tol=1e-12).satisfied


def test_closed_form_values():
    b = np.arccos((1 - 2 * np.sqrt(10)) / 6)
    d = np.arccos((np.sqrt(10) - 2) / 3)
    assert np.isclose(b, 2.66253, atol=1e-5)
    assert np.isclose(d, 1.17296, atol=1e-5)


@given(odd_phases, st.integers(0, 4))
def test_square_moment_binomial_relation(phases, p):
    s = PulseSequence("r", phases)
    cont = design.continuous_moment(s, p)
    tog = design.toggled_moments(s.toggling, p)
    expect = 0.5 * np.pi ** (p + 1) / factorial(p + 1) * sum(comb(p + 1, q) * tog[q] for q in range(p + 1))
    assert abs(complex(cont[0], cont[1]) - expect) <= 1e-10 * max(1.0, abs(expect))


@pytest.mark.parametrize("p", [0, 1, 2, 3])
def test_square_moment_matches_quadrature(p):
    s = get("knill")
    tog = s.toggling

    def integrand(u, comp):
        l = min(int(u // np.pi), len(tog) - 1)
        rho = np.cos(tog[l]) if comp == 0 else np.sin(tog[l])
        return 0.5 * u ** p / factorial(p) * rho

    vals = [sum(integrate.quad(integrand, l * np.pi, (l + 1) * np.pi, args=(c,))[0] for l in range(len(tog)))
            for c in (0, 1)]
    assert np.allclose(design.continuous_moment(s, p)[:2], vals, rtol=1e-10, atol=1e-12)


def test_pla_zeroes_low_moments():
    for name, n in [("F1", 1), ("PLA2_1", 2), ("PLA3_1", 3)]:
        for p in range(n + 1):
            assert np.linalg.norm(design.continuous_moment(get(name), p)) < 1e-9


def test_f1_odd_moment_vanishes_about_center():
    c3 = design.continuous_moment(get("F1"), 3, origin="center")
    assert np.linalg.norm(c3) < 1e-12
    assert np.linalg.norm(design.continuous_moment(get("F1"), 2)) > 1e-3


def test_objective_zero_on_solutions():
    assert design.objective(get("PLA2_1").phases, 2) < 1e-25


def test_solver_config_validation():
    with pytest.raises(ValueError):
        design.SolverConfig(n=1, pulses=4)
    with pytest.raises(ValueError):
        design.SolverConfig(n=1, pulses=5, restarts=0)


def test_solver_deterministic():
    cfg = design.SolverConfig(n=1, pulses=5, restarts=4, seed=3)
    a, b = design.solve_pla(cfg), design.solve_pla(cfg)
    assert np.array_equal(a.phases, b.phases)
    assert design.check_pla(a, 1).satisfied


def test_solver_n0_three_pulses():
    s = design.solve_pla(design.SolverConfig(n=0, pulses=3, restarts=5))
    d = np.abs(wrap(np.diff(s.toggling)))
    assert np.allclose(d, 2 * np.pi / 3, atol=1e-6)


def test_solver_n2_nine_pulses():
    s = design.solve_pla(design.SolverConfig(n=2, pulses=9, restarts=10, seed=1))
    assert design.check_pla(s, 2).satisfied


def test_solution_not_found():
    # PLA(3) cannot be met with three pulses
    with pytest.raises(design.SolutionNotFound):
        design.solve_pla(design.SolverConfig(n=3, pulses=3, restarts=2, max_iters=300))


@given(odd_phases, st.floats(-np.pi, np.pi))
def test_equivalence_symmetries(phases, offset):
    tog = PulseSequence("r", phases).toggling
    for other in (tog + offset, -tog, tog[::-1], -tog[::-1] + offset):
        assert design.equivalent(tog, other)
    assert np.allclose(design.canonical_toggling(tog), design.canonical_toggling(-tog[::-1] + offset), atol=1e-8)


def test_f1_and_pla1_2_distinct():
    assert not design.equivalent(get("F1"), get("PLA1_2"))
    assert len(design.distinct([get("F1"), design.closed_form_pla1("F1", -1), get("PLA1_2")])) == 2
