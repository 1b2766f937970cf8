import math

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from errmargin.analytic import (
    Domain,
    amplitude,
    critical_margins,
    dual_certificate,
    max_success,
    mixed_branch,
    mixed_max_success,
    optimal_povm,
    pure_branch,
    pure_max_success,
    solve,
    trace_along_equality_family,
)
from errmargin.bloch import BlochOperator
from errmargin.measurement import error_probability, success_probability
from errmargin.oracle import dual_inner
from errmargin.states import ParameterError, axis_family, build_family, to_ensemble

from conftest import random_rotation

# 30-digit mpmath evaluations of the closed forms at gamma = 0
MC_0 = 0.394501139690757989
MPC_0 = 0.140883243603458078
PLATEAU_0 = 0.605498860309242011
P_025 = 0.444562351994431607
Y_E_025 = 1.24097105589669153


def test_critical_margins_orthogonal():
    cm = critical_margins(1.0, 0.0)
    assert cm.m_upper == pytest.approx(MC_0, abs=1e-12)
    assert cm.m_lower == pytest.approx(MPC_0, abs=1e-12)


def test_critical_margins_trine_collapse():
    cm = critical_margins(1.0, -0.5)
    assert cm.m_lower == pytest.approx(1 / 3, abs=1e-15)
    assert cm.m_upper == pytest.approx(1 / 3, abs=1e-15)


def test_critical_margins_identical():
    cm = critical_margins(1.0, 1.0)
    assert cm.m_upper == pytest.approx(2 / 3, abs=1e-15)
    assert cm.m_lower == 0.0
    assert amplitude(1.0, 1.0) == 0.0


@pytest.mark.parametrize(
    "r, gamma, m, expected, domain",
    [
        (1.0, 0.0, 1.0, PLATEAU_0, Domain.MINIMUM_ERROR),
        (1.0, 0.0, 0.10, 0.20, Domain.LINEAR),
        (1.0, 0.0, 0.25, P_025, Domain.INTERMEDIATE),
        (0.0, 0.0, 0.4, 0.20, Domain.LINEAR),
    ],
)
def test_max_success_examples(r, gamma, m, expected, domain):
    p, dom = max_success(r, gamma, m)
    assert p == pytest.approx(expected, abs=1e-12)
    assert dom is domain


def test_max_success_rejects_bad_margin():
    with pytest.raises(ParameterError):
        max_success(1.0, 0.0, 1.5)


def test_boundary_tags_go_to_lower_domain():
    cm = critical_margins(1.0, 0.0)
    assert max_success(1.0, 0.0, cm.m_lower)[1] is Domain.LINEAR
    assert max_success(1.0, 0.0, cm.m_upper)[1] is Domain.INTERMEDIATE
    for m in np.linspace(0, 1, 301):
        assert max_success(1.0, -0.5, m)[1] is not Domain.INTERMEDIATE


def test_certificate_minimum_error():
    fam = build_family(1.0, 0.0)
    cert = dual_certificate(0.0, 1.0, fam)
    assert cert.y == 0.0
    np.testing.assert_allclose(cert.Y.vector, fam.vector_sum / 9, atol=1e-15)
    assert cert.Y.trace == pytest.approx(PLATEAU_0, abs=1e-12)


def test_certificate_linear():
    cert = dual_certificate(0.0, 0.05)
    assert cert.y == 2.0
    assert cert.Y.scale == 0.0 and np.all(cert.Y.vector == 0)
    assert cert.d == pytest.approx(0.10, abs=1e-15)


def test_certificate_intermediate():
    cert = dual_certificate(0.0, 0.25)
    assert cert.y == pytest.approx(Y_E_025, abs=1e-12)
    assert cert.d == pytest.approx(P_025, abs=1e-12)


def test_povm_minimum_error_axis_family():
    fam = axis_family()
    povm = optimal_povm(0.0, 0.5, fam)
    e1 = np.array([-2.0, 1.0, 1.0]) / math.sqrt(6)
    assert povm[1].scale == pytest.approx(2 / 3, abs=1e-15)
    np.testing.assert_allclose(povm[1].vector, -(2 / 3) * e1, atol=1e-15)
    p = success_probability(to_ensemble(fam), povm)
    assert p == pytest.approx(PLATEAU_0, abs=1e-12)


def test_povm_at_zero_margin_abstains():
    povm = optimal_povm(0.0, 0.0)
    for e in povm.elements[1:]:
        assert e.scale == 0.0 and np.all(e.vector == 0)
    assert povm[0].scale == 2.0
    np.testing.assert_allclose(povm[0].vector, 0, atol=1e-15)


def test_povm_intermediate_coefficients():
    a = 0.5 * (1 - 1 / math.sqrt(3))
    m = 0.25
    c = a * (2 + 3 * (m - a) + math.sqrt(3 * a * (2 * m - a)))
    povm = optimal_povm(0.0, m)
    for e in povm.elements[1:]:
        assert e.scale == pytest.approx(c, abs=1e-14)
    assert povm[0].scale == pytest.approx(2 - 3 * c, abs=1e-14)
    assert c > 0 and 2 - 3 * c > 0
    assert povm.completeness_residual() < 1e-12


def test_solve_examples():
    sol = solve(1.0, 0.0, 1.0)
    assert sol.p_error == pytest.approx(MC_0, abs=1e-12)
    assert sol.p_inconclusive == 0.0
    sol = solve(1.0, 0.0, 0.10)
    assert sol.p_error == pytest.approx(0.10, abs=1e-12)
    assert sol.p_inconclusive == pytest.approx(1 - 3 * 0.10, abs=1e-12)
    sol = solve(1.0, 1.0, 2 / 3)
    assert sol.p_success == pytest.approx(1 / 3, abs=1e-12)


@pytest.mark.parametrize("m", [0.0, 0.1, 0.3, 0.5, 2 / 3, 0.9])
def test_identical_states_follow_guessing(m):
    # every conclusive guess is right 1/3 of the time: p = min(m/2, 1/3)
    sol = solve(1.0, 1.0, m)
    assert sol.p_success == pytest.approx(min(m / 2, 1 / 3), abs=1e-12)
    assert sol.gap == pytest.approx(0.0, abs=1e-12)


def test_mixed_solution_is_flagged_numeric():
    sol = solve(0.8, 0.1, 0.2)
    assert sol.povm_source == "numeric"
    assert sol.p_success == pytest.approx(0.310301929239358, abs=1e-12)
    assert sol.p_success + sol.p_error + sol.p_inconclusive == pytest.approx(1.0, abs=1e-10)
    assert sol.gap >= -1e-10
    assert sol.gap < 1e-8
    assert sol.povm.is_valid()


# ---------------------------------------------------------------------------
# invariants

R_GRID = [0.05, 0.3, 0.6, 0.9, 1.0]


@pytest.mark.parametrize("r", R_GRID)
def test_branch_continuity(r):
    for gamma in np.linspace(-r / 2, r, 25):
        cm = critical_margins(r, gamma)
        branch = pure_branch if r == 1.0 else lambda d, g, m: mixed_branch(d, r, g, m)
        at_upper = [branch(d, gamma, cm.m_upper) for d in (Domain.MINIMUM_ERROR, Domain.INTERMEDIATE)]
        at_lower = [branch(d, gamma, cm.m_lower) for d in (Domain.INTERMEDIATE, Domain.LINEAR)]
        assert abs(at_upper[0] - at_upper[1]) <= 1e-9, (r, gamma)
        assert abs(at_lower[0] - at_lower[1]) <= 1e-9, (r, gamma)


@pytest.mark.parametrize("r, gamma", [(1, -0.5), (1, 0), (1, 0.7), (1, 1), (0.5, -0.2), (0.5, 0.5), (0.2, 0.05)])
def test_monotone_and_plateau(r, gamma):
    ms = np.linspace(0, 1, 1001)
    ps = np.array([max_success(r, gamma, m)[0] for m in ms])
    assert np.all(np.diff(ps) >= -1e-15)
    cm = critical_margins(r, gamma)
    plateau = ps[ms >= cm.m_upper]
    assert np.ptp(plateau) == 0.0


def test_mixed_reduces_to_pure():
    for gamma in np.linspace(-0.5, 1, 21):
        for m in np.linspace(0, 1, 21):
            assert abs(mixed_max_success(1.0, gamma, m) - pure_max_success(gamma, m)) <= 1e-12


def _pure_points():
    pts = [(g, m) for g in np.linspace(-0.5, 0.99, 12) for m in np.linspace(0, 1, 15)]
    for g in (-0.3, 0.0, 0.6):
        cm = critical_margins(1.0, g)
        pts += [(g, cm.m_lower), (g, cm.m_upper)]
    return pts


@pytest.mark.parametrize("gamma, m", _pure_points())
def test_analytic_pair_is_tight(gamma, m):
    sol = solve(1.0, gamma, m)
    ens = to_ensemble(build_family(1.0, gamma))
    assert sol.povm.is_valid()
    assert sol.p_error <= m + 1e-12
    assert abs(sol.gap) <= 1e-10
    assert sol.p_success == pytest.approx(max_success(1.0, gamma, m)[0], abs=1e-12)
    if sol.certificate.y > 0:
        assert sol.p_error == pytest.approx(m, abs=1e-10)
    assert error_probability(ens, sol.povm) == pytest.approx(sol.p_error, abs=1e-15)


@given(st.floats(-0.5, 0.999), st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_rotation_invariance(gamma, m, seed):
    rot = random_rotation(np.random.default_rng(seed))
    fam = build_family(1.0, gamma)
    turned = fam.rotated(rot)
    p0 = success_probability(to_ensemble(fam), optimal_povm(gamma, m, fam))
    p1 = success_probability(to_ensemble(turned), optimal_povm(gamma, m, turned))
    e0 = error_probability(to_ensemble(fam), optimal_povm(gamma, m, fam))
    e1 = error_probability(to_ensemble(turned), optimal_povm(gamma, m, turned))
    assert abs(p0 - p1) <= 1e-12
    assert abs(e0 - e1) <= 1e-12
    assert abs(dual_certificate(gamma, m, fam).d - dual_certificate(gamma, m, turned).d) <= 1e-12


@given(st.floats(-0.5, 1.0), st.floats(0, 1))
def test_povm_valid_everywhere(gamma, m):
    povm = optimal_povm(gamma, m)
    assert povm.min_eigenvalue() >= -1e-9
    assert povm.completeness_residual() <= 1e-12


@pytest.mark.parametrize("gamma", [-0.4, -0.1, 0.0, 0.3, 0.8])
def test_trace_gradient_equals_minus_error(gamma):
    cm = critical_margins(1.0, gamma)
    fam = build_family(1.0, gamma)
    ens = to_ensemble(fam)
    h = 1e-5
    for m in np.linspace(cm.m_lower, cm.m_upper, 5)[1:-1]:
        y = dual_certificate(gamma, m, fam).y
        p_err = error_probability(ens, optimal_povm(gamma, m, fam))
        closed = (trace_along_equality_family(gamma, y + h) - trace_along_equality_family(gamma, y - h)) / (2 * h)
        # same derivative from the numeric inner minimum, no closed form involved
        numeric = (dual_inner(ens, y + h)[0] - dual_inner(ens, y - h)[0]) / (2 * h)
        assert closed == pytest.approx(-p_err, abs=1e-5)
        assert numeric == pytest.approx(-p_err, abs=1e-5)


def test_identity_as_certificate_bound():
    # Y = identity-scaled state bound is feasible at y=0 and bounds the optimum
    ens = to_ensemble(build_family(1.0, 0.3))
    from errmargin.measurement import DualCertificate, dual_slacks

    cert = DualCertificate(0.0, BlochOperator.identity() * (1 / 3), 1.0)
    assert min(dual_slacks(ens, cert)) >= -1e-15
    assert cert.d >= max_success(1.0, 0.3, 1.0)[0]
