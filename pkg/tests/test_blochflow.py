import numpy as np
import pytest

from nhsim import (
    DensityMatrix,
    FlowSpec,
    IntegratorOptions,
    ValidationError,
    classify_eigenvalues,
    constant_hamiltonian,
    evolve_ode,
    evolve_unnormalized,
    fixed_points,
    flow_jacobian,
    flow_rhs,
    from_bloch,
    integrate_flow,
    point_report,
    split,
    verify_bloch_consistency,
)
from nhsim.linalg import PAULI_Z


def numerical_jacobian(spec, point, h=1e-6):
    """Independent oracle: central finite differences of the flow field."""
    point = np.asarray(point, dtype=float)
    n = len(point)
    jac = np.zeros((n, n))
    for j in range(n):
        dp = np.zeros(n)
        dp[j] = h
        jac[:, j] = (flow_rhs(spec, point + dp) - flow_rhs(spec, point - dp)) / (2 * h)
    return jac


def lossy_z(gamma):
    return PAULI_Z - 0.5j * gamma * (np.eye(2) - PAULI_Z)


class TestFlowRhs:
    def test_north_pole_stationary(self):
        assert np.allclose(flow_rhs(FlowSpec("normalized", 3.0), (0, 0, 1)), 0.0)

    def test_gamma_zero_rotation(self):
        out = flow_rhs(FlowSpec("normalized", 0.0), (0.3, -0.2, 0.5))
        assert np.allclose(out, [0.4, 0.6, 0.0])

    def test_unnormalized_line_stationary(self):
        assert np.allclose(flow_rhs(FlowSpec("unnormalized", 1.0), (0, 0, 0.5, 0.5)), 0.0)

    def test_printed_fields(self):
        g = 2.3
        x, y, z, w = 0.2, -0.4, 0.6, 0.9
        out3 = flow_rhs(FlowSpec("normalized", g), (x, y, z))
        assert np.allclose(out3, [-2 * y - g * x * z, 2 * x - g * y * z, -g * z * z + g])
        out4 = flow_rhs(FlowSpec("unnormalized", g), (x, y, z, w))
        assert np.allclose(out4, [-2 * y - g * x, 2 * x - g * y, -g * z + g * w, g * z - g * w])


class TestFixedPoints:
    def test_sink_spectrum_gamma_three(self):
        reports = fixed_points(FlowSpec("normalized", 3.0))
        sink = next(r for r in reports if r.classification == "sink")
        assert sink.location == (0.0, 0.0, 1.0)
        eigs = np.sort_complex(np.asarray(sink.jacobian_eigenvalues))
        assert np.allclose(eigs, np.sort_complex(np.array([-6.0, -3.0 + 2.0j, -3.0 - 2.0j])),
                           atol=1e-12)

    def test_source_spectrum_gamma_three(self):
        reports = fixed_points(FlowSpec("normalized", 3.0))
        source = next(r for r in reports if r.classification == "source")
        assert source.location == (0.0, 0.0, -1.0)
        eigs = np.sort_complex(np.asarray(source.jacobian_eigenvalues))
        assert np.allclose(eigs, np.sort_complex(np.array([6.0, 3.0 + 2.0j, 3.0 - 2.0j])),
                           atol=1e-12)

    def test_finite_difference_cross_check(self):
        spec = FlowSpec("normalized", 3.0)
        for loc in ((0.0, 0.0, 1.0), (0.0, 0.0, -1.0)):
            analytic = flow_jacobian(spec, loc)
            numeric = numerical_jacobian(spec, loc)
            assert np.abs(analytic - numeric).max() < 1e-9
            assert np.abs(np.sort_complex(np.linalg.eigvals(analytic))
                          - np.sort_complex(np.linalg.eigvals(numeric))).max() < 1e-9

    def test_gamma_zero_line_of_centers(self):
        reports = fixed_points(FlowSpec("normalized", 0.0))
        assert len(reports) == 1
        line = reports[0]
        assert line.classification == "line-of-fixed-points"
        assert line.point_classification == "center"
        rep = point_report(FlowSpec("normalized", 0.0), (0.0, 0.0, 0.3))
        assert rep.classification == "center"
        eigs = np.sort_complex(np.asarray(rep.jacobian_eigenvalues))
        assert np.allclose(eigs, [-2j, 0, 2j], atol=1e-12)

    def test_unnormalized_line(self):
        reports = fixed_points(FlowSpec("unnormalized", 2.0))
        line = reports[0]
        assert line.classification == "line-of-fixed-points"
        eigs = np.asarray(line.jacobian_eigenvalues)
        assert np.isclose(eigs.real.min(), -4.0)  # -2*gamma in the z-w block
        assert np.any(np.isclose(np.abs(eigs), 0.0, atol=1e-12))

    def test_point_report_rejects_nonfixed_point(self):
        with pytest.raises(ValidationError):
            point_report(FlowSpec("normalized", 3.0), (0.5, 0.0, 0.0))

    def test_classify_consistency(self):
        assert classify_eigenvalues([-1, -2 + 1j, -2 - 1j]) == "sink"
        assert classify_eigenvalues([1, 2 + 1j, 2 - 1j]) == "source"
        assert classify_eigenvalues([2j, -2j, 0]) == "center"
        assert classify_eigenvalues([0.0, -1.0]) == "non-hyperbolic"


class TestConsistency:
    def test_gamma_zero_circles(self):
        h = split(lossy_z(0.0))
        dev = verify_bloch_consistency(h, from_bloch([1, 0, 0]), (0.0, 3.0))
        assert dev < 1e-8

    def test_gamma_three_spiral(self):
        h = split(lossy_z(3.0))
        rho0 = from_bloch([0.1, 0.0, -0.9])
        dev = verify_bloch_consistency(h, rho0, (0.0, 5.0))
        assert dev < 1e-6
        _, states = integrate_flow(FlowSpec("normalized", 3.0), [0.1, 0.0, -0.9], (0.0, 5.0))
        assert states[-1][2] > 0.999

    def test_south_pole_stays(self):
        h = split(lossy_z(3.0))
        dev = verify_bloch_consistency(h, from_bloch([0, 0, -1.0]), (0.0, 2.0))
        assert dev < 1e-9
        _, states = integrate_flow(FlowSpec("normalized", 3.0), [0.0, 0.0, -1.0], (0.0, 2.0))
        assert np.abs(states[-1] - [0, 0, -1.0]).max() < 1e-9

    def test_wrong_family_rejected(self):
        h = split(np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex))
        with pytest.raises(ValidationError):
            verify_bloch_consistency(h, from_bloch([0, 0, 1]), (0.0, 1.0))


class TestFlowProperties:
    def test_sphere_invariance(self):
        _, states = integrate_flow(FlowSpec("normalized", 3.0),
                                   [0.6, 0.0, -0.8], (0.0, 4.0))
        radii = np.linalg.norm(states, axis=1)
        assert np.abs(radii - 1.0).max() < 1e-8

    def test_z_monotone_for_positive_gamma(self):
        _, states = integrate_flow(FlowSpec("normalized", 2.0), [0.5, 0.3, -0.7], (0.0, 4.0))
        z = states[:, 2]
        assert np.all(np.diff(z) > -1e-12)

    def test_trace_gap_decays_at_rate_two_gamma(self):
        gamma = 1.3
        h = constant_hamiltonian(np.diag([1.0, -1.0 - 1j * gamma]))
        rho0 = from_bloch([0.6, 0.0, 0.8])
        traj = evolve_unnormalized(h, rho0, (0.0, 2.0))
        z = traj.bloch()[:, 2]
        w = traj.traces()
        gap = z - w
        # log-linear fit of |z - w| against t recovers the rate 2*gamma
        mask = np.abs(gap) > 1e-12
        slope = np.polyfit(traj.times[mask], np.log(np.abs(gap[mask])), 1)[0]
        assert slope == pytest.approx(-2.0 * gamma, abs=1e-6)

    def test_radius_constant_at_gamma_zero(self):
        _, states = integrate_flow(FlowSpec("normalized", 0.0), [0.4, 0.0, 0.25], (0.0, 5.0))
        r = np.sqrt(states[:, 0] ** 2 + states[:, 1] ** 2)
        assert np.abs(r - r[0]).max() < 1e-8

    def test_flow_matches_density_matrix_engine_pointwise(self):
        gamma = 3.0
        h = constant_hamiltonian(lossy_z(gamma))
        rho0 = from_bloch([0.37, -0.21, 0.4])
        traj = evolve_ode(h, rho0, (0.0, 2.0), IntegratorOptions(sample_every=0.1))
        for t, state in zip(traj.times, traj.states):
            b = np.array([np.trace(state @ s).real for s in
                          (np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), PAULI_Z)])
            assert np.abs(flow_rhs(FlowSpec("normalized", gamma), b)
                          - _matrix_rhs_bloch(lossy_z(gamma), state)).max() < 1e-9


def _matrix_rhs_bloch(h, state):
    from nhsim import rhs_nonlinear, split as _split
    from nhsim.linalg import PAULI_X, PAULI_Y

    out = rhs_nonlinear(_split(h), DensityMatrix(state))
    return np.array([np.trace(out @ s).real for s in (PAULI_X, PAULI_Y, PAULI_Z)])
