"""Two-level flows as explicit real vector fields, with fixed points and
linear stability.

``normalized`` is the trace-preserving flow on the Bloch ball generated by
H = sigma_z - i(gamma/2)(I - sigma_z):

    dx/dt = -2y - gamma*x*z
    dy/dt =  2x - gamma*y*z
    dz/dt = -gamma*z^2 + gamma

``unnormalized`` drops the trace-restoring nonlinearity; the trace w joins
the state:

    dx/dt = -2y - gamma*x,   dy/dt = 2x - gamma*y,
    dz/dt = -gamma*z + gamma*w,   dw/dt = gamma*z - gamma*w.

Fixed points of these low-degree polynomial fields are enumerated in closed
form; the Jacobians are hard-coded and cross-checked against finite
differences in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DimensionError, StiffnessError, ValidationError
from .evolution import IntegratorOptions, evolve_ode
from .hamiltonians import SplitHamiltonian, constant_hamiltonian
from .linalg import DensityMatrix, PAULI_Z, to_bloch

ZERO_EIG_TOL = 1e-9


@dataclass(frozen=True)
class FlowSpec:
    """Variant ('normalized' 3-d or 'unnormalized' 4-d) plus the rate gamma >= 0."""

    variant: str
    gamma: float

    def __post_init__(self):
        if self.variant not in ("normalized", "unnormalized"):
            raise ValidationError(f"unknown flow variant {self.variant!r}")
        if self.gamma < 0:
            raise ValidationError("gamma must be >= 0")

    @property
    def dim(self) -> int:
        return 3 if self.variant == "normalized" else 4


@dataclass(frozen=True)
class FixedPointReport:
    """Location, Jacobian spectrum and stability class of an equilibrium.

    ``classification`` is one of sink / source / center /
    line-of-fixed-points / non-hyperbolic; for invariant lines,
    ``description`` spells out the set and ``point_classification`` the
    stability of individual points on it.
    """

    location: tuple
    jacobian_eigenvalues: tuple
    classification: str
    description: str = ""
    point_classification: str | None = None


def flow_rhs(spec: FlowSpec, state) -> np.ndarray:
    """Evaluate the vector field at a state (3 or 4 coordinates per variant)."""
    s = np.asarray(state, dtype=float).reshape(-1)
    g = spec.gamma
    if spec.variant == "normalized":
        if s.shape != (3,):
            raise DimensionError("normalized flow expects (x, y, z)")
        x, y, z = s
        return np.array([-2.0 * y - g * x * z, 2.0 * x - g * y * z, -g * z * z + g])
    if s.shape != (4,):
        raise DimensionError("unnormalized flow expects (x, y, z, w)")
    x, y, z, w = s
    return np.array([-2.0 * y - g * x, 2.0 * x - g * y, -g * z + g * w, g * z - g * w])


def flow_jacobian(spec: FlowSpec, state) -> np.ndarray:
    """Analytic Jacobian of :func:`flow_rhs` at a state."""
    s = np.asarray(state, dtype=float).reshape(-1)
    g = spec.gamma
    if spec.variant == "normalized":
        x, y, z = s
        return np.array([
            [-g * z, -2.0, -g * x],
            [2.0, -g * z, -g * y],
            [0.0, 0.0, -2.0 * g * z],
        ])
    return np.array([
        [-g, -2.0, 0.0, 0.0],
        [2.0, -g, 0.0, 0.0],
        [0.0, 0.0, -g, g],
        [0.0, 0.0, g, -g],
    ])


def classify_eigenvalues(eigenvalues, zero_tol: float = ZERO_EIG_TOL) -> str:
    """Stability class implied by a Jacobian spectrum.

    Real parts within ``zero_tol`` of zero count as zero; a purely
    rotational spectrum is a center, anything else with a zero mode is
    non-hyperbolic.
    """
    w = np.asarray(eigenvalues, dtype=complex)
    re = w.real
    if np.all(re < -zero_tol):
        return "sink"
    if np.all(re > zero_tol):
        return "source"
    if np.all(np.abs(re) <= zero_tol):
        if np.any(np.abs(w.imag) > zero_tol):
            return "center"
        return "non-hyperbolic"
    return "non-hyperbolic"


def point_report(spec: FlowSpec, location) -> FixedPointReport:
    """Stability report for a single equilibrium point of the flow."""
    loc = np.asarray(location, dtype=float).reshape(-1)
    residual = np.abs(flow_rhs(spec, loc)).max()
    if residual > 1e-9:
        raise ValidationError(f"not a fixed point (|flow| = {residual:.3e})")
    eigs = np.linalg.eigvals(flow_jacobian(spec, loc))
    return FixedPointReport(tuple(float(v) for v in loc),
                            tuple(complex(e) for e in eigs), classify_eigenvalues(eigs))


def fixed_points(spec: FlowSpec) -> list[FixedPointReport]:
    """Enumerate the equilibria of the flow in closed form.

    normalized, gamma > 0: the poles (0,0,+1) (sink) and (0,0,-1) (source);
    normalized, gamma = 0: the z-axis is a line of fixed points, each a
    center; unnormalized: the line x = y = 0, z = w, attracting in z - w.
    """
    g = spec.gamma
    if spec.variant == "normalized":
        if g > 0:
            return [point_report(spec, (0.0, 0.0, 1.0)), point_report(spec, (0.0, 0.0, -1.0))]
        eigs = np.linalg.eigvals(flow_jacobian(spec, (0.0, 0.0, 0.0)))
        return [FixedPointReport(
            location=(0.0, 0.0, 0.0),
            jacobian_eigenvalues=tuple(eigs),
            classification="line-of-fixed-points",
            description="z-axis, -1 <= z <= 1 (Jacobian independent of z)",
            point_classification=classify_eigenvalues(eigs),
        )]
    eigs = np.linalg.eigvals(flow_jacobian(spec, (0.0, 0.0, 0.0, 0.0)))
    if g > 0:
        return [FixedPointReport(
            location=(0.0, 0.0, 0.0, 0.0),
            jacobian_eigenvalues=tuple(eigs),
            classification="line-of-fixed-points",
            description="x = y = 0, z = w; z - w contracts at rate 2*gamma",
            point_classification=classify_eigenvalues(eigs),
        )]
    return [FixedPointReport(
        location=(0.0, 0.0, 0.0, 0.0),
        jacobian_eigenvalues=tuple(eigs),
        classification="line-of-fixed-points",
        description="plane x = y = 0 (z, w free at gamma = 0)",
        point_classification=classify_eigenvalues(eigs),
    )]


def integrate_flow(spec: FlowSpec, state0, t_span, opts: IntegratorOptions | None = None):
    """Integrate the real vector field directly; returns (times, states)."""
    opts = opts or IntegratorOptions()
    t0, t1 = float(t_span[0]), float(t_span[1])
    n = max(2, int(round((t1 - t0) / opts.sample_every)) + 1)
    t_eval = np.linspace(t0, t1, n)
    sol = solve_ivp(lambda t, s: flow_rhs(spec, s), (t0, t1),
                    np.asarray(state0, dtype=float), method=opts.method,
                    rtol=opts.rtol, atol=opts.atol, t_eval=t_eval)
    if not sol.success:
        raise StiffnessError(float(sol.t[-1]) if len(sol.t) else t0, sol.message)
    return sol.t, sol.y.T


def verify_bloch_consistency(h: SplitHamiltonian, rho0: DensityMatrix, t_span,
                             opts: IntegratorOptions | None = None) -> float:
    """Cross-check the Bloch ODE against the density-matrix engine.

    Only valid for the family H = sigma_z - i(gamma/2)(I - sigma_z) the
    explicit flow was derived for; returns the max coordinate deviation
    between the two independently integrated representations.
    """
    if h.dim != 2:
        raise DimensionError("consistency check is for two-level Hamiltonians")
    if np.abs(h.h_h - PAULI_Z).max() > 1e-10:
        raise ValidationError("Hermitian part must be sigma_z for this flow family")
    gamma = float(h.h_a[1, 1].real)
    expected_ha = 0.5 * gamma * (np.eye(2) - PAULI_Z)
    if np.abs(h.h_a - expected_ha).max() > 1e-10:
        raise ValidationError("anti-Hermitian part must be (gamma/2)(I - sigma_z)")
    spec = FlowSpec("normalized", gamma)
    opts = opts or IntegratorOptions()
    _, flow_states = integrate_flow(spec, to_bloch(rho0), t_span, opts)
    traj = evolve_ode(constant_hamiltonian(h.h), rho0, t_span, opts)
    matrix_states = traj.bloch()
    m = min(len(flow_states), len(matrix_states))
    return float(np.abs(flow_states[:m] - matrix_states[:m]).max())
