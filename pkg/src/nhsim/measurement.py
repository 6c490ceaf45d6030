"""Measurement scenarios: Hermitian pre-drive, switched collapse window,
post-window persistence, collapse metrics and the four-level degeneracy
case studies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError, DimensionError, ValidationError
from .evolution import IntegratorOptions, Trajectory, evolve_ode
from .hamiltonians import (
    SwitchedHamiltonian,
    SwitchingProfile,
    attractor_prediction,
    degeneracy_case,
)
from .linalg import DensityMatrix, overlap


@dataclass(frozen=True)
class MeasurementScenario:
    """A full run: free evolution, measurement window, free evolution again.

    The switching window of the Hamiltonian must sit strictly inside the
    simulated span so both the approach and the persistence phase are
    observable.
    """

    hamiltonian: SwitchedHamiltonian
    initial_state: DensityMatrix
    t_start: float
    t_end: float
    sample_step: float = 0.02

    def __post_init__(self):
        prof = self.hamiltonian.profile
        if not prof.windowed:
            raise ValidationError("scenario Hamiltonian needs a switching window")
        if not self.t_start < prof.t_i < prof.t_f < self.t_end:
            raise ValidationError(
                f"window [{prof.t_i}, {prof.t_f}] must lie strictly inside "
                f"({self.t_start}, {self.t_end})")
        if self.initial_state.dim != self.hamiltonian.dim:
            raise DimensionError("initial state dimension does not match the Hamiltonian")


@dataclass(frozen=True)
class CollapseMetrics:
    """Summary of a collapse run.

    ``kappa`` is the analytic degree of collapse 1 - exp(-gamma*(t_f - t_i)).
    ``persistence_error`` is the largest drop of the target population below
    its level at window close, taken over all samples strictly after t_f;
    re-excitation after the window shows up as a positive value, while the
    residual contraction of the switching tail does not count against it.
    """

    kappa: float
    target_index: int
    final_target_population: float
    persistence_error: float
    warning: str | None = None


def collapse_degree(gamma: float, t_i: float, t_f: float) -> float:
    """kappa = 1 - exp(-gamma*(t_f - t_i)), the analytic degree of collapse."""
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    if not t_f >= t_i:
        raise ValidationError("window must satisfy t_f >= t_i")
    return 1.0 - math.exp(-gamma * (t_f - t_i))


def target_population(state, vector) -> float:
    """Probability of a (normalized) target eigenvector in a state."""
    proj = np.outer(vector, np.conj(vector))
    m = state.matrix if isinstance(state, DensityMatrix) else state
    return float(np.real(np.trace(m @ proj)))


def run_scenario(scenario: MeasurementScenario,
                 opts: IntegratorOptions | None = None) -> tuple[Trajectory, CollapseMetrics]:
    """Integrate a measurement scenario and compute its collapse metrics.

    Requires the window Hamiltonian to have a unique attractor; degenerate
    spectra are routed to :func:`degeneracy_run`.  Starting exactly on the
    repelling eigenstate is allowed -- the run then reports non-collapse with
    a warning rather than failing.
    """
    h = scenario.hamiltonian
    if h.wave is not None:
        raise ValidationError("stochastic Hamiltonians are handled by the ensemble module")
    report = attractor_prediction(h.window_matrix())
    if report.kind == "degenerate":
        raise AnalysisError(
            "window Hamiltonian has a degenerate largest imaginary part; use degeneracy_run")
    if report.kind == "none":
        raise AnalysisError("window Hamiltonian has a real spectrum; nothing collapses")
    target_vec = report.attractor_vector()
    target_proj = DensityMatrix.pure(target_vec)

    opts = opts or IntegratorOptions(sample_every=scenario.sample_step)
    prof = h.profile
    references = {"initial": scenario.initial_state.matrix, "target": target_proj.matrix}
    traj = evolve_ode(h, scenario.initial_state, (scenario.t_start, scenario.t_end),
                      opts, references=references, extra_samples=(prof.t_i, prof.t_f))
    times = traj.times
    pops = traj.overlap_series("target")
    idx_tf = int(np.argmin(np.abs(times - prof.t_f)))
    p_close = pops[idx_tf]
    after = pops[idx_tf:]
    persistence = float(max(0.0, (p_close - after).max()))

    warning = None
    repeller = report.eigenvectors[:, int(np.argmin(report.eigenvalues.imag))]
    if overlap(scenario.initial_state, DensityMatrix.pure(repeller)) > 1.0 - 1e-9:
        warning = "initial state is the repelling eigenstate; collapse will not occur"

    metrics = CollapseMetrics(
        kappa=collapse_degree(h.gamma, prof.t_i, prof.t_f) if h.gamma else float("nan"),
        target_index=report.attractor_index,
        final_target_population=float(pops[-1]),
        persistence_error=persistence,
        warning=warning,
    )
    return traj, metrics


@dataclass(frozen=True)
class DegeneracyReport:
    """Outcome of a four-level degeneracy run."""

    case: str
    attractor_kind: str
    attractor_indices: tuple[int, ...]
    kappa: float
    final_populations: np.ndarray
    ratio_first_pair: np.ndarray | None
    max_ratio_drift: float | None


def degeneracy_run(which: str, gamma: float = 3.0, t_i: float = 6.0, t_f: float = 8.0,
                   rho0: DensityMatrix | None = None, t_start: float = 0.0,
                   t_end: float = 10.0, opts: IntegratorOptions | None = None,
                   ) -> tuple[Trajectory, DegeneracyReport]:
    """Run one of the diagonal four-level case studies.

    Cases a and b collapse onto level 0; case c contracts onto the
    two-dimensional subspace spanned by levels 0 and 1 while preserving
    their population ratio.
    """
    if rho0 is None:
        rho0 = DensityMatrix.from_diagonal([0.1, 0.2, 0.3, 0.4])
    profile = SwitchingProfile.tanh_window(t_i, t_f, gamma)
    h = degeneracy_case(which, gamma, profile)
    report = attractor_prediction(h.window_matrix())
    traj = evolve_ode(h, rho0, (t_start, t_end), opts or IntegratorOptions())
    pops = traj.populations()
    ratio = None
    drift = None
    if report.kind == "degenerate":
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pops[:, 0] / pops[:, 1]
        drift = float(np.abs(ratio - ratio[0]).max())
    degeneracy = DegeneracyReport(
        case=which,
        attractor_kind=report.kind,
        attractor_indices=report.indices,
        kappa=collapse_degree(gamma, t_i, t_f),
        final_populations=pops[-1],
        ratio_first_pair=ratio,
        max_ratio_drift=drift,
    )
    return traj, degeneracy


def overlap_curves(traj: Trajectory, rho_ref: DensityMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities of the reference state and of its orthogonal complement.

    Returns (Tr rho(t) rho_ref, Tr rho(t) (I - rho_ref)) per sample; the two
    series sum to the trace, i.e. to 1 for normalized trajectories.
    """
    if traj.dim != 2 or rho_ref.dim != 2:
        raise DimensionError("overlap curves use the two-level complement form")
    ref = rho_ref.matrix
    inside = np.real(np.einsum("tij,ji->t", traj.states, ref))
    outside = np.real(np.einsum("tij,ji->t", traj.states, np.eye(2, dtype=complex) - ref))
    return inside, outside
