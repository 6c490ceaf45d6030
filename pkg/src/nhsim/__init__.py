"""Simulator of measurement-like collapse under non-Hermitian Hamiltonian dynamics.

Density matrices evolve by the trace-preserving nonlinear flow
d(rho)/dt = -i[H_h, rho] - {H_a, rho} + 2 tr(rho H_a) rho generated by
H = H_h - i H_a; the eigenvector with the largest imaginary eigenvalue part
attracts every trajectory, which mimics a measurement collapse when the
anti-Hermitian term is switched on during a finite window.
"""

from .errors import (
    AnalysisError,
    ConfigError,
    DegenerateEvolutionError,
    DimensionError,
    InvalidStateError,
    StiffnessError,
    ValidationError,
)
from .linalg import (
    DensityMatrix,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    PureStateAmplitudes,
    from_bloch,
    hs_distance,
    mat_exp,
    overlap,
    population,
    to_bloch,
)
from .hamiltonians import (
    AttractorReport,
    HiddenVariableWave,
    SplitHamiltonian,
    SwitchedHamiltonian,
    SwitchingProfile,
    attractor_prediction,
    constant_hamiltonian,
    degeneracy_case,
    flip_readout_hamiltonian,
    g_eval,
    measurement_hamiltonian,
    split,
    stochastic_hamiltonian,
    two_level_pm,
)
from .evolution import (
    IntegratorOptions,
    Trajectory,
    TwoLevelParams,
    case_formula,
    evolve_closed_form,
    evolve_ode,
    evolve_two_level,
    evolve_unnormalized,
    rhs_nonlinear,
)
from .blochflow import (
    FixedPointReport,
    FlowSpec,
    classify_eigenvalues,
    fixed_points,
    flow_jacobian,
    flow_rhs,
    integrate_flow,
    point_report,
    verify_bloch_consistency,
)
from .measurement import (
    CollapseMetrics,
    DegeneracyReport,
    MeasurementScenario,
    collapse_degree,
    degeneracy_run,
    overlap_curves,
    run_scenario,
    target_population,
)
from .lindblad import (
    DephasingComparison,
    IncoherentSumResult,
    LindbladModel,
    compare_to_dephasing,
    dephasing_model,
    incoherent_sum,
    lindblad_evolve,
)
from .ensemble import (
    EnsembleResult,
    EnsembleSpec,
    RunOutcome,
    born_deviation,
    run_ensemble,
    single_run,
)
from .config import ScenarioConfig, load_config, parse_config, serialize_config

__version__ = "0.1.0"
