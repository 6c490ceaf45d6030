"""Monte Carlo ensembles over the hidden variables of the square-wave drive.

A single run evolves one prepared state under
H(t) = sigma_z + i (gamma/2) f(t) (I + g(t) sigma_z) up to a per-run end
time; the hidden variables are the partition count of the square wave and
the exact end time within the final period.  Outcomes are labelled by the
final population with an explicit ``indeterminate`` bucket instead of forced
rounding.

For the exact-square wave inside a hard window the populations admit an
exact log-odds form: with u = (1/2) ln(p0/p1),

    u(t) = u(0) + gamma * integral of g over the elapsed dwells,

which the fast path accumulates dwell by dwell (overflow-free and
deterministic).  The same runs can be integrated with the ODE engine as an
independent cross-check.

Note: because each period dwells longer at +1 than at -1 whenever
|c1|^2 > 1/2, the integral drifts by gamma*(2*p0 - 1)*period every period
and the log-odds ratchet toward the majority pole; the per-dwell swing can
then no longer flip the state after the first period.  Ensemble frequencies
therefore lock to the majority outcome in the fast-collapse regime rather
than tracking the dwell measure.  See the acceptance suite and the project
notes for the quantitative argument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ValidationError
from .evolution import IntegratorOptions, evolve_ode
from .hamiltonians import HiddenVariableWave, SwitchingProfile, stochastic_hamiltonian
from .linalg import DensityMatrix, PureStateAmplitudes

OUTCOME_THRESHOLD = 0.99


@dataclass(frozen=True)
class RunOutcome:
    """Result of a single stochastic run."""

    label: str  # "zero" | "one" | "indeterminate"
    final_populations: tuple[float, float]
    n_partitions: int
    t_f: float


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble definition: prepared state, drive and hidden-variable laws.

    ``partitions`` is ``("fixed", N)`` or ``("uniform-even", lo, hi)``;
    ``tf_jitter`` is ``"none"`` or ``"uniform-period"`` (end time uniform
    over the final square-wave period).  All randomness flows from ``seed``.
    """

    amplitudes: PureStateAmplitudes
    gamma: float
    t_i: float
    window: float
    n_runs: int
    partitions: tuple
    tf_jitter: str = "uniform-period"
    seed: int | None = None
    g_mode: str = "square"
    fourier_order: int = 51
    threshold: float = OUTCOME_THRESHOLD
    log_runs: bool = False

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValidationError("gamma must be positive")
        if self.window <= 0:
            raise ValidationError("window length must be positive")
        if self.n_runs < 1:
            raise ValidationError("n_runs must be >= 1")
        kind = self.partitions[0]
        if kind == "fixed":
            n = self.partitions[1]
            if n < 2 or n % 2:
                raise ValidationError("fixed partition count must be an even integer >= 2")
        elif kind == "uniform-even":
            lo, hi = self.partitions[1], self.partitions[2]
            if lo < 2 or lo % 2 or hi % 2 or hi < lo:
                raise ValidationError("uniform-even bounds must be even with lo <= hi")
        else:
            raise ValidationError(f"unknown partition distribution {kind!r}")
        if self.tf_jitter not in ("none", "uniform-period"):
            raise ValidationError(f"unknown tf_jitter {self.tf_jitter!r}")
        if self.g_mode not in ("square", "fourier"):
            raise ValidationError(f"unknown g_mode {self.g_mode!r}")

    def figure_of_merit(self, n_partitions: int) -> float:
        """gamma * (shortest dwell length); collapse within a dwell needs >> 1."""
        half = self.window / n_partitions
        p0 = self.amplitudes.p0
        return self.gamma * 2.0 * half * min(p0, 1.0 - p0)


@dataclass(frozen=True)
class EnsembleResult:
    """Outcome frequencies with exact counts and the per-run log if requested."""

    n_runs: int
    counts: tuple[int, int, int]  # zero, one, indeterminate
    freq0: float
    freq1: float
    indeterminate: float
    stderr: float
    seed: int | None
    runs: tuple | None = None

    def to_record(self) -> dict:
        rec = {
            "n_runs": self.n_runs,
            "counts": {"zero": self.counts[0], "one": self.counts[1],
                       "indeterminate": self.counts[2]},
            "freq0": self.freq0,
            "freq1": self.freq1,
            "indeterminate": self.indeterminate,
            "stderr": self.stderr,
            "seed": self.seed,
        }
        if self.runs is not None:
            rec["runs"] = [
                {"n_partitions": r.n_partitions, "t_f": r.t_f, "outcome": r.label,
                 "p0": r.final_populations[0], "p1": r.final_populations[1]}
                for r in self.runs
            ]
        return rec


def _log_odds(rho0: DensityMatrix) -> float:
    p0 = float(rho0.matrix[0, 0].real)
    p1 = float(rho0.matrix[1, 1].real)
    if p1 <= 0.0:
        return np.inf
    if p0 <= 0.0:
        return -np.inf
    return 0.5 * float(np.log(p0 / p1))


def single_run(amplitudes: PureStateAmplitudes, gamma: float, t_i: float, t_f: float,
               n_partitions: int, g_mode: str = "square",
               rho0: DensityMatrix | None = None, method: str = "auto",
               threshold: float = OUTCOME_THRESHOLD, fourier_order: int = 51,
               opts: IntegratorOptions | None = None,
               wave: HiddenVariableWave | None = None) -> RunOutcome:
    """Evolve one prepared state through the modulated window up to ``t_f``.

    By default the wave is built on [t_i, t_f] itself (whole periods);
    passing a ``wave`` built on a longer nominal window makes ``t_f``
    truncate its final period, which is how the ensemble jitters end times.
    ``method='auto'`` uses the exact dwell walk for the square wave (hard
    window); ``method='ode'`` forces the numerical route as a cross-check.
    """
    if not t_i < t_f:
        raise ValidationError("need t_i < t_f")
    if rho0 is None:
        rho0 = amplitudes.density_matrix()
    if wave is None:
        wave = HiddenVariableWave(p0=amplitudes.p0, n_partitions=n_partitions,
                                  t_i=t_i, t_f=t_f, mode=g_mode, fourier_order=fourier_order)
    else:
        if abs(wave.p0 - amplitudes.p0) > 1e-12:
            raise ValidationError("wave dwell fraction must match |c1|^2")
        if t_f > wave.t_f + 1e-12 or t_i < wave.t_i - 1e-12:
            raise ValidationError("run window must lie inside the wave window")
    if method not in ("auto", "ode"):
        raise ValidationError(f"unknown method {method!r}")
    if method == "auto" and wave.mode == "square":
        u = _log_odds(rho0)
        edges = wave.dwell_edges(t_end=t_f)
        for a, b in zip(edges[:-1], edges[1:]):
            u += float(wave._square(0.5 * (a + b))) * gamma * (b - a)
        p0f = float(expit(2.0 * u))
        p1f = float(expit(-2.0 * u))
    else:
        profile = SwitchingProfile.hard_window(t_i, wave.t_f)
        h = stochastic_hamiltonian(amplitudes, gamma, profile, wave)
        traj = evolve_ode(h, rho0, (t_i, t_f),
                          opts or IntegratorOptions(sample_every=(t_f - t_i) / 200.0))
        pops = traj.populations()[-1]
        p0f, p1f = float(pops[0]), float(pops[1])
    if p0f > threshold:
        label = "zero"
    elif p1f > threshold:
        label = "one"
    else:
        label = "indeterminate"
    return RunOutcome(label=label, final_populations=(p0f, p1f),
                      n_partitions=n_partitions, t_f=t_f)


def run_ensemble(spec: EnsembleSpec) -> EnsembleResult:
    """Run the ensemble sequentially with per-run draws from the seeded stream.

    Identical spec and seed reproduce the result bit for bit, including the
    per-run log.
    """
    if spec.seed is None:
        raise ValidationError("ensembles require an explicit seed")
    rng = np.random.default_rng(spec.seed)
    counts = {"zero": 0, "one": 0, "indeterminate": 0}
    log: list[RunOutcome] = []
    for _ in range(spec.n_runs):
        if spec.partitions[0] == "fixed":
            n_part = int(spec.partitions[1])
        else:
            lo, hi = int(spec.partitions[1]), int(spec.partitions[2])
            n_part = int(2 * rng.integers(lo // 2, hi // 2 + 1))
        nominal_tf = spec.t_i + spec.window
        wave = HiddenVariableWave(p0=spec.amplitudes.p0, n_partitions=n_part,
                                  t_i=spec.t_i, t_f=nominal_tf, mode=spec.g_mode,
                                  fourier_order=spec.fourier_order)
        if spec.tf_jitter == "uniform-period":
            t_f = nominal_tf - float(rng.uniform(0.0, wave.period))
        else:
            t_f = nominal_tf
        outcome = single_run(spec.amplitudes, spec.gamma, spec.t_i, t_f, n_part,
                             g_mode=spec.g_mode, threshold=spec.threshold,
                             fourier_order=spec.fourier_order, wave=wave)
        counts[outcome.label] += 1
        if spec.log_runs:
            log.append(outcome)
    n = spec.n_runs
    freq0 = counts["zero"] / n
    freq1 = counts["one"] / n
    indet = counts["indeterminate"] / n
    return EnsembleResult(
        n_runs=n,
        counts=(counts["zero"], counts["one"], counts["indeterminate"]),
        freq0=freq0,
        freq1=freq1,
        indeterminate=indet,
        stderr=float(np.sqrt(freq0 * (1.0 - freq0) / n)),
        seed=spec.seed,
        runs=tuple(log) if spec.log_runs else None,
    )


def born_deviation(result: EnsembleResult, amplitudes: PureStateAmplitudes) -> float:
    """|freq0 - |c1|^2|: how far the ensemble sits from the Born weight."""
    return abs(result.freq0 - amplitudes.p0)
