"""Hamiltonian constructors: Hermitian/anti-Hermitian splits, switched
measurement Hamiltonians, degeneracy case studies and the square-wave
modulated stochastic drive, plus attractor prediction from the spectrum.

Conventions
-----------
A non-Hermitian generator is written H = H_h - i H_a with both parts
Hermitian.  Measurement windows multiply an anti-Hermitian gain
``i*gamma*P_j`` by a switching profile f(t); the eigenvector whose
eigenvalue carries the uniquely largest imaginary part is the attractor of
the normalized flow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AnalysisError, DimensionError, ValidationError
from .linalg import (
    PAULI_X,
    PAULI_Z,
    PureStateAmplitudes,
    as_complex_matrix,
    hermiticity_defect,
)

SPLIT_TOL = 1e-12


@dataclass(frozen=True)
class SplitHamiltonian:
    """H together with its cached Hermitian / anti-Hermitian parts.

    Invariants: ``h_h = (H + H^dagger)/2``, ``h_a = i(H - H^dagger)/2`` (both
    Hermitian) and ``H = h_h - i h_a``.
    """

    h: np.ndarray
    h_h: np.ndarray
    h_a: np.ndarray

    @property
    def dim(self) -> int:
        return self.h.shape[0]

    def reconstruct(self) -> np.ndarray:
        return self.h_h - 1j * self.h_a


def split(h) -> SplitHamiltonian:
    """Decompose H = H_h - i H_a into Hermitian parts."""
    m = as_complex_matrix(h)
    h_h = 0.5 * (m + m.conj().T)
    h_a = 0.5j * (m - m.conj().T)
    return SplitHamiltonian(h=m, h_h=h_h, h_a=h_a)


@dataclass(frozen=True)
class SwitchingProfile:
    """Window weight f(t) turning a measurement term on at t_i and off at t_f.

    kind:
      * ``tanh``   -- f(t) = [tanh(s(t - t_i)) - tanh(s(t - t_f))]/2, the
                      smooth window used throughout; ``sharpness`` s defaults
                      to the collapse rate gamma of the owning Hamiltonian.
      * ``hard``   -- exactly 1 on [t_i, t_f), 0 elsewhere.
      * ``always_on`` -- f == 1 (constant Hamiltonians).
    """

    kind: str
    t_i: float = float("-inf")
    t_f: float = float("inf")
    sharpness: float | None = None

    def __post_init__(self):
        if self.kind not in ("tanh", "hard", "always_on"):
            raise ValidationError(f"unknown switching kind {self.kind!r}")
        if self.kind != "always_on":
            if not self.t_i < self.t_f:
                raise ValidationError(f"switch-on time {self.t_i} must precede switch-off {self.t_f}")
            if self.kind == "tanh":
                if self.sharpness is None or self.sharpness <= 0:
                    raise ValidationError("tanh switching needs a positive sharpness")

    @classmethod
    def tanh_window(cls, t_i: float, t_f: float, sharpness: float) -> "SwitchingProfile":
        return cls("tanh", t_i, t_f, sharpness)

    @classmethod
    def hard_window(cls, t_i: float, t_f: float) -> "SwitchingProfile":
        return cls("hard", t_i, t_f)

    @classmethod
    def always_on(cls) -> "SwitchingProfile":
        return cls("always_on")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "always_on":
            return np.ones_like(t)[()] if t.ndim else 1.0
        if self.kind == "hard":
            out = np.where((t >= self.t_i) & (t < self.t_f), 1.0, 0.0)
            return out[()] if out.ndim == 0 else out
        s = self.sharpness
        out = 0.5 * (np.tanh(s * (t - self.t_i)) - np.tanh(s * (t - self.t_f)))
        return out[()] if out.ndim == 0 else out

    @property
    def windowed(self) -> bool:
        return self.kind != "always_on"


@dataclass(frozen=True)
class HiddenVariableWave:
    """Square wave g(t) on [t_i, t_f] whose dwell fractions encode |c1|^2.

    The window splits into ``n_partitions`` intervals (``n_partitions/2`` full
    periods of length 2L with L = (t_f - t_i)/n_partitions).  Each period
    dwells at +1 for 2L*p0 then at -1 for 2L*(1-p0), so the dwell-length
    ratio is p0/(1-p0) and the mean over a period is 2*p0 - 1.

    ``fourier`` mode evaluates the truncated Fourier series of that square
    wave instead (coefficients in closed form), keeping the same mean.
    """

    p0: float
    n_partitions: int
    t_i: float
    t_f: float
    mode: str = "square"
    fourier_order: int = 51

    def __post_init__(self):
        if not 0.0 <= self.p0 <= 1.0:
            raise ValidationError(f"dwell fraction p0 = {self.p0} outside [0, 1]")
        if self.n_partitions < 2 or self.n_partitions % 2:
            raise ValidationError("partition count must be an even integer >= 2")
        if not self.t_i < self.t_f:
            raise ValidationError("wave window must have t_i < t_f")
        if self.mode not in ("square", "fourier"):
            raise ValidationError(f"unknown wave mode {self.mode!r}")
        if self.fourier_order < 1:
            raise ValidationError("fourier truncation order must be >= 1")

    @property
    def half_period(self) -> float:
        """L = (t_f - t_i)/N; one full period of g is 2L."""
        return (self.t_f - self.t_i) / self.n_partitions

    @property
    def period(self) -> float:
        return 2.0 * self.half_period

    def dwell_edges(self, t_end: float | None = None) -> np.ndarray:
        """Partition points t_i = t_0 < t_1 < ... (alternating +/- dwells).

        A ``t_end`` inside the window truncates the final (possibly partial)
        period at that time.
        """
        stop = self.t_f if t_end is None else min(t_end, self.t_f)
        per = self.period
        edges = [self.t_i]
        k = 0
        while edges[-1] < stop - 1e-15 * max(1.0, abs(stop)):
            start = self.t_i + k * per
            for point in (start + per * self.p0, start + per):
                if point < stop - 1e-15 * max(1.0, abs(stop)):
                    edges.append(point)
                else:
                    edges.append(stop)
                    return np.array(edges)
            k += 1
        return np.array(edges)

    def _phase(self, t):
        return np.mod(np.asarray(t, dtype=float) - self.t_i, self.period)

    def _square(self, t):
        out = np.where(self._phase(t) < self.period * self.p0, 1.0, -1.0)
        return out[()] if out.ndim == 0 else out

    def fourier_coefficients(self, m: int) -> tuple[float, float]:
        """(a_m, b_m) of the square wave's series in cos/sin(m pi t / L)."""
        length = self.half_period
        t0 = self.t_i
        t1 = self.t_i + self.period * self.p0
        t2 = self.t_i + self.period
        pref = 2.0 / (m * math.pi)
        sign = (-1.0) ** m
        a = pref * (math.sin(m * math.pi * t1 / length) - sign * math.sin(m * math.pi * (t0 + t2) / (2 * length)))
        b = pref * (-math.cos(m * math.pi * t1 / length) + sign * math.cos(m * math.pi * (t0 + t2) / (2 * length)))
        return a, b

    def _fourier(self, t):
        t = np.asarray(t, dtype=float)
        length = self.half_period
        acc = np.full_like(t, 2.0 * self.p0 - 1.0, dtype=float)
        for m in range(1, self.fourier_order + 1):
            a, b = self.fourier_coefficients(m)
            acc = acc + a * np.cos(m * math.pi * t / length) + b * np.sin(m * math.pi * t / length)
        return acc[()] if acc.ndim == 0 else acc

    def g(self, t):
        """Evaluate g(t) inside the window; outside is a domain error."""
        arr = np.asarray(t, dtype=float)
        if np.any(arr < self.t_i - 1e-12) or np.any(arr > self.t_f + 1e-12):
            raise ValidationError(f"t outside wave window [{self.t_i}, {self.t_f}]")
        return self._g_extended(t)

    def _g_extended(self, t):
        # Periodic extension, used internally where switching tails poke
        # slightly outside the nominal window.
        return self._square(t) if self.mode == "square" else self._fourier(t)


def g_eval(wave: HiddenVariableWave, t):
    """Functional form of :meth:`HiddenVariableWave.g`."""
    return wave.g(t)


@dataclass(frozen=True)
class SwitchedHamiltonian:
    """Time-dependent H(t) = base + f(t) * (gain + g(t) * gain_osc).

    ``base`` is Hermitian; ``gain`` (and the optional wave-modulated
    ``gain_osc``) are anti-Hermitian, i.e. of the form i*gamma*P.  ``gamma``
    records the imaginary spectral gap of the window Hamiltonian, which is
    the collapse rate entering kappa = 1 - exp(-gamma*(t_f - t_i)).

    ``base_gate`` multiplies the base by (1 - f(t)); with a hard window this
    reproduces scenarios where the Hermitian drive is replaced (rather than
    supplemented) by the measurement term.
    """

    base: np.ndarray
    gain: np.ndarray
    profile: SwitchingProfile
    gamma: float | None = None
    gain_osc: np.ndarray | None = None
    wave: HiddenVariableWave | None = None
    base_gate: bool = False

    def __post_init__(self):
        base = as_complex_matrix(self.base)
        gain = as_complex_matrix(self.gain)
        if base.shape != gain.shape:
            raise DimensionError("base and gain dimensions differ")
        if hermiticity_defect(base) > SPLIT_TOL:
            raise ValidationError("base must be Hermitian")
        if hermiticity_defect(1j * gain) > SPLIT_TOL:
            raise ValidationError("gain must be anti-Hermitian (i times Hermitian)")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "gain", gain)
        if (self.gain_osc is None) != (self.wave is None):
            raise ValidationError("gain_osc and wave must be supplied together")
        if self.gain_osc is not None:
            osc = as_complex_matrix(self.gain_osc)
            if hermiticity_defect(1j * osc) > SPLIT_TOL:
                raise ValidationError("gain_osc must be anti-Hermitian")
            object.__setattr__(self, "gain_osc", osc)

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def __call__(self, t: float) -> np.ndarray:
        f = float(self.profile(t))
        h = (1.0 - f) * self.base if self.base_gate else self.base.copy()
        h = h + f * self.gain
        if self.gain_osc is not None:
            h = h + f * float(self.wave._g_extended(t)) * self.gain_osc
        return h

    def window_matrix(self, g: float = 1.0) -> np.ndarray:
        """The Hamiltonian with the switch fully on (f = 1)."""
        h = np.zeros_like(self.base) if self.base_gate else self.base.copy()
        h = h + self.gain
        if self.gain_osc is not None:
            h = h + g * self.gain_osc
        return h

    def breakpoints(self, t0: float, t1: float) -> list[float]:
        """Interior times where H(t) is discontinuous; integration must stop there."""
        pts: list[float] = []
        if self.profile.kind == "hard":
            pts.extend([self.profile.t_i, self.profile.t_f])
        if self.wave is not None and self.wave.mode == "square":
            pts.extend(self.wave.dwell_edges().tolist())
        return sorted({p for p in pts if t0 < p < t1})


def constant_hamiltonian(h) -> SwitchedHamiltonian:
    """Wrap a constant (possibly non-Hermitian) H for the ODE engines."""
    parts = split(h)
    return SwitchedHamiltonian(
        base=parts.h_h,
        gain=parts.h - parts.h_h,  # equals -i * h_a
        profile=SwitchingProfile.always_on(),
    )


def measurement_hamiltonian(eigenbasis, eigenvalues, target: int, gamma: float,
                            profile: SwitchingProfile) -> SwitchedHamiltonian:
    """H_j(t) = sum_i lambda_i |phi_i><phi_i| + i gamma f(t) |phi_j><phi_j|.

    ``eigenbasis`` is a sequence of N orthonormal column vectors; the window
    drives any state toward eigenvector ``target``.
    """
    vecs = np.column_stack([np.asarray(v, dtype=complex).reshape(-1) for v in eigenbasis])
    n = vecs.shape[0]
    if vecs.shape != (n, n):
        raise DimensionError("eigenbasis must contain N vectors of length N")
    gram_defect = np.abs(vecs.conj().T @ vecs - np.eye(n)).max()
    if gram_defect > 1e-10:
        raise ValidationError(f"basis not orthonormal (defect {gram_defect:.3e})")
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.shape != (n,):
        raise ValidationError("need one real eigenvalue per basis vector")
    if not 0 <= target < n:
        raise DimensionError(f"target index {target} out of range")
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    base = (vecs * lam) @ vecs.conj().T
    base = 0.5 * (base + base.conj().T)
    proj = np.outer(vecs[:, target], vecs[:, target].conj())
    return SwitchedHamiltonian(base=base, gain=1j * gamma * proj, profile=profile, gamma=gamma)


def two_level_pm(sign: int, gamma: float, profile: SwitchingProfile) -> SwitchedHamiltonian:
    """H_pm(t) = sigma_z + i (gamma/2) f(t) (I +/- sigma_z).

    sign=+1 collapses onto |0> (north pole), sign=-1 onto |1>.
    """
    if sign not in (+1, -1):
        raise ValidationError("sign must be +1 or -1")
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    gain = 0.5j * gamma * (np.eye(2, dtype=complex) + sign * PAULI_Z)
    return SwitchedHamiltonian(base=PAULI_Z.copy(), gain=gain, profile=profile, gamma=gamma)


_DEGENERACY_TABLE = {
    "a": ((1, 2, 3, 4), (4, 3, 2, 1)),
    "b": ((1, 1, 1, 4), (4, 3, 2, 1)),
    "c": ((1, 2, 3, 4), (0, 0, -1, -1)),
}


def degeneracy_case(which: str, gamma: float, profile: SwitchingProfile) -> SwitchedHamiltonian:
    """The three diagonal 4-level case studies of eigenvalue degeneracy.

    a: real and imaginary parts both non-degenerate (unique attractor);
    b: degenerate real parts only (still a unique attractor);
    c: the largest imaginary part is shared by two levels (no collapse,
       dynamics restricted to that two-dimensional subspace).
    """
    if which not in _DEGENERACY_TABLE:
        raise ValidationError(f"unknown degeneracy case {which!r}")
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    real, imag = _DEGENERACY_TABLE[which]
    base = np.diag(np.asarray(real, dtype=complex))
    gain = 1j * gamma * np.diag(np.asarray(imag, dtype=complex))
    return SwitchedHamiltonian(base=base, gain=gain, profile=profile, gamma=gamma)


def flip_readout_hamiltonian(sign: int, gamma_m: float, profile: SwitchingProfile,
                             literal_window: bool = False) -> SwitchedHamiltonian:
    """Two-level readout along sigma_x: H = sigma_x + i*eps*f(t)*sigma_x*sign.

    ``eps = sqrt(gamma_m^2 - 1)`` (gamma_m is treated as an opaque coupling
    parameter).  With ``literal_window`` the Hermitian drive is gated off
    inside a hard window, so the in-window Hamiltonian is exactly
    ``+/- i eps sigma_x``; otherwise the drive stays on and is merely
    supplemented.  Both variants share the attractor |+> (sign=+1) or |->.
    """
    if sign not in (+1, -1):
        raise ValidationError("sign must be +1 or -1")
    if gamma_m <= 1.0:
        raise ValidationError("gamma_m must exceed 1 so that eps is real")
    eps = math.sqrt(gamma_m**2 - 1.0)
    gain = 1j * eps * sign * PAULI_X
    # Imaginary spectral gap of the window Hamiltonian is 2*eps (push-pull).
    return SwitchedHamiltonian(base=PAULI_X.copy(), gain=gain, profile=profile,
                               gamma=2.0 * eps, base_gate=literal_window)


def stochastic_hamiltonian(amplitudes: PureStateAmplitudes, gamma: float,
                           profile: SwitchingProfile, wave: HiddenVariableWave) -> SwitchedHamiltonian:
    """H(t) = sigma_z + i (gamma/2) f(t) (I + g(t) sigma_z).

    The square wave g alternates the collapse target between |0> and |1>;
    its dwell fraction must equal |c1|^2 of the prepared state.
    """
    if gamma <= 0:
        raise ValidationError("gamma must be positive")
    if abs(wave.p0 - amplitudes.p0) > 1e-12:
        raise ValidationError(
            f"wave dwell fraction {wave.p0} does not match |c1|^2 = {amplitudes.p0}")
    gain = 0.5j * gamma * np.eye(2, dtype=complex)
    gain_osc = 0.5j * gamma * PAULI_Z
    return SwitchedHamiltonian(base=PAULI_Z.copy(), gain=gain, profile=profile,
                               gamma=gamma, gain_osc=gain_osc, wave=wave)


@dataclass(frozen=True)
class AttractorReport:
    """Outcome of spectral attractor analysis.

    kind is ``unique`` (one eigenvalue with the strictly largest imaginary
    part), ``degenerate`` (the maximum is shared; indices span the invariant
    subspace) or ``none`` (all imaginary parts equal, e.g. Hermitian H).
    """

    kind: str
    indices: tuple[int, ...]
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def attractor_index(self) -> int:
        if self.kind != "unique":
            raise AnalysisError(f"no unique attractor (kind={self.kind})")
        return self.indices[0]

    def attractor_vector(self) -> np.ndarray:
        return self.eigenvectors[:, self.attractor_index]


def attractor_prediction(h, tol: float = 1e-9) -> AttractorReport:
    """Predict the collapse target from the spectrum of a (constant) H.

    The eigenvector with the uniquely largest imaginary eigenvalue part is
    the attractor of the normalized flow; a shared maximum leaves a
    degenerate invariant subspace and an all-real spectrum has no attractor.
    """
    m = as_complex_matrix(h)
    eigvals, eigvecs = np.linalg.eig(m)
    if np.linalg.cond(eigvecs) > 1e10:
        raise AnalysisError("matrix is defective (eigenvector basis ill-conditioned)")
    im = eigvals.imag
    top = im.max()
    scale = tol * max(1.0, abs(top))
    near_top = np.where(im >= top - scale)[0]
    if im.max() - im.min() <= scale:
        return AttractorReport("none", tuple(range(len(eigvals))), eigvals, eigvecs)
    if len(near_top) == 1:
        return AttractorReport("unique", (int(near_top[0]),), eigvals, eigvecs)
    return AttractorReport("degenerate", tuple(int(i) for i in near_top), eigvals, eigvecs)
