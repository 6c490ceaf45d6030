"""Dense complex linear algebra for small quantum states and operators.

Everything in the package works on plain ``numpy`` complex matrices of
dimension 2..8.  ``DensityMatrix`` is the one validated wrapper type: it
guarantees hermiticity, unit trace and positive semidefiniteness at
construction so downstream code never has to re-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm as _expm

from .errors import DimensionError, InvalidStateError, ValidationError

MAX_DIM = 8
HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def as_complex_matrix(m, *, max_dim: int = MAX_DIM) -> np.ndarray:
    """Coerce ``m`` to a finite square complex matrix with 2 <= N <= ``max_dim``."""
    a = np.array(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if not 2 <= n <= max_dim:
        raise DimensionError(f"dimension {n} outside supported range [2, {max_dim}]")
    if not np.isfinite(a).all():
        raise ValidationError("matrix contains non-finite entries")
    return a


def hermiticity_defect(m: np.ndarray) -> float:
    """Max entrywise magnitude of ``m - m^dagger``."""
    return float(np.abs(m - m.conj().T).max())


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive-semidefinite state.

    Construction hermitizes via ``(m + m^dagger)/2`` when the asymmetry is
    below ``HERMITICITY_TOL`` and rejects anything larger, so floating-point
    drift is absorbed without masking real bugs.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = as_complex_matrix(self.matrix)
        defect = hermiticity_defect(m)
        if defect > HERMITICITY_TOL:
            raise ValidationError(f"not Hermitian: max |rho - rho^dagger| = {defect:.3e}")
        m = 0.5 * (m + m.conj().T)
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError(f"trace {tr:.12g} differs from 1 by more than {TRACE_TOL}")
        lo = float(np.linalg.eigvalsh(m).min())
        if lo < -PSD_TOL:
            raise InvalidStateError(f"negative eigenvalue {lo:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def purity(self) -> float:
        """Tr(rho^2); 1 for pure states."""
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    @classmethod
    def pure(cls, vector) -> "DensityMatrix":
        """Projector onto a (normalized) state vector."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise InvalidStateError("zero state vector")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def from_diagonal(cls, probabilities) -> "DensityMatrix":
        p = np.asarray(probabilities, dtype=float)
        return cls(np.diag(p.astype(complex)))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)


@dataclass(frozen=True)
class PureStateAmplitudes:
    """Two-level amplitudes (c1, c2) with |c1|^2 + |c2|^2 = 1."""

    c1: complex
    c2: complex

    def __post_init__(self):
        norm = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"|c1|^2 + |c2|^2 = {norm:.15g}, expected 1 within 1e-12")

    @classmethod
    def from_probability(cls, p0: float, phase: float = 0.0) -> "PureStateAmplitudes":
        """Amplitudes with |c1|^2 = p0 and a relative phase on c2."""
        if not 0.0 <= p0 <= 1.0:
            raise ValidationError(f"p0 = {p0} outside [0, 1]")
        return cls(np.sqrt(p0), np.sqrt(1.0 - p0) * np.exp(1j * phase))

    @property
    def p0(self) -> float:
        return abs(self.c1) ** 2

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix.pure(np.array([self.c1, self.c2], dtype=complex))


def mat_exp(a) -> np.ndarray:
    """Matrix exponential e^A.

    Scaling-and-squaring Pade kernel (scipy); the accuracy contract is a
    relative error below 1e-12 for ||A|| <= 50, which the tests check against
    an independent Taylor-summation oracle.
    """
    a = as_complex_matrix(a)
    return _expm(a)


def to_bloch(rho: DensityMatrix | np.ndarray) -> np.ndarray:
    """Bloch coordinates (Tr rho sigma_x, Tr rho sigma_y, Tr rho sigma_z) of a qubit state."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_complex_matrix(rho)
    if m.shape[0] != 2:
        raise DimensionError(f"Bloch coordinates need a 2x2 state, got {m.shape[0]}x{m.shape[0]}")
    coords = np.array([np.trace(m @ s) for s in PAULIS])
    if np.abs(coords.imag).max() > 1e-9:
        raise ValidationError("Bloch coordinates have a non-negligible imaginary part")
    return coords.real


def from_bloch(b) -> DensityMatrix:
    """State (I + x sigma_x + y sigma_y + z sigma_z)/2 from Bloch coordinates."""
    v = np.asarray(b, dtype=float).reshape(-1)
    if v.shape != (3,):
        raise DimensionError("Bloch vector must have three components")
    r = np.linalg.norm(v)
    if r > 1.0 + PSD_TOL:
        raise InvalidStateError(f"Bloch vector norm {r:.12g} exceeds 1")
    m = 0.5 * (np.eye(2, dtype=complex) + v[0] * PAULI_X + v[1] * PAULI_Y + v[2] * PAULI_Z)
    return DensityMatrix(m)


def overlap(a: DensityMatrix | np.ndarray, b: DensityMatrix | np.ndarray) -> float:
    """Tr(a b) for two states; the probability of finding one in the other for projectors."""
    ma = a.matrix if isinstance(a, DensityMatrix) else as_complex_matrix(a)
    mb = b.matrix if isinstance(b, DensityMatrix) else as_complex_matrix(b)
    if ma.shape != mb.shape:
        raise DimensionError(f"dimension mismatch: {ma.shape} vs {mb.shape}")
    val = complex(np.trace(ma @ mb))
    if abs(val.imag) > 1e-9:
        raise ValidationError(f"overlap has imaginary residue {val.imag:.3e}")
    return float(val.real)


def population(rho: DensityMatrix | np.ndarray, k: int) -> float:
    """Diagonal entry rho_kk, the probability of basis state k."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else as_complex_matrix(rho)
    n = m.shape[0]
    if not 0 <= k < n:
        raise DimensionError(f"basis index {k} out of range for dimension {n}")
    return float(np.real(m[k, k]))


def hs_distance(a: np.ndarray | DensityMatrix, b: np.ndarray | DensityMatrix) -> float:
    """Hilbert-Schmidt distance Tr[(a-b)^2] between Hermitian matrices.

    The squared convention, as common in the quantum-information literature.
    """
    ma = a.matrix if isinstance(a, DensityMatrix) else np.asarray(a, dtype=complex)
    mb = b.matrix if isinstance(b, DensityMatrix) else np.asarray(b, dtype=complex)
    d = ma - mb
    return float(np.real(np.trace(d @ d.conj().T)))
