"""Closed-form mean-field dynamics of Dicke superradiance.

In the mean-field picture every atom of the N-atom cloud follows the same
pure qubit state, driven by a nonlinear Hamiltonian that depends on the
state itself.  The excited population relaxes along a logistic curve
centred on the superradiant delay time, and the emitted intensity, the
l1-norm of coherence and the Hamiltonian all follow from it in closed form.

Conventions
-----------
* hbar = 1; ``omega`` and ``gamma0`` are angular frequency and decay rate.
* Qubit matrices use the ordered basis (|e>, |g>): index 0 is the excited
  state, so ``sigma_z = diag(+1, -1)`` and ``sigma_+ = |e><g|``.
* Intensity is an energy rate, ``I = -N * omega * dp/dt``.
* The formulas are evaluated for any ``N >= 1``; they only describe the
  physical cloud for ``N >> 1`` (or in the bad-cavity limit).

Time arguments accept scalars or numpy arrays wherever the result is a
scalar quantity; state-valued functions take a scalar time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidMeasurementError, ValidationError

__all__ = [
    "ModelParams",
    "QubitPureState",
    "QubitDensityMatrix",
    "HamiltonianMatrix",
    "SIGMA_Z",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
    "time_grid",
    "time_delay",
    "excitation_probability",
    "populations",
    "single_atom_state",
    "single_atom_density",
    "nonlinear_hamiltonian",
    "intensity",
    "max_intensity",
    "l1_coherence",
    "l1_norm_of_coherence",
    "coherence_from_intensity",
    "n_particle_coherence",
    "stable_sech",
]

SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()


@dataclass(frozen=True)
class ModelParams:
    """Atom number, single-atom decay rate and transition frequency.

    Attributes:
        n_atoms: number of atoms N (>= 1).
        gamma0: spontaneous emission rate of one atom (> 0).
        omega: transition angular frequency (> 0).
    """

    n_atoms: int
    gamma0: float
    omega: float = 1.0

    def __post_init__(self):
        n = self.n_atoms
        if isinstance(n, (float, np.floating)):
            if not math.isfinite(n) or n != int(n):
                raise ValidationError(f"n_atoms must be an integer, got {n!r}")
            n = int(n)
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
            raise ValidationError(f"n_atoms must be an integer, got {n!r}")
        if n < 1:
            raise ValidationError(f"n_atoms must be >= 1, got {n}")
        object.__setattr__(self, "n_atoms", int(n))
        for name in ("gamma0", "omega"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise ValidationError(f"{name} must be finite and > 0, got {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_alpha(cls, alpha: float, n_atoms: int, omega: float = 1.0) -> "ModelParams":
        """Build parameters from the damping ratio alpha = N*gamma0/(2*omega)."""
        if not (math.isfinite(alpha) and alpha > 0):
            raise ValidationError(f"alpha must be finite and > 0, got {alpha!r}")
        if not (math.isfinite(omega) and omega > 0):
            raise ValidationError(f"omega must be finite and > 0, got {omega!r}")
        return cls(n_atoms=n_atoms, gamma0=2.0 * alpha * omega / n_atoms, omega=omega)

    @property
    def collective_rate(self) -> float:
        """N * gamma0, the inverse width of the superradiant burst."""
        return self.n_atoms * self.gamma0

    @property
    def alpha(self) -> float:
        return self.n_atoms * self.gamma0 / (2.0 * self.omega)

    @property
    def t_delay(self) -> float:
        return math.log(self.n_atoms) / self.collective_rate

    @property
    def i_max(self) -> float:
        return self.n_atoms**2 * self.omega * self.gamma0 / 4.0


@dataclass(frozen=True)
class QubitPureState:
    """Mean-field single-atom state ``amp_ground |g> + amp_excited |e>``."""

    amp_ground: complex
    amp_excited: complex

    def __post_init__(self):
        norm = abs(self.amp_ground) ** 2 + abs(self.amp_excited) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValidationError(f"state is not normalized (norm^2 = {norm!r})")

    @property
    def vector(self) -> np.ndarray:
        """Column of amplitudes in the (|e>, |g>) basis."""
        return np.array([self.amp_excited, self.amp_ground], dtype=complex)

    def overlap(self, other: "QubitPureState") -> complex:
        """Inner product <self|other>."""
        return complex(np.vdot(self.vector, other.vector))


@dataclass(frozen=True)
class QubitDensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        if rho.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 matrix, got shape {rho.shape}")
        if np.max(np.abs(rho - rho.conj().T)) > 1e-12:
            raise ValidationError("density matrix is not Hermitian")
        if abs(np.trace(rho) - 1.0) > 1e-12:
            raise ValidationError("density matrix does not have unit trace")
        if np.linalg.eigvalsh(rho).min() < -1e-12:
            raise ValidationError("density matrix is not positive semidefinite")
        object.__setattr__(self, "entries", rho)

    @property
    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


@dataclass(frozen=True)
class HamiltonianMatrix:
    entries: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.entries, dtype=complex)
        if h.shape != (2, 2):
            raise ValidationError(f"expected a 2x2 matrix, got shape {h.shape}")
        if np.max(np.abs(h - h.conj().T)) > 1e-12:
            raise ValidationError("Hamiltonian is not Hermitian")
        object.__setattr__(self, "entries", h)

    def expectation(self, state: QubitPureState) -> float:
        v = state.vector
        return float(np.real(np.vdot(v, self.entries @ v)))

    def expectation_squared(self, state: QubitPureState) -> float:
        """<psi|H^2|psi>."""
        hv = self.entries @ state.vector
        return float(np.real(np.vdot(hv, hv)))


def time_grid(start: float, end: float, count: int) -> np.ndarray:
    """Uniform grid of ``count`` points from ``start`` to ``end`` inclusive."""
    if count < 2:
        raise ValidationError(f"grid needs at least 2 points, got {count}")
    if not (math.isfinite(start) and math.isfinite(end)):
        raise ValidationError("grid endpoints must be finite")
    if end <= start:
        raise ValidationError(f"grid end ({end}) must exceed start ({start})")
    return np.linspace(start, end, count)


def _check_time(t):
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < 0):
        raise ValidationError("times must be finite and >= 0")
    return t


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def _burst_phase(t, params: ModelParams):
    # N*gamma0*(t - t_D), written to avoid forming t_D separately
    return params.collective_rate * t - math.log(params.n_atoms)


def stable_sech(x):
    """sech(x) without overflow for large |x|."""
    e = np.exp(-np.abs(np.asarray(x, dtype=float)))
    return _scalar_or_array(2.0 * e / (1.0 + e * e))


def time_delay(params: ModelParams) -> float:
    """Superradiant delay ``ln(N) / (gamma0 * N)``; zero for a single atom."""
    return params.t_delay


def populations(t, params: ModelParams):
    """Excited and ground populations ``(p_t, 1 - p_t)``.

    Both are evaluated from the logistic form directly so neither suffers
    cancellation when the other is close to one.
    """
    t = _check_time(t)
    x = _burst_phase(t, params)
    e = np.exp(-np.abs(x))
    big = 1.0 / (1.0 + e)
    small = e / (1.0 + e)
    p = np.where(x >= 0, small, big)
    q = np.where(x >= 0, big, small)
    return _scalar_or_array(p), _scalar_or_array(q)


def excitation_probability(t, params: ModelParams):
    """Probability ``p_t = 1 / (exp(N gamma0 (t - t_D)) + 1)`` of the excited state."""
    return populations(t, params)[0]


def single_atom_state(t: float, params: ModelParams) -> QubitPureState:
    """Mean-field qubit state at time ``t``.

    ``sqrt(1 - p_t) e^{+i w t/2} |g> + sqrt(p_t) e^{-i w t/2} |e>``.
    """
    p, q = populations(float(t), params)
    half = 0.5 * params.omega * t
    return QubitPureState(
        amp_ground=math.sqrt(q) * complex(math.cos(half), math.sin(half)),
        amp_excited=math.sqrt(p) * complex(math.cos(half), -math.sin(half)),
    )


def single_atom_density(t: float, params: ModelParams) -> QubitDensityMatrix:
    p, q = populations(float(t), params)
    coh = math.sqrt(p * q) * np.exp(-1j * params.omega * t)
    rho = np.array([[p, coh], [np.conj(coh), q]], dtype=complex)
    return QubitDensityMatrix(rho)


def nonlinear_hamiltonian(t: float, params: ModelParams) -> HamiltonianMatrix:
    """State-dependent mean-field Hamiltonian evaluated along the trajectory.

    ``H_t = (w/2) sz - i (N g0/2) sqrt(p(1-p)) (s+ e^{-iwt} - s- e^{iwt})``
    """
    p, q = populations(float(t), params)
    drive = 0.5 * params.collective_rate * math.sqrt(p * q)
    phase = np.exp(-1j * params.omega * t)
    h = 0.5 * params.omega * SIGMA_Z - 1j * drive * (
        SIGMA_PLUS * phase - SIGMA_MINUS * np.conj(phase)
    )
    return HamiltonianMatrix(h)


def max_intensity(params: ModelParams) -> float:
    """Peak intensity ``N^2 w g0 / 4`` reached at the delay time."""
    return params.i_max


def intensity(t, params: ModelParams):
    """Radiated power ``(N^2 w g0/4) sech^2((N g0/2)(t - t_D))``."""
    t = _check_time(t)
    s = stable_sech(0.5 * _burst_phase(t, params))
    return _scalar_or_array(params.i_max * np.square(s))


def l1_coherence(t, params: ModelParams):
    """l1-norm of coherence of the mean-field qubit, ``sech((N g0/2)(t - t_D))``."""
    t = _check_time(t)
    return stable_sech(0.5 * _burst_phase(t, params))


def l1_norm_of_coherence(rho) -> float:
    """Sum of the moduli of the off-diagonal entries of ``rho``."""
    a = np.abs(np.asarray(rho))
    return float(a.sum() - np.trace(a))


def coherence_from_intensity(i_now, i_max):
    """Single-atom coherence inferred from a measured intensity, ``sqrt(I/Imax)``.

    Raises:
        InvalidMeasurementError: if ``i_max <= 0``, ``i_now < 0`` or
            ``i_now`` exceeds ``i_max`` by more than a relative 1e-12.
    """
    i_max = float(i_max)
    if not (math.isfinite(i_max) and i_max > 0):
        raise InvalidMeasurementError(f"maximum intensity must be > 0, got {i_max!r}")
    i_now = np.asarray(i_now, dtype=float)
    if np.any(~np.isfinite(i_now)) or np.any(i_now < 0):
        raise InvalidMeasurementError("intensity must be finite and >= 0")
    if np.any(i_now > i_max * (1.0 + 1e-12)):
        raise InvalidMeasurementError("intensity exceeds the stated maximum")
    return _scalar_or_array(np.sqrt(np.minimum(i_now / i_max, 1.0)))


def n_particle_coherence(c_single, n_atoms: int):
    """l1-coherence ``(1 + C)^N - 1`` of the uncorrelated N-fold product state.

    For ``N * C << 1`` this is close to ``N * C``; once ``N * C`` is of order
    one it is not (``C = 1e-6``, ``N = 1e6`` gives about ``e - 1``).
    """
    if isinstance(n_atoms, bool) or int(n_atoms) != n_atoms or n_atoms < 1:
        raise ValidationError(f"n_atoms must be a positive integer, got {n_atoms!r}")
    c = np.asarray(c_single, dtype=float)
    if np.any(~np.isfinite(c)) or np.any(c < 0) or np.any(c > 1):
        raise ValidationError("single-atom coherence must lie in [0, 1]")
    return _scalar_or_array(np.expm1(int(n_atoms) * np.log1p(c)))
