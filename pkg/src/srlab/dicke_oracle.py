"""Exact collective-decay dynamics on the symmetric Dicke ladder.

Integrates

    d rho/dt = -i w [Jz, rho] - (g0/2) ({J+J-, rho} - 2 J- rho J+)

for ``N`` atoms restricted to the ``J = N/2`` ladder, starting from the spin
coherent (product) state that matches the mean-field trajectory at t = 0.
The result is the reference the closed-form mean-field formulas are checked
against.

Ladder indexing: row ``i`` is ``m = J - i``, so index 0 is the fully
excited state and ``k = N - i`` counts excitations.

Optional local decay and dephasing are modelled inside the ladder only:

* local decay at rate ``g_loc`` moves population from ``k`` to ``k - 1``
  excitations at rate ``g_loc * k`` and damps the coherence between rungs
  ``i`` and ``j`` at ``g_loc (k_i + k_j) / 2``;
* local dephasing at rate ``g_phi`` damps the coherence between rungs
  ``i`` and ``j`` at ``g_phi |k_i - k_j|``.

This is an approximation: genuine single-atom noise also leaks out of the
symmetric subspace, which a single ladder cannot hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import (
    ConvergenceError,
    InvariantViolationError,
    ValidationError,
)
from .meanfield import ModelParams

__all__ = [
    "MAX_ATOMS",
    "DickeDensityMatrix",
    "CollectiveObservables",
    "OracleConfig",
    "DickeLadder",
    "lowering_coefficient",
    "spin_coherent_state",
    "liouvillian_apply",
    "integrate",
    "evolve",
    "intensity_exact",
    "default_step",
]

MAX_ATOMS = 512
STABILITY_LIMIT = 0.1
TRACE_TOL = 1e-8
GATE_RTOL = 1e-6


def lowering_coefficient(j: float, m: float) -> float:
    """``<j, m-1| J- |j, m> = sqrt(j(j+1) - m(m-1))``; zero on the bottom rung."""
    if j < 0 or abs(m) > j + 1e-12:
        raise ValidationError(f"|m| must not exceed j (got j={j!r}, m={m!r})")
    return math.sqrt(max(j * (j + 1) - m * (m - 1), 0.0))


@dataclass(frozen=True)
class DickeLadder:
    """Diagonal data of the collective operators for one ``N``."""

    n_atoms: int
    m: np.ndarray = field(repr=False)
    excitations: np.ndarray = field(repr=False)
    lowering: np.ndarray = field(repr=False)
    raise_lower: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, n_atoms: int) -> "DickeLadder":
        j = n_atoms / 2
        m = j - np.arange(n_atoms + 1, dtype=float)
        # lowering[i] = <m_i - 1|J-|m_i>, couples row i to row i + 1
        lowering = np.sqrt(np.maximum(j * (j + 1) - m[:-1] * (m[:-1] - 1), 0.0))
        raise_lower = np.concatenate([lowering**2, [0.0]])
        return cls(n_atoms, m, m + j, lowering, raise_lower)

    def jz(self) -> np.ndarray:
        return np.diag(self.m)

    def jminus(self) -> np.ndarray:
        n = self.n_atoms
        out = np.zeros((n + 1, n + 1))
        out[np.arange(1, n + 1), np.arange(n)] = self.lowering
        return out

    def jplus(self) -> np.ndarray:
        return self.jminus().T.copy()


def _ladder(n_atoms: int) -> DickeLadder:
    return DickeLadder.build(n_atoms)


@dataclass(frozen=True)
class DickeDensityMatrix:
    """Density matrix on the ``N + 1`` rungs ``m = J, J-1, ..., -J``."""

    n_atoms: int
    entries: np.ndarray

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=complex)
        dim = self.n_atoms + 1
        if rho.shape != (dim, dim):
            raise ValidationError(f"expected a {dim}x{dim} matrix, got {rho.shape}")
        object.__setattr__(self, "entries", rho)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T)))

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.entries + self.entries.conj().T)
        return float(np.linalg.eigvalsh(h)[0])

    def check(self, *, herm_tol=1e-10, trace_tol=1e-10, pos_tol=1e-8) -> None:
        """Raise InvariantViolationError if the state is not a valid density matrix."""
        if self.hermiticity_error() > herm_tol:
            raise InvariantViolationError(f"non-Hermitian state ({self.hermiticity_error():.3g})")
        if abs(self.trace() - 1.0) > trace_tol:
            raise InvariantViolationError(f"trace drifted to {self.trace()!r}")
        if self.min_eigenvalue() < -pos_tol:
            raise InvariantViolationError(f"negative eigenvalue {self.min_eigenvalue():.3g}")


@dataclass(frozen=True)
class CollectiveObservables:
    time: float
    jz_mean: float
    jplus_mean: complex
    jpjm_mean: float

    def dipole_coherence(self, n_atoms: int) -> float:
        """Single-atom coherence proxy ``2 |<J+>| / N``."""
        return 2.0 * abs(self.jplus_mean) / n_atoms


@dataclass(frozen=True)
class OracleConfig:
    """Run settings for the ladder integrator.

    ``initial_p0`` defaults to the mean-field value ``N / (N + 1)``.
    Observables are recorded every ``record_every`` steps and at the end.
    """

    params: ModelParams
    t_end: float
    step: float
    local_decay_rate: float = 0.0
    local_dephasing_rate: float = 0.0
    initial_p0: float | None = None
    initial_phase: float = 0.0
    record_every: int = 10

    def __post_init__(self):
        if self.params.n_atoms > MAX_ATOMS:
            raise ValidationError(f"n_atoms above {MAX_ATOMS} is not supported")
        for name in ("t_end", "step"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(f"{name} must be finite and > 0, got {value!r}")
        for name in ("local_decay_rate", "local_dephasing_rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValidationError(f"{name} must be finite and >= 0, got {value!r}")
        if self.initial_p0 is not None and not (0.0 <= self.initial_p0 <= 1.0):
            raise ValidationError(f"initial_p0 must lie in [0, 1], got {self.initial_p0!r}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ValidationError("record_every must be a positive integer")

    @property
    def p0(self) -> float:
        if self.initial_p0 is not None:
            return self.initial_p0
        n = self.params.n_atoms
        return n / (n + 1)

    @property
    def n_steps(self) -> int:
        return max(1, math.ceil(self.t_end / self.step - 1e-9))


def default_step(params: ModelParams, resolution: float = 0.01) -> float:
    """Step resolving both the burst width ``1/(N g0)`` and the fastest phase ``N w``."""
    return resolution / (params.n_atoms * max(params.gamma0, params.omega))


def spin_coherent_state(n_atoms: int, p0: float, phase: float = 0.0) -> DickeDensityMatrix:
    """N-fold product of ``sqrt(1-p0)|g> + sqrt(p0) e^{i phase}|e>`` on the ladder.

    The amplitude with ``k`` excitations is
    ``sqrt(C(N, k)) (sqrt(p0) e^{i phase})^k sqrt(1-p0)^(N-k)``.
    """
    if isinstance(n_atoms, bool) or int(n_atoms) != n_atoms or n_atoms < 1:
        raise ValidationError(f"n_atoms must be a positive integer, got {n_atoms!r}")
    if n_atoms > MAX_ATOMS:
        raise ValidationError(f"n_atoms above {MAX_ATOMS} is not supported")
    if not (0.0 <= p0 <= 1.0):
        raise ValidationError(f"p0 must lie in [0, 1], got {p0!r}")
    n = int(n_atoms)
    k = np.arange(n, -1, -1, dtype=float)
    log_binom = gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)
    log_mag = 0.5 * (log_binom + xlogy(k, p0) + xlogy(n - k, 1.0 - p0))
    amps = np.exp(log_mag) * np.exp(1j * phase * k)
    return DickeDensityMatrix(n, np.outer(amps, amps.conj()))


def _apply(rho: np.ndarray, ladder: DickeLadder, omega, gamma0, g_loc, g_phi) -> np.ndarray:
    m = ladder.m
    d = ladder.raise_lower
    c = ladder.lowering
    out = (-1j * omega) * (m[:, None] - m[None, :]) * rho
    out -= (0.5 * gamma0) * (d[:, None] + d[None, :]) * rho
    # J- rho J+ only feeds the block one rung down
    out[1:, 1:] += gamma0 * (c[:, None] * rho[:-1, :-1] * c[None, :])
    if g_loc:
        rates = g_loc * ladder.excitations
        out -= 0.5 * (rates[:, None] + rates[None, :]) * rho
        idx = np.arange(1, ladder.n_atoms + 1)
        out[idx, idx] += rates[:-1] * np.diagonal(rho)[:-1]
    if g_phi:
        k = ladder.excitations
        out -= g_phi * np.abs(k[:, None] - k[None, :]) * rho
    return out


def liouvillian_apply(rho: DickeDensityMatrix, config: OracleConfig) -> DickeDensityMatrix:
    """Time derivative of ``rho`` under the collective master equation.

    The returned matrix is traceless and Hermitian (it is a derivative, so it
    is wrapped without density-matrix checks).
    """
    if rho.n_atoms != config.params.n_atoms:
        raise ValidationError("state and configuration disagree on n_atoms")
    p = config.params
    deriv = _apply(
        rho.entries,
        _ladder(rho.n_atoms),
        p.omega,
        p.gamma0,
        config.local_decay_rate,
        config.local_dephasing_rate,
    )
    return DickeDensityMatrix(rho.n_atoms, deriv)


def _observe(t: float, rho: np.ndarray, ladder: DickeLadder) -> CollectiveObservables:
    diag = np.real(np.diagonal(rho))
    jplus = complex(np.sum(ladder.lowering * np.diagonal(rho, offset=-1)))
    return CollectiveObservables(
        time=t,
        jz_mean=float(np.dot(ladder.m, diag)),
        jplus_mean=jplus,
        jpjm_mean=float(np.dot(ladder.raise_lower, diag)),
    )


def integrate(config: OracleConfig, initial: DickeDensityMatrix | None = None):
    """Fixed-step classical RK4 without the convergence gate.

    Returns:
        ``(observables, final_state)``.

    Raises:
        ValidationError: if ``N g0 step`` exceeds the stability limit.
        InvariantViolationError: if the trace drifts by more than 1e-8.
    """
    p = config.params
    if p.collective_rate * config.step > STABILITY_LIMIT + 1e-12:
        raise ValidationError(
            f"step {config.step!r} too large: N*gamma0*step must be <= {STABILITY_LIMIT}"
        )
    n = p.n_atoms
    ladder = _ladder(n)
    if initial is None:
        initial = spin_coherent_state(n, config.p0, config.initial_phase)
    elif initial.n_atoms != n:
        raise ValidationError("initial state and configuration disagree on n_atoms")
    rho = initial.entries.copy()
    h = config.step
    args = (ladder, p.omega, p.gamma0, config.local_decay_rate, config.local_dephasing_rate)

    records = [_observe(0.0, rho, ladder)]
    n_steps = config.n_steps
    for s in range(1, n_steps + 1):
        k1 = _apply(rho, *args)
        k2 = _apply(rho + (0.5 * h) * k1, *args)
        k3 = _apply(rho + (0.5 * h) * k2, *args)
        k4 = _apply(rho + h * k3, *args)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if s % config.record_every == 0 or s == n_steps:
            drift = abs(np.trace(rho) - 1.0)
            if drift > TRACE_TOL:
                raise InvariantViolationError(f"trace drifted by {drift:.3g} at step {s}")
            records.append(_observe(s * h, rho, ladder))
    return records, DickeDensityMatrix(n, rho)


def _observable_table(records) -> np.ndarray:
    return np.array(
        [[r.jz_mean, r.jplus_mean.real, r.jplus_mean.imag, r.jpjm_mean] for r in records]
    )


def _gate(config: OracleConfig, records) -> None:
    fine = OracleConfig(
        params=config.params,
        t_end=config.n_steps * config.step,
        step=config.step / 2,
        local_decay_rate=config.local_decay_rate,
        local_dephasing_rate=config.local_dephasing_rate,
        initial_p0=config.initial_p0,
        initial_phase=config.initial_phase,
        record_every=2 * config.record_every,
    )
    fine_records, _ = integrate(fine)
    coarse = _observable_table(records)
    refined = _observable_table(fine_records)
    if coarse.shape != refined.shape:
        raise ConvergenceError("step-halved run recorded a different time grid")
    # relative to the largest magnitude each observable reaches over the run
    scale = np.maximum(np.max(np.abs(refined), axis=0), 1e-300)
    change = float(np.max(np.abs(coarse - refined) / scale))
    if change >= GATE_RTOL:
        raise ConvergenceError(
            f"halving the step changed observables by {change:.3g} (relative); "
            f"limit {GATE_RTOL:g}. Reduce --step."
        )


def evolve(config: OracleConfig, *, gate: bool = True) -> list[CollectiveObservables]:
    """Integrate the ladder master equation and return the recorded observables.

    With ``gate=True`` the run is repeated at half the step and rejected with
    ConvergenceError if any recorded observable moves by 1e-6 or more
    relative to its peak magnitude.
    """
    records, final = integrate(config)
    final.check()
    if gate:
        _gate(config, records)
    return records


def intensity_exact(obs: CollectiveObservables, params: ModelParams) -> float:
    """Emitted power ``w g0 <J+J->`` (same energy-rate units as the mean field)."""
    return params.omega * params.gamma0 * obs.jpjm_mean
