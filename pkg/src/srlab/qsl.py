"""Quantum speed limit of the effective unitary mean-field evolution.

The mean-field qubit moves on the Bloch sphere: its polar angle ``theta``
(with ``cos theta = 2p - 1``) sweeps monotonically while the azimuth turns
at rate ``omega``.  The speed-limit time is the Bures angle between the
endpoints divided by the time-averaged energy spread,

    tau_QSL = L(psi_0, psi_tau) / mean(Delta E),

and the ratio ``tau_QSL / tau`` never exceeds one.

Both the Bures angle and the averaged spread are half-angles of a
spherical law of cosines, ``arccos(X)``.  Close to ``X = 1`` the plain
``arccos`` amplifies rounding, so the library forms ``1 - X`` directly
from differences of the endpoint coordinates and evaluates
``arccos(X) = 2 asin(sqrt((1 - X)/2))`` there.  This is algebraically the
same expression; it only changes which terms get subtracted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalConsistencyError, UndefinedBoundError, ValidationError
from .meanfield import ModelParams, populations

__all__ = [
    "QslInputs",
    "QslReport",
    "bures_angle",
    "instantaneous_variance",
    "avg_energy_variance",
    "qsl_time",
    "qsl_ratio_from_coherence",
    "qsl_ratio_curve",
    "coherence_sign",
]

_CLIP_TOL = 1e-9


@dataclass(frozen=True)
class QslInputs:
    """Model parameters plus the evolution duration ``tau``."""

    params: ModelParams
    tau: float

    def __post_init__(self):
        tau = float(self.tau)
        if not (math.isfinite(tau) and tau > 0):
            raise ValidationError(f"tau must be finite and > 0, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)


@dataclass(frozen=True)
class QslReport:
    bures_angle: float
    avg_variance: float
    qsl_time: float
    ratio: float

    def as_dict(self) -> dict:
        return {
            "bures_angle": self.bures_angle,
            "avg_variance": self.avg_variance,
            "qsl_time": self.qsl_time,
            "ratio": self.ratio,
        }


def _checked_cosine(x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0 + _CLIP_TOL):
        worst = float(np.max(np.abs(x)))
        raise NumericalConsistencyError(f"arccos argument {worst!r} lies outside [-1, 1]")
    return np.clip(x, -1.0, 1.0)


def _arccos(x, one_minus_x):
    """arccos(x) given an independently accurate ``1 - x``."""
    x = _checked_cosine(x)
    half_gap = np.clip(0.5 * np.asarray(one_minus_x, dtype=float), 0.0, 1.0)
    near_one = 2.0 * np.arcsin(np.sqrt(half_gap))
    return np.where(x > 0, near_one, np.arccos(x))


def _population_gap(params: ModelParams, tau, p0, qt):
    # (2p0 - 1) - (2pt - 1) = 2 p0 qt (1 - exp(-N g0 tau)), free of cancellation
    return -2.0 * p0 * qt * np.expm1(-params.collective_rate * np.asarray(tau, dtype=float))


def _log1m_exp(u):
    # log(1 - exp(-2u)) for u >= 0; -inf at u = 0
    with np.errstate(divide="ignore"):
        return np.log(-np.expm1(-2.0 * u))


def _coherence_gap(params: ModelParams, tau):
    """``C(0) - C(tau)`` without subtracting the two coherences.

    With ``C = sech(u)``, ``u = (N g0/2)(t - t_D)``, the difference is
    ``2 sinh(s) sinh(d) sech(u0) sech(ut)`` where ``s = (u0 + ut)/2`` and
    ``d = (ut - u0)/2``.  Writing every factor as an exponential times a
    bounded correction, the exponents add up to ``-min(|u0|, |ut|)``
    (because ``u0 <= 0``), so nothing large is ever formed.
    """
    rate = params.collective_rate
    tau = np.asarray(tau, dtype=float)
    u0 = -0.5 * rate * params.t_delay
    ut = u0 + 0.5 * rate * tau
    s = 0.5 * (u0 + ut)
    log_mag = (
        -np.minimum(abs(u0), np.abs(ut))
        + _log1m_exp(np.abs(s))
        + _log1m_exp(0.25 * rate * tau)
        - np.log1p(np.exp(-2.0 * abs(u0)))
        - np.log1p(np.exp(-2.0 * np.abs(ut)))
    )
    return 2.0 * np.sign(s) * np.exp(log_mag)


def _endpoint_angles(params: ModelParams, tau):
    """Bures angle and polar sweep between psi_0 and psi_tau (vectorised in tau)."""
    p0, q0 = populations(0.0, params)
    pt, qt = populations(tau, params)
    pt = np.asarray(pt, dtype=float)
    qt = np.asarray(qt, dtype=float)
    c0 = 2.0 * math.sqrt(p0 * q0)
    ct = 2.0 * np.sqrt(pt * qt)
    phi = params.omega * np.asarray(tau, dtype=float)

    polar = (1.0 - 2.0 * pt) * (1.0 - 2.0 * p0)
    chord = 0.5 * (_coherence_gap(params, tau) ** 2 + _population_gap(params, tau, p0, qt) ** 2)
    twist = 2.0 * c0 * ct * np.sin(0.5 * phi) ** 2

    sweep = _arccos(polar + c0 * ct, chord)
    bures = 0.5 * _arccos(polar + c0 * ct * np.cos(phi), chord + twist)
    return bures, sweep


def bures_angle(inputs: QslInputs) -> float:
    """Bures angle ``arccos|<psi_0|psi_tau>|`` between the endpoint states.

    Equal to ``(1/2) arccos[(1-2p_tau)(1-2p_0) + 4 sqrt(p_0 p_tau q_0 q_tau) cos(w tau)]``.
    """
    bures, _ = _endpoint_angles(inputs.params, inputs.tau)
    return float(bures)


def instantaneous_variance(t, params: ModelParams):
    """Energy spread ``sqrt(<H_t^2> - <H_t>^2)`` along the mean-field trajectory.

    With ``<H^2> = (w/2)^2 + (N g0/2)^2 p q`` and ``<H> = (w/2)(2p - 1)`` the
    difference collapses to ``p q (w^2 + (N g0/2)^2)``, which is what gets
    evaluated (no cancellation when ``p`` is near 0 or 1).
    """
    p, q = populations(t, params)
    spread = math.hypot(params.omega, 0.5 * params.collective_rate) * np.sqrt(
        np.asarray(p) * np.asarray(q)
    )
    return float(spread) if np.ndim(spread) == 0 else spread


def avg_energy_variance(inputs: QslInputs) -> float:
    """Time average of the energy spread over ``[0, tau]``.

    Closed form ``(1/2 tau) sqrt(1 + 1/alpha^2) arccos[(1-2p_tau)(1-2p_0) + 4 sqrt(p_0 p_tau q_0 q_tau)]``.
    """
    _, sweep = _endpoint_angles(inputs.params, inputs.tau)
    alpha = inputs.params.alpha
    return float(0.5 * math.sqrt(1.0 + alpha**-2) * sweep / inputs.tau)


def qsl_time(inputs: QslInputs) -> QslReport:
    """Speed-limit time and its ratio to ``tau``.

    Raises:
        UndefinedBoundError: when the averaged energy spread vanishes, so the
            bound has no finite value.
    """
    bures, sweep = _endpoint_angles(inputs.params, inputs.tau)
    bures = float(bures)
    avg = float(0.5 * math.sqrt(1.0 + inputs.params.alpha**-2) * sweep / inputs.tau)
    if not avg > 0:
        raise UndefinedBoundError(
            f"time-averaged energy spread is zero for tau={inputs.tau!r}; bound undefined"
        )
    t_qsl = bures / avg
    return QslReport(bures_angle=bures, avg_variance=avg, qsl_time=t_qsl, ratio=t_qsl / inputs.tau)


def qsl_ratio_curve(params: ModelParams, taus) -> np.ndarray:
    """Vectorised ``tau_QSL / tau`` for an array of durations (all > 0).

    Entries whose averaged energy spread underflows to zero are NaN.
    """
    taus = np.asarray(taus, dtype=float)
    if np.any(~np.isfinite(taus)) or np.any(taus <= 0):
        raise ValidationError("durations must be finite and > 0")
    bures, sweep = _endpoint_angles(params, taus)
    denom = math.sqrt(1.0 + params.alpha**-2) * sweep
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(denom > 0, 2.0 * bures / denom, np.nan)
    return ratio


def coherence_sign(tau: float, params: ModelParams) -> int:
    """``sgn(tau - t_D)`` with the convention ``sgn(0) = +1``."""
    return 1 if tau >= params.t_delay else -1


def _complement(c):
    return np.sqrt((1.0 - c) * (1.0 + c))


def qsl_ratio_from_coherence(c0, c_tau, sign: int, params: ModelParams, tau) -> float:
    """``tau_QSL / tau`` written through the initial and final l1-coherences.

    Numerator ``(1/2) arccos(C0 Ct cos(w tau) - s sqrt((1-C0^2)(1-Ct^2)))``,
    denominator ``(1/2) sqrt(1 + 1/alpha^2) arccos(C0 Ct - s sqrt(...))``,
    with ``s = sgn(tau - t_D)``.  At ``tau = t_D`` the square root vanishes,
    so either sign gives the same value.

    Raises:
        ValidationError: coherences outside [0, 1], ``sign`` not +-1, or
            ``tau <= 0``.
        UndefinedBoundError: when the denominator vanishes.
    """
    c0 = float(c0)
    ct = float(c_tau)
    for name, c in (("c0", c0), ("c_tau", ct)):
        if not (0.0 <= c <= 1.0):
            raise ValidationError(f"{name} must lie in [0, 1], got {c!r}")
    if sign not in (1, -1):
        raise ValidationError(f"sign must be +1 or -1, got {sign!r}")
    tau = float(tau)
    if not (math.isfinite(tau) and tau > 0):
        raise ValidationError(f"tau must be finite and > 0, got {tau!r}")

    phi = params.omega * tau
    # write the printed argument as c0*ct*cos(phi) + w0*wt with c^2 + w^2 = 1
    w0 = float(_complement(c0))
    wt = -sign * float(_complement(ct))
    if w0 * wt > 0:
        w_gap = (ct - c0) * (ct + c0) / (w0 + wt)
    else:
        w_gap = w0 - wt
    chord = 0.5 * ((c0 - ct) ** 2 + w_gap**2)
    twist = 2.0 * c0 * ct * math.sin(0.5 * phi) ** 2

    numerator = 0.5 * float(_arccos(c0 * ct * math.cos(phi) + w0 * wt, chord + twist))
    denominator = (
        0.5 * math.sqrt(1.0 + params.alpha**-2) * float(_arccos(c0 * ct + w0 * wt, chord))
    )
    if not denominator > 0:
        raise UndefinedBoundError("averaged energy spread vanishes; ratio undefined")
    return numerator / denominator
