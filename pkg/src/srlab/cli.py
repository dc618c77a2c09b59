"""Command-line front end.

Subcommands::

    srlab timeseries   mean-field populations, coherence and intensity on a time grid
    srlab sweep        (x, alpha) density-plot tables for coherence, intensity or QSL ratio
    srlab qsl          speed-limit report for one duration, with the coherence-form cross-check
    srlab verify       exact ladder oracle against the mean-field intensity
    srlab rerun        replay a run manifest

Every file written with ``--out`` gets a ``<out>.manifest.json`` sidecar.
Exit status: 0 success, 2 validation error, 3 numerical-consistency error,
4 oracle convergence failure.  Errors are reported on stderr as one JSON
record.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import dicke_oracle as oracle
from .errors import NumericalConsistencyError, SrlabError, ValidationError
from .meanfield import ModelParams, intensity, l1_coherence, populations
from .output import (
    RunManifest,
    TimeSeries,
    format_number,
    manifest_path,
    report_json,
)
from .qsl import (
    QslInputs,
    coherence_sign,
    qsl_ratio_curve,
    qsl_ratio_from_coherence,
    qsl_time,
)

QUANTITIES = ("coherence", "intensity", "qsl_ratio")
DEFAULT_SWEEP_ATOMS = 10**6
DEFAULT_VERIFY_ATOMS = (20, 50, 100)

TIMESERIES_COLUMNS = (
    "t",
    "omega_t_minus_tD",
    "p",
    "coherence",
    "intensity",
    "intensity_over_max",
)

# thresholds the verify report grades against
SINGLE_QUBIT_TOL = 1e-8
PEAK_INTENSITY_RTOL = 0.10
PEAK_TIME_TOL = 0.5  # in units of 1/(N gamma0)


def _default_gamma0(n_atoms: int, omega: float) -> float:
    # alpha = 1 unless the caller says otherwise
    return 2.0 * omega / n_atoms


def _finite(name, value):
    if value is None or not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


# --------------------------------------------------------------------- timeseries


def cmd_timeseries(params: ModelParams, t_start: float, t_end: float, points: int) -> TimeSeries:
    """Mean-field quantities on a uniform grid of ``points`` times."""
    _finite("t_start", t_start)
    _finite("t_end", t_end)
    if points < 2:
        raise ValidationError(f"--points must be >= 2, got {points}")
    if t_start < 0:
        raise ValidationError(f"--t-start must be >= 0, got {t_start}")
    if t_end <= t_start:
        raise ValidationError("--t-end must exceed --t-start")
    t = np.linspace(t_start, t_end, points)
    p, _ = populations(t, params)
    coh = l1_coherence(t, params)
    inten = intensity(t, params)
    scaled = params.omega * (t - params.t_delay)
    ts = TimeSeries(TIMESERIES_COLUMNS)
    for row in zip(t, scaled, p, coh, inten, np.square(coh)):
        ts.append(*row)
    return ts


# --------------------------------------------------------------------- sweep


@dataclass(frozen=True)
class SweepSpec:
    """Grid over scaled time ``x = omega (t - t_D)`` and ``alpha = N g0/(2 omega)``.

    The alpha axis is log-spaced.  ``quantity`` selects the tabulated value:
    the l1-coherence, the intensity normalised to its peak, or the QSL ratio
    (with ``t`` read as the duration ``tau``).
    """

    x_start: float = -5.0
    x_end: float = 5.0
    x_count: int = 101
    alpha_start: float = 1e-2
    alpha_end: float = 1e2
    alpha_count: int = 81
    n_atoms: int = DEFAULT_SWEEP_ATOMS
    omega: float = 1.0
    quantity: str = "coherence"

    def __post_init__(self):
        for name in ("x_start", "x_end", "alpha_start", "alpha_end", "omega"):
            _finite(name, getattr(self, name))
        if self.x_count < 2 or self.alpha_count < 2:
            raise ValidationError("sweep axes need at least 2 points")
        if self.x_end <= self.x_start:
            raise ValidationError("x range is empty")
        if self.alpha_start <= 0 or self.alpha_end <= 0:
            raise ValidationError("log-spaced alpha axis needs positive endpoints")
        if self.alpha_end <= self.alpha_start:
            raise ValidationError("alpha range is empty")
        if self.quantity not in QUANTITIES:
            raise ValidationError(f"quantity must be one of {QUANTITIES}, got {self.quantity!r}")
        ModelParams(self.n_atoms, 1.0, self.omega)

    def x_axis(self) -> np.ndarray:
        return np.linspace(self.x_start, self.x_end, self.x_count)

    def alpha_axis(self) -> np.ndarray:
        return np.geomspace(self.alpha_start, self.alpha_end, self.alpha_count)


def _sweep_column(spec: SweepSpec, alpha: float, x: np.ndarray) -> np.ndarray:
    params = ModelParams.from_alpha(alpha, spec.n_atoms, spec.omega)
    t = params.t_delay + x / spec.omega
    values = np.full(x.shape, np.nan)
    if spec.quantity == "qsl_ratio":
        # tau <= 0 is the forbidden corner: the delay would have to be negative
        ok = t > 0
        if np.any(ok):
            values[ok] = qsl_ratio_curve(params, t[ok])
    else:
        ok = t >= 0
        if spec.quantity == "coherence":
            values[ok] = l1_coherence(t[ok], params)
        else:
            values[ok] = intensity(t[ok], params) / params.i_max
    return values


def sweep_threads() -> int | None:
    """Worker cap from ``SRLAB_THREADS`` (unset or 0 means automatic)."""
    raw = os.environ.get("SRLAB_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"SRLAB_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValidationError("SRLAB_THREADS must be >= 0")
    return n or None


def cmd_sweep(spec: SweepSpec) -> TimeSeries:
    """Long-format ``(x, y, value)`` table in x-major order.

    Cells outside the physical region (negative time, or non-positive
    duration for the QSL ratio) are omitted.
    """
    x = spec.x_axis()
    alphas = spec.alpha_axis()
    with ThreadPoolExecutor(max_workers=sweep_threads()) as pool:
        columns = list(pool.map(lambda a: _sweep_column(spec, a, x), alphas))
    grid = np.stack(columns, axis=1)  # grid[i_x, i_alpha]
    ts = TimeSeries(("x", "y", "value"))
    for i, xv in enumerate(x):
        for j, av in enumerate(alphas):
            v = grid[i, j]
            if np.isfinite(v):
                ts.append(xv, av, v)
    return ts


# --------------------------------------------------------------------- qsl


def cmd_qsl(params: ModelParams, tau: float) -> dict:
    """QSL report plus the coherence-form recomputation of the ratio.

    Raises:
        NumericalConsistencyError: if the two ratio evaluations disagree by
            more than 1e-10.
    """
    inputs = QslInputs(params, tau)
    report = qsl_time(inputs)
    p0, _ = populations(0.0, params)
    p_tau, _ = populations(tau, params)
    c0 = float(l1_coherence(0.0, params))
    c_tau = float(l1_coherence(tau, params))
    sign = coherence_sign(tau, params)
    ratio_coh = qsl_ratio_from_coherence(c0, c_tau, sign, params, tau)
    gap = abs(report.ratio - ratio_coh)
    if gap > 1e-10:
        raise NumericalConsistencyError(
            f"ratio paths disagree by {gap:.3g} (coherence form {ratio_coh!r}, "
            f"direct {report.ratio!r})"
        )
    data = {
        "n_atoms": params.n_atoms,
        "gamma0": params.gamma0,
        "omega": params.omega,
        "alpha": params.alpha,
        "t_delay": params.t_delay,
        "tau": inputs.tau,
        "p0": p0,
        "p_tau": p_tau,
        "coherence_0": c0,
        "coherence_tau": c_tau,
        "sign": sign,
        **report.as_dict(),
        "ratio_from_coherence": ratio_coh,
        "ratio_discrepancy": gap,
    }
    return data


# --------------------------------------------------------------------- verify


def _peak(times: np.ndarray, values: np.ndarray):
    """Sample maximum refined by a parabola through its neighbours."""
    i = int(np.argmax(values))
    if 0 < i < len(values) - 1:
        y0, y1, y2 = values[i - 1], values[i], values[i + 1]
        h_left, h_right = times[i] - times[i - 1], times[i + 1] - times[i]
        curv = y0 - 2 * y1 + y2
        if curv < 0 and abs(h_left - h_right) < 1e-9 * h_left:
            shift = 0.5 * (y0 - y2) / curv
            return times[i] + shift * h_left, y1 - 0.125 * (y0 - y2) ** 2 / curv
    return times[i], values[i]


def verify_one(config: oracle.OracleConfig) -> dict:
    """Run the oracle for one N and grade it against the mean field."""
    params = config.params
    records = oracle.evolve(config, gate=True)
    t = np.array([r.time for r in records])
    jpjm = np.array([r.jpjm_mean for r in records])
    entry = {
        "n_atoms": params.n_atoms,
        "gamma0": params.gamma0,
        "omega": params.omega,
        "step": config.step,
        "t_end": float(t[-1]),
        "local_decay": config.local_decay_rate,
        "local_dephasing": config.local_dephasing_rate,
        "records": len(records),
    }
    if params.n_atoms == 1:
        expected = config.p0 * np.exp(-params.gamma0 * t)
        err = float(np.max(np.abs(jpjm - expected)))
        entry["single_qubit_max_error"] = err
        entry["checks"] = {"single_qubit_decay": err <= SINGLE_QUBIT_TOL}
        return entry

    exact = params.omega * params.gamma0 * jpjm
    mean_field = intensity(t, params)
    i_max = params.i_max
    t_peak, i_peak = _peak(t, exact)
    proxy = np.array([r.dipole_coherence(params.n_atoms) for r in records])
    proxy_td = float(np.interp(params.t_delay, t, proxy))
    entry.update(
        {
            "t_delay": params.t_delay,
            "epsilon": float(np.max(np.abs(exact - mean_field)) / i_max),
            "peak_intensity_over_max": float(i_peak / i_max),
            "peak_time_offset": float((t_peak - params.t_delay) * params.collective_rate),
            "coherence_proxy_at_tD": proxy_td,
            "coherence_proxy_deviation": abs(proxy_td - 1.0),
        }
    )
    entry["checks"] = {
        "peak_intensity_within_10pct": abs(entry["peak_intensity_over_max"] - 1.0)
        <= PEAK_INTENSITY_RTOL,
        "peak_time_within_half_width": abs(entry["peak_time_offset"]) <= PEAK_TIME_TOL,
    }
    return entry


def default_t_end(params: ModelParams) -> float:
    return params.t_delay + 10.0 / params.collective_rate


def cmd_verify(configs) -> dict:
    """Oracle-versus-mean-field report for one or more oracle configurations.

    With several ``N > 1`` runs the report also grades whether the
    intensity error decreases strictly along increasing N.
    """
    runs = [verify_one(c) for c in configs]
    ladder = sorted((r for r in runs if r["n_atoms"] > 1), key=lambda r: r["n_atoms"])
    summary = {}
    if len(ladder) >= 2:
        eps = [r["epsilon"] for r in ladder]
        summary["epsilon_strictly_decreasing"] = all(b < a for a, b in zip(eps, eps[1:]))
    all_checks = [v for r in runs for v in r["checks"].values()] + list(summary.values())
    return {
        "thresholds": {
            "single_qubit_tol": SINGLE_QUBIT_TOL,
            "peak_intensity_rtol": PEAK_INTENSITY_RTOL,
            "peak_time_tol_collective_units": PEAK_TIME_TOL,
            "convergence_gate_rtol": oracle.GATE_RTOL,
        },
        "runs": runs,
        "summary": summary,
        "all_passed": all(all_checks),
    }


# --------------------------------------------------------------------- plumbing


def _params(ns, n_default):
    n = _given(_first(ns.get("n_atoms")), n_default)
    omega = ns.get("omega", 1.0)
    gamma0 = ns.get("gamma0")
    if gamma0 is None:
        # validate the atom count before deriving a rate from it
        probe = ModelParams(n, 1.0, omega)
        gamma0 = _default_gamma0(probe.n_atoms, probe.omega)
    return ModelParams(n, gamma0, omega)


def execute(command: str, parameters: dict) -> tuple[str, object]:
    """Run ``command`` with resolved ``parameters``; return ``(kind, payload)``.

    ``kind`` is ``"table"`` (payload a TimeSeries) or ``"report"`` (a dict).
    """
    ns = parameters
    if command == "timeseries":
        params = _params(ns, DEFAULT_SWEEP_ATOMS)
        t_start = ns.get("t_start")
        t_end = ns.get("t_end")
        if t_start is None:
            t_start = max(0.0, params.t_delay - 5.0 / params.omega)
        if t_end is None:
            t_end = params.t_delay + 5.0 / params.omega
        return "table", cmd_timeseries(params, t_start, t_end, _given(ns.get("points"), 101))
    if command == "sweep":
        spec = SweepSpec(
            x_start=-5.0 if ns.get("t_start") is None else ns["t_start"],
            x_end=5.0 if ns.get("t_end") is None else ns["t_end"],
            x_count=_given(ns.get("points"), 101),
            alpha_start=_given(ns.get("alpha_min"), 1e-2),
            alpha_end=_given(ns.get("alpha_max"), 1e2),
            alpha_count=_given(ns.get("alpha_points"), 81),
            n_atoms=_given(_first(ns.get("n_atoms")), DEFAULT_SWEEP_ATOMS),
            omega=ns.get("omega", 1.0),
            quantity=ns.get("quantity") or "coherence",
        )
        return "table", cmd_sweep(spec)
    if command == "qsl":
        params = _params(ns, DEFAULT_SWEEP_ATOMS)
        tau = ns.get("tau")
        if tau is None:
            tau = 2.0 * params.t_delay if params.t_delay > 0 else 1.0 / params.collective_rate
        return "report", cmd_qsl(params, tau)
    if command == "verify":
        atoms = _given(ns.get("n_atoms"), list(DEFAULT_VERIFY_ATOMS))
        if not isinstance(atoms, list):
            atoms = [atoms]
        configs = []
        for n in atoms:
            omega = ns.get("omega", 1.0)
            gamma0 = 1.0 if ns.get("gamma0") is None else ns["gamma0"]
            params = ModelParams(n, gamma0, omega)
            configs.append(
                oracle.OracleConfig(
                    params=params,
                    t_end=_given(ns.get("t_end"), default_t_end(params)),
                    step=_given(ns.get("step"), oracle.default_step(params)),
                    local_decay_rate=ns.get("local_decay") or 0.0,
                    local_dephasing_rate=ns.get("local_dephasing") or 0.0,
                )
            )
        return "report", cmd_verify(configs)
    raise ValidationError(f"unknown command {command!r}")


def _given(value, default):
    return default if value is None else value


def _first(value):
    if isinstance(value, list):
        return value[0] if value else None
    return value


def render(kind: str, payload, fmt: str, manifest: RunManifest) -> str:
    if kind == "table":
        if fmt == "csv":
            return payload.to_csv()
        return report_json(manifest, payload.to_data())
    if fmt == "json":
        return report_json(manifest, payload)
    lines = ["key,value"]
    lines.extend(f"{key},{value}" for key, value in _flatten(payload))
    return "\n".join(lines) + "\n"


def _flatten(value, prefix=""):
    """Yield ``(dotted.key, text)`` pairs; list entries are indexed by position."""
    if isinstance(value, dict):
        items = value.items()
    elif isinstance(value, (list, tuple)):
        items = enumerate(value)
    else:
        if isinstance(value, (bool, np.bool_)):
            yield prefix, "true" if value else "false"
        elif value is None:
            yield prefix, ""
        elif isinstance(value, (int, float, np.integer, np.floating)):
            yield prefix, format_number(value)
        else:
            yield prefix, str(value)
        return
    for key, sub in items:
        yield from _flatten(sub, f"{prefix}.{key}" if prefix else str(key))


def run(command: str, parameters: dict, out: str | None, fmt: str) -> None:
    manifest = RunManifest(command=command, parameters={**parameters, "out": out, "format": fmt})
    kind, payload = execute(command, parameters)
    text = render(kind, payload, fmt, manifest)
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    manifest_path(path).write_text(manifest.dumps())


def _atom_list(text: str):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("no atom numbers given")
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srlab", description="Mean-field Dicke superradiance laboratory."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, n_help):
        p.add_argument("--n-atoms", type=_atom_list, default=None, help=n_help)
        p.add_argument(
            "--gamma0",
            type=float,
            default=None,
            help="single-atom decay rate (default: alpha = 1, or 1.0 for verify)",
        )
        p.add_argument("--omega", type=float, default=1.0, help="transition frequency")
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=None)

    p = sub.add_parser("timeseries", help="mean-field quantities on a time grid")
    common(p, "number of atoms (default 1e6)")
    p.add_argument("--t-start", type=float, default=None)
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--points", type=int, default=None)

    p = sub.add_parser("sweep", help="density-plot table over omega(t - t_D) and alpha")
    common(p, "number of atoms (default 1e6)")
    p.add_argument("--t-start", type=float, default=None, help="lowest omega(t - t_D)")
    p.add_argument("--t-end", type=float, default=None, help="highest omega(t - t_D)")
    p.add_argument("--points", type=int, default=None, help="points on the x axis")
    p.add_argument("--alpha-min", type=float, default=None)
    p.add_argument("--alpha-max", type=float, default=None)
    p.add_argument("--alpha-points", type=int, default=None)
    p.add_argument("--quantity", choices=QUANTITIES, default=None)

    p = sub.add_parser("qsl", help="speed-limit report for one duration")
    common(p, "number of atoms (default 1e6)")
    p.add_argument("--tau", type=float, default=None, help="duration (default 2 t_D)")

    p = sub.add_parser("verify", help="exact ladder oracle against the mean field")
    common(p, "comma-separated atom numbers (default 20,50,100)")
    p.add_argument("--t-end", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--local-decay", type=float, default=0.0)
    p.add_argument("--local-dephasing", type=float, default=0.0)

    p = sub.add_parser("rerun", help="replay a run manifest")
    p.add_argument("manifest")
    p.add_argument("--out", default=None, help="override the recorded output path")
    return parser


def _error_record(exc: Exception, status: int) -> str:
    return json.dumps(
        {
            "schema_version": 1,
            "error": {"type": type(exc).__name__, "message": str(exc), "exit_status": status},
        }
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rerun":
            manifest = RunManifest.load(args.manifest)
            params = dict(manifest.parameters)
            out = args.out if args.out is not None else params.pop("out", None)
            params.pop("out", None)
            fmt = params.pop("format", "csv")
            run(manifest.command, params, out, fmt)
            return 0
        parameters = {
            k: v for k, v in vars(args).items() if k not in ("command", "out", "format")
        }
        fmt = args.format or ("csv" if args.command in ("timeseries", "sweep") else "json")
        run(args.command, parameters, args.out, fmt)
    except SrlabError as exc:
        sys.stderr.write(_error_record(exc, exc.exit_status) + "\n")
        return exc.exit_status
    except (OSError, ValueError) as exc:
        sys.stderr.write(_error_record(exc, 2) + "\n")
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
