"""Command-line experiment runner.

Five subcommands produce the standard experiment artifacts:

* ``connection`` — connection probability vs link distance, finite
  domain vs infinite-network benchmark, with Monte Carlo points.
* ``rate`` — mean rate and rate variance vs link distance.
* ``density`` — spatial density of successful receptions vs transmitter
  intensity, including the closed form where it applies.
* ``heatmap`` — outage probability over a grid of receiver positions in
  a rectangle.
* ``validate`` — the full self-validation suite (analytic identities
  plus Monte Carlo cross-checks).

Every figure command writes an atomic CSV (UTF-8, LF line endings, 17
significant digits), a metadata JSON recording every resolved
parameter, and deterministic SVG figures rendered purely from the CSV.
Rerunning a command with the recorded seed reproduces the CSV bytes
exactly, at any worker count.

Exit codes: 0 success, 1 parameter or usage error, 2 numerical
non-convergence, 3 validation failure.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import secrets
import sys
import tempfile
import time
from typing import Dict, List, Optional, Sequence, Tuple

import click
import numpy as np

from . import __version__, analytic
from .analytic import ScenarioConfig
from .channel import PathLossParams, RadioParams
from .errors import ConvergenceError, ParameterError, ValidationFailure
from .geometry import Point2, RectDomain, SectorDomain
from .montecarlo import (
    SimConfig,
    estimate_connection,
    estimate_rate,
    estimate_success_density,
    outage_heatmap,
)
from .validation import run_validation

__all__ = ["cli", "main"]

_THETA_DEFAULT = (math.pi / 2, math.pi, 2 * math.pi)
_EPSILON_DEFAULT = (0.0, 0.01)

_COMMON_KEYS = frozenset({"trials", "seed", "count_mode", "workers", "interferers"})
_RADIO_KEYS = frozenset({"q", "gamma", "power", "noise"})
_CONNECTION_KEYS = _COMMON_KEYS | _RADIO_KEYS | {
    "eta", "epsilon", "rho_t", "radius", "theta", "d_min", "d_max", "points",
}
_RATE_KEYS = _CONNECTION_KEYS
_DENSITY_KEYS = _COMMON_KEYS | _RADIO_KEYS | {
    "eta", "epsilon", "theta", "radius", "rho_min", "rho_max", "points",
}
_HEATMAP_KEYS = _COMMON_KEYS | _RADIO_KEYS | {
    "eta", "epsilon", "rho_t", "width", "height", "nx", "ny", "d",
}

_PLACEMENT_NOTE = (
    "The desired transmitter sits at the link distance from each grid "
    "receiver; its bearing is immaterial because fading and the "
    "interferer field are independent of it, so no bearing is drawn."
)


# ---------------------------------------------------------------------------
# Parameter resolution
# ---------------------------------------------------------------------------


class _Settings:
    """Layered parameter lookup: CLI flag beats config file beats default."""

    def __init__(self, config_path: Optional[str], allowed: frozenset):
        self.values: Dict[str, object] = {}
        if config_path is None:
            return
        with open(config_path, encoding="utf-8") as handle:
            try:
                data = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ParameterError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ParameterError("config file must hold a JSON object")
        unknown = sorted(set(data) - set(allowed))
        if unknown:
            raise ParameterError(f"unknown config keys: {', '.join(unknown)}")
        self.values = data

    def pick(self, key: str, flag, default):
        if flag is not None and flag != ():
            return flag
        if key in self.values:
            return self.values[key]
        return default


def _as_float(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParameterError(f"{name} must be a number, got {value!r}")
    return float(value)


def _as_int(name: str, value) -> int:
    if isinstance(value, bool):
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    raise ParameterError(f"{name} must be an integer, got {value!r}")


def _as_float_tuple(name: str, value) -> Tuple[float, ...]:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (float(value),)
    if isinstance(value, (list, tuple)):
        if not value:
            raise ParameterError(f"{name} must not be empty")
        return tuple(_as_float(name, item) for item in value)
    raise ParameterError(f"{name} must be a number or a list of numbers, got {value!r}")


def _ensure_seed(value: Optional[int]) -> Tuple[int, bool]:
    """Resolve the master seed, generating (and reporting) one if absent."""
    if value is None:
        return secrets.randbits(64), True
    return _as_int("seed", value), False


def _resolve_workers(settings: _Settings, flag: Optional[int]) -> Optional[int]:
    value = settings.pick("workers", flag, None)
    return None if value is None else _as_int("workers", value)


def _prepare_out(out: Optional[str]) -> str:
    directory = out if out is not None else "."
    os.makedirs(directory, exist_ok=True)
    return directory


# ---------------------------------------------------------------------------
# Artifact writing
# ---------------------------------------------------------------------------


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(data)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(value) for value in row])
    _atomic_write(path, buffer.getvalue())


def _write_json(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _metadata(
    command: str,
    *,
    seed: int,
    seed_generated: bool,
    trials: int,
    count_mode: Optional[str],
    workers: Optional[int],
    interferers: Optional[int],
    parameters: dict,
    outputs: List[str],
    started: float,
    note: Optional[str] = None,
) -> dict:
    meta = {
        "command": command,
        "version": __version__,
        "seed": seed,
        "seed_generated": seed_generated,
        "trials": trials,
        "count_mode": count_mode,
        "workers": workers,
        "interferers": interferers,
        "parameters": parameters,
        "outputs": outputs,
        "stream_layout": "one Monte Carlo stream per CSV row, numbered in row order",
        "duration_seconds": round(time.monotonic() - started, 3),
    }
    if note is not None:
        meta["note"] = note
    return meta


def _echo_seed(seed: int, generated: bool) -> None:
    suffix = " (generated)" if generated else ""
    click.echo(f"seed: {seed}{suffix}")


def _echo_written(paths: Sequence[str]) -> None:
    for path in paths:
        click.echo(f"wrote {path}")


# ---------------------------------------------------------------------------
# Shared option groups
# ---------------------------------------------------------------------------


def _common_options(fn):
    fn = click.option(
        "--interferers", type=int, default=None,
        help="Pin the interferer count in fixed mode (overrides floor(rho_t V) - 1).",
    )(fn)
    fn = click.option(
        "--count-mode", type=click.Choice(["fixed", "poisson"]), default=None,
        help="Interferer-count policy: fixed floor(rho_t V) - 1 extras plus the "
        "desired node (default), or Poisson(rho_t V).",
    )(fn)
    fn = click.option(
        "--workers", type=int, default=None,
        help="Thread count for Monte Carlo batches (default: one per CPU). "
        "Results are identical at any worker count.",
    )(fn)
    fn = click.option(
        "--no-plot", is_flag=True, default=False, help="Skip SVG rendering.",
    )(fn)
    fn = click.option(
        "--config", "config_path", type=click.Path(exists=True, dir_okay=False),
        default=None, help="JSON file with parameter overrides (flags win).",
    )(fn)
    fn = click.option(
        "--trials", type=int, default=None, help="Monte Carlo trials per point.",
    )(fn)
    fn = click.option(
        "--seed", type=int, default=None,
        help="Master seed (unsigned 64-bit). Generated and reported if omitted.",
    )(fn)
    fn = click.option(
        "--out", type=click.Path(file_okay=False), default=None,
        help="Output directory (default: current directory).",
    )(fn)
    return fn


def _radio_options(fn):
    fn = click.option(
        "--noise", type=float, default=None, help="Receiver noise power N (default 1).",
    )(fn)
    fn = click.option(
        "--power", type=float, default=None, help="Transmit power P (default 1).",
    )(fn)
    fn = click.option(
        "--gamma", type=float, default=None,
        help="Interference weight in [0, 1] (default 1).",
    )(fn)
    fn = click.option(
        "--q", type=float, default=None, help="SINR threshold q (default 1).",
    )(fn)
    return fn


def _resolve_radio(settings: _Settings, q, gamma, power, noise) -> RadioParams:
    return RadioParams(
        power=_as_float("power", settings.pick("power", power, 1.0)),
        noise=_as_float("noise", settings.pick("noise", noise, 1.0)),
        gamma=_as_float("gamma", settings.pick("gamma", gamma, 1.0)),
        threshold=_as_float("q", settings.pick("q", q, 1.0)),
    )


def _benchmark_connection(cfg: ScenarioConfig) -> float:
    """Infinite-network reference curve: same noise factor, R -> inf Laplace.

    Below eta = 2 the infinite network has divergent interference
    (connection probability zero), so the benchmark column is 0 there.
    """
    if cfg.radio.threshold == 0.0:
        return 1.0
    if cfg.pathloss.eta <= 2.0:
        return 0.0
    arg = analytic.laplace_argument(cfg)
    attenuation = cfg.pathloss.epsilon + cfg.link_distance**cfg.pathloss.eta
    noise_exponent = (
        cfg.radio.threshold * cfg.radio.noise * attenuation / cfg.radio.power
    )
    infinite = analytic.interference_integral_infinite(
        cfg.domain.angle, arg, cfg.pathloss
    )
    return math.exp(-noise_exponent) * math.exp(-cfg.rho_t * infinite)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="bordernet")
def cli() -> None:
    """Border effects in interference-limited wireless networks.

    Analytic curves and Monte Carlo cross-checks for connection
    probability, rate statistics, and success density in finite
    deployment regions.
    """


@cli.command()
@click.option("--eta", type=float, default=None, help="Path-loss exponent >= 2 (default 2.5).")
@click.option("--epsilon", type=float, default=None, help="Path-loss regularizer >= 0 (default 0).")
@click.option("--rho-t", "rho_t", type=float, default=None, help="Transmitter intensity (default 12).")
@click.option("--radius", type=float, default=None, help="Sector radius R (default 3).")
@click.option("--theta", type=float, multiple=True,
              help="Sector angle; repeat for several curves (default pi/2, pi, 2pi).")
@click.option("--d-min", type=float, default=None, help="Smallest link distance (default 0.05).")
@click.option("--d-max", type=float, default=None, help="Largest link distance (default 3).")
@click.option("--points", type=int, default=None, help="Link-distance grid size (default 25).")
@_radio_options
@_common_options
def connection(eta, epsilon, rho_t, radius, theta, d_min, d_max, points,
               q, gamma, power, noise,
               out, seed, trials, config_path, no_plot, workers, count_mode, interferers):
    """Connection probability vs link distance, with the R -> inf benchmark."""
    started = time.monotonic()
    st = _Settings(config_path, _CONNECTION_KEYS)
    eta = _as_float("eta", st.pick("eta", eta, 2.5))
    epsilon = _as_float("epsilon", st.pick("epsilon", epsilon, 0.0))
    rho_t = _as_float("rho_t", st.pick("rho_t", rho_t, 12.0))
    radius = _as_float("radius", st.pick("radius", radius, 3.0))
    thetas = _as_float_tuple("theta", st.pick("theta", theta, _THETA_DEFAULT))
    d_min = _as_float("d_min", st.pick("d_min", d_min, 0.05))
    d_max = _as_float("d_max", st.pick("d_max", d_max, 3.0))
    points = _as_int("points", st.pick("points", points, 25))
    radio = _resolve_radio(st, q, gamma, power, noise)
    trials = _as_int("trials", st.pick("trials", trials, 100_000))
    count_mode = str(st.pick("count_mode", count_mode, "fixed"))
    interferers = st.pick("interferers", interferers, None)
    if interferers is not None:
        interferers = _as_int("interferers", interferers)
    workers = _resolve_workers(st, workers)
    seed, generated = _ensure_seed(st.pick("seed", seed, None))

    if points < 2:
        raise ParameterError(f"points must be >= 2, got {points}")
    if not (0.0 <= d_min < d_max):
        raise ParameterError(f"need 0 <= d_min < d_max, got [{d_min}, {d_max}]")

    pathloss = PathLossParams(eta, epsilon)
    sim = SimConfig(trials=trials, seed=seed, count_mode=count_mode, workers=workers,
                    fixed_count_override=interferers)
    _echo_seed(seed, generated)

    distances = np.linspace(d_min, d_max, points)
    rows: List[list] = []
    stream = 0
    for angle in thetas:
        domain = SectorDomain(radius, angle)
        for d in distances:
            cfg = ScenarioConfig(
                domain=domain, receiver=Point2(0.0, 0.0), pathloss=pathloss,
                radio=radio, rho_t=rho_t, link_distance=float(d),
            )
            est = estimate_connection(cfg, sim, stream=stream)
            rows.append([
                angle, float(d), analytic.connection_probability(cfg),
                est.mean, est.std_error, _benchmark_connection(cfg), trials, stream,
            ])
            stream += 1

    out_dir = _prepare_out(out)
    csv_path = os.path.join(out_dir, "connection.csv")
    _write_csv(
        csv_path,
        ["theta", "d_ij", "analytic_H", "mc_mean", "mc_stderr",
         "benchmark_H_infinite", "trials", "stream"],
        rows,
    )
    outputs = [csv_path]
    if not no_plot:
        from . import _plots

        svg_path = os.path.join(out_dir, "connection.svg")
        _plots.render_connection(csv_path, svg_path)
        outputs.append(svg_path)
    meta_path = os.path.join(out_dir, "connection_meta.json")
    _write_json(meta_path, _metadata(
        "connection", seed=seed, seed_generated=generated, trials=trials,
        count_mode=count_mode, workers=workers, interferers=interferers,
        parameters={
            "eta": eta, "epsilon": epsilon, "rho_t": rho_t, "radius": radius,
            "theta": list(thetas), "d_min": d_min, "d_max": d_max,
            "points": points, "q": radio.threshold, "gamma": radio.gamma,
            "power": radio.power, "noise": radio.noise,
        },
        outputs=[os.path.basename(p) for p in outputs], started=started,
    ))
    _echo_written(outputs + [meta_path])
    return 0


@cli.command()
@click.option("--eta", type=float, default=None, help="Path-loss exponent >= 2 (default 3).")
@click.option("--epsilon", type=float, default=None, help="Path-loss regularizer >= 0 (default 0.01).")
@click.option("--rho-t", "rho_t", type=float, default=None, help="Transmitter intensity (default 12).")
@click.option("--radius", type=float, default=None, help="Sector radius R (default 3).")
@click.option("--theta", type=float, multiple=True,
              help="Sector angle; repeat for several curves (default pi/2, pi, 2pi).")
@click.option("--d-min", type=float, default=None, help="Smallest link distance (default 0.05).")
@click.option("--d-max", type=float, default=None, help="Largest link distance (default 3).")
@click.option("--points", type=int, default=None, help="Link-distance grid size (default 15).")
@_radio_options
@_common_options
def rate(eta, epsilon, rho_t, radius, theta, d_min, d_max, points,
         q, gamma, power, noise,
         out, seed, trials, config_path, no_plot, workers, count_mode, interferers):
    """Mean rate and rate variance vs link distance.

    Rate statistics integrate over all SINR thresholds, so the --q flag
    does not influence this figure's curves.
    """
    started = time.monotonic()
    st = _Settings(config_path, _RATE_KEYS)
    eta = _as_float("eta", st.pick("eta", eta, 3.0))
    epsilon = _as_float("epsilon", st.pick("epsilon", epsilon, 0.01))
    rho_t = _as_float("rho_t", st.pick("rho_t", rho_t, 12.0))
    radius = _as_float("radius", st.pick("radius", radius, 3.0))
    thetas = _as_float_tuple("theta", st.pick("theta", theta, _THETA_DEFAULT))
    d_min = _as_float("d_min", st.pick("d_min", d_min, 0.05))
    d_max = _as_float("d_max", st.pick("d_max", d_max, 3.0))
    points = _as_int("points", st.pick("points", points, 15))
    radio = _resolve_radio(st, q, gamma, power, noise)
    trials = _as_int("trials", st.pick("trials", trials, 20_000))
    count_mode = str(st.pick("count_mode", count_mode, "fixed"))
    interferers = st.pick("interferers", interferers, None)
    if interferers is not None:
        interferers = _as_int("interferers", interferers)
    workers = _resolve_workers(st, workers)
    seed, generated = _ensure_seed(st.pick("seed", seed, None))

    if points < 2:
        raise ParameterError(f"points must be >= 2, got {points}")
    if not (0.0 <= d_min < d_max):
        raise ParameterError(f"need 0 <= d_min < d_max, got [{d_min}, {d_max}]")

    pathloss = PathLossParams(eta, epsilon)
    sim = SimConfig(trials=trials, seed=seed, count_mode=count_mode, workers=workers,
                    fixed_count_override=interferers)
    _echo_seed(seed, generated)

    distances = np.linspace(d_min, d_max, points)
    rows: List[list] = []
    stream = 0
    for angle in thetas:
        domain = SectorDomain(radius, angle)
        for d in distances:
            cfg = ScenarioConfig(
                domain=domain, receiver=Point2(0.0, 0.0), pathloss=pathloss,
                radio=radio, rho_t=rho_t, link_distance=float(d),
            )
            mean_ref = analytic.ergodic_rate(cfg)
            var_ref = analytic.rate_moment(2.0, cfg) - mean_ref * mean_ref
            mean_est, var_est = estimate_rate(cfg, sim, stream=stream)
            rows.append([
                angle, float(d), mean_ref, var_ref,
                mean_est.mean, mean_est.std_error,
                var_est.mean, var_est.std_error, trials, stream,
            ])
            stream += 1

    out_dir = _prepare_out(out)
    csv_path = os.path.join(out_dir, "rate.csv")
    _write_csv(
        csv_path,
        ["theta", "d_ij", "analytic_rate", "analytic_variance",
         "mc_rate", "mc_rate_stderr", "mc_variance", "mc_variance_stderr",
         "trials", "stream"],
        rows,
    )
    outputs = [csv_path]
    if not no_plot:
        from . import _plots

        mean_svg = os.path.join(out_dir, "rate_mean.svg")
        var_svg = os.path.join(out_dir, "rate_variance.svg")
        _plots.render_rate(csv_path, mean_svg, var_svg)
        outputs.extend([mean_svg, var_svg])
    meta_path = os.path.join(out_dir, "rate_meta.json")
    _write_json(meta_path, _metadata(
        "rate", seed=seed, seed_generated=generated, trials=trials,
        count_mode=count_mode, workers=workers, interferers=interferers,
        parameters={
            "eta": eta, "epsilon": epsilon, "rho_t": rho_t, "radius": radius,
            "theta": list(thetas), "d_min": d_min, "d_max": d_max,
            "points": points, "q": radio.threshold, "gamma": radio.gamma,
            "power": radio.power, "noise": radio.noise,
        },
        outputs=[os.path.basename(p) for p in outputs], started=started,
    ))
    _echo_written(outputs + [meta_path])
    return 0


@cli.command()
@click.option("--eta", type=float, default=None, help="Path-loss exponent >= 2 (default 4).")
@click.option("--epsilon", type=float, multiple=True,
              help="Path-loss regularizer; repeat for several panels (default 0 and 0.01).")
@click.option("--theta", type=float, multiple=True,
              help="Sector angle; repeat for several curves (default pi/2, pi, 2pi).")
@click.option("--radius", type=float, default=None, help="Sector radius R (default 3).")
@click.option("--rho-min", type=float, default=None, help="Smallest intensity (default 0.5).")
@click.option("--rho-max", type=float, default=None, help="Largest intensity (default 30).")
@click.option("--points", type=int, default=None, help="Intensity grid size (default 15).")
@_radio_options
@_common_options
def density(eta, epsilon, theta, radius, rho_min, rho_max, points,
            q, gamma, power, noise,
            out, seed, trials, config_path, no_plot, workers, count_mode, interferers):
    """Success density vs transmitter intensity, one figure per epsilon.

    The closed-form column is filled only where it is exact: eta = 4,
    epsilon = 0, positive noise and threshold, and gamma > 0.
    """
    started = time.monotonic()
    st = _Settings(config_path, _DENSITY_KEYS)
    eta = _as_float("eta", st.pick("eta", eta, 4.0))
    epsilons = _as_float_tuple("epsilon", st.pick("epsilon", epsilon, _EPSILON_DEFAULT))
    thetas = _as_float_tuple("theta", st.pick("theta", theta, _THETA_DEFAULT))
    radius = _as_float("radius", st.pick("radius", radius, 3.0))
    rho_min = _as_float("rho_min", st.pick("rho_min", rho_min, 0.5))
    rho_max = _as_float("rho_max", st.pick("rho_max", rho_max, 30.0))
    points = _as_int("points", st.pick("points", points, 15))
    radio = _resolve_radio(st, q, gamma, power, noise)
    trials = _as_int("trials", st.pick("trials", trials, 10_000))
    count_mode = str(st.pick("count_mode", count_mode, "fixed"))
    interferers = st.pick("interferers", interferers, None)
    if interferers is not None:
        interferers = _as_int("interferers", interferers)
    workers = _resolve_workers(st, workers)
    seed, generated = _ensure_seed(st.pick("seed", seed, None))

    if points < 2:
        raise ParameterError(f"points must be >= 2, got {points}")
    if not (0.0 < rho_min < rho_max):
        raise ParameterError(f"need 0 < rho_min < rho_max, got [{rho_min}, {rho_max}]")

    sim = SimConfig(trials=trials, seed=seed, count_mode=count_mode, workers=workers,
                    fixed_count_override=interferers)
    _echo_seed(seed, generated)

    intensities = np.linspace(rho_min, rho_max, points)
    rows: List[list] = []
    stream = 0
    for eps in epsilons:
        pathloss = PathLossParams(eta, eps)
        closed_applies = (
            eta == 4.0 and eps == 0.0 and radio.noise > 0.0
            and radio.threshold > 0.0 and radio.gamma > 0.0
        )
        for angle in thetas:
            domain = SectorDomain(radius, angle)
            for rho in intensities:
                cfg = ScenarioConfig(
                    domain=domain, receiver=Point2(0.0, 0.0), pathloss=pathloss,
                    radio=radio, rho_t=float(rho), link_distance=0.0,
                )
                closed = (
                    analytic.success_density_closed(angle, float(rho), radio)
                    if closed_applies else None
                )
                est = estimate_success_density(cfg, sim, stream=stream)
                rows.append([
                    eps, angle, float(rho), analytic.success_density(cfg),
                    closed, est.mean, est.std_error, trials, stream,
                ])
                stream += 1

    out_dir = _prepare_out(out)
    csv_path = os.path.join(out_dir, "density.csv")
    _write_csv(
        csv_path,
        ["epsilon", "theta", "rho_t", "analytic_mu", "closed_form_mu",
         "mc_mean", "mc_stderr", "trials", "stream"],
        rows,
    )
    outputs = [csv_path]
    if not no_plot:
        from . import _plots

        written = _plots.render_density(
            csv_path, lambda eps: os.path.join(out_dir, f"density_eps{eps:g}.svg")
        )
        outputs.extend(written)
    meta_path = os.path.join(out_dir, "density_meta.json")
    _write_json(meta_path, _metadata(
        "density", seed=seed, seed_generated=generated, trials=trials,
        count_mode=count_mode, workers=workers, interferers=interferers,
        parameters={
            "eta": eta, "epsilon": list(epsilons), "theta": list(thetas),
            "radius": radius, "rho_min": rho_min, "rho_max": rho_max,
            "points": points, "q": radio.threshold, "gamma": radio.gamma,
            "power": radio.power, "noise": radio.noise,
        },
        outputs=[os.path.basename(p) for p in outputs], started=started,
    ))
    _echo_written(outputs + [meta_path])
    return 0


@cli.command()
@click.option("--width", type=float, default=None, help="Rectangle width (default 10).")
@click.option("--height", type=float, default=None, help="Rectangle height (default 10).")
@click.option("--nx", type=int, default=None, help="Grid columns (default 8).")
@click.option("--ny", type=int, default=None, help="Grid rows (default 8).")
@click.option("--eta", type=float, default=None, help="Path-loss exponent >= 2 (required).")
@click.option("--epsilon", type=float, default=None, help="Path-loss regularizer >= 0 (required).")
@click.option("--rho-t", "rho_t", type=float, default=None, help="Transmitter intensity (required).")
@click.option("--d", type=float, default=None, help="Desired-link distance (required).")
@_radio_options
@_common_options
def heatmap(width, height, nx, ny, eta, epsilon, rho_t, d,
            q, gamma, power, noise,
            out, seed, trials, config_path, no_plot, workers, count_mode, interferers):
    """Outage probability over a grid of receiver positions in a rectangle.

    There is no canonical parameter set for this figure, so --eta,
    --epsilon, --rho-t, and --d must be given explicitly (flag or config
    file); they are recorded in the output metadata. A documented
    default set that shows the border effect clearly is --eta 4
    --epsilon 0.01 --rho-t 0.2 --d 1.5 --noise 0.03.
    """
    started = time.monotonic()
    st = _Settings(config_path, _HEATMAP_KEYS)
    width = _as_float("width", st.pick("width", width, 10.0))
    height = _as_float("height", st.pick("height", height, 10.0))
    nx = _as_int("nx", st.pick("nx", nx, 8))
    ny = _as_int("ny", st.pick("ny", ny, 8))
    missing = [
        flag for flag, value in (
            ("--eta", st.pick("eta", eta, None)),
            ("--epsilon", st.pick("epsilon", epsilon, None)),
            ("--rho-t", st.pick("rho_t", rho_t, None)),
            ("--d", st.pick("d", d, None)),
        ) if value is None
    ]
    if missing:
        raise ParameterError(
            f"heatmap has no default physics parameters; missing {', '.join(missing)}"
        )
    eta = _as_float("eta", st.pick("eta", eta, None))
    epsilon = _as_float("epsilon", st.pick("epsilon", epsilon, None))
    rho_t = _as_float("rho_t", st.pick("rho_t", rho_t, None))
    d = _as_float("d", st.pick("d", d, None))
    radio = _resolve_radio(st, q, gamma, power, noise)
    trials = _as_int("trials", st.pick("trials", trials, 10_000))
    count_mode = str(st.pick("count_mode", count_mode, "fixed"))
    interferers = st.pick("interferers", interferers, None)
    if interferers is not None:
        interferers = _as_int("interferers", interferers)
    workers = _resolve_workers(st, workers)
    seed, generated = _ensure_seed(st.pick("seed", seed, None))

    pathloss = PathLossParams(eta, epsilon)
    domain = RectDomain(width, height)
    sim = SimConfig(trials=trials, seed=seed, count_mode=count_mode, workers=workers,
                    fixed_count_override=interferers)
    _echo_seed(seed, generated)

    result = outage_heatmap(domain, d, radio, pathloss, rho_t, (nx, ny), sim)
    rows: List[list] = []
    for iy in range(ny):
        for ix in range(nx):
            est = result.estimates[iy][ix]
            receiver = result.receivers[iy][ix]
            rows.append([
                receiver.x, receiver.y, est.mean, est.std_error,
                trials, iy * nx + ix,
            ])

    out_dir = _prepare_out(out)
    csv_path = os.path.join(out_dir, "heatmap.csv")
    _write_csv(
        csv_path,
        ["x", "y", "outage_mean", "outage_stderr", "trials", "stream"],
        rows,
    )
    outputs = [csv_path]
    if not no_plot:
        from . import _plots

        svg_path = os.path.join(out_dir, "heatmap.svg")
        _plots.render_heatmap(csv_path, svg_path)
        outputs.append(svg_path)
    meta_path = os.path.join(out_dir, "heatmap_meta.json")
    _write_json(meta_path, _metadata(
        "heatmap", seed=seed, seed_generated=generated, trials=trials,
        count_mode=count_mode, workers=workers, interferers=interferers,
        parameters={
            "width": width, "height": height, "nx": nx, "ny": ny,
            "eta": eta, "epsilon": epsilon, "rho_t": rho_t, "d": d,
            "q": radio.threshold, "gamma": radio.gamma,
            "power": radio.power, "noise": radio.noise,
        },
        outputs=[os.path.basename(p) for p in outputs], started=started,
        note=_PLACEMENT_NOTE,
    ))
    _echo_written(outputs + [meta_path])
    return 0


@cli.command()
@click.option("--out", type=click.Path(file_okay=False), default=None,
              help="Directory for the written report (default: print only).")
@click.option("--seed", type=int, default=None,
              help="Master seed (unsigned 64-bit). Generated and reported if omitted.")
@click.option("--trials", type=int, default=None,
              help="Monte Carlo trials per statistical check (default 20000).")
@click.option("--workers", type=int, default=None,
              help="Thread count for Monte Carlo batches (default: one per CPU).")
def validate(out, seed, trials, workers):
    """Run the self-validation suite and report pass/fail per check.

    Exits 0 only if every deterministic identity holds and at least 99%
    of the Monte Carlo cross-checks fall within 3 standard errors.
    """
    seed, generated = _ensure_seed(seed)
    trials = _as_int("trials", trials) if trials is not None else 20_000
    _echo_seed(seed, generated)
    report = run_validation(seed, trials, workers=workers)
    for line in report.lines():
        click.echo(line)
    if out is not None:
        out_dir = _prepare_out(out)
        path = os.path.join(out_dir, "validation.txt")
        _atomic_write(path, "\n".join(report.lines()) + "\n")
        _echo_written([path])
    if not report.passed:
        raise ValidationFailure(report.summary())
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI; returns the process exit code instead of raising.

    0 on success, 1 on parameter or usage errors, 2 on numerical
    non-convergence, 3 on validation failure.
    """
    try:
        result = cli.main(args=list(argv) if argv is not None else None,
                          standalone_mode=False)
    except click.exceptions.Exit as exc:
        return int(exc.exit_code)
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except ValidationFailure as exc:
        click.echo(f"validation failed: {exc}", err=True)
        return 3
    except ConvergenceError as exc:
        click.echo(f"numerical integration failed to converge: {exc}", err=True)
        return 2
    except ParameterError as exc:
        click.echo(f"parameter error: {exc}", err=True)
        return 1
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
