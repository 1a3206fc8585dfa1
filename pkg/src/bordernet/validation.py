"""End-to-end self-validation: analytic formulas vs independent routes.

Two families of checks:

* **required** — deterministic numerical identities (closed form vs
  generic hypergeometric, closed form vs direct quadrature, the Poisson
  mixture identity, monotonicity and limit properties). Every one must
  pass.
* **statistical** — Monte Carlo estimates vs analytic values at the 3
  standard-error level across the full figure grids. Individual checks
  fail with probability ~0.27% by design, so the gate is a pooled pass
  rate of at least 99% rather than perfection. The master seed fixes
  every draw; rerunning with the same seed reproduces the report
  verbatim, and the intrinsic false-alarm rate of the pooled gate is
  well under 1%.

Statistical checks run the ``poisson`` count mode, which matches the
Poisson-process analytics exactly; the ``fixed`` mode (the classic
simulation protocol) carries a small finite-count bias and is validated
separately through the binomial-field checks, where the fixed count is
the exact model.

The negative control for this machinery is the ``BORDERNET_FAULT``
environment hook (see the analytic module): corrupting the eta = 4
closed-form routing must flip the dispatch-consistency checks to FAIL
and drive the exit status nonzero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from . import analytic
from .analytic import InterferenceArg, ScenarioConfig
from .channel import PathLossParams, RadioParams
from .errors import ParameterError
from .geometry import Point2, RectDomain, SectorDomain, domain_area
from .montecarlo import (
    SimConfig,
    estimate_connection,
    estimate_rate,
    estimate_success_density,
    outage_heatmap,
)

__all__ = ["CheckResult", "ValidationReport", "run_validation"]

_U64 = 2**64
_GOLDEN = 0x9E3779B97F4A7C15
_THETAS = (math.pi / 2, math.pi, 2 * math.pi)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one validation check."""

    name: str
    kind: str  # "required" | "statistical"
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    """All check outcomes plus the pooled verdict."""

    checks: tuple
    seed: int
    trials: int

    @property
    def required_failures(self) -> int:
        return sum(1 for c in self.checks if c.kind == "required" and not c.passed)

    @property
    def statistical_total(self) -> int:
        return sum(1 for c in self.checks if c.kind == "statistical")

    @property
    def statistical_passed(self) -> int:
        return sum(1 for c in self.checks if c.kind == "statistical" and c.passed)

    @property
    def passed(self) -> bool:
        total = self.statistical_total
        rate_ok = total == 0 or self.statistical_passed / total >= 0.99
        return self.required_failures == 0 and rate_ok

    def summary(self) -> str:
        total = self.statistical_total
        rate = 100.0 * self.statistical_passed / total if total else 100.0
        required_total = len(self.checks) - total
        return (
            f"required: {required_total - self.required_failures}/{required_total} passed; "
            f"statistical: {self.statistical_passed}/{total} within 3 sigma "
            f"({rate:.2f}%, gate 99%); verdict: "
            f"{'PASS' if self.passed else 'FAIL'}"
        )

    def lines(self) -> List[str]:
        out = [
            f"{'PASS' if c.passed else 'FAIL'} [{c.kind}] {c.name}: {c.detail}"
            for c in self.checks
        ]
        out.append(self.summary())
        return out


def _derive_seed(master: int, k: int) -> int:
    return (master + (k + 1) * _GOLDEN) % _U64


class _Runner:
    """Accumulates checks and hands out one fresh sub-seed per MC run."""

    def __init__(self, seed: int, trials: int, parallel: bool, workers: Optional[int]):
        self.seed = seed
        self.trials = trials
        self.parallel = parallel
        self.workers = workers
        self.checks: List[CheckResult] = []
        self._next_sub = 0

    def sim(self, count_mode: str, trials: Optional[int] = None, **kw) -> SimConfig:
        self._next_sub += 1
        return SimConfig(
            trials=trials if trials is not None else self.trials,
            seed=_derive_seed(self.seed, self._next_sub),
            count_mode=count_mode,
            parallel=self.parallel,
            workers=self.workers,
            **kw,
        )

    def required(self, name: str, passed: bool, detail: str) -> None:
        self.checks.append(CheckResult(name, "required", bool(passed), detail))

    def statistical(self, name: str, mc_mean: float, mc_sigma: float, ref: float) -> None:
        sigma = mc_sigma if mc_sigma > 0.0 else 1e-300
        z = abs(mc_mean - ref) / sigma
        self.checks.append(
            CheckResult(
                name,
                "statistical",
                z <= 3.0,
                f"mc={mc_mean:.6g} ref={ref:.6g} z={z:.2f}",
            )
        )


def _binomial_sigma(estimate, p_ref: float) -> float:
    """3-sigma scale for a probability estimate.

    The sample standard error collapses to zero in deep outage (no
    successes observed), so it is floored by the exact null binomial
    deviation sqrt(p (1-p) / n) under the analytic reference.
    """
    p = min(max(p_ref, 0.0), 1.0)
    return max(estimate.std_error, math.sqrt(p * (1.0 - p) / estimate.trials))


def _count_sigma(estimate, mu_ref: float) -> float:
    """Sigma floor for per-trial success counts: Poisson-scale null spread."""
    return max(estimate.std_error, math.sqrt(max(mu_ref, 1e-12) / estimate.trials))


def _sector_cfg(theta, radius, eta, eps, rho_t, d, radio=None) -> ScenarioConfig:
    return ScenarioConfig(
        domain=SectorDomain(radius, theta),
        receiver=Point2(0.0, 0.0),
        pathloss=PathLossParams(eta, eps),
        radio=radio if radio is not None else RadioParams(),
        rho_t=rho_t,
        link_distance=d,
    )


# ---------------------------------------------------------------------------
# Required checks
# ---------------------------------------------------------------------------


def _check_dispatch(run: _Runner) -> None:
    radii = np.geomspace(0.5, 10.0, 10)
    svals = np.geomspace(1e-3, 1e3, 10)
    epsilons = (0.0, 0.01, 1.0)
    for eta, closed_name in ((2.0, "eta2"), (4.0, "eta4")):
        worst = 0.0
        for radius in radii:
            for sv in svals:
                for eps in epsilons:
                    for theta in _THETAS:
                        sector = SectorDomain(float(radius), theta)
                        pl = PathLossParams(eta, eps)
                        arg = InterferenceArg(float(sv))
                        closed = analytic.interference_integral_sector(sector, arg, pl)
                        generic = analytic._sector_generic(sector, float(sv), pl)
                        worst = max(worst, abs(closed - generic) / abs(generic))
        run.required(
            f"dispatch-consistency-{closed_name}",
            worst <= 1e-10,
            f"worst relative gap {worst:.3e} over 900 parameter points (tol 1e-10)",
        )


def _check_numeric_oracle(run: _Runner, rng: np.random.Generator) -> None:
    worst = 0.0
    for _ in range(8):
        sector = SectorDomain(
            float(rng.uniform(0.5, 5.0)), float(rng.uniform(0.3, 2 * math.pi))
        )
        pl = PathLossParams(
            float(rng.uniform(2.0, 6.0)), float(rng.choice([0.0, 0.01, 0.5]))
        )
        arg = InterferenceArg(float(10.0 ** rng.uniform(-2, 2)))
        closed = analytic.interference_integral_sector(sector, arg, pl)
        numeric = analytic.interference_integral_numeric(
            sector, Point2(0.0, 0.0), arg, pl
        )
        worst = max(worst, abs(closed - numeric))
    run.required(
        "sector-quadrature-oracle",
        worst <= 1e-8,
        f"worst |closed - quadrature| = {worst:.3e} over 8 random sectors (tol 1e-8)",
    )


def _check_mixture(run: _Runner, rng: np.random.Generator) -> None:
    worst = 0.0
    for _ in range(6):
        cfg = _sector_cfg(
            theta=float(rng.uniform(0.5, 2 * math.pi)),
            radius=float(rng.uniform(0.8, 3.0)),
            eta=float(rng.uniform(2.0, 5.0)),
            eps=float(rng.choice([0.0, 0.01])),
            rho_t=float(rng.uniform(0.5, 4.0)),
            d=float(rng.uniform(0.1, 1.0)),
        )
        factor = analytic.bpp_interference_factor(cfg)
        lam = cfg.rho_t * domain_area(cfg.domain)
        terms = max(int(10 * lam), 50)
        pmf = math.exp(-lam)
        mixture = pmf  # N = 0 term (A^0 = 1)
        for count in range(1, terms + 1):
            pmf *= lam / count
            mixture += pmf * factor**count
        target = math.exp(-lam * (1.0 - factor))
        worst = max(worst, abs(mixture - target))
    run.required(
        "poisson-mixture-identity",
        worst <= 1e-8,
        f"worst |series - exp form| = {worst:.3e} over 6 scenarios (tol 1e-8)",
    )


def _check_rho_max(run: _Runner, rng: np.random.Generator) -> None:
    worst_offset = 0.0
    for _ in range(6):
        sector = SectorDomain(
            float(rng.uniform(0.8, 4.0)), float(rng.uniform(0.5, 2 * math.pi))
        )
        pl = PathLossParams(float(rng.uniform(2.0, 5.0)), float(rng.choice([0.0, 0.01])))
        arg = InterferenceArg(float(10.0 ** rng.uniform(-1.5, 1.5)))
        rho_star = analytic.optimal_density(sector, arg, pl)
        integral = 1.0 / rho_star
        grid = np.linspace(0.5 * rho_star, 2.0 * rho_star, 1000)
        values = grid * np.exp(-grid * integral)
        peak = float(grid[int(np.argmax(values))])
        spacing = float(grid[1] - grid[0])
        worst_offset = max(worst_offset, abs(peak - rho_star) / spacing)
    run.required(
        "optimal-density-grid-peak",
        worst_offset <= 1.0,
        f"peak within {worst_offset:.3f} grid spacings of 1/I over 6 scenarios",
    )


def _check_infinite_bound(run: _Runner, rng: np.random.Generator) -> None:
    ok = True
    detail = "I_infinite >= I_sector held on all 8 scenarios"
    for _ in range(8):
        sector = SectorDomain(
            float(rng.uniform(0.5, 8.0)), float(rng.uniform(0.3, 2 * math.pi))
        )
        pl = PathLossParams(float(rng.uniform(2.05, 6.0)), float(rng.choice([0.0, 0.01])))
        arg = InterferenceArg(float(10.0 ** rng.uniform(-2, 2)))
        finite = analytic.interference_integral_sector(sector, arg, pl)
        infinite = analytic.interference_integral_infinite(sector.angle, arg, pl)
        if infinite < finite * (1.0 - 1e-12):
            ok = False
            detail = f"violated: I_inf={infinite:.6g} < I_R={finite:.6g}"
            break
    run.required("infinite-domain-upper-bound", ok, detail)


def _check_analytic_properties(run: _Runner) -> None:
    base = dict(theta=math.pi, radius=3.0, eta=2.5, eps=0.0, rho_t=12.0, d=1.0)

    def h(**overrides):
        params = {**base, **overrides}
        return analytic.connection_probability(_sector_cfg(**params))

    href = h()
    monotone = (
        h(d=1.5) < href
        and h(rho_t=16.0) < href
        and h(theta=2 * math.pi) < href
        and h(radius=4.0) < href
        and analytic.connection_probability(
            _sector_cfg(**base, radio=RadioParams(threshold=2.0))
        )
        < href
    )
    run.required(
        "connection-monotonicity",
        monotone,
        "H decreases in d, rho_t, theta, R, and q at the reference point",
    )

    # At the figure exponents the epsilon penalty on the desired signal
    # dominates the epsilon relief on interference throughout d <= 1.
    # (Far into outage at eta = 4, d = 1 the ordering genuinely reverses
    # by ~1% relative while H ~ 1e-13, so the check stays in the regime
    # where the statement is meaningful.)
    eps_ok = all(
        h(eta=eta, eps=0.01, d=d) < h(eta=eta, eps=0.0, d=d)
        for eta in (2.5, 3.0)
        for d in (0.25, 0.5, 1.0)
    )
    run.required(
        "epsilon-sensitivity",
        eps_ok,
        "H(eps=0.01) < H(eps=0) for d <= 1 at eta in {2.5, 3}",
    )

    cfg = _sector_cfg(math.pi, 3.0, 3.0, 0.01, 12.0, 0.8)
    first = analytic.rate_moment(1.0, cfg)
    rate = analytic.ergodic_rate(cfg)
    second = analytic.rate_moment(2.0, cfg)
    variance = second - rate * rate
    run.required(
        "rate-moment-identities",
        abs(first - rate) <= 1e-8 * max(rate, 1.0) and variance >= -1e-12,
        f"|moment(1) - rate| = {abs(first - rate):.2e}, variance = {variance:.6g}",
    )

    var_narrow = []
    for theta in (math.pi / 2, 2 * math.pi):
        cfg = _sector_cfg(theta, 3.0, 3.0, 0.01, 12.0, 1.0)
        mean = analytic.ergodic_rate(cfg)
        var_narrow.append(analytic.rate_moment(2.0, cfg) - mean * mean)
    run.required(
        "corner-rate-fluctuation",
        var_narrow[0] > var_narrow[1],
        f"variance(theta=pi/2) = {var_narrow[0]:.6g} > "
        f"variance(theta=2pi) = {var_narrow[1]:.6g}",
    )


def _check_density_shapes(run: _Runner) -> None:
    radio = RadioParams()
    grid = np.geomspace(1e-3, 1e6, 60)
    closed = [analytic.success_density_closed(2 * math.pi, float(r), radio) for r in grid]
    increasing = all(b > a for a, b in zip(closed, closed[1:]))
    limit_gap = abs(closed[-1] - 2.0 / math.pi)
    run.required(
        "closed-density-monotone-limit",
        increasing and limit_gap <= 1e-4,
        f"monotone over 60 log-spaced intensities; |mu(1e6) - 2/pi| = {limit_gap:.2e}",
    )

    for theta in _THETAS:
        rhos = np.linspace(0.5, 30.0, 40)
        mus = [
            analytic.success_density(_sector_cfg(theta, 3.0, 4.0, 0.01, float(r), 0.0))
            for r in rhos
        ]
        diffs = np.diff(mus)
        sign_changes = int(np.count_nonzero(np.diff(np.sign(diffs)) != 0))
        peak_interior = 0 < int(np.argmax(mus)) < len(mus) - 1
        run.required(
            f"density-unimodal-theta={theta:.3f}",
            sign_changes == 1 and peak_interior,
            f"{sign_changes} derivative sign change(s), "
            f"peak at rho={rhos[int(np.argmax(mus))]:.2f}",
        )


# ---------------------------------------------------------------------------
# Statistical checks
# ---------------------------------------------------------------------------


def _check_connection_grid(run: _Runner) -> None:
    distances = np.linspace(0.1, 3.0, 20)
    for eta in (2.5, 3.0):
        for eps in (0.0, 0.01):
            for theta in _THETAS:
                for d in distances:
                    cfg = _sector_cfg(theta, 3.0, eta, eps, 12.0, float(d))
                    ref = analytic.connection_probability(cfg)
                    est = estimate_connection(cfg, run.sim("poisson"))
                    run.statistical(
                        f"connection eta={eta} eps={eps} theta={theta:.3f} d={d:.2f}",
                        est.mean,
                        _binomial_sigma(est, ref),
                        ref,
                    )


def _check_noise_only(run: _Runner) -> None:
    # Two interference-free routes to the same Bernoulli(exp(-q N a / P))
    # law: an empty field (rho_t = 0) and a populated but ignored field
    # (gamma = 0).
    for label, rho_t, radio in (
        ("empty-field", 0.0, RadioParams()),
        ("gamma=0", 2.0, RadioParams(gamma=0.0)),
    ):
        for d in (0.5, 1.0, 2.0):
            cfg = _sector_cfg(2 * math.pi, 3.0, 2.5, 0.0, rho_t, d, radio=radio)
            ref = analytic.connection_probability(cfg)
            est = estimate_connection(cfg, run.sim("poisson"))
            run.statistical(
                f"noise-only {label} d={d}",
                est.mean,
                _binomial_sigma(est, ref),
                ref,
            )


def _check_rate_grid(run: _Runner) -> None:
    distances = np.linspace(0.1, 3.0, 12)
    for theta in _THETAS:
        for d in distances:
            cfg = _sector_cfg(theta, 3.0, 3.0, 0.01, 12.0, float(d))
            mean_ref = analytic.ergodic_rate(cfg)
            var_ref = analytic.rate_moment(2.0, cfg) - mean_ref * mean_ref
            mean_est, var_est = estimate_rate(cfg, run.sim("poisson"))
            label = f"theta={theta:.3f} d={d:.2f}"
            run.statistical(
                f"rate-mean {label}", mean_est.mean, mean_est.std_error, mean_ref
            )
            run.statistical(
                f"rate-variance {label}", var_est.mean, var_est.std_error, var_ref
            )


def _check_rate_noise_only(run: _Runner) -> None:
    for d in (0.5, 1.0, 2.0):
        cfg = _sector_cfg(2 * math.pi, 3.0, 2.0, 0.0, 0.0, d)
        mean_ref = analytic.ergodic_rate(cfg)
        var_ref = analytic.rate_moment(2.0, cfg) - mean_ref * mean_ref
        mean_est, var_est = estimate_rate(cfg, run.sim("poisson"))
        run.statistical(
            f"rate-mean noise-only d={d}", mean_est.mean, mean_est.std_error, mean_ref
        )
        run.statistical(
            f"rate-variance noise-only d={d}", var_est.mean, var_est.std_error, var_ref
        )


def _check_density_grid(run: _Runner) -> None:
    rhos = np.linspace(2.5, 30.0, 12)
    for eps in (0.0, 0.01):
        for theta in _THETAS:
            for rho in rhos:
                cfg = _sector_cfg(theta, 3.0, 4.0, eps, float(rho), 0.0)
                ref = analytic.success_density(cfg)
                est = estimate_success_density(cfg, run.sim("poisson"))
                run.statistical(
                    f"density eps={eps} theta={theta:.3f} rho={rho:.2f}",
                    est.mean,
                    _count_sigma(est, ref),
                    ref,
                )


def _check_binomial_field(run: _Runner) -> None:
    scenarios = (
        dict(theta=2 * math.pi, radius=3.0, eta=3.0, eps=0.0, n=50),
        dict(theta=math.pi, radius=2.0, eta=4.0, eps=0.01, n=30),
    )
    distances = np.linspace(0.3, 1.5, 8)
    for sc in scenarios:
        for d in distances:
            cfg = _sector_cfg(sc["theta"], sc["radius"], sc["eta"], sc["eps"], 1.0, float(d))
            ref = analytic.connection_probability_bpp(cfg, sc["n"])
            sim = run.sim("fixed", fixed_count_override=sc["n"] - 1)
            est = estimate_connection(cfg, sim)
            run.statistical(
                f"binomial-field n={sc['n']} eta={sc['eta']} d={d:.2f}",
                est.mean,
                _binomial_sigma(est, ref),
                ref,
            )


def _check_heatmap(run: _Runner) -> None:
    # Interference-limited parameters chosen for a wide corner-vs-centre
    # outage gap (the 5-sigma gate below has ~20 sigma of headroom at the
    # 4000-trial floor).
    domain = RectDomain(10.0, 10.0)
    radio = RadioParams(noise=0.03)
    pl = PathLossParams(4.0, 0.01)
    link = 1.5
    rho_t = 0.2

    per_cell = min(max(run.trials, 4000), 10000)
    result = outage_heatmap(
        domain, link, radio, pl, rho_t, (2, 2), run.sim("poisson", trials=per_cell)
    )
    cells = [result.estimates[iy][ix] for iy in range(2) for ix in range(2)]
    base = cells[0]
    for k, cell in enumerate(cells[1:], start=1):
        sigma = math.sqrt(base.std_error**2 + cell.std_error**2)
        run.statistical(
            f"heatmap-symmetry cell {k}", cell.mean, max(sigma, 1e-300), base.mean
        )

    result = outage_heatmap(
        domain, link, radio, pl, rho_t, (4, 4), run.sim("poisson", trials=per_cell)
    )
    corner_ids = [(0, 0), (0, 3), (3, 0), (3, 3)]
    centre_ids = [(1, 1), (1, 2), (2, 1), (2, 2)]

    def pooled(ids):
        ests = [result.estimates[iy][ix] for iy, ix in ids]
        mean = sum(e.mean for e in ests) / len(ests)
        sigma = math.sqrt(sum(e.std_error**2 for e in ests)) / len(ests)
        return mean, sigma

    corner_mean, corner_sigma = pooled(corner_ids)
    centre_mean, centre_sigma = pooled(centre_ids)
    gap = centre_mean - corner_mean
    sigma = math.sqrt(corner_sigma**2 + centre_sigma**2)
    run.required(
        "corner-outage-advantage",
        gap > 5.0 * sigma,
        f"centre - corner outage = {gap:.4f} ({gap / max(sigma, 1e-300):.1f} sigma, "
        "gate 5 sigma)",
    )


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def run_validation(
    seed: int,
    trials: int = 20000,
    *,
    parallel: bool = True,
    workers: Optional[int] = None,
) -> ValidationReport:
    """Run every validation check and return the pooled report.

    ``trials`` sets the Monte Carlo effort per statistical check; the 3
    standard-error comparisons are calibrated at any sample size, so
    smaller values trade resolution for speed without biasing the gate.
    """
    if not isinstance(seed, int) or not (0 <= seed < _U64):
        raise ParameterError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    run = _Runner(seed, trials, parallel, workers)
    scenario_rng = np.random.Generator(np.random.Philox(key=(seed << 64) | (2**63)))

    _check_dispatch(run)
    _check_numeric_oracle(run, scenario_rng)
    _check_mixture(run, scenario_rng)
    _check_rho_max(run, scenario_rng)
    _check_infinite_bound(run, scenario_rng)
    _check_analytic_properties(run)
    _check_density_shapes(run)

    _check_connection_grid(run)
    _check_noise_only(run)
    _check_rate_grid(run)
    _check_rate_noise_only(run)
    _check_density_grid(run)
    _check_binomial_field(run)
    _check_heatmap(run)

    return ValidationReport(tuple(run.checks), seed, trials)
