"""Closed-form and quadrature-based performance expressions.

For a receiver at the apex of a circular sector (angle theta, radius R)
with transmitters scattered as a Poisson process of intensity rho_t, the
model admits closed forms built from one object: the aggregate
interference integral

    I_R(eta; s) = theta * R^2 * s / (2 (eps + s))
                  * 2F1(1, 2/eta; 2/eta + 1; -R^eta / (eps + s)),

which collapses to elementary forms at eta = 2 and eta = 4 and to

    I_inf(eta; s) = theta * pi * s * (eps + s)^(2/eta - 1)
                    / (eta * sin(2 pi / eta))        (eta > 2)

as R -> infinity. The Laplace transform of interference is
L(s) = exp(-rho_t * I_R), and every quantity below is assembled from it:

* connection probability  H = exp(-q N (eps + d^eta) / P) * L(q gamma (eps + d^eta))
* ergodic rate            tau = int_0^inf H(threshold = e^x - 1) dx
* rate moments            E[X^a] = a * int_0^inf x^(a-1) * survival(x) dx
* success density         mu = theta rho_t int_0^R H(link = t) t dt

Receivers elsewhere (rectangles, off-apex points) are served by a numeric
interference integral over the visible domain; the closed forms then no
longer apply but the same assembly does.

Testing hook: setting the environment variable ``BORDERNET_FAULT`` to
``eta-dispatch`` deliberately corrupts the eta = 4 closed-form routing.
The validation pipeline uses this as a negative control to prove it can
detect analytic faults; never set it otherwise.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

from .channel import PathLossParams, RadioParams, path_gain
from .errors import InterferenceStormError, ParameterError
from .geometry import Domain, Point2, RectDomain, SectorDomain, domain_area
from .specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    erfcx,
    hyp2f1_1b,
    integrate_finite,
    integrate_semiinfinite,
)

__all__ = [
    "ScenarioConfig",
    "InterferenceArg",
    "laplace_argument",
    "interference_integral_sector",
    "interference_integral_infinite",
    "interference_integral_numeric",
    "laplace_interference",
    "connection_probability",
    "connection_probability_bpp",
    "bpp_interference_factor",
    "ergodic_rate",
    "rate_moment",
    "success_density",
    "success_density_closed",
    "optimal_density",
]

_TWO_PI = 2.0 * math.pi

#: eta values within this window of 2 or 4 route to the elementary forms.
_DISPATCH_TOL = 1e-12

#: exp(-x) underflows to zero below this; used to short-circuit products
#: whose leading factor is already an exact float zero.
_EXP_UNDERFLOW = 745.0


def _fault_active(name: str) -> bool:
    return os.environ.get("BORDERNET_FAULT") == name


@dataclass(frozen=True)
class ScenarioConfig:
    """One complete analysis scenario.

    Binds the deployment region, the receiver location, propagation and
    radio parameters, the transmitter intensity ``rho_t`` (nodes per unit
    area), and the desired-link distance ``link_distance``.

    Closed-form expressions require a sector domain with the receiver at
    the apex (the origin); rectangle receivers anywhere inside are served
    by the numeric interference path.
    """

    domain: Domain
    receiver: Point2
    pathloss: PathLossParams
    radio: RadioParams
    rho_t: float
    link_distance: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho_t", float(self.rho_t))
        object.__setattr__(self, "link_distance", float(self.link_distance))
        if not (self.rho_t >= 0.0 and math.isfinite(self.rho_t)):
            raise ParameterError(
                f"transmitter intensity must be >= 0, got {self.rho_t}"
            )
        if not (self.link_distance >= 0.0 and math.isfinite(self.link_distance)):
            raise ParameterError(
                f"link distance must be >= 0, got {self.link_distance}"
            )
        if not self.domain.contains(self.receiver):
            raise ParameterError(
                f"receiver {self.receiver} lies outside the domain {self.domain}"
            )


@dataclass(frozen=True)
class InterferenceArg:
    """Laplace-transform argument s = q * gamma * (eps + d^eta) >= 0."""

    s: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", float(self.s))
        if not (self.s >= 0.0 and math.isfinite(self.s)):
            raise ParameterError(
                f"Laplace argument must be finite and >= 0, got {self.s}"
            )


def _is_sector_apex(cfg: ScenarioConfig) -> bool:
    return (
        isinstance(cfg.domain, SectorDomain)
        and cfg.receiver.x == 0.0
        and cfg.receiver.y == 0.0
    )


def _require_sector_apex(cfg: ScenarioConfig, what: str) -> SectorDomain:
    if not _is_sector_apex(cfg):
        raise ParameterError(
            f"{what} requires a sector domain with the receiver at the apex; "
            "use the numeric interference path for other geometries"
        )
    return cfg.domain


def laplace_argument(cfg: ScenarioConfig) -> InterferenceArg:
    """s = threshold * gamma * (eps + d^eta) for the desired link."""
    pl = cfg.pathloss
    attenuation = pl.epsilon + cfg.link_distance**pl.eta
    return InterferenceArg(cfg.radio.threshold * cfg.radio.gamma * attenuation)


# ---------------------------------------------------------------------------
# Aggregate interference integrals
# ---------------------------------------------------------------------------


def _sector_closed_eta2(sector: SectorDomain, sv: float, pl: PathLossParams) -> float:
    """Elementary form at eta = 2: (theta s / 2) ln(1 + R^2/(eps+s))."""
    c = pl.epsilon + sv
    return 0.5 * sector.angle * sv * math.log1p(sector.radius**2 / c)


def _sector_closed_eta4(sector: SectorDomain, sv: float, pl: PathLossParams) -> float:
    """Elementary form at eta = 4: (theta s / (2 sqrt(eps+s))) atan(R^2/sqrt(eps+s))."""
    root = math.sqrt(pl.epsilon + sv)
    return 0.5 * sector.angle * sv / root * math.atan(sector.radius**2 / root)


def _sector_generic(sector: SectorDomain, sv: float, pl: PathLossParams) -> float:
    """Hypergeometric form, valid for every eta >= 2 (including 2 and 4)."""
    c = pl.epsilon + sv
    z = -(sector.radius**pl.eta) / c
    prefactor = 0.5 * sector.angle * sector.radius**2 * sv / c
    return prefactor * hyp2f1_1b(2.0 / pl.eta, z)


def interference_integral_sector(
    sector: SectorDomain, s: InterferenceArg, pl: PathLossParams
) -> float:
    """Interference integral I_R(eta; s) over a sector seen from its apex.

    Dispatches to the elementary eta = 2 / eta = 4 forms when eta matches
    to within 1e-12, and to the hypergeometric form otherwise; s = 0
    returns 0 outright (the integrand vanishes identically).
    """
    sv = s.s
    if sv == 0.0:
        return 0.0
    if abs(pl.eta - 2.0) <= _DISPATCH_TOL:
        return _sector_closed_eta2(sector, sv, pl)
    if abs(pl.eta - 4.0) <= _DISPATCH_TOL:
        if _fault_active("eta-dispatch"):
            return _sector_closed_eta2(sector, sv, pl)  # negative-control fault
        return _sector_closed_eta4(sector, sv, pl)
    return _sector_generic(sector, sv, pl)


def interference_integral_infinite(
    theta: float, s: InterferenceArg, pl: PathLossParams
) -> float:
    """Limit of the sector integral as R -> infinity (requires eta > 2).

    I_inf = theta pi s (eps+s)^(2/eta - 1) / (eta sin(2 pi / eta)); at
    eta <= 2 aggregate interference diverges (the interference storm), so
    the call raises instead of returning a number.
    """
    if not (0.0 < theta <= _TWO_PI):
        raise ParameterError(f"sector angle must lie in (0, 2*pi], got {theta}")
    if pl.eta <= 2.0:
        raise InterferenceStormError(
            "the infinite-domain interference integral diverges for eta <= 2"
        )
    sv = s.s
    if sv == 0.0:
        return 0.0
    c = pl.epsilon + sv
    return (
        theta * math.pi * sv * c ** (2.0 / pl.eta - 1.0)
        / (pl.eta * math.sin(_TWO_PI / pl.eta))
    )


def _radial_integrand(sv: float, pl: PathLossParams) -> Callable[[float], float]:
    """t -> s*g(t)/(1+s*g(t)) * t = s*t/(eps + t^eta + s), the polar kernel."""
    eps, eta = pl.epsilon, pl.eta

    def kernel(t: float) -> float:
        return sv * t / (eps + t**eta + sv)

    return kernel


def _rect_ray_lengths(
    rect: RectDomain, receiver: Point2
) -> list[tuple[float, float, Callable[[float], float]]]:
    """Decompose a rectangle into triangles fanned from the receiver.

    Returns (start angle, angular width, phi -> boundary distance) per
    non-degenerate triangle; triangles collapse when the receiver sits on
    an edge's line or coincides with a corner, and are skipped (they
    carry zero area).
    """
    corners = (
        (0.0, 0.0),
        (rect.width, 0.0),
        (rect.width, rect.height),
        (0.0, rect.height),
    )
    px, py = receiver.x, receiver.y
    triangles = []
    for k in range(4):
        ax, ay = corners[k]
        bx, by = corners[(k + 1) % 4]
        if (ax == px and ay == py) or (bx == px and by == py):
            continue  # receiver at a corner: adjacent triangles are degenerate
        if ay == by:  # horizontal edge on the line y = ay
            offset = ay - py
            if offset == 0.0:
                continue  # receiver on the edge's line
            ray = lambda phi, c=offset: c / math.sin(phi)
        else:  # vertical edge on the line x = ax
            offset = ax - px
            if offset == 0.0:
                continue
            ray = lambda phi, c=offset: c / math.cos(phi)
        a1 = math.atan2(ay - py, ax - px)
        a2 = math.atan2(by - py, bx - px)
        width = (a2 - a1) % _TWO_PI
        if width == 0.0:
            continue
        triangles.append((a1, width, ray))
    return triangles


def interference_integral_numeric(
    domain: Domain,
    receiver: Point2,
    s: InterferenceArg,
    pl: PathLossParams,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> float:
    """Interference integral over an arbitrary domain by direct quadrature.

    Integrates s*g(|t - receiver|)/(1 + s*g(|t - receiver|)) over the
    domain in polar coordinates centred on the receiver. The integrand
    depends only on distance, so sectors (apex receiver) reduce to
    theta times a single radial integral — a route completely independent
    of the hypergeometric machinery — and rectangles decompose into
    corner-fanned triangles with an adaptive angular integral whose
    integrand is itself a radial integral.
    """
    sv = s.s
    if sv == 0.0:
        return 0.0
    if not domain.contains(receiver):
        raise ParameterError(
            f"receiver {receiver} lies outside the domain {domain}"
        )
    kernel = _radial_integrand(sv, pl)
    if isinstance(domain, SectorDomain):
        if receiver.x != 0.0 or receiver.y != 0.0:
            raise ParameterError(
                "numeric sector integration supports the apex receiver only"
            )
        return domain.angle * integrate_finite(kernel, 0.0, domain.radius, spec)

    total = 0.0
    for a1, width, ray in _rect_ray_lengths(domain, receiver):

        def wedge(psi: float, a1: float = a1, ray: Callable = ray) -> float:
            return integrate_finite(kernel, 0.0, ray(a1 + psi), spec)

        total += integrate_finite(wedge, 0.0, width, spec)
    return total


def _interference_for_config(
    s: InterferenceArg, cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Route to the closed-form sector integral or the numeric fallback."""
    if isinstance(cfg.domain, SectorDomain):
        _require_sector_apex(cfg, "the sector interference integral")
        return interference_integral_sector(cfg.domain, s, cfg.pathloss)
    return interference_integral_numeric(
        cfg.domain, cfg.receiver, s, cfg.pathloss, spec
    )


def laplace_interference(s: InterferenceArg, cfg: ScenarioConfig) -> float:
    """Laplace transform of aggregate interference, L(s) = exp(-rho_t I(s))."""
    if s.s == 0.0 or cfg.rho_t == 0.0:
        return 1.0
    return math.exp(-cfg.rho_t * _interference_for_config(s, cfg))


# ---------------------------------------------------------------------------
# Connection probability
# ---------------------------------------------------------------------------


def connection_probability(cfg: ScenarioConfig) -> float:
    """Probability that the desired link's SINR reaches the threshold.

    H = exp(-q N (eps + d^eta) / P) * L(q gamma (eps + d^eta)); the first
    factor is the pure-noise (Rayleigh) outage term, the second averages
    the interference over fading and node positions.
    """
    radio = cfg.radio
    if radio.threshold == 0.0:
        return 1.0
    gain = path_gain(cfg.link_distance, cfg.pathloss)
    noise_factor = math.exp(-radio.threshold * radio.noise / (radio.power * gain))
    return noise_factor * laplace_interference(laplace_argument(cfg), cfg)


def bpp_interference_factor(cfg: ScenarioConfig) -> float:
    """Per-interferer success factor A = (1/V) int 1/(1 + s g) = 1 - I/V.

    One uniformly placed interferer leaves the link connected with
    probability A; n - 1 independent interferers contribute A^(n-1).
    """
    s = laplace_argument(cfg)
    if s.s == 0.0:
        return 1.0
    return 1.0 - _interference_for_config(s, cfg) / domain_area(cfg.domain)


def connection_probability_bpp(cfg: ScenarioConfig, n: int) -> float:
    """Connection probability with exactly n - 1 uniform interferers.

    The binomial-process analogue of ``connection_probability``; n = 1
    (no interferers) reduces to the pure-noise factor. Mixing over a
    Poisson-distributed n recovers the Poisson-process result.
    """
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParameterError(f"node count must be an integer >= 1, got {n!r}")
    radio = cfg.radio
    if radio.threshold == 0.0:
        return 1.0
    gain = path_gain(cfg.link_distance, cfg.pathloss)
    noise_factor = math.exp(-radio.threshold * radio.noise / (radio.power * gain))
    if n == 1:
        return noise_factor
    return noise_factor * bpp_interference_factor(cfg) ** (n - 1)


# ---------------------------------------------------------------------------
# Rate
# ---------------------------------------------------------------------------


def _survival_function(cfg: ScenarioConfig) -> Callable[[float], float]:
    """x -> P[ln(1 + SINR) > x], the rate's survival function.

    Substituting the running threshold qhat = e^x - 1 into the connection
    probability gives the survival function directly. Requires positive
    noise: with N = 0 the event "no interference power" has positive
    probability and the rate integral diverges.
    """
    radio = cfg.radio
    if radio.noise <= 0.0:
        raise ParameterError(
            "rate integrals require positive noise power; with zero noise the "
            "SINR is unbounded on zero-interference events and the rate diverges"
        )
    gain = path_gain(cfg.link_distance, cfg.pathloss)
    attenuation = 1.0 / gain
    noise_coeff = radio.noise * attenuation / radio.power
    s_coeff = radio.gamma * attenuation
    with_interference = radio.gamma > 0.0 and cfg.rho_t > 0.0
    if with_interference and isinstance(cfg.domain, SectorDomain):
        _require_sector_apex(cfg, "the rate integral over a sector")

    def survival(x: float) -> float:
        qhat = math.expm1(x) if x < 709.0 else math.inf
        noise_arg = qhat * noise_coeff
        if noise_arg >= _EXP_UNDERFLOW:
            return 0.0
        value = math.exp(-noise_arg)
        if with_interference:
            value *= laplace_interference(InterferenceArg(qhat * s_coeff), cfg)
        return value

    return survival


def rate_moment(
    alpha: float, cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """alpha-th moment of the rate ln(1 + SINR), in nats per Hz.

    E[X^alpha] = alpha * int_0^inf x^(alpha-1) P[X > x] dx for alpha >= 1;
    alpha = 1 is the ergodic rate itself.
    """
    if not (alpha >= 1.0 and math.isfinite(alpha)):
        raise ParameterError(f"moment order must be >= 1, got {alpha}")
    survival = _survival_function(cfg)
    if alpha == 1.0:
        return integrate_semiinfinite(survival, spec)
    power = alpha - 1.0
    return alpha * integrate_semiinfinite(lambda x: x**power * survival(x), spec)


def ergodic_rate(
    cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Mean rate E[ln(1 + SINR)] in nats per Hz (first rate moment)."""
    return rate_moment(1.0, cfg, spec)


# ---------------------------------------------------------------------------
# Spatial density of successful transmissions
# ---------------------------------------------------------------------------


def success_density(
    cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_QUADRATURE
) -> float:
    """Expected number of transmitters decodable (SINR >= q) at the receiver.

    mu = theta * rho_t * int_0^R H(link distance = t) t dt over the sector,
    each candidate transmitter facing the interference of the whole field.
    """
    sector = _require_sector_apex(cfg, "the success-density integral")
    if cfg.rho_t == 0.0:
        return 0.0
    pl, radio, rho = cfg.pathloss, cfg.radio, cfg.rho_t
    noise_coeff = radio.threshold * radio.noise / radio.power
    s_coeff = radio.threshold * radio.gamma

    def integrand(t: float) -> float:
        attenuation = pl.epsilon + t**pl.eta
        noise_arg = noise_coeff * attenuation
        if noise_arg >= _EXP_UNDERFLOW:
            return 0.0
        value = math.exp(-noise_arg)
        sv = s_coeff * attenuation
        if sv > 0.0:
            value *= math.exp(
                -rho * interference_integral_sector(sector, InterferenceArg(sv), pl)
            )
        return value * t

    return sector.angle * rho * integrate_finite(integrand, 0.0, sector.radius, spec)


def success_density_closed(theta: float, rho_t: float, radio: RadioParams) -> float:
    """Closed-form success density in the R -> inf, eta = 4, eps = 0 regime.

    mu = theta rho_t sqrt(pi P / (16 q N)) * e^(b^2) erfc(b) with
    b = theta pi rho_t sqrt(gamma P / N) / 8; the exponential's argument
    equals b^2 exactly, so the product is evaluated as erfcx(b) and never
    overflows. Increases monotonically to 2/(pi sqrt(gamma q)) as
    rho_t -> inf. With gamma = 0 the density grows without bound; that is
    reported as ``inf``, not an error.
    """
    if not (0.0 < theta <= _TWO_PI):
        raise ParameterError(f"sector angle must lie in (0, 2*pi], got {theta}")
    if not (rho_t >= 0.0 and math.isfinite(rho_t)):
        raise ParameterError(f"transmitter intensity must be >= 0, got {rho_t}")
    if radio.noise <= 0.0 or radio.threshold <= 0.0:
        raise ParameterError(
            "the closed-form success density requires positive noise and threshold"
        )
    if radio.gamma == 0.0:
        return math.inf
    b = theta * math.pi * rho_t * math.sqrt(radio.gamma * radio.power / radio.noise) / 8.0
    prefactor = (
        0.25 * theta * rho_t
        * math.sqrt(math.pi * radio.power / (radio.threshold * radio.noise))
    )
    return prefactor * erfcx(b)


def optimal_density(
    sector: SectorDomain, s: InterferenceArg, pl: PathLossParams
) -> float:
    """Transmitter intensity maximizing rho * exp(-rho * I_R), i.e. 1/I_R."""
    integral = interference_integral_sector(sector, s, pl)
    if integral == 0.0:
        raise ZeroDivisionError(
            "interference integral is zero (s = 0); the optimal density 1/I is undefined"
        )
    return 1.0 / integral
