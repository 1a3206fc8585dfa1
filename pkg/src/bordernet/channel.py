"""Path loss, Rayleigh fading, and the instantaneous SINR.

The link model: a transmitter at distance d delivers power
P * |h|^2 * g(d), where g(d) = 1/(epsilon + d^eta) is the (optionally
regularized) power-law attenuation and |h|^2 ~ Exp(1) is Rayleigh fading
power. The receiver sees

    SINR = P |h|^2 g(d) / (N + gamma * I),

with N the noise power, I the aggregate interference power, and
gamma in [0, 1] weighting the interference term (gamma = 0 reduces SINR
to plain SNR).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSinrError, ParameterError, SingularityError
from .geometry import RngState

__all__ = [
    "PathLossParams",
    "RadioParams",
    "path_gain",
    "path_gain_array",
    "sample_fading",
    "sample_fading_many",
    "sinr",
]


@dataclass(frozen=True)
class PathLossParams:
    """Attenuation parameters: exponent ``eta`` >= 2 and buffer ``epsilon`` >= 0.

    ``epsilon`` > 0 removes the singularity of the pure power law at zero
    separation; ``eta`` < 2 is rejected outright because aggregate
    interference then diverges in large domains and every downstream
    expression loses meaning.
    """

    eta: float
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "eta", float(self.eta))
        object.__setattr__(self, "epsilon", float(self.epsilon))
        if not (self.eta >= 2.0 and math.isfinite(self.eta)):
            raise ParameterError(f"path-loss exponent must be >= 2, got {self.eta}")
        if not (self.epsilon >= 0.0 and math.isfinite(self.epsilon)):
            raise ParameterError(
                f"path-loss buffer must be >= 0, got {self.epsilon}"
            )


@dataclass(frozen=True)
class RadioParams:
    """Link-budget parameters shared by all nodes.

    ``power`` (P) > 0: common transmit power. ``noise`` (N) >= 0: receiver
    noise power. ``gamma`` in [0, 1]: interference weight. ``threshold``
    (q) >= 0: target SINR defining a successful reception.
    """

    power: float = 1.0
    noise: float = 1.0
    gamma: float = 1.0
    threshold: float = 1.0

    def __post_init__(self) -> None:
        for name in ("power", "noise", "gamma", "threshold"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.power > 0.0 and math.isfinite(self.power)):
            raise ParameterError(f"transmit power must be positive, got {self.power}")
        if not (self.noise >= 0.0 and math.isfinite(self.noise)):
            raise ParameterError(f"noise power must be >= 0, got {self.noise}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ParameterError(
                f"interference weight must lie in [0, 1], got {self.gamma}"
            )
        if not (self.threshold >= 0.0 and math.isfinite(self.threshold)):
            raise ParameterError(
                f"SINR threshold must be >= 0, got {self.threshold}"
            )


def path_gain(d: float, pl: PathLossParams) -> float:
    """Attenuation g(d) = 1/(epsilon + d^eta) at separation d >= 0."""
    if not (d >= 0.0 and math.isfinite(d)):
        raise ParameterError(f"distance must be finite and >= 0, got {d}")
    denom = pl.epsilon + d**pl.eta
    if denom == 0.0:
        raise SingularityError(
            "path gain is singular at zero separation when epsilon = 0"
        )
    return 1.0 / denom


def path_gain_array(d: np.ndarray, pl: PathLossParams) -> np.ndarray:
    """Vectorized g(d) for an array of non-negative distances.

    No zero-separation guard: callers sampling continuous positions hit
    d = 0 with probability zero, and a (theoretical) infinite gain flows
    through downstream multiply-and-compare logic without crashing.
    """
    return 1.0 / (pl.epsilon + np.asarray(d) ** pl.eta)


def sample_fading(rng: RngState) -> float:
    """Draw one Rayleigh fading power |h|^2 ~ Exp(1); strictly positive."""
    value = float(rng.generator.standard_exponential())
    while value <= 0.0:  # probability ~2^-53 per draw; contract says positive
        value = float(rng.generator.standard_exponential())
    return value


def sample_fading_many(n: int, rng: RngState) -> np.ndarray:
    """Draw ``n`` independent Exp(1) fading powers as a flat array."""
    if n < 0:
        raise ParameterError(f"sample count must be non-negative, got {n}")
    return rng.generator.standard_exponential(n)


def sinr(
    signal_gain: float, fading: float, interference: float, radio: RadioParams
) -> float:
    """Instantaneous SINR = P * fading * signal_gain / (N + gamma * I)."""
    if not (interference >= 0.0):
        raise ParameterError(f"interference must be >= 0, got {interference}")
    denom = radio.noise + radio.gamma * interference
    if denom == 0.0:
        raise DegenerateSinrError(
            "SINR undefined: zero noise and zero weighted interference"
        )
    return radio.power * fading * signal_gain / denom
