"""Deployment regions, node sampling, and reproducible random state.

The network lives inside a finite convex region: either a circular sector
(``SectorDomain``, apex at the origin, spanning polar angles ``[0, theta]``)
or an axis-aligned rectangle (``RectDomain``, corners ``(0, 0)`` and
``(width, height)``). Transmitters are scattered uniformly; their count is
either fixed or Poisson, handled by the simulation layer.

Randomness flows through ``RngState``, a (seed, stream) pair backed by a
counter-based Philox generator. Distinct streams are statistically
independent, so parallel workers each own a stream and the overall draw
sequence is independent of scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ParameterError

__all__ = [
    "Point2",
    "SectorDomain",
    "RectDomain",
    "Domain",
    "RngState",
    "domain_area",
    "distance",
    "sample_uniform",
    "sample_uniform_many",
    "sample_poisson_count",
]

_TWO_PI = 2.0 * math.pi

# Absolute slack for membership tests: polar round-trips (r, phi) -> (x, y)
# -> atan2 can push a boundary point out by a few ulps.
_CONTAINS_TOL = 1e-12


@dataclass(frozen=True)
class Point2:
    """A point in the plane, unit distance."""

    x: float
    y: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ParameterError(f"point coordinates must be finite, got {self}")


@dataclass(frozen=True)
class SectorDomain:
    """Circular sector of radius ``radius`` spanning polar angles [0, angle].

    The apex sits at the origin; ``angle`` is in radians with
    0 < angle <= 2*pi (angle = 2*pi is the full disk). The receiver under
    analytic study is placed at the apex.
    """

    radius: float
    angle: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "angle", float(self.angle))
        if not (self.radius > 0.0 and math.isfinite(self.radius)):
            raise ParameterError(f"sector radius must be positive, got {self.radius}")
        if not (0.0 < self.angle <= _TWO_PI):
            raise ParameterError(
                f"sector angle must lie in (0, 2*pi], got {self.angle}"
            )

    @property
    def area(self) -> float:
        return 0.5 * self.angle * self.radius * self.radius

    def contains(self, p: Point2) -> bool:
        r = math.hypot(p.x, p.y)
        if r > self.radius * (1.0 + _CONTAINS_TOL):
            return False
        if r == 0.0:
            return True
        phi = math.atan2(p.y, p.x)
        if phi < 0.0:
            phi += _TWO_PI
        return phi <= self.angle + _CONTAINS_TOL or phi >= _TWO_PI - _CONTAINS_TOL


@dataclass(frozen=True)
class RectDomain:
    """Axis-aligned rectangle with corners (0, 0) and (width, height)."""

    width: float
    height: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "height", float(self.height))
        if not (self.width > 0.0 and math.isfinite(self.width)):
            raise ParameterError(f"rectangle width must be positive, got {self.width}")
        if not (self.height > 0.0 and math.isfinite(self.height)):
            raise ParameterError(
                f"rectangle height must be positive, got {self.height}"
            )

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, p: Point2) -> bool:
        return 0.0 <= p.x <= self.width and 0.0 <= p.y <= self.height


Domain = Union[SectorDomain, RectDomain]

_U64_MAX = 2**64 - 1


@dataclass(eq=False)
class RngState:
    """Reproducible random state: a (seed, stream) pair of 64-bit integers.

    Each (seed, stream) pair names one statistically independent Philox
    stream; repeated draws from the same state advance through an identical
    sequence every run. Parallel code derives one state per unit of work so
    results never depend on scheduling.
    """

    seed: int
    stream: int = 0

    def __post_init__(self) -> None:
        for label, value in (("seed", self.seed), ("stream", self.stream)):
            if not isinstance(value, int) or not (0 <= value <= _U64_MAX):
                raise ParameterError(
                    f"{label} must be an unsigned 64-bit integer, got {value!r}"
                )
        self._gen: np.random.Generator | None = None

    @property
    def generator(self) -> np.random.Generator:
        """The underlying numpy generator (created lazily, then cached)."""
        if self._gen is None:
            key = (self.seed << 64) | self.stream
            self._gen = np.random.Generator(np.random.Philox(key=key))
        return self._gen


def domain_area(domain: Domain) -> float:
    """Area of the deployment region."""
    if isinstance(domain, (SectorDomain, RectDomain)):
        return domain.area
    raise ParameterError(f"unsupported domain type: {type(domain).__name__}")


def distance(a: Point2, b: Point2) -> float:
    """Euclidean distance between two points."""
    return math.hypot(a.x - b.x, a.y - b.y)


def sample_uniform(domain: Domain, rng: RngState) -> Point2:
    """Draw one point uniformly from the domain.

    Sectors use the standard polar recipe r = R*sqrt(u), phi = theta*v
    (area-uniform); rectangles scale two uniforms. Consumes exactly one
    pair of uniform draws, in the same order as ``sample_uniform_many``.
    """
    xy = sample_uniform_many(domain, 1, rng)
    return Point2(float(xy[0, 0]), float(xy[0, 1]))


def sample_uniform_many(domain: Domain, n: int, rng: RngState) -> np.ndarray:
    """Draw ``n`` uniform points as an (n, 2) array of x, y coordinates.

    Batching is draw-order compatible with repeated single draws: the k-th
    row equals the k-th point of a scalar loop over the same state.
    """
    if n < 0:
        raise ParameterError(f"sample count must be non-negative, got {n}")
    u = rng.generator.random((n, 2))
    out = np.empty((n, 2))
    if isinstance(domain, SectorDomain):
        r = domain.radius * np.sqrt(u[:, 0])
        phi = domain.angle * u[:, 1]
        out[:, 0] = r * np.cos(phi)
        out[:, 1] = r * np.sin(phi)
    elif isinstance(domain, RectDomain):
        out[:, 0] = domain.width * u[:, 0]
        out[:, 1] = domain.height * u[:, 1]
    else:
        raise ParameterError(f"unsupported domain type: {type(domain).__name__}")
    return out


def sample_poisson_count(mean: float, rng: RngState) -> int:
    """Draw a Poisson-distributed node count with the given mean."""
    if not (mean >= 0.0 and math.isfinite(mean)):
        raise ParameterError(f"Poisson mean must be finite and >= 0, got {mean}")
    return int(rng.generator.poisson(mean))
