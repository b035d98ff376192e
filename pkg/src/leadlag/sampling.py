"""Observation schemes, non-synchronous observation sets, and diagnostics.

Observation times for each component live on ``[0, T + delta]``: the latent
paths are recorded slightly beyond the analysis horizon ``T`` so that shifted
increments remain available.  Interval ``i`` of a time list ``t_0 < ... < t_N``
is ``(t_{i-1}, t_i]``; its length, left end, and right end drive all the
diagnostics below.

The diagnostics quantify, for a concrete sample, the finite-sample analogues
of the asymptotic sampling conditions the estimator's consistency rests on:
a non-degeneracy ratio per component (``b2``), a smallest-interval mass ratio
per component at a user exponent ``mu`` (``b3``), and the product of the rate
parameter and the total observation count (``b4``).  They are evidence about
a sampling design, not hypothesis tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._util import as_float_array, check_finite_scalar, check_strictly_increasing
from .errors import DomainError, StructuralError
from .fbm import HurstParam
from .model import LatentPair
from .rng import generator

__all__ = [
    "SamplingScheme",
    "ObservationSet",
    "GridSpec",
    "Diagnostics",
    "generate_times",
    "observe",
    "diagnostics",
    "build_grid",
]

_SCHEME_KINDS = ("equidistant", "poisson", "explicit")


@dataclass(frozen=True)
class SamplingScheme:
    """Observation-time law on [0, horizon]: equidistant, Poisson, or explicit."""

    kind: str
    horizon: float
    n: int | None = None
    intensity: float | None = None
    times: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in _SCHEME_KINDS:
            raise DomainError(f"scheme kind must be one of {_SCHEME_KINDS}, got {self.kind!r}")
        horizon = check_finite_scalar(self.horizon, "horizon")
        if horizon <= 0.0:
            raise DomainError(f"horizon must be positive, got {horizon}")
        object.__setattr__(self, "horizon", horizon)
        if self.kind == "equidistant":
            if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool) or self.n < 1:
                raise DomainError(f"equidistant n must be a positive integer, got {self.n!r}")
            object.__setattr__(self, "n", int(self.n))
        elif self.kind == "poisson":
            intensity = check_finite_scalar(self.intensity, "intensity")
            if intensity <= 0.0:
                raise DomainError(f"poisson intensity must be positive, got {intensity}")
            object.__setattr__(self, "intensity", intensity)
        else:
            times = as_float_array(self.times, "explicit times")
            check_strictly_increasing(times, "explicit times")
            if times.size < 2 or times[0] != 0.0 or times[-1] != horizon:
                raise DomainError(
                    f"explicit times must run from 0 to horizon={horizon}, "
                    f"got range [{times[0] if times.size else None}, "
                    f"{times[-1] if times.size else None}]"
                )
            times.setflags(write=False)
            object.__setattr__(self, "times", times)

    @classmethod
    def equidistant(cls, n: int, horizon: float) -> "SamplingScheme":
        return cls(kind="equidistant", horizon=horizon, n=n)

    @classmethod
    def poisson(cls, intensity: float, horizon: float) -> "SamplingScheme":
        return cls(kind="poisson", horizon=horizon, intensity=intensity)

    @classmethod
    def explicit(cls, times, horizon: float) -> "SamplingScheme":
        return cls(kind="explicit", horizon=horizon, times=np.array(times, dtype=np.float64))


def generate_times(scheme: SamplingScheme, seed) -> np.ndarray:
    """Observation times from 0 to scheme.horizon, strictly increasing.

    The Poisson variant draws exponential inter-arrival gaps from the seeded
    stream, keeps arrivals inside (0, horizon), and appends the horizon as
    the final observation time.
    """
    if not isinstance(scheme, SamplingScheme):
        raise StructuralError(f"scheme must be a SamplingScheme, got {type(scheme).__name__}")
    if scheme.kind == "equidistant":
        return (np.arange(scheme.n + 1) / scheme.n) * scheme.horizon
    if scheme.kind == "explicit":
        return scheme.times.copy()

    rng = generator(seed)
    scale = 1.0 / scheme.intensity
    expected = scheme.intensity * scheme.horizon
    block = max(16, int(expected + 4.0 * math.sqrt(expected) + 16.0))
    arrivals = np.cumsum(rng.exponential(scale, size=block))
    while arrivals[-1] < scheme.horizon:
        more = arrivals[-1] + np.cumsum(rng.exponential(scale, size=block))
        arrivals = np.concatenate([arrivals, more])
    interior = arrivals[(arrivals > 0.0) & (arrivals < scheme.horizon)]
    return np.concatenate([[0.0], interior, [scheme.horizon]])


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Non-synchronous observations of both components on [0, T + delta].

    Each component's times must start at 0 and end exactly at ``T + delta``,
    and each must have at least one interval ending at or before ``T`` so
    that the contrast's restricted sums are nonempty.
    """

    times1: np.ndarray
    values1: np.ndarray
    times2: np.ndarray
    values2: np.ndarray
    T: float
    delta: float

    def __post_init__(self):
        t_horizon = check_finite_scalar(self.T, "T")
        delta = check_finite_scalar(self.delta, "delta")
        if t_horizon <= 0.0:
            raise DomainError(f"T must be positive, got {t_horizon}")
        if delta < 0.0:
            raise DomainError(f"delta must be nonnegative, got {delta}")
        object.__setattr__(self, "T", t_horizon)
        object.__setattr__(self, "delta", delta)
        endpoint = t_horizon + delta
        for tag in ("1", "2"):
            times = as_float_array(getattr(self, "times" + tag), "times" + tag)
            values = as_float_array(getattr(self, "values" + tag), "values" + tag)
            check_strictly_increasing(times, "times" + tag)
            if times.size != values.size:
                raise StructuralError(
                    f"times{tag} and values{tag} length mismatch: {times.size} vs {values.size}"
                )
            if times.size < 2:
                raise StructuralError(f"component {tag} needs at least two observations")
            if times[0] != 0.0:
                raise StructuralError(f"times{tag} must start at 0, got {times[0]}")
            if times[-1] != endpoint:
                raise StructuralError(
                    f"times{tag} must end exactly at T + delta = {endpoint}, got {times[-1]}"
                )
            if times[1] > t_horizon:
                raise StructuralError(
                    f"component {tag} has no observation interval ending at or before T={t_horizon}; "
                    "the restricted sums would be empty"
                )
            times.setflags(write=False)
            values.setflags(write=False)
            object.__setattr__(self, "times" + tag, times)
            object.__setattr__(self, "values" + tag, values)


def observe(latent: LatentPair, T, delta) -> ObservationSet:
    """Package a latent pair as an observation set with analysis horizon T."""
    if not isinstance(latent, LatentPair):
        raise StructuralError(f"latent must be a LatentPair, got {type(latent).__name__}")
    return ObservationSet(
        times1=latent.times1,
        values1=latent.values1,
        times2=latent.times2,
        values2=latent.values2,
        T=T,
        delta=delta,
    )


@dataclass(frozen=True)
class Diagnostics:
    """Finite-sample sampling-condition statistics; see module docstring."""

    b2_ratio_1: float
    b2_ratio_2: float
    b3_ratio_1: float
    b3_ratio_2: float
    b4_value: float
    r_n: float


def diagnostics(times1, times2, h1, h2, T, epsilon=None, mu=0.05, v_n=None) -> Diagnostics:
    """Sampling-condition statistics for a pair of observation-time lists.

    ``epsilon`` defaults to T/10.  ``v_n`` is the rate parameter of the
    scheme under study (for example ``n^-(1-xi)`` for equidistant designs)
    and must be supplied to obtain ``b4_value``; it has no default because it
    is a property of the design, not of one sample.

    Conventions: a component with no interval both ending at or before T and
    starting at or after epsilon contributes an empty (zero) numerator to its
    b2 ratio; a b3 denominator over an empty index set yields ``inf``.
    """
    t1 = as_float_array(times1, "times1")
    t2 = as_float_array(times2, "times2")
    for arr, name in ((t1, "times1"), (t2, "times2")):
        check_strictly_increasing(arr, name)
        if arr.size < 2:
            raise StructuralError(f"{name} needs at least two points")
    h1 = HurstParam(h1)
    h2 = HurstParam(h2)
    t_horizon = check_finite_scalar(T, "T")
    if t_horizon <= 0.0:
        raise DomainError(f"T must be positive, got {t_horizon}")
    epsilon = t_horizon / 10.0 if epsilon is None else check_finite_scalar(epsilon, "epsilon")
    if not 0.0 < epsilon < t_horizon:
        raise DomainError(f"epsilon must lie in (0, T), got {epsilon}")
    mu = check_finite_scalar(mu, "mu")
    if mu <= 0.0:
        raise DomainError(f"mu must be positive, got {mu}")
    if v_n is not None:
        v_n = check_finite_scalar(v_n, "v_n")
        if v_n <= 0.0:
            raise DomainError(f"v_n must be positive, got {v_n}")

    kap = h1 + h2
    lengths = [np.diff(t1), np.diff(t2)]
    r_n = float(max(lengths[0].max(), lengths[1].max()))

    # denominator shared by both b2 ratios: all intervals of both components
    denom = math.sqrt(float(np.sum(lengths[0] ** (2.0 * h1)))) * math.sqrt(
        float(np.sum(lengths[1] ** (2.0 * h2)))
    )

    b2 = []
    b3 = []
    for times, lens, h in ((t1, lengths[0], h1), (t2, lengths[1], h2)):
        right = times[1:]
        left = times[:-1]
        eligible = right <= t_horizon
        interior = eligible & (left >= epsilon)
        b2.append(float(np.sum(lens[interior] ** kap)) / denom)
        restricted = float(np.sum(lens[eligible] ** (2.0 * h)))
        if restricted == 0.0:
            b3.append(math.inf)
        else:
            b3.append(r_n ** (2.0 * h - 1.0 + mu) / restricted)

    if v_n is None:
        b4 = math.nan
    else:
        count = (t1.size - 1) + (t2.size - 1)
        b4 = v_n ** (2.0 - max(h1, h2)) * count

    return Diagnostics(
        b2_ratio_1=b2[0],
        b2_ratio_2=b2[1],
        b3_ratio_1=b3[0],
        b3_ratio_2=b3[1],
        b4_value=b4,
        r_n=r_n,
    )


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Candidate-shift grid inside (-delta, delta), always containing 0.

    ``rho_n`` is the covering radius: every admissible shift is within
    ``rho_n`` of some grid point.  ``v_n`` records the rate parameter the
    grid was built from (the step itself for plain affine grids).
    """

    points: np.ndarray
    rho_n: float
    v_n: float

    def __post_init__(self):
        points = as_float_array(self.points, "grid points")
        check_strictly_increasing(points, "grid points")
        if points.size == 0 or not np.any(points == 0.0):
            raise DomainError("grid must contain 0")
        points.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "rho_n", check_finite_scalar(self.rho_n, "rho_n"))
        object.__setattr__(self, "v_n", check_finite_scalar(self.v_n, "v_n"))

    @property
    def step(self) -> float:
        """Smallest spacing between adjacent grid points."""
        if self.points.size < 2:
            return math.inf
        return float(np.diff(self.points).min())


def build_grid(variant: str, delta, *, step=None, v_n=None, h1=None, h2=None, epsilon_exp=0.0) -> GridSpec:
    """Affine candidate grid {k step : |k| <= kmax} inside (-delta, delta).

    ``variant="affine"`` takes the step directly; ``variant="rate_grid"``
    derives it from a rate parameter as ``step = v_n^(2 - max(h1,h2) + epsilon_exp)``.
    ``kmax`` is the largest integer with ``kmax * step < delta``, so the grid
    is symmetric, contains 0, and stays inside the open interval; the
    recorded covering radius accounts for the uncovered margin next to
    ``+-delta`` when the last grid point falls short of it.
    """
    delta = check_finite_scalar(delta, "delta")
    if delta <= 0.0:
        raise DomainError(f"delta must be positive, got {delta}")
    if variant == "affine":
        if step is None:
            raise DomainError("affine grid requires a step")
        step = check_finite_scalar(step, "step")
        rate = step
    elif variant == "rate_grid":
        if v_n is None or h1 is None or h2 is None:
            raise DomainError("rate_grid requires v_n, h1 and h2")
        rate = check_finite_scalar(v_n, "v_n")
        if not 0.0 < rate < 1.0:
            raise DomainError(f"v_n must lie in (0, 1), got {rate}")
        exponent = 2.0 - max(HurstParam(h1), HurstParam(h2)) + check_finite_scalar(
            epsilon_exp, "epsilon_exp"
        )
        step = rate**exponent
    else:
        raise DomainError(f"grid variant must be 'affine' or 'rate_grid', got {variant!r}")

    if step <= 0.0:
        raise DomainError(f"grid step must be positive, got {step}")
    if step >= 2.0 * delta:
        raise DomainError(
            f"grid step {step} cannot cover (-delta, delta) with delta={delta}: step must be "
            "smaller than 2 delta"
        )

    kmax = max(0, math.ceil(delta / step) - 1)
    while kmax > 0 and kmax * step >= delta:  # guard float rounding at the edge
        kmax -= 1
    points = step * np.arange(-kmax, kmax + 1)
    rho_n = max(0.5 * step, delta - kmax * step)
    return GridSpec(points=points, rho_n=rho_n, v_n=rate)
