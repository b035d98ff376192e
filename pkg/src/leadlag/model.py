"""Lead-lag latent price models on top of correlated fractional drivers.

The two-component latent process is, for a shift ``theta >= 0``::

    X^1_t = x0_1 + sigma_1 B^1_{t+theta} + A^1_t
    X^2_t = x0_2 + sigma_2 B^2_t         + A^2_t

and for ``theta < 0`` the mirrored form shifts the second component instead
(``X^2`` reads ``B^2_{t-theta}``).  Component labels never swap; the sign of
``theta`` alone encodes which component leads.  Drifts ``A^l`` are additive
Lipschitz processes; the fractional Black-Scholes log-price drift
``mu t - sigma^2 t^{2H} / 2`` appears as the ``wick`` variant.

``simulate_sde_euler`` additionally supports state-dependent drifts
``dX_t = b(t, X_t) dt + sigma dB_t`` by an explicit Euler recursion on a fine
grid; the fractional increments enter exactly, so the only discretization
error is the drift rectangle rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._util import as_float_array, check_finite_scalar, check_strictly_increasing
from .errors import DomainError, NumericsError, StructuralError
from .fbm import CorrelatedFbmSpec, DriverGrid, HurstParam, simulate_fbm_pair
from .rng import seed_fingerprint

__all__ = [
    "DriftSpec",
    "LeadLagModel",
    "LatentPair",
    "simulate_latent_pair",
    "simulate_sde_euler",
]

_DRIFT_KINDS = ("none", "linear", "wick", "callback")


@dataclass(frozen=True)
class DriftSpec:
    """Additive drift A_t, or a state-dependent rate b(t, x) for Euler paths.

    Use the constructors: ``DriftSpec.none()``, ``DriftSpec.linear(mu)``,
    ``DriftSpec.wick(mu, sigma, h)``, ``DriftSpec.callback(fn)``.  The
    ``wick`` variant is the fractional Black-Scholes log-price drift
    ``mu t - sigma^2 t^{2H} / 2``.  Callbacks take ``(t, x)`` and must be
    Lipschitz; ``lipschitz_bound`` is declarative, used only for diagnostics.
    """

    kind: str
    mu: float = 0.0
    sigma: float = 0.0
    h: float | None = None
    fn: Callable[[float, float], float] | None = field(default=None, compare=False)
    lipschitz_bound: float | None = None

    def __post_init__(self):
        if self.kind not in _DRIFT_KINDS:
            raise DomainError(f"drift kind must be one of {_DRIFT_KINDS}, got {self.kind!r}")
        if self.kind in ("linear", "wick"):
            object.__setattr__(self, "mu", check_finite_scalar(self.mu, "drift mu"))
        if self.kind == "wick":
            object.__setattr__(self, "sigma", check_finite_scalar(self.sigma, "drift sigma"))
            object.__setattr__(self, "h", float(HurstParam(self.h)))
        if self.kind == "callback" and not callable(self.fn):
            raise StructuralError("callback drift requires a callable fn(t, x)")

    @classmethod
    def none(cls) -> "DriftSpec":
        return cls(kind="none")

    @classmethod
    def linear(cls, mu) -> "DriftSpec":
        return cls(kind="linear", mu=mu)

    @classmethod
    def wick(cls, mu, sigma, h) -> "DriftSpec":
        return cls(kind="wick", mu=mu, sigma=sigma, h=h)

    @classmethod
    def callback(cls, fn, lipschitz_bound=None) -> "DriftSpec":
        return cls(kind="callback", fn=fn, lipschitz_bound=lipschitz_bound)

    def additive(self, times: np.ndarray, x0: float = 0.0) -> np.ndarray:
        """The drift process A_t at the given times.

        Callback drifts are evaluated at (t, x0): for a fixed start value
        that is a deterministic Lipschitz function of time, which is what the
        additive model requires.
        """
        t = np.asarray(times, dtype=np.float64)
        if self.kind == "none":
            return np.zeros_like(t)
        if self.kind == "linear":
            return self.mu * t
        if self.kind == "wick":
            return self.mu * t - 0.5 * self.sigma * self.sigma * t ** (2.0 * self.h)
        return np.array([self.fn(float(u), float(x0)) for u in t], dtype=np.float64)

    def rate(self, t: float, x: float) -> float:
        """Instantaneous drift b(t, x); the time derivative of the additive form."""
        if self.kind == "none":
            return 0.0
        if self.kind == "linear":
            return self.mu
        if self.kind == "wick":
            return self.mu - self.h * self.sigma * self.sigma * t ** (2.0 * self.h - 1.0)
        return float(self.fn(float(t), float(x)))


@dataclass(frozen=True)
class LeadLagModel:
    """Latent pair specification: shift, scales, drifts, and the fBM law.

    ``theta`` must lie in the open interval (-delta, delta) and the driving
    fBM pair must be defined out to ``horizon_T + 2 delta`` so every shifted
    evaluation time stays in range for both signs of ``theta``.
    """

    theta: float
    delta: float
    sigma1: float
    sigma2: float
    drift1: DriftSpec
    drift2: DriftSpec
    x0_1: float
    x0_2: float
    fbm: CorrelatedFbmSpec
    horizon_T: float

    def __post_init__(self):
        theta = check_finite_scalar(self.theta, "theta")
        delta = check_finite_scalar(self.delta, "delta")
        if delta <= 0.0:
            raise DomainError(f"delta must be positive, got {delta}")
        if abs(theta) >= delta:
            raise DomainError(f"|theta| must be smaller than delta, got theta={theta}, delta={delta}")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "delta", delta)
        for name in ("sigma1", "sigma2"):
            v = check_finite_scalar(getattr(self, name), name)
            if v == 0.0:
                raise DomainError(f"{name} must be nonzero")
            object.__setattr__(self, name, v)
        for name in ("x0_1", "x0_2"):
            object.__setattr__(self, name, check_finite_scalar(getattr(self, name), name))
        for name in ("drift1", "drift2"):
            if not isinstance(getattr(self, name), DriftSpec):
                raise StructuralError(f"{name} must be a DriftSpec")
        if not isinstance(self.fbm, CorrelatedFbmSpec):
            raise StructuralError("fbm must be a CorrelatedFbmSpec")
        horizon_t = check_finite_scalar(self.horizon_T, "horizon_T")
        if horizon_t <= 0.0:
            raise DomainError(f"horizon_T must be positive, got {horizon_t}")
        object.__setattr__(self, "horizon_T", horizon_t)
        needed = horizon_t + 2.0 * delta
        if self.fbm.horizon < needed:
            raise DomainError(
                f"fbm horizon {self.fbm.horizon} too short: shifted evaluation needs at least "
                f"horizon_T + 2 delta = {needed}"
            )


@dataclass(frozen=True, eq=False)
class LatentPair:
    """Latent component paths observed at their own time grids."""

    times1: np.ndarray
    values1: np.ndarray
    times2: np.ndarray
    values2: np.ndarray
    seed: int

    def __post_init__(self):
        for times, values, tag in (
            (self.times1, self.values1, "1"),
            (self.times2, self.values2, "2"),
        ):
            check_strictly_increasing(times, f"times{tag}")
            if len(times) != len(values):
                raise StructuralError(
                    f"times{tag} and values{tag} length mismatch: {len(times)} vs {len(values)}"
                )


def simulate_latent_pair(
    model: LeadLagModel,
    times1,
    times2,
    seed: int,
    *,
    driver: DriverGrid | None = None,
) -> LatentPair:
    """Sample the latent pair at the requested observation times.

    For ``theta >= 0`` the fractional driver of component 1 is read at
    ``times1 + theta`` and component 2 at ``times2``; ``theta < 0`` mirrors
    the shift onto component 2.  Drift and start values are then added at the
    original (unshifted) times.  Deterministic given (model, times, driver,
    seed).
    """
    if not isinstance(model, LeadLagModel):
        raise StructuralError(f"model must be a LeadLagModel, got {type(model).__name__}")
    t1 = as_float_array(times1, "times1")
    t2 = as_float_array(times2, "times2")
    limit = model.horizon_T + model.delta
    for arr, name in ((t1, "times1"), (t2, "times2")):
        check_strictly_increasing(arr, name)
        if arr.size and (arr[0] < 0.0 or arr[-1] > limit):
            raise DomainError(
                f"{name} must lie within [0, horizon_T + delta] = [0, {limit}], "
                f"got range [{arr[0]}, {arr[-1]}]"
            )

    if model.theta >= 0.0:
        fbm_times1, fbm_times2 = t1 + model.theta, t2
    else:
        fbm_times1, fbm_times2 = t1, t2 - model.theta
    paths = simulate_fbm_pair(model.fbm, fbm_times1, fbm_times2, driver, seed=seed)

    values1 = model.x0_1 + model.sigma1 * paths.values1 + model.drift1.additive(t1, model.x0_1)
    values2 = model.x0_2 + model.sigma2 * paths.values2 + model.drift2.additive(t2, model.x0_2)
    for values, tag in ((values1, "1"), (values2, "2")):
        if not np.all(np.isfinite(values)):
            raise NumericsError(f"drift{tag} produced non-finite latent values")
    return LatentPair(
        times1=t1, values1=values1, times2=t2, values2=values2, seed=seed_fingerprint(seed)
    )


def simulate_sde_euler(
    b,
    sigma: float,
    x0: float,
    h,
    fine_times,
    seed: int,
    *,
    driver: DriverGrid | None = None,
) -> np.ndarray:
    """Explicit Euler path for dX_t = b(t, X_t) dt + sigma dB_t, B fractional.

    ``b`` is a DriftSpec (its rate form is used) or a plain callable
    ``(t, x) -> drift``.  The recursion is
    ``X_{k+1} = X_k + b(t_k, X_k) dt_k + sigma (B_{t_{k+1}} - B_{t_k})``
    with the fractional increments taken exactly from one seeded driver, so
    runs at different step sizes with the same seed and driver share their
    noise. Returns the path on ``fine_times``.
    """
    if isinstance(b, DriftSpec):
        rate = b.rate
    elif callable(b):
        rate = b
    else:
        raise StructuralError("b must be a DriftSpec or a callable (t, x) -> drift")
    sigma = check_finite_scalar(sigma, "sigma")
    x0 = check_finite_scalar(x0, "x0")
    h = HurstParam(h)
    times = as_float_array(fine_times, "fine_times")
    check_strictly_increasing(times, "fine_times")
    if times.size < 2:
        raise StructuralError("fine_times needs at least two points")
    if times[0] != 0.0:
        raise DomainError(f"fine_times must start at 0, got {times[0]}")

    if sigma == 0.0:
        increments = np.zeros(times.size - 1)
    else:
        spec = CorrelatedFbmSpec(h1=float(h), h2=float(h), rho=0.0, horizon=float(times[-1]))
        paths = simulate_fbm_pair(spec, times, times[:1], driver, seed=seed)
        increments = sigma * np.diff(paths.values1)

    out = np.empty(times.size)
    out[0] = x0
    x = float(x0)
    for k in range(times.size - 1):
        drift = rate(float(times[k]), x)
        if not math.isfinite(drift):
            raise NumericsError(
                f"drift evaluation returned non-finite value {drift} at step {k} (t={times[k]})"
            )
        x = x + drift * (times[k + 1] - times[k]) + increments[k]
        out[k + 1] = x
    return out
