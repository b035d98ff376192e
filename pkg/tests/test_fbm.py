"""Kernel, covariance, and sampler tests.

Frozen reference values were computed with 50-digit mpmath arithmetic from
the defining integrals (regularized incomplete-Beta evaluation of the kernel
integral; exact diagonal-split reduction of the cross-covariance double
integral, cross-checked against direct high-precision quadrature).
"""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import IntegrationWarning, quad
from scipy.special import betaln

from leadlag import (
    CorrelatedFbmSpec,
    DomainError,
    DriverGrid,
    HurstParam,
    StructuralError,
    cross_covariance,
    fbm_covariance,
    normalization_constant,
    simulate_fbm_pair,
    volterra_kernel,
)
from leadlag.fbm import _kernel_series

# c_H = sqrt(H(2H-1)/Beta(2-2H, H-1/2))
NORMALIZATION = {
    0.55: 0.052216623880502220727,
    0.6: 0.10760051841318071863,
    0.65: 0.163912781402141256,
    0.7: 0.21836182617678251758,
    0.75: 0.26741115875799758103,
    0.8: 0.30642297184726850475,
    0.9: 0.32448825925734100591,
}

# (h, t, s, K_h(t, s))
KERNEL = [
    (0.7, 1.0, 0.5, 0.97714049739361676047),
    (0.6, 2.0, 0.3, 1.1662673967175405708),
    (0.75, 1.5, 1.2, 0.80105162604793036776),
    (0.55, 1.0, 0.01, 1.0750059476563273009),
    (0.9, 3.0, 2.9, 0.32421789495286707179),
    (0.8, 1.0, 1e-6, 32.235683642587032548),
    (0.7, 2.5, 2.499, 0.27425371197786778939),
    (0.6, 1.0, 0.999, 0.53928496789967443165),
    (0.65, 1.7, 0.85, 1.083877474274830553),
]

# (h1, h2, rho, t, s, E{B^1_t B^2_s})
CROSS = [
    (0.6, 0.7, 1.0, 1.0, 1.0, 0.99078327422321266762),
    (0.6, 0.7, 0.5, 1.0, 0.5, 0.22956753884676936342),
    (0.6, 0.7, 0.5, 0.5, 1.0, 0.26845896621642598147),
    (0.55, 0.9, -0.3, 0.7, 1.3, -0.24240241150789746863),
    (0.8, 0.6, 0.25, 1.2, 0.4, 0.12692091714225029661),
    (0.75, 0.75, 0.9, 1.0, 0.6, 0.54529910492913885585),
]


class TestHurstParam:
    def test_accepts_open_interval(self):
        assert float(HurstParam(0.75)) == 0.75
        assert isinstance(HurstParam(0.75), float)

    @pytest.mark.parametrize("bad", [0.5, 1.0, 0.3, 1.2, -0.7, float("nan"), float("inf")])
    def test_rejects_outside_open_interval(self, bad):
        with pytest.raises(DomainError):
            HurstParam(bad)


class TestNormalizationConstant:
    def test_reference_values(self):
        for h, expected in NORMALIZATION.items():
            assert_allclose(normalization_constant(h), expected, rtol=1e-13)

    def test_defining_identity(self):
        # c_h^2 B(2-2h, h-1/2) = h(2h-1)
        for h in np.arange(0.55, 0.96, 0.05):
            c = normalization_constant(h)
            lhs = c * c * math.exp(betaln(2.0 - 2.0 * h, h - 0.5))
            assert_allclose(lhs, h * (2.0 * h - 1.0), rtol=1e-12)


class TestVolterraKernel:
    def test_reference_values(self):
        for h, t, s, expected in KERNEL:
            assert_allclose(volterra_kernel(h, t, s), expected, rtol=5e-11)

    def test_series_route_matches_reference(self):
        for h, t, s, expected in KERNEL:
            assert_allclose(_kernel_series(h, t, s), expected, rtol=1e-12)

    def test_zero_outside_support(self):
        assert volterra_kernel(0.7, 1.0, 1.0) == 0.0
        assert volterra_kernel(0.7, 1.0, 1.5) == 0.0
        assert volterra_kernel(0.7, 1.0, 0.0) == 0.0
        assert volterra_kernel(0.7, 0.0, 0.0) == 0.0

    def test_zero_region_randomized(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            h = rng.uniform(0.51, 0.99)
            t = rng.uniform(0.0, 3.0)
            s = t + rng.uniform(0.0, 2.0)
            assert volterra_kernel(h, t, s) == 0.0

    def test_self_similarity(self):
        # K_h(ct, cs) = c^(h-1/2) K_h(t, s)
        rng = np.random.default_rng(11)
        for _ in range(100):
            h = rng.uniform(0.51, 0.99)
            t = rng.uniform(0.1, 3.0)
            s = t * rng.uniform(0.01, 0.99)
            c = rng.uniform(0.5, 4.0)
            assert_allclose(
                volterra_kernel(h, c * t, c * s),
                c ** (h - 0.5) * volterra_kernel(h, t, s),
                rtol=1e-10,
            )

    def test_matches_adaptive_quadrature_on_raw_integrand(self):
        for h, t, s, _ in KERNEL[:4]:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", IntegrationWarning)
                raw, _ = quad(
                    lambda u: (u - s) ** (h - 1.5) * u ** (h - 0.5),
                    s,
                    t,
                    epsabs=1e-13,
                    epsrel=1e-12,
                    limit=300,
                )
            oracle = normalization_constant(h) * s ** (0.5 - h) * raw
            assert_allclose(volterra_kernel(h, t, s), oracle, rtol=1e-8)

    def test_series_and_quadrature_routes_agree(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            h = rng.uniform(0.51, 0.99)
            t = rng.uniform(0.05, 4.0)
            s = t * rng.uniform(1e-4, 0.9999)
            assert_allclose(_kernel_series(h, t, s), volterra_kernel(h, t, s), rtol=1e-9)

    def test_rejects_negative_times(self):
        with pytest.raises(DomainError):
            volterra_kernel(0.7, -1.0, 0.5)
        with pytest.raises(DomainError):
            volterra_kernel(0.7, 1.0, -0.5)


class TestFbmCovariance:
    def test_closed_form(self):
        assert fbm_covariance(0.7, 1.0, 1.0) == 1.0
        assert fbm_covariance(0.7, 0.0, 2.3) == 0.0
        assert_allclose(fbm_covariance(0.7, 2.0, 1.0), 1.3195079107728942594, rtol=1e-15)

    def test_variance_is_power_law(self):
        for h in (0.55, 0.7, 0.9):
            for t in (0.25, 1.0, 2.0):
                assert_allclose(fbm_covariance(h, t, t), t ** (2.0 * h), rtol=1e-14)

    @given(
        h=st.floats(0.501, 0.999),
        t=st.floats(0.0, 5.0),
        s=st.floats(0.0, 5.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_symmetric_and_cauchy_schwarz(self, h, t, s):
        a = fbm_covariance(h, t, s)
        assert a == fbm_covariance(h, s, t)
        bound = math.sqrt(fbm_covariance(h, t, t) * fbm_covariance(h, s, s))
        assert a <= bound + 1e-12


def _brute_force_cross(h1, h2, rho, t, s):
    """Independent 2-D quadrature of the defining double integral.

    Inner integral over u splits at the interior |u-v| singularity; both
    levels are adaptive with endpoint-singularity extrapolation. Shares no
    code or identities with cross_covariance.
    """
    kap = h1 + h2
    b_lo = math.exp(betaln(h1 - 0.5, 2.0 - kap))
    b_hi = math.exp(betaln(h2 - 0.5, 2.0 - kap))

    def inner(v):
        if v <= 0.0:
            return 0.0

        def f(u):
            if u <= 0.0 or u == v:
                return 0.0  # integrable singular points, measure zero
            beta = b_lo if u < v else b_hi
            return beta * abs(u - v) ** (kap - 2.0) * u ** (h1 - h2) * v ** (h2 - h1)

        pts = [v] if v < t else None
        val, _ = quad(f, 0.0, t, points=pts, epsabs=1e-11, epsrel=1e-11, limit=200)
        return val

    val, _ = quad(inner, 0.0, s, epsabs=1e-10, epsrel=1e-10, limit=200)
    return rho * normalization_constant(h1) * normalization_constant(h2) * val


class TestCrossCovariance:
    def test_reference_values(self):
        for h1, h2, rho, t, s, expected in CROSS:
            assert_allclose(cross_covariance(h1, h2, rho, t, s), expected, rtol=1e-12)

    def test_zero_cases(self):
        assert cross_covariance(0.6, 0.7, 0.0, 1.0, 1.0) == 0.0
        assert cross_covariance(0.6, 0.7, 0.5, 0.0, 1.0) == 0.0
        assert cross_covariance(0.6, 0.7, 0.5, 1.0, 0.0) == 0.0

    def test_equal_hurst_reduces_to_marginal(self):
        grid = (0.25, 0.5, 1.0, 2.0)
        for h in (0.55, 0.6, 0.7, 0.8, 0.9):
            for t in grid:
                for s in grid:
                    assert_allclose(
                        cross_covariance(h, h, 1.0, t, s),
                        fbm_covariance(h, t, s),
                        rtol=1e-9,
                    )

    def test_rho_linearity(self):
        for h1, h2, _, t, s, _ in CROSS[:3]:
            full = cross_covariance(h1, h2, 1.0, t, s)
            assert cross_covariance(h1, h2, 0.5, t, s) == 0.5 * full
            assert cross_covariance(h1, h2, -1.0, t, s) == -full

    def test_symmetry_under_joint_swap(self):
        for h1, h2, rho, t, s, _ in CROSS:
            assert_allclose(
                cross_covariance(h1, h2, rho, t, s),
                cross_covariance(h2, h1, rho, s, t),
                rtol=1e-10,
            )

    def test_matches_brute_force_double_quadrature(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            for h1, h2, rho, t, s, _ in (CROSS[0], CROSS[3], CROSS[4]):
                assert_allclose(
                    cross_covariance(h1, h2, rho, t, s),
                    _brute_force_cross(h1, h2, rho, t, s),
                    rtol=1e-4,
                )

    def test_matches_kernel_product_integral(self):
        # E{B^1_t B^2_s} = rho int_0^(t^s) K_h1(t,u) K_h2(s,u) du: the same
        # quantity through the Wiener-integral route the sampler relies on.
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            for h1, h2, rho, t, s, _ in CROSS:
                val, _ = quad(
                    lambda u: volterra_kernel(h1, t, u) * volterra_kernel(h2, s, u),
                    0.0,
                    min(t, s),
                    epsabs=1e-13,
                    epsrel=1e-12,
                    limit=300,
                )
                assert_allclose(cross_covariance(h1, h2, rho, t, s), rho * val, rtol=1e-9)

    @given(
        h1=st.floats(0.52, 0.98),
        h2=st.floats(0.52, 0.98),
        rho=st.floats(-1.0, 1.0),
        t=st.floats(0.1, 2.0),
        s=st.floats(0.1, 2.0),
    )
    @settings(max_examples=40, deadline=None)
    def test_cauchy_schwarz(self, h1, h2, rho, t, s):
        c = cross_covariance(h1, h2, rho, t, s)
        bound = math.sqrt(fbm_covariance(h1, t, t) * fbm_covariance(h2, s, s))
        assert abs(c) <= abs(rho) * bound * (1.0 + 1e-9)

    def test_rejects_bad_rho(self):
        with pytest.raises(DomainError):
            cross_covariance(0.6, 0.7, 1.5, 1.0, 1.0)


class TestSpecValidation:
    def test_accepts_valid(self):
        spec = CorrelatedFbmSpec(h1=0.6, h2=0.7, rho=0.5, horizon=2.0)
        assert spec.h1 == 0.6 and spec.horizon == 2.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(h1=0.5, h2=0.7, rho=0.5, horizon=1.0),
            dict(h1=0.6, h2=1.0, rho=0.5, horizon=1.0),
            dict(h1=0.6, h2=0.7, rho=1.5, horizon=1.0),
            dict(h1=0.6, h2=0.7, rho=0.5, horizon=0.0),
            dict(h1=0.6, h2=0.7, rho=0.5, horizon=-1.0),
        ],
    )
    def test_rejects_invalid(self, kwargs):
        with pytest.raises(DomainError):
            CorrelatedFbmSpec(**kwargs)

    def test_driver_grid_validation(self):
        grid = DriverGrid(m=8, horizon=2.0)
        assert grid.step == 0.25
        assert_allclose(grid.midpoints(), 0.25 * (np.arange(8) + 0.5))
        with pytest.raises(DomainError):
            DriverGrid(m=1, horizon=1.0)
        with pytest.raises(DomainError):
            DriverGrid(m=4.5, horizon=1.0)
        with pytest.raises(DomainError):
            DriverGrid(m=4, horizon=0.0)

    def test_driver_default_scales_with_horizon(self):
        assert DriverGrid.default(1.0).m == 4096
        assert DriverGrid.default(2.0).m == 8192
        assert DriverGrid.default(1e-9).m == 2


class TestSimulateFbmPair:
    SPEC = CorrelatedFbmSpec(h1=0.6, h2=0.7, rho=0.5, horizon=1.0)
    DRIVER = DriverGrid(m=512, horizon=1.0)
    TIMES = np.array([0.0, 0.25, 0.5, 0.75, 1.0])

    def test_deterministic_given_seed(self):
        a = simulate_fbm_pair(self.SPEC, self.TIMES, self.TIMES, self.DRIVER, seed=42)
        b = simulate_fbm_pair(self.SPEC, self.TIMES, self.TIMES, self.DRIVER, seed=42)
        assert np.array_equal(a.values1, b.values1)
        assert np.array_equal(a.values2, b.values2)

    def test_seed_changes_draw(self):
        a = simulate_fbm_pair(self.SPEC, self.TIMES, self.TIMES, self.DRIVER, seed=42)
        b = simulate_fbm_pair(self.SPEC, self.TIMES, self.TIMES, self.DRIVER, seed=43)
        assert not np.array_equal(a.values1, b.values1)

    def test_starts_at_zero(self):
        out = simulate_fbm_pair(self.SPEC, self.TIMES, self.TIMES, self.DRIVER, seed=1)
        assert out.values1[0] == 0.0
        assert out.values2[0] == 0.0

    def test_full_correlation_equal_hurst_gives_identical_paths(self):
        spec = CorrelatedFbmSpec(h1=0.7, h2=0.7, rho=1.0, horizon=1.0)
        out = simulate_fbm_pair(spec, self.TIMES, self.TIMES, self.DRIVER, seed=5)
        assert np.array_equal(out.values1, out.values2)

    def test_distinct_target_times_allowed(self):
        t1 = np.array([0.1, 0.6])
        t2 = np.array([0.2, 0.4, 0.9])
        out = simulate_fbm_pair(self.SPEC, t1, t2, self.DRIVER, seed=9)
        assert out.values1.shape == (2,)
        assert out.values2.shape == (3,)
        assert np.array_equal(out.times1, t1)
        assert np.array_equal(out.times2, t2)

    def test_default_driver_used_when_omitted(self):
        out = simulate_fbm_pair(self.SPEC, self.TIMES, self.TIMES, seed=3)
        assert out.values1.shape == self.TIMES.shape

    def test_warns_when_driver_too_coarse(self):
        coarse = DriverGrid(m=4, horizon=1.0)
        dense = np.linspace(0.0, 1.0, 101)
        with pytest.warns(RuntimeWarning, match="driver step"):
            simulate_fbm_pair(self.SPEC, dense, dense, coarse, seed=1)

    def test_rejects_horizon_mismatch(self):
        bad = DriverGrid(m=512, horizon=2.0)
        with pytest.raises(DomainError):
            simulate_fbm_pair(self.SPEC, self.TIMES, self.TIMES, bad, seed=1)

    def test_rejects_times_outside_horizon(self):
        with pytest.raises(DomainError):
            simulate_fbm_pair(self.SPEC, np.array([0.5, 1.5]), self.TIMES, self.DRIVER, seed=1)

    def test_rejects_unsorted_times(self):
        with pytest.raises(StructuralError):
            simulate_fbm_pair(self.SPEC, np.array([0.5, 0.25]), self.TIMES, self.DRIVER, seed=1)

    def test_moments_match_covariance_oracles(self):
        # Light Monte Carlo sanity check; the full 3-standard-error sweep at
        # m=4096 over 2000 replications runs in the acceptance suite.
        spec = CorrelatedFbmSpec(h1=0.6, h2=0.7, rho=0.5, horizon=1.0)
        driver = DriverGrid(m=2048, horizon=1.0)
        times = np.array([0.5, 1.0])
        reps = 600
        v1 = np.empty((reps, 2))
        v2 = np.empty((reps, 2))
        for r in range(reps):
            out = simulate_fbm_pair(spec, times, times, driver, seed=10_000 + r)
            v1[r] = out.values1
            v2[r] = out.values2

        for j, t in enumerate(times):
            for h, v in ((0.6, v1), (0.7, v2)):
                target = fbm_covariance(h, t, t)
                sample = float(np.mean(v[:, j] ** 2))
                se = target * math.sqrt(2.0 / reps)
                assert abs(sample - target) < 4.0 * se

        target = cross_covariance(0.6, 0.7, 0.5, 1.0, 0.5)
        sample = float(np.mean(v1[:, 1] * v2[:, 0]))
        se = math.sqrt(
            (fbm_covariance(0.6, 1.0, 1.0) * fbm_covariance(0.7, 0.5, 0.5) + target**2) / reps
        )
        assert abs(sample - target) < 4.0 * se
