"""Special-function and quadrature tests.

Reference values come from independent routes: elementary closed forms,
scipy's general-purpose implementations, and a weighted-quadrature
evaluation of the Euler integral representation — never from the code
under test.
"""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special
from hypothesis import given, settings
from hypothesis import strategies as st

from bordernet.errors import ConvergenceError, ParameterError
from bordernet.specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    erfc,
    erfcx,
    hyp2f1_1b,
    integrate_finite,
    integrate_semiinfinite,
)

# Frozen independent references (30-digit arbitrary-precision computation,
# rounded to double).
LN2 = 0.6931471805599453
ATAN3_OVER_3 = 0.41634859079941816
F_08_M50 = 0.10726533174758609  # 2F1(1, 0.8; 1.8; -50)
ERFC_1 = 0.15729920705028513
E_TIMES_E1_1 = 0.5963473623231941  # e * E1(1) = integral of e^-x/(1+x)
ONE_MINUS_11E10 = 0.9995006007726127  # integral of t e^-t over [0, 10]


def euler_oracle(b: float, z: float) -> float:
    """2F1(1, b; b+1; z) = b * int_0^1 t^(b-1)/(1 - z t) dt.

    Evaluated with QUADPACK's algebraic-weight rule (the t^(b-1) factor
    is handled analytically by the rule), a route sharing nothing with
    the Pfaff-series implementation.
    """
    value, _ = scipy.integrate.quad(
        lambda t: 1.0 / (1.0 - z * t), 0.0, 1.0,
        weight="alg", wvar=(b - 1.0, 0.0), epsabs=1e-14, epsrel=1e-13, limit=200,
    )
    return b * value


class TestHyp2f1:
    def test_b_one_elementary_log(self):
        assert hyp2f1_1b(1.0, -1.0) == pytest.approx(LN2, rel=1e-14)

    def test_b_half_elementary_arctan(self):
        # 2F1(1, 1/2; 3/2; -z^2) = arctan(z)/z with z = 3
        assert hyp2f1_1b(0.5, -9.0) == pytest.approx(ATAN3_OVER_3, rel=1e-12)

    def test_deep_argument_against_euler_integral(self):
        assert hyp2f1_1b(0.8, -50.0) == pytest.approx(F_08_M50, rel=1e-10)

    def test_z_zero_is_one(self):
        assert hyp2f1_1b(0.37, 0.0) == 1.0

    def test_grid_against_euler_oracle(self):
        bs = np.linspace(0.05, 1.0, 20)
        zs = -np.geomspace(1e-6, 1e6, 20)
        worst = 0.0
        for b in bs:
            for z in zs:
                ours = hyp2f1_1b(float(b), float(z))
                ref = euler_oracle(float(b), float(z))
                worst = max(worst, abs(ours - ref) / abs(ref))
        assert worst < 1e-10

    def test_against_scipy_general_hyp2f1(self):
        for b in (0.2, 0.5, 0.8, 1.0):
            for z in (-0.5, -5.0, -500.0):
                ref = float(scipy.special.hyp2f1(1.0, b, b + 1.0, z))
                assert hyp2f1_1b(b, z) == pytest.approx(ref, rel=1e-10)

    @given(
        b=st.floats(min_value=0.05, max_value=1.0),
        z1=st.floats(min_value=-1e4, max_value=-1e-6),
        z2=st.floats(min_value=-1e4, max_value=-1e-6),
    )
    @settings(max_examples=60, deadline=None)
    def test_monotone_increasing_in_z(self, b, z1, z2):
        lo, hi = min(z1, z2), max(z1, z2)
        if lo == hi:
            return
        assert hyp2f1_1b(b, lo) <= hyp2f1_1b(b, hi) + 1e-12

    def test_values_in_unit_interval_for_negative_z(self):
        for b in (0.1, 0.5, 1.0):
            for z in (-1e-3, -1.0, -1e3):
                value = hyp2f1_1b(b, z)
                assert 0.0 < value <= 1.0

    def test_rejects_bad_parameters(self):
        with pytest.raises(ParameterError):
            hyp2f1_1b(0.0, -1.0)
        with pytest.raises(ParameterError):
            hyp2f1_1b(1.5, -1.0)
        with pytest.raises(ParameterError):
            hyp2f1_1b(0.5, 0.5)  # positive z outside supported domain
        with pytest.raises(ParameterError):
            hyp2f1_1b(0.5, math.nan)


class TestErfcFamily:
    def test_erfc_known_value(self):
        assert erfc(1.0) == pytest.approx(ERFC_1, rel=1e-15)

    def test_erfc_symmetry(self):
        assert erfc(0.0) == 1.0
        assert erfc(-1.0) == pytest.approx(2.0 - ERFC_1, rel=1e-15)

    def test_erfcx_large_argument_asymptote(self):
        # erfcx(x) -> 1/(x sqrt(pi)); naive exp(x^2) erfc(x) overflows here
        assert erfcx(100.0) == pytest.approx(
            1.0 / (100.0 * math.sqrt(math.pi)), rel=1e-4
        )
        assert erfcx(1e8) == pytest.approx(1.0 / (1e8 * math.sqrt(math.pi)), rel=1e-8)

    def test_erfcx_identity_with_erfc(self):
        for x in np.linspace(0.0, 5.0, 26):
            assert erfcx(float(x)) * math.exp(-float(x) ** 2) == pytest.approx(
                erfc(float(x)), abs=1e-12
            )

    def test_rejects_bad_arguments(self):
        with pytest.raises(ParameterError):
            erfcx(-0.5)
        with pytest.raises(ParameterError):
            erfc(math.inf)


class TestQuadrature:
    def test_finite_polynomial_exact(self):
        assert integrate_finite(lambda t: 3.0 * t * t, 0.0, 2.0) == pytest.approx(
            8.0, rel=1e-12
        )

    def test_finite_t_exp_decay(self):
        value = integrate_finite(lambda t: t * math.exp(-t), 0.0, 10.0)
        assert value == pytest.approx(ONE_MINUS_11E10, rel=1e-12)

    def test_empty_interval_is_zero(self):
        assert integrate_finite(lambda t: 1.0, 2.0, 2.0) == 0.0

    def test_semiinfinite_gaussian(self):
        value = integrate_semiinfinite(lambda x: math.exp(-x * x))
        assert value == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-10)

    def test_semiinfinite_rate_style_integrand(self):
        # survival function of ln(1 + Exp(1)): integral e^(1-e^x) dx = e E1(1)
        value = integrate_semiinfinite(lambda x: math.exp(-(math.expm1(x))))
        assert value == pytest.approx(E_TIMES_E1_1, rel=1e-10)

    def test_rejects_invalid_bounds(self):
        with pytest.raises(ParameterError):
            integrate_finite(lambda t: t, 1.0, 0.0)
        with pytest.raises(ParameterError):
            integrate_finite(lambda t: t, 0.0, math.inf)

    def test_nonconvergent_integrand_raises(self):
        spec = QuadratureSpec(abs_tol=1e-12, rel_tol=1e-12, max_subdivisions=3)
        with pytest.raises(ConvergenceError):
            integrate_finite(
                lambda t: math.sin(1.0 / (t + 1e-9)) / math.sqrt(t + 1e-12),
                0.0, 1.0, spec,
            )


class TestQuadratureSpec:
    def test_defaults(self):
        assert DEFAULT_QUADRATURE.abs_tol == 1e-10
        assert DEFAULT_QUADRATURE.rel_tol == 1e-10
        assert DEFAULT_QUADRATURE.max_subdivisions == 2000

    def test_validation(self):
        with pytest.raises(ParameterError):
            QuadratureSpec(abs_tol=0.0, rel_tol=1e-10, max_subdivisions=10)
        with pytest.raises(ParameterError):
            QuadratureSpec(abs_tol=1e-10, rel_tol=-1.0, max_subdivisions=10)
        with pytest.raises(ParameterError):
            QuadratureSpec(abs_tol=1e-10, rel_tol=1e-10, max_subdivisions=0)
