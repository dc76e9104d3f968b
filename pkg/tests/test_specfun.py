import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from weakbs.specfun import (EULER_GAMMA, LN2_MINUS_GAMMA, DomainError, SamplePlan, bessel_k0,
                            bessel_k1, green, green_cell_avg, ineq_ratios, lemma_ineq_constant,
                            one_minus_x_k1)

mpmath.mp.dps = 30
log_w = st.floats(min_value=math.log(1e-8), max_value=math.log(700.0))


def ref(order, w):
    return float(mpmath.besselk(order, w))


def test_euler_gamma_constant():
    assert EULER_GAMMA == pytest.approx(float(mpmath.euler), rel=1e-16)
    assert LN2_MINUS_GAMMA == pytest.approx(0.11593151565841244, rel=1e-15)


@pytest.mark.parametrize("order,fn", [(0, bessel_k0), (1, bessel_k1)])
def test_bessel_against_mpmath_log_grid(order, fn):
    ws = np.geomspace(1e-8, 700.0, 200)
    got = fn(ws)
    want = np.array([ref(order, w) for w in ws])
    assert np.max(np.abs(got / want - 1.0)) <= 1e-12


@given(log_w)
def test_bessel_k0_pointwise(lw):
    w = math.exp(lw)
    assert bessel_k0(w) == pytest.approx(ref(0, w), rel=1e-12)
    assert bessel_k1(w) == pytest.approx(ref(1, w), rel=1e-12)


def test_known_values():
    assert bessel_k0(1.0) == pytest.approx(0.42102443824070834, rel=1e-15)
    assert bessel_k1(1.0) == pytest.approx(0.6019072301972346, rel=1e-15)


def test_k0_small_argument_limit():
    w = 1e-9
    assert bessel_k0(w) + math.log(w) == pytest.approx(LN2_MINUS_GAMMA, abs=1e-12)


def test_k0_large_argument_asymptotics():
    w = 50.0
    assert bessel_k0(w) == pytest.approx(math.sqrt(math.pi / (2 * w)) * math.exp(-w), rel=0.02)


def test_k1_small_argument():
    assert 1e-9 * bessel_k1(1e-9) == pytest.approx(1.0, rel=1e-12)


def test_k1_integral_identity():
    val, _ = integrate.quad(lambda t: t * bessel_k0(t), 0.0, 1.0, epsabs=1e-14, epsrel=1e-13,
                            points=[1e-8, 1e-4])
    assert val == pytest.approx(1.0 - bessel_k1(1.0), abs=1e-10)
    assert one_minus_x_k1(1.0) == pytest.approx(val, abs=1e-10)


def test_one_minus_x_k1_small_x_has_no_cancellation():
    x = 1e-6
    # 1 - x K1(x) ~ (x^2 / 2)(ln(2/x) - gamma + 1/2)
    want = 0.5 * x * x * (math.log(2 / x) - EULER_GAMMA + 0.5)
    assert one_minus_x_k1(x) == pytest.approx(want, rel=1e-6)


@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        bessel_k0(bad)
    with pytest.raises(DomainError):
        bessel_k1(bad)


def test_underflow_flag():
    v, flag = bessel_k0(800.0, return_flag=True)
    assert v == 0.0 and flag
    v, flag = bessel_k0(600.0, return_flag=True)
    assert v > 0 and not flag
    arr, flags = bessel_k0(np.array([1.0, 1000.0]), return_flag=True)
    assert arr[1] == 0.0 and list(flags) == [False, True]


def test_strictly_decreasing():
    ws = np.geomspace(1e-8, 700.0, 500)
    assert np.all(np.diff(bessel_k0(ws)) < 0)
    assert np.all(np.diff(bessel_k1(ws)) < 0)


def test_small_argument_law_on_its_valid_range():
    # the envelope 0.6 w^2 |ln w| + 1e-10 is honoured up to w ~ 0.46 (see acceptance criterion 8)
    w = np.geomspace(1e-6, 0.4, 300)
    lhs = np.abs(bessel_k0(w) + np.log(w) - LN2_MINUS_GAMMA)
    assert np.all(lhs <= 0.6 * w * w * np.abs(np.log(w)) + 1e-10)


def test_green_values_and_errors():
    assert green(1.0, 1.0) == pytest.approx(0.42102443824070834 / (2 * math.pi), rel=1e-15)
    assert green(2.0, 0.5) == green(1.0, 1.0)
    with pytest.raises(DomainError):
        green(0.0, 1.0)


@given(st.floats(1e-4, 1e2), st.floats(1e-4, 1e2))
def test_green_scaling(r, a):
    assert green(r, a) == pytest.approx(green(a * r, 1.0), rel=1e-14)


def test_green_cell_avg_matches_disk_quadrature():
    rho, a = 1e-3, 1.0
    val, _ = integrate.quad(lambda r: bessel_k0(a * r) / (2 * math.pi) * 2 * math.pi * r, 0.0, rho,
                            epsabs=0.0, epsrel=1e-12, points=[rho * 1e-6, rho * 1e-3])
    assert green_cell_avg(rho, a) == pytest.approx(val / (math.pi * rho * rho), rel=1e-8)


def test_green_cell_avg_small_argument():
    x = 1e-6
    want = (-math.log(x) + LN2_MINUS_GAMMA + 0.5) / (2 * math.pi)
    assert green_cell_avg(x, 1.0) == pytest.approx(want, rel=1e-6)


@given(st.floats(1e-6, 10.0), st.floats(1e-6, 10.0))
def test_green_cell_avg_exceeds_boundary_value(rho, a):
    assert green_cell_avg(rho, a) > green(rho, a)


def test_green_cell_avg_equals_green_at_surrogate_radius():
    # the disk average of -ln r is -ln(rho e^{-1/2}); the difference vanishes as rho -> 0
    diffs = [abs(green_cell_avg(r, 1.0) - green(r * math.exp(-0.5), 1.0)) for r in (1e-1, 1e-2, 1e-3)]
    assert diffs[0] > diffs[1] > diffs[2]
    assert diffs[2] < 1e-5


def test_green_cell_avg_domain():
    with pytest.raises(DomainError):
        green_cell_avg(0.0, 1.0)


def test_lemma_i_with_s_zero_is_one_half():
    assert lemma_ineq_constant("i", 0.0).c_emp == pytest.approx(0.5, rel=1e-15)


def test_lemma_ii_point_value():
    a, r = math.exp(-2.0), math.exp(2.0)
    want = abs(0.42102443824070834 / (2 * math.pi) + math.log(a) / (2 * math.pi)) / 2.0
    assert float(ineq_ratios("ii", 1.0, a, r)) == pytest.approx(want, rel=1e-13)


def test_lemma_ii_excludes_short_separations():
    assert np.isnan(ineq_ratios("ii", 1.0, 0.1, 1.0))


@pytest.mark.parametrize("which", ["i", "ii", "iii"])
def test_lemma_constants_stable_under_refinement(which):
    p = SamplePlan()
    a = lemma_ineq_constant(which, 1.0, p).c_emp
    b = lemma_ineq_constant(which, 1.0, p.refined()).c_emp
    assert math.isfinite(a) and b >= a
    assert abs(b - a) / a < 0.05


@given(st.sampled_from(["i", "ii", "iii"]), st.floats(0.0, 2.0), st.integers(3, 15), st.integers(3, 15))
def test_lemma_monotone_under_inclusion(which, s, na, nr):
    p = SamplePlan(na, nr)
    assert lemma_ineq_constant(which, s, p.refined()).c_emp >= lemma_ineq_constant(which, s, p).c_emp


def test_lemma_errors():
    with pytest.raises(ValueError):
        lemma_ineq_constant("iv")
    with pytest.raises(ValueError):
        lemma_ineq_constant("i", 3.0)
    with pytest.raises(ValueError):
        lemma_ineq_constant("i", 1.0, SamplePlan(0, 5))
