"""Modified Bessel kernels K0, K1 and the free resolvent kernel in two dimensions.

K0 and K1 use the ascending series for w <= 2 and Steed's continued fraction
(exponentially scaled) above. Both routes are checked against an independent
arbitrary-precision series in the test-suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

EULER_GAMMA = 0.57721566490153286060651209
LN2_MINUS_GAMMA = math.log(2.0) - EULER_GAMMA

SERIES_CUTOFF = 2.0
UNDERFLOW_ARG = 705.0

_N_SERIES = 24
_CF_MAXIT = 10000
_CF_EPS = 1e-17


class DomainError(ValueError):
    pass


def _harmonic(n):
    return np.concatenate(([0.0], np.cumsum(1.0 / np.arange(1, n + 1))))


_H = _harmonic(_N_SERIES + 1)
# digamma(k + 1) = H_k - gamma
_PSI = _H - EULER_GAMMA
_INV_FACT = np.array([1.0 / math.factorial(k) for k in range(_N_SERIES + 2)])


def _check_positive(w):
    w = np.asarray(w, dtype=float)
    if np.any(~(w > 0)):
        raise DomainError("Bessel K argument must be positive")
    return w


def _series_k0(x):
    y = 0.25 * x * x
    term = np.ones_like(x)
    i0 = np.ones_like(x)
    tail = np.zeros_like(x)
    for k in range(1, _N_SERIES):
        term = term * y / (k * k)
        i0 += term
        tail += _H[k] * term
    return -(np.log(0.5 * x) + EULER_GAMMA) * i0 + tail


def _series_k1_parts(x):
    """Return (I1(x), S(x)) with K1 = 1/x + ln(x/2) I1 - (x/4) S."""
    y = 0.25 * x * x
    term = np.ones_like(x)  # y^k / (k! (k+1)!)
    i1 = np.ones_like(x)
    s = (_PSI[0] + _PSI[1]) * term
    for k in range(1, _N_SERIES):
        term = term * y / (k * (k + 1))
        i1 += term
        s += (_PSI[k] + _PSI[k + 1]) * term
    return 0.5 * x * i1, s


def _series_k1(x):
    i1, s = _series_k1_parts(x)
    return 1.0 / x + np.log(0.5 * x) * i1 - 0.25 * x * s


def _cf2_scaled(x):
    """Steed's CF2 for nu = 0: returns (e^x K0(x), e^x K1(x)) for x >= 2."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = d.copy()
    delh = d.copy()
    q1 = np.zeros_like(x)
    q2 = np.ones_like(x)
    a1 = 0.25
    q = np.full_like(x, a1)
    c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _CF_MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q = q + c * qnew
        b = b + 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h = h + delh
        dels = q * delh
        s = s + dels
        if np.all(np.abs(dels) < _CF_EPS * np.abs(s)):
            break
    else:  # pragma: no cover
        raise RuntimeError("continued fraction for K0/K1 did not converge")
    h = a1 * h
    k0e = np.sqrt(np.pi / (2.0 * x)) / s
    k1e = k0e * (x + 0.5 - h) / x
    return k0e, k1e


def _eval(w, order, return_flag):
    w = _check_positive(w)
    scalar = w.ndim == 0
    x = np.atleast_1d(w)
    out = np.zeros_like(x)
    small = x <= SERIES_CUTOFF
    under = x > UNDERFLOW_ARG
    mid = ~small & ~under
    if np.any(small):
        xs = x[small]
        out[small] = _series_k0(xs) if order == 0 else _series_k1(xs)
    if np.any(mid):
        xm = x[mid]
        k0e, k1e = _cf2_scaled(xm)
        out[mid] = (k0e if order == 0 else k1e) * np.exp(-xm)
    if scalar:
        out = float(out[0])
        under = bool(under[0])
    if return_flag:
        return out, under
    return out


def bessel_k0(w, return_flag=False):
    """Modified Bessel function K0 for w > 0 (scalar or array).

    Arguments above 705 underflow to exactly 0; with ``return_flag=True`` the
    boolean underflow mask is returned as a second value.
    """
    return _eval(w, 0, return_flag)


def bessel_k1(w, return_flag=False):
    """Modified Bessel function K1 for w > 0, same conventions as bessel_k0."""
    return _eval(w, 1, return_flag)


def one_minus_x_k1(x):
    """1 - x K1(x), which equals the integral of t K0(t) over [0, x].

    Evaluated from the series for x <= 2 so there is no cancellation as x -> 0.
    """
    x = _check_positive(x)
    scalar = x.ndim == 0
    xa = np.atleast_1d(x)
    out = np.empty_like(xa)
    small = xa <= SERIES_CUTOFF
    if np.any(small):
        xs = xa[small]
        i1, s = _series_k1_parts(xs)
        out[small] = -xs * np.log(0.5 * xs) * i1 + 0.25 * xs * xs * s
    if np.any(~small):
        xl = xa[~small]
        out[~small] = 1.0 - xl * bessel_k1(xl)
    return float(out[0]) if scalar else out


def green(r, alpha):
    """Free resolvent kernel K0(alpha r) / (2 pi) of (-Laplace + alpha^2) on the plane."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("green() is singular at r = 0; use green_cell_avg on the diagonal")
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    val = bessel_k0(alpha * r) / (2.0 * np.pi)
    return val


def green_cell_avg(rho, alpha):
    """Average of green(|u|, alpha) over the disk |u| < rho."""
    rho = np.asarray(rho, dtype=float)
    if np.any(rho <= 0):
        raise DomainError("cell radius must be positive")
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    x = alpha * rho
    return 2.0 * one_minus_x_k1(x) / (x * x) / (2.0 * np.pi)


# -- empirical constants for the kernel inequalities --------------------------


@dataclass(frozen=True)
class SamplePlan:
    """Log-spaced lattice of (alpha, r) samples.

    ``refined()`` returns the nested lattice with every interval halved, so the
    sample set of a refinement always contains the original one.
    """

    n_alpha: int = 41
    n_r: int = 81
    alpha_min: float = 1e-12
    alpha_max: float = math.exp(-1.0) * (1.0 - 1e-9)
    r_min: float = 1e-8
    r_max: float = 1e8
    version: int = 1

    def alphas(self):
        return np.geomspace(self.alpha_min, self.alpha_max, self.n_alpha)

    def radii(self):
        return np.geomspace(self.r_min, self.r_max, self.n_r)

    def refined(self):
        return SamplePlan(2 * self.n_alpha - 1, 2 * self.n_r - 1, self.alpha_min,
                          self.alpha_max, self.r_min, self.r_max, self.version)

    @property
    def size(self):
        return self.n_alpha * self.n_r


@dataclass
class IneqReport:
    which: str
    s: float
    c_emp: float
    argmax_alpha: float
    argmax_r: float
    n_samples: int
    plan: SamplePlan = field(default_factory=SamplePlan)


def _pow(x, s):
    # |x|^0 = 1 even at x = 0
    return np.ones_like(x) if s == 0 else np.abs(x) ** s


def ineq_ratios(which, s, alpha, r):
    """Pointwise LHS/RHS ratios for the three kernel inequalities (without C)."""
    alpha = np.asarray(alpha, dtype=float)
    r = np.asarray(r, dtype=float)
    w = alpha * r
    k0 = bessel_k0(w)
    lna = np.log(alpha)
    lnr = np.log(r)
    shifted = (k0 + lna) / (2.0 * np.pi)
    if which == "i":
        return _pow(shifted, s) / (1.0 + _pow(lnr, s))
    if which == "ii":
        ratio = _pow(shifted, s) / _pow(lna, s)
        return np.where(w >= 1.0, ratio, np.nan)
    if which == "iii":
        g = k0 / (2.0 * np.pi)
        return g * g / (lna * lna + lnr * lnr)
    raise ValueError(f"unknown inequality {which!r}")


def lemma_ineq_constant(which, s=1.0, samples=None):
    """Empirical constant max(LHS/RHS) over a deterministic sample plan."""
    if which not in ("i", "ii", "iii"):
        raise ValueError(f"unknown inequality {which!r}")
    if which != "iii" and not 0.0 <= s <= 2.0:
        raise ValueError("s must lie in [0, 2]")
    plan = samples if samples is not None else SamplePlan()
    if plan.n_alpha < 1 or plan.n_r < 1:
        raise ValueError("empty sample plan")
    A, R = np.meshgrid(plan.alphas(), plan.radii(), indexing="ij")
    ratios = ineq_ratios(which, s, A, R)
    valid = np.isfinite(ratios)
    if not np.any(valid):
        raise ValueError("sample plan has no admissible samples")
    flat = np.where(valid, ratios, -np.inf).ravel()
    idx = int(np.argmax(flat))
    return IneqReport(which, s, float(flat[idx]), float(A.ravel()[idx]),
                      float(R.ravel()[idx]), int(valid.sum()), plan)
