"""Potentials on the plane, their integrals and numerical integrability checks.

Radial integrals are taken in the log-radius variable rho = ln r, which turns
the slowly decaying and logarithmically singular examples into integrands that
adaptive quadrature handles well. Convergence is judged on a ladder of windows
|rho| <= 2^k, so "refinement" here means pushing the cut-offs toward 0 and
infinity geometrically in ln r.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

TRUNCATION = 1e-12
CONDITIONS = ("L1", "ln_s", "roll", "simon_s", "simon_eta")

_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-10, limit=400)
_LOG_CLIP = 700.0


class PotentialConfigError(ValueError):
    """Schema or parameter error; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnsupportedError(NotImplementedError):
    pass


@dataclass
class Potential:
    """Real potential V on R^2.

    Radial potentials carry a vectorized ``profile(r)``; ``func(x, y)`` is used
    otherwise. ``breaks`` lists radii where the profile jumps, ``singular_points``
    the points where V may be infinite (never used as quadrature nodes).
    """

    name: str
    params: dict
    support_radius: float
    radial: bool
    profile: Optional[Callable] = None
    func: Optional[Callable] = None
    breaks: tuple = ()
    singular_points: tuple = ()
    log_abs_profile: Optional[Callable] = None
    exact_U: Optional[float] = None
    config: dict = field(default_factory=dict)

    def evaluate(self, points):
        pts = np.asarray(points, dtype=float)
        x, y = pts[..., 0], pts[..., 1]
        if self.radial:
            return self.profile(np.hypot(x, y))
        return np.asarray(self.func(x, y), dtype=float)

    __call__ = evaluate

    def log_abs(self, rho):
        """ln|V| as a function of rho = ln|x| (radial potentials only), -inf where V = 0."""
        rho = np.asarray(rho, dtype=float)
        if self.log_abs_profile is not None:
            return self.log_abs_profile(rho)
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.profile(np.exp(rho))))

    def sign(self, r):
        return np.sign(self.profile(np.asarray(r, dtype=float)))

    @property
    def bounded_support(self):
        return math.isfinite(self.support_radius)


# -- built-in families --------------------------------------------------------


def _v_infinity(delta):
    if not 0.0 <= delta < 1.0:
        raise PotentialConfigError("params.delta", "delta must lie in [0, 1)")

    def profile(r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        m = r > 3.0
        lr = np.log(r[m])
        out[m] = np.exp(-2.0 * lr - (1.0 + delta) * np.log(lr) - 2.0 * np.log(np.log(lr)))
        return out

    def log_abs(rho):
        rho = np.asarray(rho, dtype=float)
        out = np.full_like(rho, -np.inf)
        m = rho > math.log(3.0)
        p = rho[m]
        out[m] = -2.0 * p - (1.0 + delta) * np.log(p) - 2.0 * np.log(np.log(p))
        return out

    # U = 2 pi int_{ln ln 3}^inf e^{-delta v} / v^2 dv with v = ln ln r
    v0 = math.log(math.log(3.0))
    if delta == 0.0:
        U = 2.0 * math.pi / v0
    else:
        U = 2.0 * math.pi * integrate.quad(lambda v: math.exp(-delta * v) / v ** 2,
                                           v0, np.inf, **_QUAD_OPTS)[0]
    return Potential("v_infinity", {"delta": delta}, math.inf, True, profile,
                     breaks=(3.0,), log_abs_profile=log_abs, exact_U=U)


def _v_zero():
    r0 = 1.0 / 3.0

    def profile(r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        m = (r < r0) & (r > 0)
        lr = np.log(r[m])
        out[m] = 1.0 / (r[m] ** 2 * lr ** 4)
        out[r == 0] = np.inf
        return out

    def log_abs(rho):
        rho = np.asarray(rho, dtype=float)
        out = np.full_like(rho, -np.inf)
        m = rho < math.log(r0)
        out[m] = -2.0 * rho[m] - 4.0 * np.log(np.abs(rho[m]))
        return out

    U = 2.0 * math.pi / (3.0 * math.log(3.0) ** 3)
    return Potential("v_zero", {}, r0, True, profile, breaks=(r0,),
                     singular_points=((0.0, 0.0),), log_abs_profile=log_abs, exact_U=U)


def _disk(R=1.0, height=1.0):
    if R <= 0:
        raise PotentialConfigError("params.R", "radius must be positive")

    def profile(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < R, float(height), 0.0)

    return Potential("disk", {"R": R, "height": height}, R, True, profile,
                     breaks=(R,), exact_U=height * math.pi * R * R)


def _gaussian(a=1.0):
    if a <= 0:
        raise PotentialConfigError("params.a", "a must be positive")
    radius = math.sqrt(-math.log(TRUNCATION) / a)

    def profile(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < radius, np.exp(-a * r * r), 0.0)

    def log_abs(rho):
        rho = np.asarray(rho, dtype=float)
        with np.errstate(over="ignore"):
            val = -a * np.exp(2.0 * rho)
        return np.where(rho < math.log(radius), val, -np.inf)

    return Potential("gaussian", {"a": a}, radius, True, profile, breaks=(radius,),
                     log_abs_profile=log_abs, exact_U=math.pi / a)


def _annulus_signed(r_in=1.0, r_out=2.0, inner=1.0, outer=-0.25):
    if not 0 < r_in < r_out:
        raise PotentialConfigError("params", "need 0 < r_in < r_out")

    def profile(r):
        r = np.asarray(r, dtype=float)
        return np.where(r < r_in, float(inner), np.where(r < r_out, float(outer), 0.0))

    U = math.pi * (inner * r_in ** 2 + outer * (r_out ** 2 - r_in ** 2))
    return Potential("annulus_signed",
                     {"r_in": r_in, "r_out": r_out, "inner": inner, "outer": outer},
                     r_out, True, profile, breaks=(r_in, r_out), exact_U=U)


_FAMILIES = {
    "v_infinity": (_v_infinity, {"delta": 0.0}),
    "v_zero": (_v_zero, {}),
    "disk": (_disk, {"R": 1.0, "height": 1.0}),
    "gaussian": (_gaussian, {"a": 1.0}),
    "annulus_signed": (_annulus_signed, {"r_in": 1.0, "r_out": 2.0, "inner": 1.0, "outer": -0.25}),
}


def builtin(name, params=None):
    """Construct one of the built-in potentials by name."""
    if name not in _FAMILIES:
        raise PotentialConfigError("name", f"unknown potential {name!r}; "
                                   f"expected one of {sorted(_FAMILIES)}")
    factory, defaults = _FAMILIES[name]
    params = dict(params or {})
    unknown = set(params) - set(defaults)
    if unknown:
        raise PotentialConfigError(f"params.{sorted(unknown)[0]}", "unknown parameter")
    merged = {**defaults, **params}
    for key, val in merged.items():
        if not isinstance(val, (int, float)) or isinstance(val, bool) or not math.isfinite(val):
            raise PotentialConfigError(f"params.{key}", "must be a finite number")
    V = factory(**{k: float(v) for k, v in merged.items()})
    V.config = {"name": name, "params": {k: float(v) for k, v in merged.items()}}
    return V


def piecewise_radial(table):
    """Radial potential interpolated linearly in r between knots, zero beyond the last."""
    arr = np.asarray(table, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or len(arr) < 2:
        raise PotentialConfigError("piecewise_radial", "need a list of at least two [r, v] pairs")
    r, v = arr[:, 0], arr[:, 1]
    if r[0] < 0 or np.any(np.diff(r) <= 0):
        raise PotentialConfigError("piecewise_radial", "radii must be nonnegative and increasing")
    r_end = float(r[-1])

    def profile(x):
        x = np.asarray(x, dtype=float)
        return np.where(x <= r_end, np.interp(x, r, v), 0.0)

    # exact integral of the piecewise-linear profile against 2 pi r dr
    U = 0.0
    for a, b, fa, fb in zip(r[:-1], r[1:], v[:-1], v[1:]):
        slope = (fb - fa) / (b - a)
        c0 = fa - slope * a
        U += 2 * math.pi * (c0 * (b * b - a * a) / 2 + slope * (b ** 3 - a ** 3) / 3)
    if r[0] > 0:
        U += math.pi * r[0] ** 2 * v[0]
    V = Potential("piecewise_radial", {}, r_end, True, profile, breaks=(r_end,), exact_U=U)
    V.config = {"piecewise_radial": arr.tolist()}
    return V


def load_potential(config):
    """Build a potential from a JSON document (string, path-free) or an already parsed dict.

    Schema: ``{"name": str, "params": {str: number}}`` or
    ``{"piecewise_radial": [[r, v], ...]}``.
    """
    if isinstance(config, (str, bytes)):
        try:
            config = json.loads(config)
        except json.JSONDecodeError as exc:
            raise PotentialConfigError("$", f"invalid JSON: {exc.msg}") from None
    if not isinstance(config, dict):
        raise PotentialConfigError("$", "expected an object")
    if "piecewise_radial" in config:
        extra = set(config) - {"piecewise_radial"}
        if extra:
            raise PotentialConfigError(sorted(extra)[0], "unexpected field")
        return piecewise_radial(config["piecewise_radial"])
    if "name" not in config:
        raise PotentialConfigError("name", "missing required field")
    if not isinstance(config["name"], str):
        raise PotentialConfigError("name", "must be a string")
    extra = set(config) - {"name", "params"}
    if extra:
        raise PotentialConfigError(sorted(extra)[0], "unexpected field")
    params = config.get("params", {})
    if not isinstance(params, dict):
        raise PotentialConfigError("params", "must be an object")
    return builtin(config["name"], params)


# -- radial log-variable quadrature ------------------------------------------


def _quad_pieces(f, lo, hi, cuts=(), epsrel=1e-10):
    """Adaptive quadrature of f over [lo, hi] split at the given interior cuts."""
    if not hi > lo:
        return 0.0
    pts = sorted({c for c in cuts if lo < c < hi})
    edges = [lo, *pts, hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            total += integrate.quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=400)[0]
    return total


def _exp_clipped(x):
    return math.exp(min(x, _LOG_CLIP)) if x > -math.inf else 0.0


@dataclass
class AssumptionReport:
    condition: str
    parameter: float
    value: float
    converged: bool
    refinement_history: list
    divergent: bool = False
    rel_tol: float = 5e-3

    @property
    def holds(self):
        return self.converged and not self.divergent


def _classify(history, rel_tol):
    values = [v for _, v in history]
    growth = 0
    divergent = False
    for prev, cur in zip(values[:-1], values[1:]):
        if not math.isfinite(cur) or (prev > 0 and cur > 1.1 * prev):
            growth += 1
            if growth >= 3:
                divergent = True
        else:
            growth = 0
    if any(not math.isfinite(v) for v in values):
        divergent = True
    last, prev = values[-1], values[-2]
    if divergent:
        converged = False
    elif last == 0:
        converged = prev == 0
    else:
        converged = abs(last - prev) < rel_tol * abs(last)
    return bool(converged), bool(divergent)


def radial_ladder(log_integrand, rho_lo=-math.inf, rho_hi=math.inf, cuts=(), levels=12,
                  rel_tol=5e-3):
    """Integrate exp(log_integrand(rho)) over [rho_lo, rho_hi] on growing windows.

    Window k covers |rho| <= 2^k (intersected with the domain). Returns
    (value, converged, divergent, history) where history lists (2^k, value_k).
    """
    def f(rho):
        return _exp_clipped(float(log_integrand(rho)))

    history = []
    total = 0.0
    prev_lo, prev_hi = None, None
    for k in range(1, levels + 1):
        w = 2.0 ** k
        lo, hi = max(rho_lo, -w), min(rho_hi, w)
        if prev_lo is None:
            total += _quad_pieces(f, lo, hi, cuts)
        else:
            total += _quad_pieces(f, lo, prev_lo, cuts) + _quad_pieces(f, prev_hi, hi, cuts)
        prev_lo, prev_hi = lo, hi
        history.append((w, total))
    converged, divergent = _classify(history, rel_tol)
    return total, converged, divergent, history


def _log_cuts(V):
    return tuple(math.log(b) for b in V.breaks if b > 0)


def _rho_support(V):
    return math.log(V.support_radius) if V.bounded_support else math.inf


@dataclass
class IntegralResult:
    value: float
    converged: bool
    history: list
    exact: bool = False
    error_estimate: float = 0.0


def integral_U(V, quad=None, numeric=False):
    """U = integral of V over the plane.

    The analytic value is returned when the potential declares one, unless
    ``numeric`` is set. ``quad`` may carry {"levels": int, "rel_tol": float} for
    radial potentials or {"n": int} for the cartesian refinement of others.
    """
    quad = dict(quad or {})
    if V.exact_U is not None and not numeric:
        return IntegralResult(V.exact_U, True, [], exact=True)
    if V.radial:
        levels = quad.get("levels", 12)
        rel_tol = quad.get("rel_tol", 1e-8)

        def f(rho):
            lv = float(V.log_abs(rho))
            if lv == -math.inf:
                return 0.0
            # far out the profile itself under/overflows; its sign is read at |rho| <= 300
            sgn = float(np.sign(V.profile(np.array(math.exp(min(max(rho, -300.0), 300.0)))))) or 1.0
            return sgn * 2.0 * math.pi * _exp_clipped(lv + 2.0 * rho)

        history = []
        total = 0.0
        prev = None
        cuts = _log_cuts(V)
        for k in range(1, levels + 1):
            w = 2.0 ** k
            lo, hi = -w, min(w, _rho_support(V))
            if prev is None:
                total += _quad_pieces(f, lo, hi, cuts)
            else:
                total += _quad_pieces(f, lo, prev[0], cuts) + _quad_pieces(f, prev[1], hi, cuts)
            prev = (lo, hi)
            history.append((w, total))
        conv = abs(history[-1][1] - history[-2][1]) <= rel_tol * max(abs(total), 1e-300)
        err = abs(history[-1][1] - history[-2][1])
        return IntegralResult(total, conv, history, error_estimate=err)
    return _cartesian_refine(V, lambda v: v, quad.get("n", 64), quad.get("rel_tol", 1e-6))


def _cartesian_refine(V, transform, n0, rel_tol, levels=4):
    from .grid import build_cartesian

    if not V.bounded_support:
        raise UnsupportedError("non-radial potentials need a bounded support radius")
    history = []
    n = n0
    for _ in range(levels):
        g = build_cartesian(V.support_radius, n)
        vals = transform(V.evaluate(g.nodes))
        history.append((n, float(np.sum(g.weights * vals))))
        n *= 2
    converged, _ = _classify(history, rel_tol)
    err = abs(history[-1][1] - history[-2][1])
    return IntegralResult(history[-1][1], converged, history, error_estimate=err)


def check_assumption(V, condition, parameter=0.0, rel_tol=5e-3, levels=12):
    """Numerically test one integrability condition on V.

    Conditions: L1 (V integrable), ln_s (|ln|x||^s V integrable on |x| > 1,
    s in [0, 1)), roll (the log-squared self-interaction near the diagonal),
    simon_s (|x|^s V integrable on |x| > 1, s > 0), simon_eta (V in L^(1+eta)).
    """
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    if condition == "ln_s" and not 0.0 <= parameter < 1.0:
        raise ValueError("ln_s needs s in [0, 1)")
    if condition in ("simon_s", "simon_eta") and not parameter > 0:
        raise ValueError(f"{condition} needs a positive parameter")
    if condition == "roll":
        return _check_roll(V, rel_tol)
    if not V.radial:
        return _check_cartesian(V, condition, parameter, rel_tol)

    log2pi = math.log(2.0 * math.pi)
    la = V.log_abs
    s = float(parameter)
    if condition == "L1":
        fn, lo = (lambda p: log2pi + float(la(p)) + 2 * p), -math.inf
    elif condition == "ln_s":
        fn, lo = (lambda p: log2pi + float(la(p)) + 2 * p + (s * math.log(p) if s else 0.0)), 0.0
    elif condition == "simon_s":
        fn, lo = (lambda p: log2pi + float(la(p)) + 2 * p + s * p), 0.0
    else:
        fn, lo = (lambda p: log2pi + (1.0 + s) * float(la(p)) + 2 * p), -math.inf
    value, conv, div, hist = radial_ladder(fn, lo, _rho_support(V), _log_cuts(V), levels, rel_tol)
    return AssumptionReport(condition, s, value, conv, hist, div, rel_tol)


def _check_cartesian(V, condition, s, rel_tol):
    def transform(v, pts=None):
        return v

    from .grid import build_cartesian

    history = []
    n = 32
    for _ in range(4):
        g = build_cartesian(V.support_radius, n)
        v = np.abs(V.evaluate(g.nodes))
        r = np.hypot(g.nodes[:, 0], g.nodes[:, 1])
        if condition == "L1":
            f = v
        elif condition == "ln_s":
            f = np.where(r > 1, np.abs(np.log(r)) ** s * v, 0.0)
        elif condition == "simon_s":
            f = np.where(r > 1, r ** s * v, 0.0)
        else:
            f = v ** (1.0 + s)
        history.append((n, float(np.sum(g.weights * f))))
        n *= 2
    conv, div = _classify(history, rel_tol)
    return AssumptionReport(condition, s, history[-1][1], conv, history, div, rel_tol)


# -- autocorrelation and the log-squared self-interaction ---------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(32)


def _gl_panels(f, edges):
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        if b <= a:
            continue
        half = 0.5 * (b - a)
        t = 0.5 * (a + b) + half * _GL_X
        total += half * float(np.dot(_GL_W, f(t)))
    return total


def _angular_integral(V, r, u, theta0, radii):
    """2 * int_{theta0}^{pi} |V(|x - u|)| dtheta for |x| = r, u on the x-axis."""
    edges = [theta0]
    for b in radii:
        # written without the product r * u, which can underflow
        c = 0.5 * (r / u + u / r - (b / r) * (b / u))
        if -1.0 < c < 1.0:
            th = math.acos(c)
            if theta0 < th < math.pi:
                edges.append(th)
    edges = sorted(edges) + [math.pi]

    def f(theta):
        d = np.sqrt(np.maximum(r * r + u * u - 2.0 * r * u * np.cos(theta), 0.0))
        return np.abs(V.profile(d))

    return 2.0 * _gl_panels(f, edges)


def _require_radial(V):
    if not V.radial:
        raise UnsupportedError("autocorrelation needs a radial potential; use the direct "
                               "4-D quadrature in check_assumption instead")
    if not V.bounded_support:
        raise UnsupportedError("autocorrelation needs a bounded effective support")


def autocorrelation(V, u_mag, r_min=0.0):
    """F(|u|) = int |V(x)| |V(x - u)| dx for radial V.

    With ``r_min > 0`` only points |x| > r_min contribute (used to separate the
    near-diagonal region |u| < |x|/2 in diagnostics).
    """
    _require_radial(V)
    u = float(u_mag)
    if u < 0:
        raise ValueError("u_mag must be nonnegative")
    R = V.support_radius
    rho_hi = math.log(R)
    radii = tuple(sorted(set(V.breaks) | {R}))
    la = V.log_abs

    if u >= 2.0 * R:
        return 0.0
    if u == 0.0:
        lo = math.log(r_min) if r_min > 0 else -math.inf
        val = _quad_pieces(lambda p: _exp_clipped(math.log(2 * math.pi) + 2 * float(la(p)) + 2 * p),
                           lo, rho_hi, _log_cuts(V))
        return val

    symmetric = r_min <= 0.0

    def outer(p):
        lv = float(la(p))
        if lv == -math.inf:
            return 0.0
        r = math.exp(p)
        if r < 1e-12 * u:
            # |x - u| = u to working precision
            inner = 2.0 * math.pi * abs(float(V.profile(np.array(u))))
        else:
            theta0 = math.acos(u / (2.0 * r)) if (symmetric and r > u / 2.0) else 0.0
            inner = _angular_integral(V, r, u, theta0, radii)
        return _exp_clipped(lv + 2.0 * p) * inner

    cuts = set(_log_cuts(V))
    for b in radii:
        for c in (u - b, b - u, u + b):
            if c > 0:
                cuts.add(math.log(c))
    if symmetric:
        cuts.add(math.log(u / 2.0))
        lo = -math.inf
    else:
        lo = math.log(r_min)
    value = _quad_pieces(outer, lo, rho_hi, tuple(cuts), epsrel=1e-9)
    return 2.0 * value if symmetric else value


def _roll_radial_integral(V, s_lo, s_hi, F, cuts=()):
    """2 pi int F(e^s) s^2 e^{2s} ds over [s_lo, s_hi] (u = e^s)."""
    def f(s):
        Fu = F(math.exp(s))
        return 2.0 * math.pi * Fu * s * s * math.exp(2.0 * s) if Fu else 0.0

    return _quad_pieces(f, s_lo, s_hi, cuts, epsrel=1e-8)


def roll_integral(V, u_max=math.e, levels=6, rel_tol=5e-3, F=None):
    """Ladder for int_{|u| < u_max} F(|u|) (ln|u|)^2 du with cut-offs |u| > e^{-2^k}."""
    _require_radial(V)
    F = F or (lambda u: autocorrelation(V, u))
    s_hi = min(math.log(u_max), math.log(2.0 * V.support_radius))
    cuts = tuple(math.log(abs(a - b)) for a in V.breaks for b in V.breaks if a != b)
    cuts += tuple(math.log(2 * b) for b in V.breaks)
    history = []
    total = 0.0
    prev_lo = None
    for k in range(1, levels + 1):
        lo = -(2.0 ** k)
        if prev_lo is None:
            total += _roll_radial_integral(V, lo, s_hi, F, cuts)
        else:
            total += _roll_radial_integral(V, lo, prev_lo, F, cuts)
        prev_lo = lo
        history.append((2.0 ** k, total))
    conv, div = _classify(history, rel_tol)
    return total, conv, div, history


def _check_roll(V, rel_tol):
    if V.radial and V.bounded_support:
        value, conv, div, hist = roll_integral(V, rel_tol=rel_tol)
        return AssumptionReport("roll", 0.0, value, conv, hist, div, rel_tol)
    return _roll_direct(V, rel_tol)


def _roll_direct(V, rel_tol, n0=16, levels=3):
    from .grid import build_cartesian

    warnings.warn("roll check on a non-radial potential uses O(N^2) direct quadrature",
                  RuntimeWarning, stacklevel=3)
    if not V.bounded_support:
        raise UnsupportedError("need a bounded support radius")
    history = []
    n = n0
    for _ in range(levels):
        g = build_cartesian(V.support_radius, n)
        v = np.abs(V.evaluate(g.nodes)) * g.weights
        d = np.hypot(*(g.nodes[:, None, :] - g.nodes[None, :, :]).transpose(2, 0, 1))
        np.fill_diagonal(d, 1.0)
        k = np.where(d < math.e, np.log(d) ** 2, 0.0)
        rho = g.cell_radius
        # mean of ln^2|u| over a disk of radius rho
        np.fill_diagonal(k, np.log(rho) ** 2 - np.log(rho) + 0.5)
        history.append((n, float(v @ k @ v)))
        n *= 2
    conv, div = _classify(history, rel_tol)
    return AssumptionReport("roll", 0.0, history[-1][1], conv, history, div, rel_tol)


@dataclass
class ExampleV0Report:
    value: float
    value_unit: float
    converged: bool
    history: list
    omega1: float
    omega2: float
    shell: float
    refinement_change: float


def verify_example_v0(levels=6, rel_tol=5e-3):
    """Finiteness of the log-squared self-interaction of the singular example V0.

    Also splits the |u| < 1 part into the far region |u| >= |x|/2 and the
    near-diagonal region |u| < |x|/2.
    """
    V = builtin("v_zero")
    value, conv, div, hist = roll_integral(V, math.e, levels, rel_tol)
    unit, *_ = roll_integral(V, 1.0, levels, rel_tol)
    near, *_ = roll_integral(V, 1.0, levels, rel_tol,
                             F=lambda u: autocorrelation(V, u, r_min=2.0 * u))
    change = abs(hist[-1][1] - hist[-2][1]) / abs(hist[-1][1])
    return ExampleV0Report(value, unit, conv and not div, hist, unit - near, near,
                           value - unit, change)
