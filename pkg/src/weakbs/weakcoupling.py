"""Locating the weakly coupled eigenvalue -alpha^2 of -Laplace - eps V.

The root search runs in t, where alpha(t) = exp(-2 pi (1 + t) / (U eps)) so that
g(alpha(t)) = (1 + t) / (U eps) and Lambda_eps(alpha(t)) is close to -t for
small eps. ln(-lambda) = -4 pi (1 + t) / (U eps) is computed from t directly,
which keeps it exact even when lambda itself underflows.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg as sla
from scipy import optimize

from .bsop import (MTooLarge, _lambda_from, assemble, eigenvalues, g_of_alpha,
                   m_operator_norm, node_data)
from .potential import integral_U

ROOT_TOL = 1e-10
ALPHA_FLOOR = 1e-300
T_RANGE = (-0.5, 0.5)
T_WIDE = (-0.9, 0.9)

FOUND, NO_ROOT, PRECONDITION_FAILED = "found", "no_root", "precondition_failed"


def alpha_of_t(t, epsilon, U, allow_wide=False):
    """exp(-2 pi (1 + t) / (U eps)), the inverse of g at (1 + t) / (U eps)."""
    if not U > 0:
        raise ValueError("U = int V must be positive (the weak-coupling theorem needs int V > 0)")
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    if not allow_wide and not -0.5 <= t <= 0.5:
        raise ValueError("t outside [-1/2, 1/2]; pass allow_wide=True to go further")
    return math.exp(-2.0 * math.pi * (1.0 + t) / (U * epsilon))


@dataclass
class EigenSolveResult:
    epsilon: float
    U: float
    t_root: float
    alpha_root: float
    lam: float
    ln_lambda: float
    predictor: float
    rel_dev: float
    bs_gap: float
    m_norm_at_root: float
    status: str
    lambda_at_root: float = math.nan
    bs_nearest: float = math.nan
    n_near_one: int = 0
    iterations: int = 0
    message: str = ""

    def as_dict(self):
        return asdict(self)


def _empty(epsilon, U, status, message):
    pred = -4.0 * math.pi / (U * epsilon) if U > 0 and epsilon > 0 else math.nan
    return EigenSolveResult(epsilon, U, math.nan, math.nan, math.nan, math.nan, pred,
                            math.nan, math.nan, math.nan, status, message=message)


class _LambdaOfT:
    """t -> Lambda_eps(alpha(t)) on a fixed grid, with the node data cached."""

    def __init__(self, V, grid, epsilon, U):
        self.V, self.grid, self.eps, self.U = V, grid, epsilon, U
        self.node = node_data(V, grid)
        self.calls = 0

    def matrix(self, t):
        a = alpha_of_t(t, self.eps, self.U, allow_wide=True)
        if a < ALPHA_FLOOR:
            raise MTooLarge(f"alpha(t={t}) = {a:.3g} below the floating-point floor")
        return assemble(self.V, self.grid, a, "M", _node=self.node)

    def norm(self, t):
        return self.eps * m_operator_norm(self.matrix(t))

    def __call__(self, t):
        self.calls += 1
        return _lambda_from(self.matrix(t), self.eps, check=False)[0]


def _illinois(f, a, b, fa, fb, tol, maxiter=200):
    """Bracketing secant with the Illinois down-weighting and a bisection fallback."""
    side = 0
    c, fc = a, fa
    for it in range(maxiter):
        if fb == fa:
            c = 0.5 * (a + b)
        else:
            c = (a * fb - b * fa) / (fb - fa)
            if not a < c < b:
                c = 0.5 * (a + b)
        fc = f(c)
        if fc == 0.0 or (b - a) <= tol:
            return c, fc, it + 1
        if fc * fb < 0:
            a, fa = b, fb
            b, fb = c, fc
            side = 0
        else:
            fa = fa * 0.5 if side == -1 else fa
            b, fb = c, fc
            side = -1
        # keep the bracket ordered
        if a > b:
            a, b, fa, fb = b, a, fb, fa
        if abs(fc) < 1e-14 or (b - a) <= tol:
            return c, fc, it + 1
    return c, fc, maxiter


def _bracket_root(f, lo, hi, flo, fhi, tol):
    """Root of f on [lo, hi] with f(lo) > 0 > f(hi) to |dt| <= tol."""
    a, b, fa, fb = lo, hi, flo, fhi
    n = 0
    # coarse bisection, then a secant pass on the small bracket
    while b - a > 1e-2:
        m = 0.5 * (a + b)
        fm = f(m)
        n += 1
        if fm == 0.0:
            return m, fm, n
        if fm > 0:
            a, fa = m, fm
        else:
            b, fb = m, fm
    t, ft, k = _illinois(f, a, b, fa, fb, tol)
    return t, ft, n + k


def find_root(V, grid, epsilon, U=None, root_tol=ROOT_TOL):
    """Weak-coupling eigenvalue from the zero of t -> Lambda_eps(alpha(t)) on [-1/2, 1/2].

    The bracket is widened once to [-0.9, 0.9] when Lambda has no sign change;
    after that the result is reported as no_root.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    U = integral_U(V).value if U is None else float(U)
    if epsilon == 0:
        return _empty(epsilon, U, NO_ROOT, "no coupling: Lambda = 1 identically")
    if not U > 0:
        return _empty(epsilon, U, NO_ROOT, "theorem hypothesis int V > 0 violated")
    node = node_data(V, grid)
    if not np.any(node[0]):
        return _empty(epsilon, U, NO_ROOT, "V vanishes on the grid")
    lam = _LambdaOfT(V, grid, epsilon, U)
    try:
        for t in (T_RANGE[0], 0.0, T_RANGE[1]):
            if lam.norm(t) >= 1.0:
                return _empty(epsilon, U, PRECONDITION_FAILED,
                              f"||eps M(alpha(t))|| >= 1 at t = {t}")
        lo, hi = T_RANGE
        flo, fhi = lam(lo), lam(hi)
        if not (flo > 0 > fhi):
            lo, hi = T_WIDE
            for t in (lo, hi):
                if lam.norm(t) >= 1.0:
                    return _empty(epsilon, U, PRECONDITION_FAILED,
                                  f"||eps M(alpha(t))|| >= 1 at t = {t}")
            flo, fhi = lam(lo), lam(hi)
            if not (flo > 0 > fhi):
                return _empty(epsilon, U, NO_ROOT, "Lambda has no sign change on [-0.9, 0.9]")
        t, ft, _ = _bracket_root(lam, lo, hi, flo, fhi, root_tol)
    except MTooLarge as exc:
        return _empty(epsilon, U, PRECONDITION_FAILED, str(exc))

    a = alpha_of_t(t, epsilon, U, allow_wide=True)
    mm = lam.matrix(t)
    m_norm = m_operator_norm(mm)
    q = assemble(V, grid, a, "Q", _node=node)
    vals, _ = eigenvalues(q)
    dist = np.sort(np.abs(epsilon * vals - 1.0))
    ln_lam = -4.0 * math.pi * (1.0 + t) / (U * epsilon)
    pred = -4.0 * math.pi / (U * epsilon)
    return EigenSolveResult(
        epsilon=epsilon, U=U, t_root=t, alpha_root=a, lam=-a * a, ln_lambda=ln_lam,
        predictor=pred, rel_dev=abs(ln_lam - pred) / abs(pred),
        bs_gap=float(dist[1]) if len(dist) > 1 else math.inf,
        m_norm_at_root=m_norm, status=FOUND, lambda_at_root=ft,
        bs_nearest=float(dist[0]), n_near_one=int(np.sum(dist < 1e-3)),
        iterations=lam.calls)


@dataclass
class RemainderReport:
    first_term: float
    second_term: float
    lambda_value: float
    g: float
    U_discrete: float
    mismatch: float


def remainder_diagnostics(V, grid, epsilon, alpha):
    """The two pieces eps^2 <M b, c> and eps^3 <(I - eps M)^{-1} M^2 b, c> of the remainder.

    ``mismatch`` is |g (first + second) - (1 - Lambda - eps g U)| with U = <b, c>
    taken on the same grid, so it measures only round-off.
    """
    mm = assemble(V, grid, alpha, "M")
    lam, _ = _lambda_from(mm, epsilon)
    M, b, c = mm.entries, mm.b_vec, mm.c_vec
    Mb = M @ b
    first = epsilon ** 2 * float(c @ Mb)
    y = np.linalg.solve(np.eye(len(b)) - epsilon * M, M @ Mb)
    second = epsilon ** 3 * float(c @ y)
    g = g_of_alpha(alpha)
    U_h = float(b @ c)
    mismatch = abs(g * (first + second) - (1.0 - lam - epsilon * g * U_h))
    return RemainderReport(first, second, lam, g, U_h, mismatch)


@dataclass
class SweepRecord:
    epsilon: float
    lam: float
    ln_lambda: float
    predictor: float
    rel_dev: float
    eps_times_ln: float
    status: str


SWEEP_COLUMNS = ("epsilon", "lambda", "ln_lambda", "predictor", "rel_dev", "eps_times_ln", "status")


def _record(res):
    return SweepRecord(res.epsilon, res.lam, res.ln_lambda, res.predictor, res.rel_dev,
                       res.epsilon * res.ln_lambda, res.status)


def sweep(V, grid, epsilons, U=None, jobs=1, return_results=False):
    """find_root for each eps; one bad point never aborts the sweep."""
    epsilons = [float(e) for e in epsilons]
    if any(not e > 0 for e in epsilons):
        raise ValueError("all epsilons must be positive")
    U = integral_U(V).value if U is None else U

    def one(e):
        try:
            return find_root(V, grid, e, U=U)
        except Exception as exc:  # recorded per point
            return _empty(e, U, PRECONDITION_FAILED, f"{type(exc).__name__}: {exc}")

    if jobs > 1 and len(epsilons) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, epsilons))
    else:
        results = [one(e) for e in epsilons]
    records = [_record(r) for r in results]
    return (records, results) if return_results else records


def alpha_from_top_eigenvalue(V, grid, epsilon, U=None, rtol=1e-9):
    """alpha with mu_max(eps Q(alpha)) = 1, by bracketed root finding in ln(alpha).

    Independent of the Lambda route; needs V >= 0 so that mu_max decreases in alpha.
    """
    U = integral_U(V).value if U is None else U
    node = node_data(V, grid)
    if np.any(node[1] < 0):
        raise ValueError("the monotone eigenvalue route needs V >= 0")
    n = len(node[0])

    def h(log_a):
        q = assemble(V, grid, math.exp(log_a), "Q", _node=node)
        mu = sla.eigvalsh(q.entries, subset_by_index=[n - 1, n - 1])[0]
        return epsilon * mu - 1.0

    lo = math.log(alpha_of_t(T_WIDE[1], epsilon, U, allow_wide=True))
    hi = math.log(alpha_of_t(T_WIDE[0], epsilon, U, allow_wide=True))
    root = optimize.brentq(h, lo, hi, xtol=rtol, rtol=1e-15)
    return math.exp(root)
