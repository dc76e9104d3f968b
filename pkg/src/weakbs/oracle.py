"""Finite-difference cross-check: lowest eigenvalue of -Laplace - eps V on a Dirichlet box.

The weakly bound state decays on the scale 1/sqrt(-lambda), far larger than the
potential, so the box axes use the smooth stretching x = L sinh(beta xi)/sinh(beta)
of a uniform xi-grid. beta = 0 is the plain uniform 5-point stencil. Halving
the xi spacing nests the grids, which is what the Richardson step relies on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy import optimize
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

DECAY_LENGTHS = 10.0
MIN_ABS_LAMBDA = 1e-12
MAX_DIM = 250_000
MAX_ITER = 5000
RESIDUAL_TOL = 1e-8


class OracleOutOfRange(ValueError):
    """The finite-difference problem is not feasible at desk scale."""


class OracleConvergenceError(RuntimeError):
    def __init__(self, message, residuals):
        super().__init__(message)
        self.residuals = residuals


def size_box(lambda_estimate, safety=1.0):
    """Half-width L = safety * 10 / sqrt(-lambda): ten decay lengths of the bound state."""
    if not lambda_estimate < 0:
        raise ValueError("lambda_estimate must be negative")
    if safety < 1:
        raise ValueError("safety must be >= 1")
    if -lambda_estimate < MIN_ABS_LAMBDA:
        raise OracleOutOfRange(f"|lambda| = {-lambda_estimate:.3g} < {MIN_ABS_LAMBDA:g}; "
                               "box would exceed 1e7 decay-length units")
    return safety * DECAY_LENGTHS / math.sqrt(-lambda_estimate)


@dataclass
class FDProblem:
    L: float
    n: int
    epsilon: float
    potential: object
    stretch: float = 0.0
    subsamples: int = 4

    def __post_init__(self):
        if not self.L > 0 or self.n < 1:
            raise ValueError("need L > 0 and n >= 1")

    @property
    def dim(self):
        return self.n * self.n

    @property
    def h(self):
        """Spacing in the reference coordinate (the actual spacing when stretch = 0)."""
        return 2.0 * self.L / (self.n + 1)

    def axis(self):
        """Node coordinates including the two boundary points."""
        xi = -1.0 + 2.0 * np.arange(self.n + 2) / (self.n + 1)
        if self.stretch == 0.0:
            x = self.L * xi
        else:
            x = self.L * np.sinh(self.stretch * xi) / math.sinh(self.stretch)
        x[0], x[-1] = -self.L, self.L
        return x

    @property
    def center_spacing(self):
        x = self.axis()
        return float(np.min(np.diff(x)))

    def refined(self):
        return FDProblem(self.L, 2 * self.n + 1, self.epsilon, self.potential,
                         self.stretch, self.subsamples)


def stretch_for(L, n, h_center):
    """beta so that the spacing at the box centre is about h_center (0 if uniform suffices)."""
    if 2.0 * L / (n + 1) <= h_center:
        return 0.0
    target = h_center * (n + 1) / (2.0 * L)
    return optimize.brentq(lambda b: b / math.sinh(b) - target, 1e-8, 700.0)


def _cell_averaged_potential(p, x):
    """Mean of V over each dual cell, by a subsamples x subsamples midpoint rule."""
    mid = 0.5 * (x[:-1] + x[1:])
    lo, hi = mid[:-1], mid[1:]
    k = p.subsamples
    frac = (np.arange(k) + 0.5) / k
    sub = lo[:, None] + (hi - lo)[:, None] * frac[None, :]  # (n, k)
    n = p.n
    acc = np.zeros((n, n))
    for a in range(k):
        X = sub[:, a][:, None]
        for b in range(k):
            Y = sub[:, b][None, :]
            pts = np.stack(np.broadcast_arrays(X, Y), axis=-1)
            acc += p.potential.evaluate(pts)
    return (acc / (k * k)).ravel()


def hamiltonian(p):
    """Symmetric sparse matrix of the discretized -Laplace - eps V."""
    x = p.axis()
    hs = np.diff(x)                      # n + 1 half-steps
    dual = 0.5 * (hs[:-1] + hs[1:])      # n dual widths
    inv = 1.0 / hs
    A1 = sp.diags([inv[:-1] + inv[1:], -inv[1:-1], -inv[1:-1]], [0, 1, -1], format="csr")
    M1 = sp.diags(dual)
    A = sp.kron(A1, M1) + sp.kron(M1, A1)
    s = 1.0 / np.sqrt(np.kron(dual, dual))
    S = sp.diags(s)
    H = (S @ A @ S).tocsr()
    if p.epsilon:
        H = H - p.epsilon * sp.diags(_cell_averaged_potential(p, x))
    return H.tocsr()


@dataclass
class FDResult:
    eigenvalue: float
    residual: float
    L: float
    n: int
    center_spacing: float
    residuals: list = field(default_factory=list)


def smallest_eigenvalue(p, shift=None, k=3):
    """Lowest eigenvalue by shift-invert Lanczos around ``shift``.

    The shift must lie below the wanted eigenvalue; by default it is the lower
    bound -eps * max V - 1 of the spectrum. The smallest of the k eigenvalues
    nearest the shift is returned with its residual ||H v - lambda v|| / ||v||.
    """
    if p.dim > MAX_DIM:
        raise OracleOutOfRange(f"matrix dimension {p.dim} exceeds {MAX_DIM}")
    H = hamiltonian(p)
    if shift is None:
        vmax = float(np.max(np.abs(H.diagonal()))) if p.epsilon else 0.0
        shift = -abs(p.epsilon) * vmax - 1.0 if p.epsilon else -1.0
    k = min(k, p.dim - 1) if p.dim > 1 else 1
    v0 = np.cos(np.arange(p.dim) * 0.37) + 2.0
    residuals = []
    if p.dim <= 2:
        vals, vecs = np.linalg.eigh(H.toarray())
    else:
        try:
            vals, vecs = eigsh(H, k=k, sigma=shift, which="LM", v0=v0, tol=1e-13,
                               maxiter=MAX_ITER)
        except ArpackNoConvergence as exc:
            raise OracleConvergenceError("shift-invert Lanczos did not converge",
                                         residuals) from exc
    i = int(np.argmin(vals))
    lam, v = float(vals[i]), vecs[:, i]
    res = float(np.linalg.norm(H @ v - lam * v) / np.linalg.norm(v))
    residuals.append(res)
    if res > RESIDUAL_TOL:
        raise OracleConvergenceError(f"residual {res:.2e} above {RESIDUAL_TOL:g}", residuals)
    return FDResult(lam, res, p.L, p.n, p.center_spacing, residuals)


def richardson(coarse, fine):
    """O(h^2) extrapolation from grids with spacing ratio 2."""
    return (4.0 * fine - coarse) / 3.0


@dataclass
class CrossValidation:
    epsilon: float
    outcome: str                 # "compared", "oracle_out_of_range", "agree_absent", "disagree"
    lambda_bs: float = math.nan
    lambda_fd: float = math.nan
    lambda_fd_fine: float = math.nan
    lambda_fd_extrapolated: float = math.nan
    ln_rel_diff: float = math.nan
    L: float = math.nan
    n: int = 0
    message: str = ""


def build_problem(V, epsilon, lambda_estimate, n=160, h_center=0.05, safety=1.0):
    L = size_box(lambda_estimate, safety)
    beta = stretch_for(L, n, h_center)
    return FDProblem(L, n, epsilon, V, beta)


def cross_validate(V, epsilon, bs_result, n=160, h_center=0.05, absent_L=20.0):
    """Compare the Birman-Schwinger eigenvalue with the finite-difference one.

    ``n`` is the coarse number of interior points per axis; the fine grid has
    2n + 1. An infeasible box is reported as outcome "oracle_out_of_range".
    """
    if bs_result.status != "found":
        p = FDProblem(absent_L, n, epsilon, V, stretch_for(absent_L, n, h_center))
        res = smallest_eigenvalue(p)
        # Dirichlet box floor 2 (pi / 2L)^2 bounds the discretization bias from above
        floor = 2.0 * (math.pi / (2.0 * absent_L)) ** 2
        absent = res.eigenvalue > -floor
        return CrossValidation(epsilon, "agree_absent" if absent else "disagree",
                               lambda_fd=res.eigenvalue, L=absent_L, n=n,
                               message=f"BS status {bs_result.status}")
    lam_bs = bs_result.lam
    try:
        p = build_problem(V, epsilon, lam_bs, n, h_center)
        fine = p.refined()
        if fine.dim > MAX_DIM:
            raise OracleOutOfRange(f"refined dimension {fine.dim} exceeds {MAX_DIM}")
    except OracleOutOfRange as exc:
        return CrossValidation(epsilon, "oracle_out_of_range", lambda_bs=lam_bs, message=str(exc))
    shift = 3.0 * lam_bs
    c = smallest_eigenvalue(p, shift)
    f = smallest_eigenvalue(fine, shift)
    ext = richardson(c.eigenvalue, f.eigenvalue)
    if not ext < 0:
        return CrossValidation(epsilon, "disagree", lam_bs, c.eigenvalue, f.eigenvalue, ext,
                               math.nan, p.L, p.n, "extrapolated FD eigenvalue not negative")
    ln_fd = math.log(-ext)
    rel = abs(bs_result.ln_lambda - ln_fd) / abs(ln_fd)
    return CrossValidation(epsilon, "compared", lam_bs, c.eigenvalue, f.eigenvalue, ext, rel,
                           p.L, p.n)
