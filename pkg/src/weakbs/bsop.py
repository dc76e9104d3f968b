"""Nystrom discretization of the Birman-Schwinger operator Q(alpha) = L(alpha) + M(alpha).

Entries are weight-scaled symmetrically,

    Q_ij = sqrt(w_i) |V_i|^(1/2) G(x_i, x_j; alpha) sgn(V_j) |V_j|^(1/2) sqrt(w_j),

so the matrix eigenvalues approximate the operator eigenvalues directly. The
diagonal uses the disk average of the log-singular kernel over each cell.
M replaces G by G - g(alpha) with g(alpha) = -ln(alpha) / (2 pi), and the
rank-one part L = g(alpha) b c^T is what is left over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.sparse.linalg import ArpackNoConvergence, eigsh, svds

from .specfun import bessel_k0, green_cell_avg

IMAG_TOL = 1e-8


class MTooLarge(ValueError):
    """||eps M(alpha)|| >= 1: alpha lies outside the regime where Lambda is defined."""


class EigenSolveError(RuntimeError):
    pass


def g_of_alpha(alpha):
    """Coefficient of the rank-one part: -ln(alpha) / (2 pi)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return -math.log(alpha) / (2.0 * math.pi)


@dataclass
class BSMatrix:
    alpha: float
    entries: np.ndarray
    sign_vec: np.ndarray
    b_vec: np.ndarray
    kind: str

    @property
    def c_vec(self):
        return self.b_vec * self.sign_vec

    @property
    def positive(self):
        return bool(np.all(self.sign_vec >= 0))


@dataclass
class SpectralSummary:
    top_eigenvalues: np.ndarray
    hs_norm: float
    alpha: float
    max_imag: float = 0.0


def node_data(V, grid):
    """(b, sign) with b_i = sqrt(w_i |V(x_i)|)."""
    for p in V.singular_points:
        hit = np.all(np.isclose(grid.nodes, np.asarray(p, dtype=float), rtol=0, atol=1e-14), axis=1)
        if np.any(hit):
            raise ValueError(f"grid node {int(np.argmax(hit))} sits on a singular point {p} of V")
    vals = np.asarray(V.evaluate(grid.nodes), dtype=float)
    if not np.all(np.isfinite(vals)):
        i = int(np.argmax(~np.isfinite(vals)))
        raise ValueError(f"potential not finite at node {i} {tuple(grid.nodes[i])}")
    return np.sqrt(grid.weights * np.abs(vals)), np.sign(vals)


def green_matrix(grid, alpha):
    """G(x_i, x_j; alpha) off the diagonal, cell-averaged kernel on it."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    G = bessel_k0(alpha * grid.distances)
    G *= 1.0 / (2.0 * math.pi)
    np.fill_diagonal(G, green_cell_avg(grid.cell_radius, alpha))
    return G


def assemble(V, grid, alpha, kind="Q", _node=None):
    """Birman-Schwinger matrix of kind 'Q' or 'M' at spectral parameter alpha."""
    if kind not in ("Q", "M"):
        raise ValueError("kind must be 'Q' or 'M'")
    b, sgn = _node if _node is not None else node_data(V, grid)
    K = green_matrix(grid, alpha)
    if kind == "M":
        K -= g_of_alpha(alpha)
    # outer product first keeps the matrix exactly symmetric when sgn >= 0
    entries = np.outer(b, b * sgn) * K
    return BSMatrix(float(alpha), entries, sgn, b, kind)


def hs_norm(m):
    """Frobenius norm of the Q matrix, the discrete Hilbert-Schmidt norm."""
    if m.kind != "Q":
        raise ValueError("hs_norm is defined for kind Q")
    return float(np.linalg.norm(m.entries))


def _start_vector(n):
    # fixed start keeps ARPACK results bit-reproducible
    return np.cos(np.arange(n) * 0.7) + 1.5


def spectral_norm(A, symmetric=None):
    """Largest singular value of a dense matrix."""
    A = np.asarray(A)
    n = A.shape[0]
    if n == 0 or not np.any(A):
        return 0.0
    if n <= 64:
        return float(np.linalg.norm(A, 2))
    if symmetric is None:
        symmetric = np.array_equal(A, A.T)
    try:
        if symmetric:
            vals = eigsh(A, k=1, which="LM", v0=_start_vector(n), tol=1e-12,
                         return_eigenvectors=False)
            return float(abs(vals[0]))
        s = svds(A, k=1, v0=_start_vector(n), tol=1e-12, return_singular_vectors=False)
        return float(s[0])
    except ArpackNoConvergence:
        return float(np.linalg.norm(A, 2))


def eigenvalues(m):
    """All eigenvalues of the matrix, ascending and real.

    For sign-changing V the matrix b G b S is similar to C^T S C with
    b G b = C C^T, which is symmetric; if the Cholesky factorization fails a
    general eigensolver is used and the imaginary parts are checked.
    """
    A = m.entries
    if m.positive:
        return sla.eigvalsh(A), 0.0
    active = m.b_vec > 0
    sgn = m.sign_vec[active]
    sym = A[np.ix_(active, active)] * sgn[None, :]
    try:
        C = np.linalg.cholesky(sym)
        vals = sla.eigvalsh(C.T @ (sgn[:, None] * C))
        imag = 0.0
    except np.linalg.LinAlgError:
        ev = np.linalg.eigvals(A[np.ix_(active, active)])
        scale = max(1.0, float(np.max(np.abs(ev))))
        imag = float(np.max(np.abs(ev.imag))) / scale
        if imag > IMAG_TOL:
            raise EigenSolveError(f"eigenvalues not real: relative imaginary part {imag:.2e}")
        vals = np.sort(ev.real)
    n_zero = int((~active).sum())
    if n_zero:
        vals = np.sort(np.concatenate([vals, np.zeros(n_zero)]))
    return vals, imag


def top_spectrum(m, k=5):
    """The k largest eigenvalues (descending) and the HS norm of m."""
    if k < 1:
        raise ValueError("k must be >= 1")
    n = m.entries.shape[0]
    k = min(k, n)
    if m.positive and n > 64 and k < n // 4:
        vals = sla.eigvalsh(m.entries, subset_by_index=[n - k, n - 1])
        imag = 0.0
    else:
        vals, imag = eigenvalues(m)
        vals = vals[-k:]
    hs = float(np.linalg.norm(m.entries))
    return SpectralSummary(vals[::-1].copy(), hs, m.alpha, imag)


def m_operator_norm(m):
    if m.kind != "M":
        raise ValueError("expected an M matrix")
    return spectral_norm(m.entries, symmetric=m.positive)


def _lambda_from(mm, epsilon, check=True):
    """Lambda and the solution x = (I - eps M)^{-1} b for an assembled M matrix."""
    if check:
        nrm = m_operator_norm(mm)
        if epsilon * nrm >= 1.0:
            raise MTooLarge(f"||eps M|| = {epsilon * nrm:.3g} >= 1 at alpha = {mm.alpha:.3g}")
    n = len(mm.b_vec)
    x = np.linalg.solve(np.eye(n) - epsilon * mm.entries, mm.b_vec)
    lam = 1.0 - epsilon * g_of_alpha(mm.alpha) * float(mm.c_vec @ x)
    return lam, x


def lambda_form(V, grid, alpha, epsilon):
    """Lambda_eps(alpha) = 1 - eps g(alpha) <(I - eps M)^{-1} b, c>.

    Raises MTooLarge when ||eps M(alpha)|| >= 1.
    """
    mm = assemble(V, grid, alpha, "M")
    return _lambda_from(mm, epsilon)[0]


@dataclass
class FactorizationReport:
    alpha: float
    epsilon: float
    lambda_value: float
    nearest_distance: float
    nearest_eigenvalue: float
    n_within: int
    tol: float


def factorization_check(V, grid, alpha, epsilon, tol=1e-3):
    """Compare |Lambda| with the distance of spec(eps Q) from 1 on the same discretization."""
    node = node_data(V, grid)
    mm = assemble(V, grid, alpha, "M", _node=node)
    lam, _ = _lambda_from(mm, epsilon)
    q = assemble(V, grid, alpha, "Q", _node=node)
    vals, _ = eigenvalues(q)
    dist = np.abs(epsilon * vals - 1.0)
    i = int(np.argmin(dist))
    return FactorizationReport(alpha, epsilon, lam, float(dist[i]), float(epsilon * vals[i]),
                               int(np.sum(dist < tol)), tol)


def m_norm_curve(V, grid, s, alphas):
    """Rows (alpha, ||M||, ||M||^2 / |g|^(2-s), |<M b, c>| / |g|^(1-s)) along decreasing alpha."""
    alphas = [float(a) for a in alphas]
    if not 0.0 <= s < 1.0:
        raise ValueError("s must lie in [0, 1)")
    if any(not 0 < a < math.exp(-1) for a in alphas):
        raise ValueError("alphas must lie in (0, 1/e)")
    if any(b >= a for a, b in zip(alphas, alphas[1:])):
        raise ValueError("alphas must be decreasing")
    node = node_data(V, grid)
    rows = []
    for a in alphas:
        mm = assemble(V, grid, a, "M", _node=node)
        g = abs(g_of_alpha(a))
        nrm = m_operator_norm(mm)
        form = abs(float(mm.c_vec @ (mm.entries @ mm.b_vec)))
        rows.append((a, nrm, nrm ** 2 / g ** (2.0 - s), form / g ** (1.0 - s)))
    return rows


def rank_one_norm(V, grid, alpha):
    """Operator norm of the discrete L(alpha) = g(alpha) b c^T, i.e. |g| |b| |c|."""
    b, sgn = node_data(V, grid)
    return abs(g_of_alpha(alpha)) * float(np.linalg.norm(b) * np.linalg.norm(b * sgn))


def hs_norm_quadrature(V, alpha):
    """||Q(alpha)||_HS from the autocorrelation F of |V| (radial V with bounded support).

    ||Q||_HS^2 = int F(|u|) G(|u|; alpha)^2 du. The kernel is taken from
    scipy.special.k0, so this does not share code with the Nystrom matrix.
    """
    from scipy import integrate, special

    from .potential import autocorrelation

    if not alpha > 0:
        raise ValueError("alpha must be positive")
    R = V.support_radius
    if not math.isfinite(R):
        raise ValueError("hs_norm_quadrature needs a potential with bounded support")

    def f(s):
        u = math.exp(s)
        k = special.k0(alpha * u) / (2.0 * math.pi)
        return autocorrelation(V, u) * k * k * 2.0 * math.pi * u * u

    hi = math.log(2.0 * R)
    total = 0.0
    for lo, up in ((-40.0, -12.0), (-12.0, 0.0 if hi > 0 else hi - 1.0), (0.0 if hi > 0 else hi - 1.0, hi)):
        total += integrate.quad(f, lo, up, epsabs=0.0, epsrel=1e-8, limit=200)[0]
    return math.sqrt(total)
