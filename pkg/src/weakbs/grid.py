"""Midpoint and ring-sector quadrature grids for the Nystrom discretization."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

MAX_NODES = 4096


@dataclass(eq=False)
class Grid2D:
    nodes: np.ndarray          # (N, 2)
    weights: np.ndarray        # (N,)
    cell_radius: np.ndarray    # equal-area disk radius of each cell
    scheme: str
    resolution: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float).reshape(-1, 2)
        self.weights = np.asarray(self.weights, dtype=float)
        self.cell_radius = np.asarray(self.cell_radius, dtype=float)
        if np.any(self.weights <= 0):
            raise ValueError("grid weights must be positive")

    def __len__(self):
        return len(self.weights)

    @property
    def area(self):
        return float(np.sum(self.weights))

    @cached_property
    def distances(self):
        """Pairwise node distances; the diagonal is set to 1 (never used as a distance)."""
        d = self.nodes[:, None, :] - self.nodes[None, :, :]
        r = np.sqrt(np.einsum("ijk,ijk->ij", d, d))
        np.fill_diagonal(r, 1.0)
        return r

    def subset(self, mask):
        mask = np.asarray(mask, dtype=bool)
        return Grid2D(self.nodes[mask], self.weights[mask], self.cell_radius[mask],
                      self.scheme, self.resolution, dict(self.meta, pruned=True))


def _cell_radius(weights):
    return np.sqrt(weights / math.pi)


def build_cartesian(radius, n_per_axis, prune=None):
    """Midpoint rule on [-radius, radius]^2 with n_per_axis cells per side.

    ``prune`` may be a potential; cells whose node lies outside the disk of the
    given radius and where the potential vanishes are dropped.
    """
    if not radius > 0:
        raise ValueError("radius must be positive")
    n = int(n_per_axis)
    if n < 2:
        raise ValueError("n_per_axis must be at least 2")
    h = 2.0 * radius / n
    c = -radius + h * (np.arange(n) + 0.5)
    X, Y = np.meshgrid(c, c, indexing="ij")
    nodes = np.column_stack([X.ravel(), Y.ravel()])
    w = np.full(n * n, h * h)
    g = Grid2D(nodes, w, _cell_radius(w), "cartesian", (n,), {"radius": radius})
    if prune is not None:
        outside = np.hypot(nodes[:, 0], nodes[:, 1]) > radius
        zero = prune.evaluate(nodes) == 0
        g = g.subset(~(outside & zero))
    return g


def ring_edges(radius, n_r, radial_grading=1.0, breaks=()):
    """Ring boundaries on [0, radius].

    With breaks, every break radius becomes a ring edge and rings are shared out
    in proportion to segment length. Grading q > 1 makes ring widths grow
    geometrically by q outward (first segment only), crowding rings near r = 0.
    """
    cuts = sorted(b for b in set(breaks) if 0 < b < radius)
    stops = [0.0, *cuts, float(radius)]
    lengths = np.diff(stops)
    if len(lengths) > n_r:
        raise ValueError("n_r smaller than the number of radial segments")
    counts = np.maximum(1, np.round(n_r * lengths / radius).astype(int))
    while counts.sum() > n_r:
        counts[np.argmax(counts)] -= 1
    while counts.sum() < n_r:
        counts[np.argmax(lengths / counts)] += 1
    edges = [0.0]
    for i, (a, b, m) in enumerate(zip(stops[:-1], stops[1:], counts)):
        q = radial_grading if i == 0 else 1.0
        if q == 1.0:
            e = a + (b - a) * np.arange(1, m + 1) / m
        else:
            k = np.arange(1, m + 1)
            e = a + (b - a) * (q ** k - 1.0) / (q ** m - 1.0)
        edges.extend(e.tolist())
    edges[-1] = float(radius)
    return np.array(edges)


def build_polar(radius, n_r, n_theta, radial_grading=1.0, breaks=()):
    """Ring-sector cells on the disk of the given radius; weights are exact sector areas."""
    if not radius > 0:
        raise ValueError("radius must be positive")
    if int(n_r) < 2 or int(n_theta) < 2:
        raise ValueError("n_r and n_theta must be at least 2")
    if radial_grading < 1.0:
        raise ValueError("radial_grading must be >= 1")
    n_r, n_theta = int(n_r), int(n_theta)
    edges = ring_edges(radius, n_r, radial_grading, breaks)
    r_mid = 0.5 * (edges[:-1] + edges[1:])
    dtheta = 2.0 * math.pi / n_theta
    theta = dtheta * (np.arange(n_theta) + 0.5)
    ring_area = 0.5 * (edges[1:] ** 2 - edges[:-1] ** 2) * dtheta
    R, T = np.meshgrid(r_mid, theta, indexing="ij")
    nodes = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
    w = np.repeat(ring_area, n_theta)
    return Grid2D(nodes, w, _cell_radius(w), "polar", (n_r, n_theta),
                  {"radius": radius, "grading": radial_grading, "edges": edges})


def integrate(grid, f):
    """Sum of w_i f(x_i); raises if f is not finite at some node."""
    vals = np.asarray(f(grid.nodes) if callable(f) else f, dtype=float)
    vals = np.broadcast_to(vals, grid.weights.shape)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise ValueError(f"integrand not finite at node {i} {tuple(grid.nodes[i])}")
    # numpy's pairwise summation is a fixed reduction tree
    return float(np.sum(grid.weights * vals))


def default_grid(V, resolution=None, scheme=None, grading=None, radius=None):
    """Default grid for a potential: polar for radial V, cartesian otherwise.

    ``resolution`` is n_r (polar, with n_theta = 48 by default, at least n_r, and
    reduced to keep the node count <= 4096) or cells per axis (cartesian).
    """
    scheme = scheme or ("polar" if V.radial else "cartesian")
    R = radius if radius is not None else V.support_radius
    if not math.isfinite(R):
        raise ValueError(f"potential {V.name!r} has unbounded support; pass an explicit radius")
    if scheme == "polar":
        n_r = int(resolution or 32)
        n_theta = max(8, min(max(48, n_r), MAX_NODES // n_r))
        g = build_polar(R, n_r, n_theta, grading or 1.0,
                        breaks=tuple(b for b in V.breaks if b < R))
    elif scheme == "cartesian":
        n = int(resolution or 64)
        g = build_cartesian(R, n, prune=V)
    else:
        raise ValueError(f"unknown grid scheme {scheme!r}")
    if len(g) > MAX_NODES:
        raise ValueError(f"grid has {len(g)} nodes; the dense solver is capped at {MAX_NODES}")
    return g
