import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weakbs.grid import MAX_NODES, build_cartesian, build_polar, default_grid, integrate, ring_edges
from weakbs.potential import builtin


def test_cartesian_two_by_two():
    g = build_cartesian(1.0, 2)
    assert sorted(map(tuple, g.nodes)) == [(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5)]
    assert np.all(g.weights == 1.0)


@given(st.floats(0.1, 10.0), st.integers(2, 40))
def test_cartesian_area_and_invariants(R, n):
    g = build_cartesian(R, n)
    assert g.area == pytest.approx(4 * R * R, rel=1e-10)
    assert integrate(g, lambda x: np.ones(len(x))) == pytest.approx(4 * R * R, rel=1e-10)
    assert np.allclose(g.cell_radius, np.sqrt(g.weights / math.pi))


@given(st.floats(0.1, 10.0), st.integers(2, 30), st.integers(2, 30), st.floats(1.0, 1.5))
def test_polar_area_exact(R, nr, nt, q):
    g = build_polar(R, nr, nt, q)
    assert g.area == pytest.approx(math.pi * R * R, rel=1e-13)
    assert np.all(g.weights > 0)


def test_polar_gaussian_integral():
    # the ring-midpoint rule is second order: 64 rings on radius 6 give ~2e-3, not 1e-6
    V = builtin("gaussian")
    errs = [abs(integrate(build_polar(6.0, n, 64), V.evaluate) - math.pi) for n in (64, 128, 256)]
    assert errs[0] < 5e-3
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
    assert errs[2] < 2e-4


def test_linear_function_vanishes_on_symmetric_grid():
    g = build_cartesian(1.0, 10)
    assert abs(integrate(g, lambda x: 3 * x[:, 0] - x[:, 1])) < 1e-14


def test_r_squared_on_polar_grid_and_refinement():
    errs = []
    for n in (8, 16, 32):
        g = build_polar(1.0, n, 2 * n)
        errs.append(abs(integrate(g, lambda x: (x ** 2).sum(1)) - math.pi / 2))
    assert errs[-1] < 1e-3
    assert errs[0] / errs[1] >= 2 and errs[1] / errs[2] >= 2


def test_refinement_cartesian_gaussian():
    V = builtin("gaussian")
    errs = [abs(integrate(build_cartesian(6.0, n), V.evaluate) - math.pi) for n in (8, 16, 32)]
    assert errs[0] / errs[1] >= 2 and errs[1] / errs[2] >= 2


def test_grading_one_is_uniform():
    e = ring_edges(2.0, 5, 1.0)
    assert np.allclose(e, np.linspace(0, 2, 6))
    g = ring_edges(2.0, 5, 1.3)
    assert g[1] < e[1] and g[-1] == 2.0


def test_breaks_are_ring_edges():
    e = ring_edges(2.0, 10, 1.0, breaks=(0.7,))
    assert np.any(np.isclose(e, 0.7, rtol=0, atol=1e-15))


def test_pruned_grid_reproduces_integral():
    V = builtin("disk")
    full = build_cartesian(1.5, 30)
    pruned = build_cartesian(1.5, 30, prune=V)
    assert len(pruned) < len(full)
    assert integrate(pruned, V.evaluate) == pytest.approx(integrate(full, V.evaluate), abs=1e-12)


def test_integrate_rejects_nonfinite():
    g = build_cartesian(1.0, 2)
    with pytest.raises(ValueError, match="node"):
        integrate(g, lambda x: np.where(x[:, 0] > 0, np.inf, 1.0))


def test_errors():
    with pytest.raises(ValueError):
        build_cartesian(0.0, 4)
    with pytest.raises(ValueError):
        build_cartesian(1.0, 1)
    with pytest.raises(ValueError):
        build_polar(1.0, 1, 8)
    with pytest.raises(ValueError):
        build_polar(1.0, 4, 8, radial_grading=0.5)


def test_default_grid():
    g = default_grid(builtin("disk"))
    assert g.scheme == "polar" and len(g) <= MAX_NODES
    with pytest.raises(ValueError, match="radius"):
        default_grid(builtin("v_infinity"))
    assert len(default_grid(builtin("v_infinity"), radius=10.0)) <= MAX_NODES
    with pytest.raises(ValueError):
        default_grid(builtin("disk"), resolution=100, scheme="cartesian")
