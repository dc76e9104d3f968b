import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from weakbs.bsop import (BSMatrix, MTooLarge, assemble, eigenvalues, factorization_check,
                         g_of_alpha, hs_norm, hs_norm_quadrature, lambda_form, m_norm_curve,
                         m_operator_norm, node_data, rank_one_norm, top_spectrum)
from weakbs.grid import Grid2D, build_cartesian, build_polar
from weakbs.potential import builtin, load_potential
from weakbs.specfun import green_cell_avg

ZERO = load_potential({"piecewise_radial": [[0.0, 0.0], [1.0, 0.0]]})


def test_g_of_alpha():
    assert g_of_alpha(1.0) == 0.0
    assert g_of_alpha(math.exp(-2 * math.pi)) == pytest.approx(1.0, rel=1e-15)
    assert g_of_alpha(math.exp(2 * math.pi)) == pytest.approx(-1.0, rel=1e-15)
    with pytest.raises(ValueError):
        g_of_alpha(0.0)


def test_zero_potential(small_disk_grid):
    q = assemble(ZERO, small_disk_grid, 0.5)
    assert not np.any(q.entries) and hs_norm(q) == 0.0
    assert np.all(top_spectrum(q, 3).top_eigenvalues == 0.0)
    assert lambda_form(ZERO, small_disk_grid, 0.1, 0.5) == 1.0
    rep = factorization_check(ZERO, small_disk_grid, 0.1, 0.5)
    assert rep.lambda_value == 1.0 and rep.nearest_distance == 1.0
    assert all(r[1] == 0 and r[2] == 0 and r[3] == 0 for r in m_norm_curve(ZERO, small_disk_grid, 0.0, [1e-2, 1e-4]))


def test_one_node_grid(disk):
    g = Grid2D(np.array([[0.1, 0.2]]), np.array([0.3]), np.array([math.sqrt(0.3 / math.pi)]), "cartesian", (1,))
    for a in (0.1, 1.0, 7.0):
        q = assemble(disk, g, a)
        assert q.entries[0, 0] == pytest.approx(0.3 * 1.0 * green_cell_avg(g.cell_radius[0], a), rel=1e-15)
        assert top_spectrum(q, 1).top_eigenvalues[0] == pytest.approx(q.entries[0, 0])


def test_symmetry_for_positive_potential(gaussian):
    g = build_polar(gaussian.support_radius, 10, 20)
    q = assemble(gaussian, g, 0.7)
    assert np.max(np.abs(q.entries - q.entries.T)) <= 1e-14


@given(st.floats(1e-8, 10.0))
def test_q_equals_l_plus_m(a):
    V = builtin("annulus_signed")
    g = build_polar(2.0, 6, 12, breaks=(1.0,))
    q, m = assemble(V, g, a, "Q"), assemble(V, g, a, "M")
    L = g_of_alpha(a) * np.outer(m.b_vec, m.c_vec)
    assert np.max(np.abs(q.entries - m.entries - L)) <= 1e-12 * max(1.0, np.max(np.abs(q.entries)))


def test_hs_norm_matches_quadrature_oracle(disk, disk_grid):
    for a in (0.5, 1.0, 2.0):
        assert hs_norm(assemble(disk, disk_grid, a)) == pytest.approx(hs_norm_quadrature(disk, a), rel=0.02)


def test_hs_norm_refinement_improves(disk):
    ref = hs_norm_quadrature(disk, 1.0)
    errs = [abs(hs_norm(assemble(disk, build_polar(1.0, n, 2 * n), 1.0)) - ref) for n in (8, 16)]
    assert errs[1] < errs[0]


def test_hs_norm_decay(disk, small_disk_grid):
    hs = [hs_norm(assemble(disk, small_disk_grid, a)) for a in (0.1, 1.0, 10.0, 50.0)]
    assert all(b <= a for a, b in zip(hs, hs[1:]))
    assert hs[-1] < hs[1] and hs[-1] / hs[0] < 0.05
    with pytest.raises(ValueError):
        hs_norm(assemble(disk, small_disk_grid, 1.0, "M"))


def test_schur_bound(gaussian):
    g = build_polar(gaussian.support_radius, 10, 20)
    s = top_spectrum(assemble(gaussian, g, 0.3), 5)
    assert np.sum(s.top_eigenvalues ** 2) <= s.hs_norm ** 2
    assert np.all(np.diff(s.top_eigenvalues) <= 0)


def test_top_eigenvalue_increases_as_alpha_decreases(disk, small_disk_grid):
    mus = [top_spectrum(assemble(disk, small_disk_grid, a), 1).top_eigenvalues[0] for a in (1.0, 0.1, 0.01)]
    assert mus[0] < mus[1] < mus[2]


def test_one_by_one_matrix():
    m = BSMatrix(1.0, np.array([[2.5]]), np.array([1.0]), np.array([1.0]), "Q")
    assert top_spectrum(m, 1).top_eigenvalues.tolist() == [2.5]


def test_sign_changing_spectrum_is_real():
    V = builtin("annulus_signed")
    g = build_polar(2.0, 10, 20, breaks=(1.0,))
    q = assemble(V, g, 0.3)
    vals, imag = eigenvalues(q)
    ref = np.sort(np.linalg.eigvals(q.entries).real)
    assert imag <= 1e-8
    assert np.allclose(vals, ref, atol=1e-10)
    assert np.min(vals) < 0 < np.max(vals)


def test_rank_one_norm_matches_l1_norm(disk, disk_grid):
    a = 1e-3
    assert rank_one_norm(disk, disk_grid, a) == pytest.approx(abs(g_of_alpha(a)) * math.pi, rel=1e-12)
    b, sgn = node_data(disk, disk_grid)
    L = g_of_alpha(a) * np.outer(b, b * sgn)
    assert np.linalg.norm(L, 2) == pytest.approx(rank_one_norm(disk, disk_grid, a), rel=1e-10)


def test_lambda_form_at_alpha_one_is_one(disk, small_disk_grid):
    assert lambda_form(disk, small_disk_grid, 1.0, 0.3) == 1.0


def test_lambda_tends_to_one_as_eps_vanishes(disk, small_disk_grid):
    vals = [abs(lambda_form(disk, small_disk_grid, 1e-3, e) - 1.0) for e in (1e-1, 1e-2, 1e-3)]
    assert vals[0] > vals[1] > vals[2] and vals[2] < 1e-2


def test_m_too_large(disk, small_disk_grid):
    with pytest.raises(MTooLarge):
        lambda_form(disk, small_disk_grid, 1e-3, 50.0)


def test_factorization_away_from_root(disk, small_disk_grid):
    rep = factorization_check(disk, small_disk_grid, 0.05, 0.2)
    assert rep.lambda_value > 0.3
    assert rep.nearest_distance > 0.1 and rep.n_within == 0


def test_m_norm_curve_trends(disk, small_disk_grid):
    for s in (0.0, 0.5):
        rows = m_norm_curve(disk, small_disk_grid, s, [1e-2, 1e-4, 1e-6, 1e-8])
        for col in (2, 3):
            c = [r[col] for r in rows]
            assert all(x > 0 for x in c)
            assert all(b < a for a, b in zip(c, c[1:]))


def test_m_norm_curve_validation(disk, small_disk_grid):
    with pytest.raises(ValueError):
        m_norm_curve(disk, small_disk_grid, 1.0, [1e-2])
    with pytest.raises(ValueError):
        m_norm_curve(disk, small_disk_grid, 0.0, [1e-4, 1e-2])
    with pytest.raises(ValueError):
        m_norm_curve(disk, small_disk_grid, 0.0, [0.5])


def test_singular_node_rejected():
    V = builtin("v_zero")
    g = build_cartesian(1 / 3, 3)
    with pytest.raises(ValueError, match="singular"):
        node_data(V, g)


def test_m_operator_norm_kind_check(disk, small_disk_grid):
    with pytest.raises(ValueError):
        m_operator_norm(assemble(disk, small_disk_grid, 0.1, "Q"))
