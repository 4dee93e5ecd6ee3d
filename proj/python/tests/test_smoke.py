import math
import os
import sys

import pytest

module_dir = os.environ.get("STEINMC_MODULE_DIR")
if module_dir:
    sys.path.insert(0, module_dir)

core = pytest.importorskip("_steinmc")


def test_version():
    assert core.__version__


def test_kappa_and_wills():
    assert core.unit_ball_volume(0) == pytest.approx(1.0)
    assert core.unit_ball_volume(1) == pytest.approx(2.0)
    assert core.unit_ball_volume(2) == pytest.approx(math.pi)
    # Interval of radius 1 in d=1: 2*1 + 1*2 = 4.
    assert core.wills_functional(1, [1.0, 2.0]) == pytest.approx(4.0)


def test_scene_and_intrinsic_volumes():
    germs = core.sample_scene_germs(1, 4, 0.5, 7)
    assert len(germs) == 4
    assert all(-2.0 <= g[0] <= 2.0 for g in germs)
    v = core.intrinsic_volumes(2, 9, 0.4, 11)
    assert len(v) == 3
    assert v[0] == int(v[0])  # Euler characteristic is integral
    assert v[2] >= 0.0


def test_disc_union_closed_form():
    v0, v1, v2 = core.disc_union_volumes([0.0, 1.0], [0.0, 0.0], 1.0)
    assert v0 == 1
    assert v1 == pytest.approx(4.0 * math.pi / 3.0 / 2.0 * 2.0, rel=1e-9)
    assert v2 == pytest.approx(2.0 * math.pi - core.lens_area(1.0, 1.0))


def test_p_coefficients():
    p = core.p_coefficients(1, 0.5)
    assert p[1][1] == pytest.approx(math.exp(-1.0))
    assert p[0][1] == pytest.approx(-math.exp(-1.0))


def test_sigma_series_small():
    out = core.sigma_series(1, 0.3, k_max=6, mc_samples=20000, seed=3)
    sigma = out["sigma"]
    assert sigma[0][1] == pytest.approx(sigma[1][0])
    assert out["k_used"] >= 2


def test_exact_mean_1d():
    v0, v1 = core.exact_mean_1d(100, 0.3)
    assert 0 < v1 < 100
    assert 0 < v0 <= 100


def test_knn_and_delta():
    points = [[0.0], [1.0], [2.5], [4.5], [10.0]]
    neighbors = core.knn_graph_neighbors(points, 1)
    assert [n[0] for n in neighbors] == [1, 0, 1, 2, 3]
    # Cliques over closed 2-neighbourhoods.
    edges = core.interaction_edges(points, 1)
    assert edges == [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (2, 4), (3, 4)]
    assert core.alpha_cones(2) == 6


def test_gamma12_matches_closed_form():
    g1, se1, g2, _ = core.gamma12_linear_statistic(100, 1, 100000, 42)
    expected = 2.0 ** 1.5 * 2.0 * math.sqrt(2.0 / math.pi) / 10.0
    assert abs(g1 - expected) < 4.0 * se1
    assert g2 > 0.0


def test_t_matrix_exact():
    assert core.t_matrix_exact_linear([2.0], [5.0]) == pytest.approx(4.5)


def test_rate_fit():
    pairs = [(n, 3.0 / math.sqrt(n)) for n in (16, 32, 64, 128)]
    slope, _, half_width = core.rate_fit(pairs)
    assert slope == pytest.approx(-0.5, abs=1e-9)
    assert half_width < 1e-6


def test_normal_cdf():
    assert core.normal_cdf(0.0) == pytest.approx(0.5, abs=1e-7)
    assert core.normal_cdf(1.96) == pytest.approx(0.975, abs=1e-4)
