import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polycf import (
    SolidKind,
    contains,
    sample_points,
    scale_to_unit_dmax,
    solid_metrics,
    vertices,
)

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)


def test_tetrahedron_metrics(tetra):
    assert tetra.surface == pytest.approx(SQ3, abs=1e-14)
    assert tetra.volume == pytest.approx(1.0 / (6.0 * SQ2), abs=1e-14)
    assert tetra.dmax == 1.0


def test_octahedron_metrics(octa):
    assert octa.surface == pytest.approx(2.0 * SQ3, abs=1e-14)
    assert octa.volume == pytest.approx(SQ2 / 3.0, abs=1e-14)
    assert octa.dmax == pytest.approx(SQ2, abs=1e-15)


def test_sphere_metrics(sphere):
    assert sphere.dmax == 1.0
    assert sphere.volume == pytest.approx(math.pi / 6.0, rel=1e-15)
    assert sphere.surface == pytest.approx(math.pi, rel=1e-15)
    assert sphere.rg2 == pytest.approx(0.6 * 0.25, rel=1e-15)


def test_nonpositive_edge_rejected():
    with pytest.raises(ValueError):
        solid_metrics(SolidKind.CUBE, 0.0)
    with pytest.raises(ValueError):
        solid_metrics(SolidKind.SPHERE, -1.0)


@settings(max_examples=25, deadline=None)
@given(lam=st.floats(min_value=0.05, max_value=50.0))
def test_scaling_covariance(lam):
    for kind in (SolidKind.CUBE, SolidKind.SPHERE, SolidKind.CYLINDER):
        unit = solid_metrics(kind, 1.0)
        scaled = solid_metrics(kind, lam)
        assert scaled.surface == pytest.approx(unit.surface * lam**2, rel=1e-12)
        assert scaled.volume == pytest.approx(unit.volume * lam**3, rel=1e-12)
        assert scaled.dmax == pytest.approx(unit.dmax * lam, rel=1e-12)
        assert scaled.rg2 == pytest.approx(unit.rg2 * lam**2, rel=1e-12)


def test_scaling_covariance_polyhedra(tetra, octa):
    for unit in (tetra, octa):
        scaled = solid_metrics(unit.kind, 2.5)
        assert scaled.volume == pytest.approx(unit.volume * 2.5**3, rel=1e-12)
        assert scaled.rg2 == pytest.approx(unit.rg2 * 2.5**2, rel=1e-12)


def test_scale_to_unit_dmax(tetra, octa):
    assert scale_to_unit_dmax(tetra) == tetra
    scaled = scale_to_unit_dmax(octa)
    assert scaled.edge == pytest.approx(1.0 / SQ2, abs=1e-15)
    assert scaled.dmax == pytest.approx(1.0, abs=1e-15)
    big = solid_metrics(SolidKind.SPHERE, 2.0)
    small = scale_to_unit_dmax(big)
    assert small.edge == pytest.approx(1.0)
    assert small.volume == pytest.approx(math.pi / 6.0, rel=1e-14)


def test_contains_examples(tetra, octa):
    assert contains(tetra, (0.0, 0.0, 0.0))
    assert not contains(octa, (1.0 / SQ2 + 0.01, 0.0, 0.0))
    v = 1.0 / (2.0 * SQ2)
    assert contains(tetra, (v, v, v))  # closed at a vertex


def test_contains_vertices_closed(tetra, octa):
    for solid in (tetra, octa):
        assert np.all(contains(solid, vertices(solid)))


def test_sampling_deterministic(octa):
    a = sample_points(octa, 500, np.random.default_rng(11))
    b = sample_points(octa, 500, np.random.default_rng(11))
    np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize(
    "kind",
    [
        SolidKind.TETRAHEDRON,
        SolidKind.OCTAHEDRON,
        SolidKind.SPHERE,
        SolidKind.CUBE,
        SolidKind.CYLINDER,
    ],
)
def test_samples_inside(kind, rng):
    solid = solid_metrics(kind, 1.3)
    pts = sample_points(solid, 10_000, rng)
    assert np.all(contains(solid, pts))


def test_octahedron_sample_mean_symmetric(octa, rng):
    n = 200_000
    pts = sample_points(octa, n, rng)
    sem = pts.std(axis=0) / math.sqrt(n)
    assert np.all(np.abs(pts.mean(axis=0)) < 3.0 * sem)


def test_rejection_acceptance_rate(octa, rng):
    # uniform draws over the bounding cube must land inside with
    # probability V / V_box = 1/6
    n = 1_000_000
    a = octa.edge / SQ2
    cube_pts = rng.uniform(-a, a, size=(n, 3))
    frac = np.count_nonzero(contains(octa, cube_pts)) / n
    p = octa.volume / (2.0 * a) ** 3
    assert abs(frac - p) < 3.0 * math.sqrt(p * (1 - p) / n)


def test_tetra_halfspace_fraction_matches_grid_oracle(tetra, rng):
    # dense-grid volume fraction of the x > 0 sub-body as the oracle
    m = 160
    ax = np.linspace(-0.36, 0.36, m)
    gx, gy, gz = np.meshgrid(ax, ax, ax, indexing="ij")
    grid = np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])
    inside = contains(tetra, grid)
    oracle = np.count_nonzero(grid[inside][:, 0] > 0) / np.count_nonzero(inside)

    n = 400_000
    pts = sample_points(tetra, n, rng)
    frac = np.count_nonzero(pts[:, 0] > 0) / n
    sigma = math.sqrt(frac * (1 - frac) / n)
    assert abs(frac - oracle) < 3.0 * sigma + 0.01


def test_vertex_pairs_at_dmax(tetra, octa):
    for solid, expected in [(tetra, 6), (octa, 3)]:
        v = vertices(solid)
        d = np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)
        iu = np.triu_indices(len(v), k=1)
        n_at_dmax = np.count_nonzero(np.abs(d[iu] - solid.dmax) < 1e-12)
        assert n_at_dmax == expected
