import math

import numpy as np
import pytest

from polycf import (
    EstimationError,
    IntensityCurve,
    PoissonGamma,
    QuadratureSpec,
    intensity,
    intensity_curve,
    normalize_curve,
    oscillation_amplitude,
    oscillation_spacing,
    parse_distribution,
    point_mass,
    polydisperse_curve,
    polydisperse_intensity,
    porod_curve,
    window_mean,
)
from polycf.scattering import PointMixture


def sphere_form_factor(q, volume=math.pi / 6.0, radius=0.5):
    x = q * radius
    amp = 3.0 * (np.sin(x) - x * np.cos(x)) / x**3
    return volume * amp**2


def test_sphere_matches_closed_form(sphere_cf):
    q = np.logspace(math.log10(0.1), math.log10(50.0), 200)
    curve = intensity_curve(sphere_cf, q)
    rel = np.abs(curve.values / sphere_form_factor(q) - 1.0)
    assert rel.max() <= 1e-6


def test_intensity_at_zero_is_volume(tetra, octa, tetra_cf, octa_cf):
    assert intensity(tetra_cf, 0.0) == pytest.approx(tetra.volume, rel=1e-8)
    assert intensity(octa_cf, 0.0) == pytest.approx(octa.volume, rel=1e-8)


def test_negative_q_rejected(sphere_cf):
    with pytest.raises(ValueError):
        intensity(sphere_cf, -1.0)


def test_intensity_nonnegative(tetra_cf, octa_cf):
    q = np.linspace(0.0, 80.0, 400)
    for cf in (tetra_cf, octa_cf):
        assert np.all(intensity_curve(cf, q).values >= 0.0)


def test_quadrature_self_convergence(tetra_cf):
    coarse = intensity(tetra_cf, 50.0, QuadratureSpec(nodes_per_panel=64))
    fine = intensity(tetra_cf, 50.0, QuadratureSpec(nodes_per_panel=128))
    assert abs(coarse / fine - 1.0) < 1e-9


def test_panel_width_resolves_oscillation():
    spec = QuadratureSpec()
    for q, width in [(1.0, 1.0), (37.0, 0.3), (250.0, 1.4)]:
        assert width / spec.panels(q, width) <= math.pi / (2.0 * q)


def test_porod_of_power_law_is_constant():
    q = np.linspace(10.0, 20.0, 50)
    c = 7.25
    curve = IntensityCurve(q=q, values=c / q**4)
    np.testing.assert_allclose(porod_curve(curve).values, c, rtol=1e-12)


def test_porod_rejects_normalized(sphere_cf):
    curve = normalize_curve(intensity_curve(sphere_cf, np.linspace(0.0, 5.0, 10)))
    with pytest.raises(ValueError):
        porod_curve(curve)


def test_normalize_curve(tetra_cf):
    curve = intensity_curve(tetra_cf, np.linspace(0.0, 5.0, 20))
    norm = normalize_curve(curve)
    assert norm.values[0] == 1.0 and norm.normalized
    again = normalize_curve(norm)
    np.testing.assert_array_equal(again.values, norm.values)


def test_normalize_requires_small_q(tetra_cf):
    curve = intensity_curve(tetra_cf, np.linspace(1.0, 5.0, 10))
    with pytest.raises(ValueError):
        normalize_curve(curve)


def test_curve_grid_validation():
    with pytest.raises(ValueError):
        IntensityCurve(q=np.array([1.0, 0.5]), values=np.zeros(2))
    with pytest.raises(ValueError):
        IntensityCurve(q=np.array([]), values=np.array([]))


def test_oscillation_spacing_synthetic():
    q = np.linspace(40.0, 120.0, 8001)
    curve = IntensityCurve(q=q, values=np.cos(q) / q**4)
    assert oscillation_spacing(curve) == pytest.approx(2.0 * math.pi, rel=1e-2)


def test_oscillation_spacing_needs_peaks():
    q = np.linspace(1.0, 2.0, 50)
    with pytest.raises(EstimationError):
        oscillation_spacing(IntensityCurve(q=q, values=1.0 / q))


def test_window_mean_integer_periods():
    q = np.linspace(20.0, 60.0, 4001)
    curve = IntensityCurve(q=q, values=5.0 + np.cos(q))
    # snapping to whole periods removes the partial-period bias
    assert window_mean(curve, 25.0, 55.0) == pytest.approx(5.0, abs=2e-3)


def test_poisson_gamma_density_and_moments():
    dist = PoissonGamma(4, 1.0)
    assert dist.pdf(4.0) == pytest.approx(4.0**4 * math.exp(-4.0) / 24.0, rel=1e-12)
    assert dist.moment(0) == pytest.approx(1.0, rel=1e-12)
    assert dist.moment(6) == pytest.approx(151200.0, rel=1e-12)
    d = np.linspace(0.0, dist.truncation(1e-12), 4000)
    assert np.trapezoid(dist.pdf(d), d) == pytest.approx(1.0, abs=1e-6)


def test_parse_distribution():
    assert parse_distribution("poisson:4,1") == PoissonGamma(4, 1.0)
    assert parse_distribution("point:2.5").sizes == (2.5,)
    for bad in ("poisson:4", "gauss:1,2", "poisson:a,b"):
        with pytest.raises(ValueError):
            parse_distribution(bad)


def test_point_mass_is_identity_smearing(octa_cf):
    for q in (0.0, 1.3, 7.0):
        assert polydisperse_intensity(octa_cf, point_mass(1.0), q) == pytest.approx(
            intensity(octa_cf, q), rel=1e-14
        )


def test_mixture_smearing_is_linear(tetra_cf):
    mix = PointMixture(sizes=(0.8, 1.7), weights=(0.3, 0.7))
    for q in (0.0, 2.0, 9.0):
        direct = polydisperse_intensity(tetra_cf, mix, q)
        split = 0.3 * polydisperse_intensity(
            tetra_cf, point_mass(0.8), q
        ) + 0.7 * polydisperse_intensity(tetra_cf, point_mass(1.7), q)
        assert direct == pytest.approx(split, rel=1e-12)


def test_mixture_validation():
    with pytest.raises(ValueError):
        PointMixture(sizes=(1.0, 2.0), weights=(0.5, 0.6))
    with pytest.raises(ValueError):
        PointMixture(sizes=(), weights=())


def test_smeared_zero_q_moment(tetra, octa, tetra_cf, octa_cf):
    dist = PoissonGamma(4, 1.0)
    for solid, cf in [(tetra, tetra_cf), (octa, octa_cf)]:
        i0 = polydisperse_intensity(cf, dist, 0.0)
        assert i0 == pytest.approx(solid.volume * 151200.0, rel=1e-6)


def test_smeared_curve_matches_pointwise(octa_cf):
    dist = PoissonGamma(4, 1.0)
    q = np.linspace(0.0, 3.0, 7)
    curve = polydisperse_curve(octa_cf, dist, q)
    for qi, vi in zip(q, curve.values):
        assert polydisperse_intensity(octa_cf, dist, float(qi)) == pytest.approx(
            vi, rel=1e-8
        )


def test_intensity_ordering_toward_sphere(tetra_cf, octa_cf, sphere_cf):
    # at matched dmax, the octahedron's scaled intensity sits between the
    # tetrahedron's and the sphere's at low q
    from polycf import SolidKind, cf_for, scale_to_unit_dmax, solid_metrics

    octa1 = cf_for(scale_to_unit_dmax(solid_metrics(SolidKind.OCTAHEDRON, 1.0)))
    q = np.array([0.0, 3.0])
    vals = {}
    for name, cf in [("tet", tetra_cf), ("oct", octa1), ("sph", sphere_cf)]:
        vals[name] = normalize_curve(intensity_curve(cf, q)).values[1]
    assert abs(vals["oct"] - vals["sph"]) < abs(vals["tet"] - vals["sph"])


def test_oscillation_amplitude_washout(octa_cf):
    q = np.linspace(30.0, 50.0, 1001)
    mono = porod_curve(intensity_curve(octa_cf, q))
    poly = porod_curve(polydisperse_curve(octa_cf, PoissonGamma(4, 1.0), q))
    assert oscillation_amplitude(poly, 30.0, 50.0) < 0.1 * oscillation_amplitude(
        mono, 30.0, 50.0
    )
