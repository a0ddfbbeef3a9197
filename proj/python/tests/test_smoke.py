import math

import numpy as np
import pytest

import geoproj


def test_catalogue_lists_charts():
    names = [n for n, _ in geoproj.catalogue()]
    assert "clifton-pohl" in names
    assert "periodic-shift" in names


def test_scalar_field_infix_and_prefix():
    f = geoproj.ScalarField("x^2 + 3 y")
    assert f(2.0, 1.0) == pytest.approx(7.0)
    assert f.dx()(2.0, 1.0) == pytest.approx(4.0)
    g = geoproj.ScalarField("(* 2 (sin x))")
    assert g(math.pi / 2, 0.0) == pytest.approx(2.0)


def test_clifton_pohl_curvature():
    chart = geoproj.zoo("clifton-pohl")["chart"]
    x, y = 0.7, -0.4
    assert geoproj.gaussian_curvature(chart, x, y) == pytest.approx(-4 * x * y / (x * x + y * y), rel=1e-8)


def test_sphere_geodesic_is_great_circle():
    sphere = geoproj.parse_chart(
        "name: sphere\nsignature: riemannian\ng11: 1\ng12: 0\ng22: (pow (sin x) 2)\n"
        "x-min: 0\nx-max: 3.141592653589793\nperiod-y: 6.283185307179586\n")
    samples, reason = geoproj.integrate_geodesic(sphere, (math.pi / 2, 0.0, 0.0, 1.0), 1.0)
    assert reason == "time-limit"
    assert isinstance(samples, np.ndarray)
    assert samples.shape[1] == 5
    assert samples[-1, 1] == pytest.approx(math.pi / 2, abs=1e-8)
    assert samples[-1, 2] == pytest.approx(1.0, abs=1e-8)
    conj = geoproj.find_conjugate_points(sphere, (math.pi / 2, 0.0, 0.0, 1.0), 4.0)
    assert conj[0] == pytest.approx(math.pi, abs=1e-6)


def test_band_pair_is_projectively_equivalent():
    g = geoproj.zoo("band", a=1, l=0)["chart"]
    gbar = geoproj.zoo("band", a=2, l=0.3)["chart"]
    report = geoproj.check_projective_equivalence(g, gbar, seed=3)
    assert report["verdict"] == "equivalent"
    assert report["max_drift"] <= 1e-6


def test_tau_is_projective_not_isometry():
    entry = geoproj.zoo("periodic-shift")
    chart = entry["chart"]
    tau = [m for m in entry["maps"] if m.name == "tau"][0]
    assert not geoproj.check_isometry(chart, tau)["pass"]
    assert not geoproj.check_affinity(chart, tau)["pass"]


def test_flat_translation_is_isometry_from_strings():
    flat = geoproj.zoo("flat")["chart"]
    assert geoproj.check_isometry(flat, ("x + 1", "y - 2"))["pass"]


def test_energy_conservation_report():
    entry = geoproj.zoo("sphere")
    rep = geoproj.check_conservation(entry["chart"], entry["integrals"][0], n_samples=10, seed=5)
    assert rep["pass"]
    assert rep["max_drift"] < 1e-7


def test_liouville_search():
    res = geoproj.liouville_isometry_search("2 + sin(4 pi x)", "5 - sin(4 pi x)")
    assert res["found"]
    assert res["k"] == pytest.approx(0.25, abs=1e-6)
    assert res["c"] == pytest.approx(3.0, abs=1e-6)


def test_errors_are_mapped():
    with pytest.raises(geoproj.ConstructionError):
        geoproj.zoo("periodic-shift", eps=0.9)
    with pytest.raises(geoproj.ChartFormatError):
        geoproj.parse_chart("signature: sideways\n")


def test_single_criterion_passes():
    res = geoproj.run_criterion(5, seed=2)
    assert res["pass"]
