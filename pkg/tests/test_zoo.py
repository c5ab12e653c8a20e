import numpy as np
import pytest

from solitonlab.curvature import curvature_package
from solitonlab.errors import ConfigurationError
from solitonlab.soliton import soliton_residual_norm
from solitonlab.zoo import (
    PARAMS,
    get_geometry,
    list_geometries,
    page_constants,
    parse_metric_arg,
    random_poly,
    validate_geometry,
)

ALL = ["gaussian", "round_s4", "fubini_study", "product_shrinker", "conformal_hermitian",
       "random_poly", "page"]


def test_catalogue_names():
    assert list_geometries() == sorted(ALL)
    assert set(PARAMS) == set(ALL)


@pytest.mark.parametrize("name", ALL)
def test_validate_geometry(name):
    report = validate_geometry(get_geometry(name), n_points=100, seed=0)
    assert report["spd"]["pass"]
    for check, entry in report.items():
        assert entry["pass"], (check, entry["max"])


@pytest.mark.parametrize("name", ALL)
def test_sample_box_inside_domain(name):
    spec = get_geometry(name)
    lo, hi = np.asarray(spec.sample_box.lo), np.asarray(spec.sample_box.hi)
    assert np.all(lo >= np.asarray(spec.domain.lo)) and np.all(hi <= np.asarray(spec.domain.hi))


def test_random_poly_positive_definite_everywhere():
    pts = np.random.default_rng(0).uniform(-0.6, 0.6, size=(10_000, 4))
    for seed in range(5):
        lam = np.linalg.eigvalsh(np.asarray(random_poly(seed).g(pts), dtype=float))
        assert lam.min() > 0


def test_random_poly_seeded():
    x = np.array([0.1, -0.2, 0.3, 0.05])
    assert np.array_equal(np.asarray(random_poly(3).g(x)), np.asarray(random_poly(3).g(x)))
    assert not np.array_equal(np.asarray(random_poly(3).g(x)), np.asarray(random_poly(4).g(x)))
    spec = get_geometry("random_poly", seed=3, amplitude=0.05)
    assert spec.params == {"seed": 3, "amplitude": 0.05}


def test_random_poly_amplitude_range():
    with pytest.raises(ConfigurationError):
        random_poly(amplitude=0.5)


def test_conformal_zero_is_flat():
    spec = get_geometry("conformal_hermitian", u="0")
    x = spec.points(1, 0)[0]
    assert np.allclose(np.asarray(spec.g(x)), np.eye(4))
    assert np.abs(curvature_package(spec.g, x).riemann).max() <= 1e-12
    assert spec.expected["kahler"]


@pytest.mark.parametrize("u", ["x5", "import os", "1 +", "y"])
def test_conformal_bad_expression(u):
    with pytest.raises(ConfigurationError):
        get_geometry("conformal_hermitian", u=u)


def test_gaussian_flags():
    spec = get_geometry("gaussian")
    e = spec.expected
    assert e["soliton"] and e["kahler"] and e["conformally_flat"]
    assert e["scalar"] == 0.0


def test_round_s4_soliton_radius():
    spec = get_geometry("round_s4", a=np.sqrt(6.0))
    assert spec.expected["soliton"]
    for x in spec.points(5, 0):
        assert soliton_residual_norm(spec.g, spec.f, x) <= 1e-5
    assert not get_geometry("round_s4", a=1.0).expected["soliton"]


def test_round_s4_bad_radius():
    with pytest.raises(ConfigurationError):
        get_geometry("round_s4", a=-1.0)


def test_page_constants():
    nu, n, r0 = page_constants()
    assert nu ** 4 + 4 * nu ** 3 - 6 * nu ** 2 + 12 * nu - 3 == pytest.approx(0.0, abs=1e-12)
    assert n == pytest.approx(0.96603, abs=1e-5) and r0 == pytest.approx(0.27213, abs=1e-5)
    P = n * n - r0 * r0
    V = (n * n + r0 * r0 - (n ** 4 + 2 * n * n * r0 * r0 - r0 ** 4 / 3)) / P
    assert abs(V) <= 1e-12
    spec = get_geometry("page")
    assert spec.expected["soliton"] and not spec.expected.get("kahler")


def test_page_sign():
    assert get_geometry("page", sign=-1).J is not None


def test_get_geometry_errors():
    with pytest.raises(ConfigurationError, match="unknown metric"):
        get_geometry("torus")
    with pytest.raises(ConfigurationError):
        get_geometry("gaussian", a=1)
    with pytest.raises(ConfigurationError):
        get_geometry("round_s4", a="big")


def test_parse_metric_arg():
    assert parse_metric_arg("round_s4:a=2") == ("round_s4", {"a": "2"})
    assert parse_metric_arg("random_poly:seed=3,amplitude=0.05") == (
        "random_poly", {"seed": "3", "amplitude": "0.05"})
    assert parse_metric_arg("page") == ("page", {})
    with pytest.raises(ConfigurationError):
        parse_metric_arg("round_s4:a")
