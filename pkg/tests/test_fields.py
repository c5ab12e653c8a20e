import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from solitonlab.errors import ConfigurationError, DomainError
from solitonlab.fields import (
    Box,
    DiffConfig,
    TensorField,
    gradient,
    gradient_field,
    jet2,
    partial_derivative,
    sample_points,
    second_partial,
)
from solitonlab.zoo import get_geometry


def scalar(fn, domain=None):
    return TensorField(fn, (), domain=domain)


def test_partial_linear_factor():
    f = scalar(lambda p: p[..., 0] * p[..., 1])
    assert float(partial_derivative(f, [3.0, 5.0, 0.0, 0.0], 0)) == pytest.approx(5.0, abs=1e-12)


def test_partial_constant_is_zero():
    f = scalar(lambda p: np.full(p.shape[:-1], 3.5, dtype=p.dtype))
    for i in range(4):
        assert float(partial_derivative(f, [0.1, 0.2, 0.3, 0.4], i)) == 0.0


def test_partial_sine():
    f = scalar(lambda p: np.sin(p[..., 0]))
    x = [np.pi / 3, 0, 0, 0]
    assert float(partial_derivative(f, x, 0)) == pytest.approx(0.5, abs=1e-8)


def test_second_partials():
    x = [0.3, -0.7, 0.2, 0.1]
    sq = scalar(lambda p: p[..., 0] ** 2)
    xy = scalar(lambda p: p[..., 0] * p[..., 1])
    assert float(second_partial(sq, x, 0, 0)) == pytest.approx(2.0, abs=1e-8)
    assert float(second_partial(xy, x, 0, 1)) == pytest.approx(1.0, abs=1e-8)
    s = scalar(lambda p: np.sin(p[..., 0]))
    assert float(second_partial(s, [np.pi / 2, 0, 0, 0], 0, 0)) == pytest.approx(-1.0, abs=1e-8)


coeffs = st.lists(st.floats(-3, 3), min_size=15, max_size=15)
points = st.lists(st.floats(-2, 2), min_size=4, max_size=4)


def quadratic(c):
    c = np.asarray(c)
    iu = np.triu_indices(4)

    def ev(p):
        quad = sum(c[5 + n] * p[..., i] * p[..., j] for n, (i, j) in enumerate(zip(*iu)))
        return c[0] + sum(c[1 + i] * p[..., i] for i in range(4)) + quad

    return ev, c


@settings(max_examples=40, deadline=None)
@given(coeffs, points)
def test_degree_two_polynomials_exact(c, x):
    ev, c = quadratic(c + [0.0] * 6)
    f = scalar(ev)
    _, d1, d2 = jet2(f, np.array(x))
    x = np.array(x)
    iu = np.triu_indices(4)
    Q = np.zeros((4, 4))
    for n, (i, j) in enumerate(zip(*iu)):
        Q[i, j] += c[5 + n] / 2
        Q[j, i] += c[5 + n] / 2
    assert np.allclose(d1, c[1:5] + 2 * Q @ x, atol=1e-10)
    assert np.allclose(d2, 2 * Q, atol=1e-8)


@settings(max_examples=25, deadline=None)
@given(points, st.integers(0, 3), st.integers(0, 3))
def test_second_partial_symmetric(x, i, j):
    f = scalar(lambda p: np.exp(0.3 * p[..., 0] - 0.2 * p[..., 2]) * np.cos(p[..., 1] + p[..., 3]))
    a = second_partial(f, x, i, j)
    b = second_partial(f, x, j, i)
    assert abs(float(a - b)) <= 1e-8


@pytest.mark.parametrize("fn, dfn", [
    (lambda p: np.sin(p[..., 0]), lambda x: np.cos(x[0])),
    (lambda p: np.exp(0.7 * p[..., 0]), lambda x: 0.7 * np.exp(0.7 * x[0])),
])
def test_second_order_convergence(fn, dfn):
    x = np.array([0.4, 0.0, 0.0, 0.0])
    f = scalar(fn)
    e1 = abs(float(partial_derivative(f, x, 0, DiffConfig(h=1e-2))) - dfn(x))
    e2 = abs(float(partial_derivative(f, x, 0, DiffConfig(h=5e-3))) - dfn(x))
    assert 3.5 <= e1 / e2 <= 4.5


def test_gradient_shape_and_nesting():
    f = scalar(lambda p: (p * p).sum(-1))
    x = np.array([[0.1, 0.2, 0.3, 0.4], [1.0, 0.0, -1.0, 0.5]])
    assert gradient(f, x).shape == (2, 4)
    hess = gradient(gradient_field(f), x)
    assert hess.shape == (2, 4, 4)
    assert np.allclose(hess, 2 * np.eye(4), atol=1e-8)
    assert gradient_field(f).order == 1


def test_nested_step_widening():
    cfg = DiffConfig(h=1e-4)
    assert cfg.step(0) == cfg.step(1) == 1e-4
    assert cfg.step(2) == pytest.approx(4e-4)


def test_domain_error_names_coordinate():
    f = scalar(lambda p: p[..., 0], Box.cube(-1, 1))
    with pytest.raises(DomainError, match="x3"):
        partial_derivative(f, [0.0, 0.0, 1.0, 0.0], 2)


def test_non_finite_points_rejected():
    f = scalar(lambda p: p[..., 0])
    with pytest.raises(DomainError):
        f(np.array([np.nan, 0, 0, 0]))


@pytest.mark.parametrize("h", [0.0, -1e-3, float("nan"), 1e-14])
def test_bad_step(h):
    with pytest.raises(ConfigurationError):
        DiffConfig(h=h)


def test_bad_direction():
    f = scalar(lambda p: p[..., 0])
    with pytest.raises(ConfigurationError):
        partial_derivative(f, [0, 0, 0, 0], 4)


def test_sample_points_deterministic():
    spec = get_geometry("gaussian")
    a = sample_points(spec, 3, 7)
    b = sample_points(spec, 3, 7)
    assert np.array_equal(a, b)
    assert sample_points(spec, 1, 0).shape == (1, 4)


def test_sample_points_membership():
    for name in ("gaussian", "page", "fubini_study"):
        spec = get_geometry(name)
        pts = sample_points(spec, 100, 1)
        assert spec.sample_box.contains(pts).all()
        assert len({tuple(p) for p in pts}) == 100


def test_sample_points_bad_count():
    with pytest.raises(ConfigurationError):
        sample_points(get_geometry("gaussian"), 0, 1)


def test_symmetry_defect():
    g = get_geometry("random_poly").g
    assert g.symmetry_defect([0.1, 0.2, -0.3, 0.4]) <= 1e-12


def test_evaluator_deterministic():
    g = get_geometry("page").g
    x = get_geometry("page").points(2, 3)
    assert np.array_equal(np.asarray(g(x)), np.asarray(g(x)))
