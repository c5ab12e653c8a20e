"""Catalogue of closed-form test geometries.

Each entry builds metric, potential and complex-structure fields that
evaluate in the dtype of the points they receive, so stencils run in
extended precision.  Known invariants are attached as ``expected`` and
checked by `validate_geometry`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError, InvalidMetricError
from .fields import DIM, Box, TensorField, sample_points
from .forms import J_FRAME

STANDARD_J = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
])


@dataclass(frozen=True)
class GeometrySpec:
    """A chart with metric and optional potential and complex structure.

    Attributes
    ----------
    g, f, J : TensorField
        Metric ``(0,2)``, potential (scalar) and complex structure ``(1,1)``
        with ``J[k, j] = J^k_j``.  ``f`` and ``J`` may be None.
    domain : Box
        Where the fields may be evaluated (stencils included).
    sample_box : Box
        Where test points are drawn; strictly inside ``domain``.
    orientation : int
        +1 when the coordinate orientation is the one used for W+-.
    expected : dict
        Known invariants, e.g. ``scalar``, ``einstein``, ``soliton``,
        ``kahler``, ``conformally_flat``, ``ricci_eigenvalues``, ``theta``.
    """

    name: str
    params: dict
    g: TensorField
    f: TensorField | None
    J: TensorField | None
    domain: Box
    sample_box: Box
    orientation: int = 1
    expected: dict = field(default_factory=dict)

    def points(self, count, seed):
        return sample_points(self, count, seed)


def _metric(fn, domain, name):
    return TensorField(fn, (DIM, DIM), (0, 2), "symmetric", domain, name)


def _scalar(fn, domain, name):
    return TensorField(fn, (), (0, 0), "none", domain, name)


def _standard_j(domain):
    def ev(p):
        return np.broadcast_to(STANDARD_J.astype(p.dtype), p.shape[:-1] + (DIM, DIM))

    return TensorField(ev, (DIM, DIM), (1, 1), "none", domain, "J")


def _conformal_flat(weight):
    def ev(p):
        c = weight(p)
        return c[..., None, None] * np.eye(DIM, dtype=p.dtype)

    return ev


def _zero_scalar(p):
    return np.zeros(p.shape[:-1], dtype=p.dtype)


# ---------------------------------------------------------------------------


def gaussian():
    """Flat space with ``f = |x|^2 / 4`` and the standard complex structure."""
    dom = Box.cube(-3.0, 3.0)
    g = _metric(_conformal_flat(lambda p: np.ones(p.shape[:-1], dtype=p.dtype)), dom,
                "flat")
    f = _scalar(lambda p: (p * p).sum(-1) / 4, dom, "|x|^2/4")
    return GeometrySpec("gaussian", {}, g, f, _standard_j(dom), dom, Box.cube(-2.0, 2.0),
                        expected=dict(soliton=True, scalar=0.0, kahler=True,
                                      conformally_flat=True, ricci_eigenvalues=(0, 0, 0, 0),
                                      lee_closed=True))


def round_s4(a=np.sqrt(6.0)):
    """Stereographic round 4-sphere of radius ``a``, ``R = 12 / a^2``.

    The standard complex structure is orthogonal for this conformally flat
    metric and integrable, but not Kähler.  ``f`` is constant, so the
    soliton equation holds exactly when ``a = sqrt(6)``.
    """
    a = float(a)
    if not np.isfinite(a) or a <= 0:
        raise ConfigurationError(f"radius a must be positive, got {a}")
    dom = Box.cube(-1.6, 1.6)

    def weight(p):
        return 4 * a * a / (1 + (p * p).sum(-1)) ** 2

    g = _metric(_conformal_flat(weight), dom, f"round_s4({a})")
    k = 3.0 / (a * a)
    return GeometrySpec(
        "round_s4", {"a": a}, g, _scalar(_zero_scalar, dom, "0"), _standard_j(dom), dom,
        Box.cube(-1.0, 1.0),
        expected=dict(soliton=abs(k - 0.5) < 1e-12, scalar=12.0 / (a * a), einstein=k,
                      kahler=False, conformally_flat=True,
                      ricci_eigenvalues=(k, k, k, k), lee_closed=True),
    )


def fubini_study():
    """Complex projective plane in the affine chart, Einstein constant 1/2.

    Kähler potential ``c log(1 + |z|^2)`` with ``z = (x1 + i x2, x3 + i x4)``
    and ``c = 12``; the unit potential has Einstein constant 6.
    """
    c = 12.0
    dom = Box.cube(-2.0, 2.0)

    def ev(p):
        x = p[..., 0::2]
        y = p[..., 1::2]
        s = 1 + (x * x + y * y).sum(-1)
        re = x[..., :, None] * x[..., None, :] + y[..., :, None] * y[..., None, :]
        im = x[..., :, None] * y[..., None, :] - y[..., :, None] * x[..., None, :]
        eye = np.eye(2, dtype=p.dtype)
        A = c * (s[..., None, None] * eye - re) / (s * s)[..., None, None]
        B = -c * im / (s * s)[..., None, None]
        out = np.empty(p.shape[:-1] + (DIM, DIM), dtype=p.dtype)
        # real coordinates ordered (x1, y1, x2, y2)
        out[..., 0::2, 0::2] = A
        out[..., 1::2, 1::2] = A
        out[..., 0::2, 1::2] = B
        out[..., 1::2, 0::2] = -B
        return out

    g = _metric(ev, dom, "fubini_study")
    return GeometrySpec(
        "fubini_study", {}, g, _scalar(_zero_scalar, dom, "0"), _standard_j(dom), dom,
        Box.cube(-1.5, 1.5),
        expected=dict(soliton=True, scalar=2.0, einstein=0.5, kahler=True,
                      conformally_flat=False, ricci_eigenvalues=(0.5,) * 4, lee_closed=True,
                      wplus_spectrum=(1 / 3, -1 / 6, -1 / 6)),
    )


def product_shrinker():
    """Round 2-sphere of radius ``sqrt(2)`` times the Gaussian plane.

    ``f = (x3^2 + x4^2) / 4``; ``R = 1`` and Ricci eigenvalues ``1/2, 1/2,
    0, 0``.  Kähler for the product complex structure.
    """
    dom = Box.cube(-3.0, 3.0)

    def ev(p):
        s = 8 / (1 + p[..., 0] ** 2 + p[..., 1] ** 2) ** 2
        out = np.zeros(p.shape[:-1] + (DIM, DIM), dtype=p.dtype)
        out[..., 0, 0] = s
        out[..., 1, 1] = s
        out[..., 2, 2] = 1
        out[..., 3, 3] = 1
        return out

    g = _metric(ev, dom, "S2xR2")
    f = _scalar(lambda p: (p[..., 2] ** 2 + p[..., 3] ** 2) / 4, dom, "|y|^2/4")
    return GeometrySpec(
        "product_shrinker", {}, g, f, _standard_j(dom), dom,
        Box((-1.5, -1.5, -2.0, -2.0), (1.5, 1.5, 2.0, 2.0)),
        expected=dict(soliton=True, scalar=1.0, kahler=True, conformally_flat=False,
                      ricci_eigenvalues=(0.5, 0.5, 0.0, 0.0), lee_closed=True,
                      wplus_spectrum=(1 / 6, -1 / 12, -1 / 12)),
    )


DEFAULT_U = "0.1*x1 + 0.05*x2**2"


def _parse_u(u):
    import sympy as sp

    xs = sp.symbols("x1:5", real=True)
    names = {f"x{i + 1}": s for i, s in enumerate(xs)}
    allowed = {k: getattr(sp, k) for k in ("sin", "cos", "exp", "log", "sqrt", "tanh",
                                           "cosh", "sinh", "pi")}
    if isinstance(u, (int, float)):
        expr = sp.Float(u)
    else:
        try:
            expr = sp.parse_expr(str(u), local_dict={**names, **allowed},
                                 global_dict={"Integer": sp.Integer, "Float": sp.Float,
                                              "Symbol": sp.Symbol, "Rational": sp.Rational})
        except Exception as exc:  # sympy raises a zoo of types here
            raise ConfigurationError(f"cannot parse u={u!r}: {exc}") from exc
    extra = set(getattr(expr, "free_symbols", set())) - set(xs)
    if extra:
        raise ConfigurationError(f"u may only use x1..x4, found {sorted(map(str, extra))}")
    grad = [sp.diff(expr, s) for s in xs]
    fu = sp.lambdify(xs, expr, "numpy")
    fg = sp.lambdify(xs, grad, "numpy")
    return expr, fu, fg


def _broadcast_call(fn, p):
    out = fn(*(p[..., i] for i in range(DIM)))
    return np.broadcast_to(np.asarray(out, dtype=p.dtype), p.shape[:-1])


def conformal_hermitian(u=DEFAULT_U):
    """``g = exp(2u) delta`` with the standard complex structure.

    ``u`` is a sympy-parsable expression in ``x1..x4``.  The Lee form is
    ``2 du`` and the conformal scalar curvature vanishes.
    """
    expr, fu, fg = _parse_u(u)
    dom = Box.cube(-1.2, 1.2)

    def weight(p):
        return np.exp(2 * _broadcast_call(fu, p))

    def theta(p):
        comps = fg(*(p[..., i] for i in range(DIM)))
        return 2 * np.stack([np.broadcast_to(np.asarray(c, dtype=p.dtype), p.shape[:-1])
                             for c in comps], axis=-1)

    g = _metric(_conformal_flat(weight), dom, f"exp(2({expr}))")
    th = TensorField(theta, (DIM,), (0, 1), "none", dom, "2du")
    return GeometrySpec(
        "conformal_hermitian", {"u": str(u)}, g, None, _standard_j(dom), dom,
        Box.cube(-1.0, 1.0),
        expected=dict(soliton=False, kahler=bool(expr.is_constant()), conformally_flat=True,
                      theta=th, kappa=0.0, lee_closed=True),
    )


def _monomials(max_degree=3, min_degree=2):
    import itertools

    out = []
    for deg in range(min_degree, max_degree + 1):
        out += [np.bincount(c, minlength=DIM) for c in
                itertools.combinations_with_replacement(range(DIM), deg)]
    return np.array(out)


def random_poly(seed=0, amplitude=0.1):
    """``g = delta + amplitude * P(x)`` with seeded quadratic and cubic ``P``.

    Each independent entry of ``P`` has coefficients drawn from ``U(-1, 1)``
    and rescaled so that ``sum |c_m| r^deg(m) = 2`` with ``r = 0.6`` the
    domain radius.  Row sums of ``|P|`` are then at most 8 on the domain,
    which keeps ``g`` positive definite for ``amplitude <= 0.1``.
    """
    amplitude = float(amplitude)
    if not (0 < amplitude <= 0.1):
        raise ConfigurationError(f"amplitude must lie in (0, 0.1], got {amplitude}")
    seed = int(seed)
    rng = np.random.default_rng(seed)
    mono = _monomials()
    deg = mono.sum(1)
    r = 0.6
    iu = np.triu_indices(DIM)
    coef = rng.uniform(-1.0, 1.0, size=(len(iu[0]), len(mono)))
    coef *= 2.0 / (np.abs(coef) * r ** deg).sum(1, keepdims=True)
    C = np.zeros((len(mono), DIM, DIM))
    for n, (i, j) in enumerate(zip(*iu)):
        C[:, i, j] = C[:, j, i] = amplitude * coef[n]
    dom = Box.cube(-r, r)

    def ev(p):
        m = np.prod(p[..., None, :] ** mono.astype(p.dtype), axis=-1)
        return np.eye(DIM, dtype=p.dtype) + np.einsum("...m,mij->...ij", m, C.astype(p.dtype))

    g = _metric(ev, dom, f"random_poly({seed})")
    return GeometrySpec("random_poly", {"seed": seed, "amplitude": amplitude}, g, None, None,
                        dom, Box.cube(-0.5, 0.5), expected=dict(soliton=False))


# ---------------------------------------------------------------------------
# Page metric


def _page_nu():
    roots = np.roots([1.0, 4.0, -6.0, 12.0, -3.0])
    real = roots[np.abs(roots.imag) < 1e-12].real
    return float(real[(real > 0) & (real < 1)][0])


def page_constants(lam=1.0):
    """``(nu, n, r0)`` for the cohomogeneity-one Einstein metric.

    The metric is ``dr^2/V + 4 n^2 V s3^2 + P (dth^2 + sin^2 th dph^2)`` with
    ``P = n^2 - r^2``, ``s3 = dtau + cos th dph`` and
    ``V = (n^2 + r^2 - lam (n^4 + 2 n^2 r^2 - r^4/3)) / P``; it has
    ``Ric = lam g``.  ``V`` vanishes at ``r = +-r0``; closing the fibre
    smoothly there with period ``4 pi`` forces ``r0 = nu n`` where ``nu`` is
    the positive root of ``nu^4 + 4 nu^3 - 6 nu^2 + 12 nu - 3``.
    """
    nu = _page_nu()
    n2 = 3 * (1 + nu * nu) / (lam * (3 + 6 * nu * nu - nu ** 4))
    n = float(np.sqrt(n2))
    return nu, n, nu * n


def page(sign=1):
    """Page's Einstein metric on ``CP2 # -CP2``, scaled to ``Ric = g/2``.

    Coordinates ``(r, tau, theta, phi)``.  The complex structure maps
    ``e1 -> e2`` and ``e3 -> sign * e4`` in the orthonormal coframe
    ``dr/sqrt(V), 2 n sqrt(V) s3, sqrt(P) dth, sqrt(P) sin th dph``.
    ``sign=+1`` is the integrable one whose orientation agrees with the
    coordinates.
    """
    if sign not in (1, -1):
        raise ConfigurationError("sign must be +1 or -1")
    lam = 1.0
    nu, n, r0 = page_constants(lam)
    scale = 2.0 * lam
    dom = Box((-0.9 * r0, -2.0, 0.3, -2.0), (0.9 * r0, 2.0, np.pi - 0.3, 2.0))
    # V vanishes at the bolts r = +-r0; finite differences degrade towards them
    sample = Box((-0.5 * r0, -1.0, 0.6, -1.0), (0.5 * r0, 1.0, np.pi - 0.6, 1.0))

    def coframe(p):
        r, th = p[..., 0], p[..., 2]
        P = n * n - r * r
        V = (n * n + r * r - lam * (n ** 4 + 2 * n * n * r * r - r ** 4 / 3)) / P
        sq = np.sqrt(scale)
        out = np.zeros(p.shape[:-1] + (DIM, DIM), dtype=p.dtype)
        out[..., 0, 0] = sq / np.sqrt(V)
        out[..., 1, 1] = sq * 2 * n * np.sqrt(V)
        out[..., 1, 3] = sq * 2 * n * np.sqrt(V) * np.cos(th)
        out[..., 2, 2] = sq * np.sqrt(P)
        out[..., 3, 3] = sq * np.sqrt(P) * np.sin(th)
        return out

    Jf = J_FRAME.copy()
    Jf[2, 3], Jf[3, 2] = -sign, sign

    def metric(p):
        th = coframe(p)
        return np.einsum("...ai,...aj->...ij", th, th)

    def jfield(p):
        th = coframe(p)
        e = _inv4_upper(th)
        return np.einsum("...ia,ab,...bj->...ij", e, Jf.astype(p.dtype), th)

    g = _metric(metric, dom, "page")
    J = TensorField(jfield, (DIM, DIM), (1, 1), "none", dom, "J")
    return GeometrySpec(
        "page", {"sign": sign}, g, _scalar(_zero_scalar, dom, "0"), J, dom, sample,
        expected=dict(soliton=True, einstein=0.5, scalar=2.0, kahler=False,
                      conformally_flat=False, lee_closed=True, wplus_degenerate=True),
    )


def _inv4_upper(th):
    """Inverse of the Page coframe matrix, which is diagonal up to ``th[1, 3]``."""
    e = np.zeros_like(th)
    for a in range(DIM):
        e[..., a, a] = 1 / th[..., a, a]
    e[..., 1, 3] = -th[..., 1, 3] / (th[..., 1, 1] * th[..., 3, 3])
    return e


ZOO: dict[str, Callable[..., GeometrySpec]] = {
    "gaussian": gaussian,
    "round_s4": round_s4,
    "fubini_study": fubini_study,
    "product_shrinker": product_shrinker,
    "conformal_hermitian": conformal_hermitian,
    "random_poly": random_poly,
    "page": page,
}

PARAMS = {
    "gaussian": {},
    "round_s4": {"a": float},
    "fubini_study": {},
    "product_shrinker": {},
    "conformal_hermitian": {"u": str},
    "random_poly": {"seed": int, "amplitude": float},
    "page": {"sign": int},
}


def list_geometries():
    return sorted(ZOO)


def get_geometry(name, **params):
    """Build a zoo geometry by name.

    Raises
    ------
    ConfigurationError
        Unknown name or parameter, or a parameter value outside its range.
    """
    if name not in ZOO:
        raise ConfigurationError(f"unknown metric {name!r}; choose from {list_geometries()}")
    schema = PARAMS[name]
    bad = set(params) - set(schema)
    if bad:
        raise ConfigurationError(f"{name} takes parameters {sorted(schema)}, got {sorted(bad)}")
    kwargs = {}
    for k, v in params.items():
        try:
            kwargs[k] = schema[k](v)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"parameter {k}={v!r} for {name}: {exc}") from exc
    return ZOO[name](**kwargs)


def parse_metric_arg(arg):
    """``"name:k=v,k2=v2"`` -> ``(name, {k: v})`` with string values."""
    name, _, rest = arg.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            k, eq, v = item.partition("=")
            if not eq or not k:
                raise ConfigurationError(f"bad metric parameter {item!r}; use key=value")
            params[k.strip()] = v.strip()
    return name.strip(), params


VALIDATION_TOL = 1e-5


def validate_geometry(spec, n_points=8, seed=0, cfg=None):
    """Check declared invariants at seeded sample points.

    Returns
    -------
    dict
        ``{check: {"max": float, "pass": bool}}`` for SPD, Hermitian
        compatibility, integrability, Einstein and soliton residuals and
        Kähler closedness where declared.
    """
    from .curvature import curvature_arrays, gram_schmidt_frame_array
    from .fields import gradient
    from .forms import exterior_derivative_2form
    from .hermitian import hermitian_form_field, nijenhuis_arrays
    from .soliton import soliton_residual_arrays

    pts = spec.points(n_points, seed)
    out = {}
    g = np.asarray(spec.g(pts), dtype=np.float64)
    lam = np.linalg.eigvalsh(g)
    out["spd"] = {"max": float(-lam.min()), "pass": bool(lam.min() > 0)}
    if lam.min() <= 0:
        raise InvalidMetricError(f"{spec.name}: metric not positive definite at a sample point")
    # residuals are measured in orthonormal frames so they do not depend on coordinate scale
    e = gram_schmidt_frame_array(g)
    th = np.linalg.inv(e)

    def norm2(t):
        tf = np.einsum("...ia,...jb,...ij->...ab", e, e, t)
        return float(np.linalg.norm(tf, axis=(-2, -1)).max())

    def norm3(t, lower):
        if lower:
            tf = np.einsum("...ia,...jb,...kc,...ijk->...abc", e, e, e, t)
        else:
            tf = np.einsum("...ai,...jb,...kc,...ijk->...abc", th, e, e, t)
        return float(np.sqrt(np.sum(tf ** 2, axis=(-3, -2, -1))).max())

    exp = spec.expected
    c = curvature_arrays(spec.g, pts, cfg)
    if exp.get("einstein") is not None:
        r = norm2(c.ricci - exp["einstein"] * c.g)
        out["einstein"] = {"max": r, "pass": bool(r < VALIDATION_TOL)}
    if spec.f is not None and exp.get("soliton"):
        r = norm2(soliton_residual_arrays(spec.g, spec.f, pts, cfg))
        out["soliton"] = {"max": r, "pass": bool(r < VALIDATION_TOL)}
    if spec.J is not None:
        J = np.asarray(spec.J(pts), dtype=np.float64)
        sq = np.abs(J @ J + np.eye(DIM)).max()
        orth = np.abs(np.swapaxes(J, -1, -2) @ g @ J - g).max()
        out["j_squared"] = {"max": float(sq), "pass": bool(sq < 1e-10)}
        out["j_orthogonal"] = {"max": float(orth), "pass": bool(orth < 1e-10)}
        nij = norm3(nijenhuis_arrays(spec.J, pts, cfg), lower=False)
        out["integrable"] = {"max": nij, "pass": bool(nij < VALIDATION_TOL)}
        if exp.get("kahler"):
            dw = exterior_derivative_2form(gradient(hermitian_form_field(spec.g, spec.J), pts, cfg))
            r = norm3(dw, lower=True)
            out["kahler"] = {"max": r, "pass": bool(r < VALIDATION_TOL)}
    return out
