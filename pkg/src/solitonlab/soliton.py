"""Shrinking-soliton identities.

Everything is written for ``Ric + Hess f = SHRINK * g`` with
``SHRINK = 1/2``.  Identities that are consequences of the soliton equation
refuse to run when the soliton residual exceeds ``SOLITON_GATE``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .curvature import cotton_arrays, curvature_arrays, curvature_package, scalar_field
from .errors import ConfigurationError, PreconditionError
from .fields import DIM, TensorField, as_point, gradient, jet2
from .forms import (
    E_FRAME,
    build_frames_gram_schmidt,
    exterior_derivative_2form,
    tensor_to_frame,
    volume_coefficient,
    wedge_1_3,
)
from .hermitian import hermitian_form_field

SHRINK = 0.5
SOLITON_GATE = 1e-4


@dataclass(frozen=True)
class SolitonData:
    """Potential, its gradient vector field and its Hessian."""

    f: TensorField
    gradf: TensorField
    hessf: TensorField


def soliton_data(g_field, f_field, cfg=None):
    def grad(p):
        g = np.asarray(g_field(p), dtype=np.float64)
        return np.einsum("...ij,...j->...i", np.linalg.inv(g), gradient(f_field, p, cfg))

    def hess(p):
        c = curvature_arrays(g_field, p, cfg)
        _, df, d2f = jet2(f_field, p, cfg)
        return d2f - np.einsum("...kij,...k->...ij", c.christoffel, df)

    dom = g_field.domain
    return SolitonData(
        f_field,
        TensorField(grad, (DIM,), (1, 0), "none", dom, "grad f", 1),
        TensorField(hess, (DIM, DIM), (0, 2), "symmetric", dom, "Hess f", 2),
    )


@dataclass(frozen=True)
class TraceFreeRicci:
    """``Ric0 = Ric - R/4 g`` in coordinates."""

    Ric0: np.ndarray

    def trace(self, ginv):
        return float(np.einsum("ij,ij->", ginv, self.Ric0))


def trace_free_ricci(package):
    return TraceFreeRicci(package.ricci - package.scalar / 4.0 * package.g)


def soliton_residual_arrays(g_field, f_field, points, cfg=None):
    c = curvature_arrays(g_field, points, cfg)
    _, df, d2f = jet2(f_field, points, cfg)
    hess = d2f - np.einsum("...kij,...k->...ij", c.christoffel, df)
    return c.ricci + hess - SHRINK * c.g


def soliton_residual(g_field, f_field, point, cfg=None):
    """``Ric + Hess f - g/2`` in coordinates."""
    return soliton_residual_arrays(g_field, f_field, as_point(point), cfg)


def _frame_norm(t, g, rank):
    e = build_frames_gram_schmidt(g).e
    return float(np.linalg.norm(tensor_to_frame(t, e, rank)))


def soliton_residual_norm(g_field, f_field, point, cfg=None):
    x = as_point(point)
    r = soliton_residual_arrays(g_field, f_field, x, cfg)
    return _frame_norm(r, np.asarray(g_field(x), dtype=np.float64), 2)


def _grad_up(g, df):
    return np.linalg.solve(g, df)


def grad_scalar_identity_residual(g_field, f_field, point, cfg=None):
    """``2 Ric(grad f, .) - dR`` as a coordinate 1-form.

    Warns, but still computes, when the soliton residual is large.
    """
    x = as_point(point)
    res = soliton_residual_norm(g_field, f_field, x, cfg)
    if res > SOLITON_GATE:
        warnings.warn(f"soliton residual {res:.2e} exceeds {SOLITON_GATE:.0e}", stacklevel=2)
    c = curvature_arrays(g_field, x, cfg)
    v = _grad_up(c.g, gradient(f_field, x, cfg))
    dR = gradient(scalar_field(g_field, cfg), x, cfg)
    return 2.0 * c.ricci @ v - dR


def cotton_soliton_rhs(rm, ric, g, v):
    """``-R_pijk v^p - (g_ij Ric(v)_k - g_ik Ric(v)_j) / 3`` for a vector ``v``."""
    ricv = ric @ v
    return (-np.einsum("pijk,p->ijk", rm, v)
            - (np.einsum("ij,k->ijk", g, ricv) - np.einsum("ik,j->ijk", g, ricv)) / 3.0)


def _gate(g_field, f_field, x, cfg):
    res = soliton_residual_norm(g_field, f_field, x, cfg)
    if res > SOLITON_GATE:
        raise PreconditionError(
            f"soliton residual {res:.2e} exceeds {SOLITON_GATE:.0e}; identity not applicable")


def cotton_soliton_form_residual(g_field, f_field, point, frames=None, cfg=None):
    """Cotton tensor minus its soliton form, coordinate ``(0,3)`` components."""
    x = as_point(point)
    _gate(g_field, f_field, x, cfg)
    c = curvature_arrays(g_field, x, cfg)
    C, _, _ = cotton_arrays(g_field, x, cfg)
    v = _grad_up(c.g, gradient(f_field, x, cfg))
    return C - cotton_soliton_rhs(c.riemann, c.ricci, c.g, v)


def cplus_contraction_identity_residual(g_field, v, point, frames=None, cfg=None):
    """Residual of the pointwise algebra behind the ``C+`` expansion.

    With ``Ct`` the soliton form of the Cotton tensor for the vector ``v``,
    returns, for each ``a``, the frame 1-form

        Ct_ijk E_a^jk - (2 W(E_a) v + E_a (Ric - R) v / 3 + Ric E_a v)

    Parameters
    ----------
    v : array_like, shape (4,)
        Coordinate components of an arbitrary vector.

    Returns
    -------
    ndarray, shape (3, 4)
    """
    x = as_point(point)
    pkg = curvature_package(g_field, x, frames, cfg)
    e = pkg.frames.e
    vf = pkg.frames.vector_to_frame(np.asarray(v, dtype=np.float64))
    # lhs: coordinate contraction of the soliton-form Cotton tensor
    ct = cotton_soliton_rhs(pkg.riemann, pkg.ricci, pkg.g, np.asarray(v, dtype=np.float64))
    ct_f = tensor_to_frame(ct, e, 3)
    lhs = np.einsum("ijk,ajk->ai", ct_f, E_FRAME)
    rhs = _cplus_integrand(pkg, vf)
    return lhs - rhs


def _cplus_integrand(pkg, vf):
    ric = pkg.ricci_frame
    W = pkg.weyl_frame
    out = []
    for E in E_FRAME:
        wE = 0.5 * np.einsum("ijkl,kl->ij", W, E)
        out.append(2 * wE @ vf + E @ (ric @ vf - pkg.scalar * vf) / 3.0 + ric @ E @ vf)
    return np.array(out)


@dataclass(frozen=True)
class Case1Result:
    """Frame vectors ``(E_a (Ric - R)/3 + Ric E_a)(v)`` and the size of W+."""

    vectors: np.ndarray
    wplus_norm: float
    meaningful: bool


def case1_system_residual(g_field, f_field, point, frames=None, cfg=None, v=None,
                          wplus_threshold=1e-6):
    """Evaluate the system implied by ``C+ = 0`` when W+ vanishes.

    ``v`` defaults to ``grad f``.  The result is flagged as not meaningful
    when ``|W+|`` exceeds ``wplus_threshold``.
    """
    x = as_point(point)
    pkg = curvature_package(g_field, x, frames, cfg)
    if v is None:
        if f_field is None:
            raise ConfigurationError("case-1 system needs f or an explicit v")
        v = _grad_up(pkg.g, gradient(f_field, x, cfg))
    vf = pkg.frames.vector_to_frame(np.asarray(v, dtype=np.float64))
    ric = pkg.ricci_frame
    vecs = np.array([E @ (ric @ vf - pkg.scalar * vf) / 3.0 + ric @ E @ vf for E in E_FRAME])
    wn = float(np.linalg.norm(pkg.wplus))
    return Case1Result(vecs, wn, wn <= wplus_threshold)


def ric0_gradf(g_field, f_field, points, cfg=None):
    """Coordinate 1-form ``Ric0(grad f, .)`` at a batch of points."""
    c = curvature_arrays(g_field, points, cfg)
    df = gradient(f_field, points, cfg)
    ric0 = c.ricci - (c.scalar / 4.0)[..., None, None] * c.g
    return np.einsum("...ij,...jk,...k->...i", ric0, c.ginv, df), c


def main_identity_lhs(g_field, f_field, J_field, point, cfg=None, orientation=1):
    """Coefficient of ``Ric0(grad f, .) ^ d omega`` against the volume form."""
    if f_field is None or J_field is None:
        raise ConfigurationError("main identity needs both f and J")
    x = as_point(point)
    alpha, c = ric0_gradf(g_field, f_field, x, cfg)
    domega = exterior_derivative_2form(gradient(hermitian_form_field(g_field, J_field), x, cfg))
    return float(volume_coefficient(wedge_1_3(alpha, domega), c.g, orientation))
