"""Levi-Civita connection, curvature and its first derivatives.

Sign conventions: ``R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + ...`` and
``R_ijkl = g_ia R^a_{jkl}``, so a round sphere has ``R_ijij > 0``,
``Ric_jl = g^ik R_ijkl`` and ``[nabla_i, nabla_j] Z_k = R_ijkl Z^l``.
The Weyl operator on 2-forms is ``W(s)_ij = 1/2 W_ijkl s^kl``.

Curvature is algebraic in the 2-jet of the metric.  Quantities needing a
third metric derivative (Cotton tensor, divergence of W) differentiate the
curvature fields on an outer stencil.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .fields import DIM, TensorField, as_point, gradient, jet2
from .forms import (
    FramePack,
    build_frames_gram_schmidt,
    check_metric,
    tensor_from_frame,
    tensor_to_frame,
)
from .forms import E_FRAME, F_FRAME


@dataclass
class CurvatureArrays:
    """Batched curvature data; every array has the same leading axes."""

    g: np.ndarray
    ginv: np.ndarray
    dg: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: np.ndarray
    weyl: np.ndarray


def christoffel_from_jet(g, dg):
    """``G^k_ij`` from the metric and ``dg[..., m, i, j] = d_m g_ij``."""
    ginv = np.linalg.inv(g)
    first = 0.5 * (np.einsum("...ijl->...lij", dg) + np.einsum("...jil->...lij", dg)
                   - dg)
    return ginv, np.einsum("...kl,...lij->...kij", ginv, first)


def riemann_from_jet(g, dg, d2g):
    """Fully covariant ``R_ijkl`` from the metric 2-jet."""
    ginv, gam = christoffel_from_jet(g, dg)
    first = 0.5 * (np.einsum("...ijl->...lij", dg) + np.einsum("...jil->...lij", dg) - dg)
    dfirst = 0.5 * (np.einsum("...mijl->...mlij", d2g) + np.einsum("...mjil->...mlij", d2g)
                    - d2g)
    dginv = -np.einsum("...ka,...mab,...bl->...mkl", ginv, dg, ginv)
    dgam = (np.einsum("...mkl,...lij->...mkij", dginv, first)
            + np.einsum("...kl,...mlij->...mkij", ginv, dfirst))
    # R^a_bcd with dgam[c, a, d, b] = d_c G^a_db
    rup = (np.einsum("...cadb->...abcd", dgam) - np.einsum("...dacb->...abcd", dgam)
           + np.einsum("...ace,...edb->...abcd", gam, gam)
           - np.einsum("...ade,...ecb->...abcd", gam, gam))
    return ginv, gam, np.einsum("...ia,...ajkl->...ijkl", g, rup)


def weyl_from(riemann, ricci, scalar, g):
    kn = (np.einsum("...ik,...jl->...ijkl", ricci, g) - np.einsum("...il,...jk->...ijkl", ricci, g)
          + np.einsum("...jl,...ik->...ijkl", ricci, g)
          - np.einsum("...jk,...il->...ijkl", ricci, g))
    gg = np.einsum("...ik,...jl->...ijkl", g, g) - np.einsum("...il,...jk->...ijkl", g, g)
    return riemann - 0.5 * kn + (scalar / 6.0)[..., None, None, None, None] * gg


def curvature_arrays(g_field, points, cfg=None):
    """Curvature at a batch of points from one 33-point stencil each."""
    g, dg, d2g = jet2(g_field, points, cfg)
    g = 0.5 * (g + np.swapaxes(g, -1, -2))
    ginv, gam, rm = riemann_from_jet(g, dg, d2g)
    ric = np.einsum("...ik,...ijkl->...jl", ginv, rm)
    scal = np.einsum("...jl,...jl->...", ginv, ric)
    w = weyl_from(rm, ric, scal, g)
    return CurvatureArrays(g, ginv, dg, gam, rm, ric, scal, w)


def ricci_field(g_field, cfg=None):
    return TensorField(lambda p: curvature_arrays(g_field, p, cfg).ricci, (DIM, DIM), (0, 2),
                       "symmetric", g_field.domain, "Ric", 2)


def scalar_field(g_field, cfg=None):
    return TensorField(lambda p: curvature_arrays(g_field, p, cfg).scalar, (), (0, 0),
                       "none", g_field.domain, "R", 2)


def weyl_field(g_field, cfg=None):
    return TensorField(lambda p: curvature_arrays(g_field, p, cfg).weyl, (DIM,) * 4, (0, 4),
                       "antisymmetric", g_field.domain, "W", 2)


def gram_schmidt_frame_array(g):
    L = np.linalg.cholesky(g)
    return np.swapaxes(np.linalg.inv(L), -1, -2)


def weyl_blocks(weyl_frame):
    """``(M+, M-)`` with ``M_ab = 1/8 W_ijkl E_a^ij E_b^kl`` in an orthonormal frame.

    With this normalisation ``W(E_b) = sum_a M_ab E_a``.
    """
    mp = 0.125 * np.einsum("...ijkl,aij,bkl->...ab", weyl_frame, E_FRAME, E_FRAME)
    mm = 0.125 * np.einsum("...ijkl,aij,bkl->...ab", weyl_frame, F_FRAME, F_FRAME)
    return mp, mm


def wplus_from_block(mp):
    """Frame components of ``W+ = 1/2 sum M_ab E_a (x) E_b``."""
    return 0.5 * np.einsum("...ab,aij,bkl->...ijkl", mp, E_FRAME, E_FRAME)


def wplus_field(g_field, cfg=None):
    """Coordinate components of W+ (orientation of the coordinates)."""

    def ev(p):
        c = curvature_arrays(g_field, p, cfg)
        e = gram_schmidt_frame_array(c.g)
        mp, _ = weyl_blocks(tensor_to_frame(c.weyl, e, 4))
        return tensor_from_frame(wplus_from_block(mp), np.linalg.inv(e), 4)

    return TensorField(ev, (DIM,) * 4, (0, 4), "antisymmetric", g_field.domain, "W+", 2)


@dataclass(frozen=True)
class CurvaturePackage:
    """Curvature at one point, in coordinates and in a chosen frame."""

    g: np.ndarray
    ginv: np.ndarray
    christoffel: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float
    weyl: np.ndarray
    frames: FramePack

    @cached_property
    def riemann_frame(self):
        return tensor_to_frame(self.riemann, self.frames.e, 4)

    @cached_property
    def ricci_frame(self):
        return tensor_to_frame(self.ricci, self.frames.e, 2)

    @cached_property
    def weyl_frame(self):
        return tensor_to_frame(self.weyl, self.frames.e, 4)

    @cached_property
    def blocks(self):
        return weyl_blocks(self.weyl_frame)

    @property
    def wplus(self):
        """3x3 block of W+ in the basis ``E_a``."""
        return self.blocks[0]

    @property
    def wminus(self):
        return self.blocks[1]

    @property
    def wplus_eigenvalues(self):
        """Descending eigenvalues of W+."""
        return np.linalg.eigvalsh(self.wplus)[::-1]

    @property
    def wminus_eigenvalues(self):
        return np.linalg.eigvalsh(self.wminus)[::-1]

    @cached_property
    def ricci_endomorphism_eigenvalues(self):
        return np.sort(np.linalg.eigvals(self.ginv @ self.ricci).real)[::-1]


def curvature_package(g_field, point, frames=None, cfg=None):
    """Curvature at a point.

    Parameters
    ----------
    g_field : TensorField
    point : array_like, shape (4,)
    frames : FramePack, optional
        Frame used for the W+- blocks; Gram-Schmidt if omitted.
    cfg : DiffConfig, optional
    """
    x = as_point(point)
    c = curvature_arrays(g_field, x, cfg)
    check_metric(c.g)
    if frames is None:
        frames = build_frames_gram_schmidt(c.g)
    return CurvaturePackage(c.g, c.ginv, c.christoffel, c.riemann, c.ricci, float(c.scalar),
                            c.weyl, frames)


def christoffel(g_field, point, cfg=None):
    """``G^k_ij`` at a point, indexed ``[k, i, j]``."""
    g, dg = g_field(as_point(point)), gradient(g_field, as_point(point), cfg)
    return christoffel_from_jet(np.asarray(g, dtype=np.float64), dg)[1]


def covariant_derivative_arrays(t, dt, gam, valence):
    """``nabla_p T`` from components, partials and Christoffel symbols.

    ``t`` has shape ``(..., *comps)`` with the ``r`` contravariant slots
    first; ``dt`` is ``(..., 4, *comps)``.  The derivative index comes first
    in the result.
    """
    r, s = valence
    rank = r + s
    lead = t.ndim - rank
    out = np.array(dt, dtype=np.float64)
    for q in range(rank):
        tq = np.moveaxis(t, lead + q, -1)
        others = tq.shape[lead:-1]
        tq = tq.reshape(tq.shape[:lead] + (-1, DIM))
        if q < r:
            corr = np.einsum("...apm,...km->...pka", gam, tq)
            sign = 1.0
        else:
            corr = np.einsum("...mpb,...km->...pkb", gam, tq)
            sign = -1.0
        corr = corr.reshape(corr.shape[:lead] + (DIM,) + others + (DIM,))
        corr = np.moveaxis(corr, -1, lead + 1 + q)
        out = out + sign * corr
    return out


def covariant_derivative(field, g_field, point, cfg=None):
    """``nabla T`` at a point; the new covariant index is placed first."""
    x = as_point(point)
    return covariant_derivative_batch(field, g_field, x, cfg)


def covariant_derivative_batch(field, g_field, points, cfg=None):
    t = np.asarray(field(points), dtype=np.float64)
    dt = gradient(field, points, cfg)
    g = np.asarray(g_field(points), dtype=np.float64)
    _, gam = christoffel_from_jet(g, gradient(g_field, points, cfg))
    return covariant_derivative_arrays(t, dt, gam, field.valence)


@dataclass(frozen=True)
class CottonValue:
    """Cotton tensor ``C_ijk`` (antisymmetric in ``j, k``) at a point."""

    components: np.ndarray
    nabla_ricci: np.ndarray
    d_scalar: np.ndarray


def cotton_arrays(g_field, points, cfg=None):
    nric = covariant_derivative_batch(ricci_field(g_field, cfg), g_field, points, cfg)
    g = np.asarray(g_field(points), dtype=np.float64)
    ginv = np.linalg.inv(g)
    dR = np.einsum("...ij,...kij->...k", ginv, nric)
    c = (np.einsum("...kij->...ijk", nric) - np.einsum("...jik->...ijk", nric)
         - (np.einsum("...ij,...k->...ijk", g, dR) - np.einsum("...ik,...j->...ijk", g, dR)) / 6.0)
    return c, nric, dR


def cotton(g_field, point, cfg=None):
    """``C_ijk = nabla_k R_ij - nabla_j R_ik - (g_ij d_k R - g_ik d_j R)/6``."""
    c, nric, dR = cotton_arrays(g_field, as_point(point), cfg)
    return CottonValue(c, nric, dR)


@dataclass(frozen=True)
class WeylDivergence:
    """``div(W)_jkl = nabla^i W_ijkl`` and its self-dual projections.

    ``plus[a]`` is the coordinate 1-form ``j -> 1/2 div(W)_jkl E_a^kl``.
    """

    components: np.ndarray
    plus: np.ndarray
    minus: np.ndarray


def div_weyl_arrays(g_field, points, cfg=None):
    nw = covariant_derivative_batch(weyl_field(g_field, cfg), g_field, points, cfg)
    g = np.asarray(g_field(points), dtype=np.float64)
    return np.einsum("...pi,...pijkl->...jkl", np.linalg.inv(g), nw)


def div_weyl(g_field, point, frames=None, cfg=None):
    x = as_point(point)
    d = div_weyl_arrays(g_field, x, cfg)
    if frames is None:
        frames = build_frames_gram_schmidt(np.asarray(g_field(x), dtype=np.float64))
    up_e = contravariant_basis(frames.e, E_FRAME)
    up_f = contravariant_basis(frames.e, F_FRAME)
    plus = 0.5 * np.einsum("jkl,akl->aj", d, up_e)
    minus = 0.5 * np.einsum("jkl,akl->aj", d, up_f)
    return WeylDivergence(d, plus, minus)


def contravariant_basis(e, M):
    """``E^{ij} = e_a^i M_ab e_b^j`` for a stack of frame matrices ``M``."""
    return np.einsum("...ia,xab,...jb->...xij", e, M, e)


def riemann_symmetry_defects(rm):
    """Max defects of pair antisymmetry, pair exchange and first Bianchi."""
    anti = max(np.max(np.abs(rm + np.swapaxes(rm, -4, -3))),
               np.max(np.abs(rm + np.swapaxes(rm, -2, -1))))
    pair = np.max(np.abs(rm - np.einsum("...ijkl->...klij", rm)))
    bianchi = np.max(np.abs(rm + np.einsum("...ijkl->...iklj", rm)
                            + np.einsum("...ijkl->...iljk", rm)))
    return {"antisymmetry": float(anti), "pair_symmetry": float(pair),
            "first_bianchi": float(bianchi)}


def weyl_trace_defect(weyl, ginv):
    return float(np.max(np.abs(np.einsum("...ik,...ijkl->...jl", ginv, weyl))))


def rm_action_residual(pkg):
    """``sum_kl R_ijkl E_kl - (2 W(E) - R/3 E + E Ric + Ric E)`` per ``E_a``.

    Evaluated in the orthonormal frame; returns the max-abs defect.
    """
    rmf, ric, W = pkg.riemann_frame, pkg.ricci_frame, pkg.weyl_frame
    worst = 0.0
    for E in E_FRAME:
        lhs = np.einsum("ijkl,kl->ij", rmf, E)
        wE = 0.5 * np.einsum("ijkl,kl->ij", W, E)
        rhs = 2 * wE - pkg.scalar / 3.0 * E + E @ ric + ric @ E
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
