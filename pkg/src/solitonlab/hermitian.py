"""Hermitian structures, the Lee form and the self-dual Weyl expansions.

Conventions
-----------
``omega(X, Y) = g(JX, Y)``, so ``omega_ij = J^k_i g_kj``.  With ``J e1 = e2``
and ``J e3 = e4`` this is ``e12 + e34``, which is the basis element ``E1`` of
a J-adapted frame.

The Lee form ``theta`` is defined with the determinant-normalised wedge,
``d omega = theta ^ omega``, and extracted by
``theta_i = 1/2 (d omega)_ijk omega^jk``.  For ``g = exp(2u) delta`` it is
``2 du``.  The half-size form ``theta / 2`` solves the same equation for the
factor-two product `wedge_1_2`; identities written against that product
(``E3 Om_1^2 = -theta/2`` and the linear terms of the kappa chain) use it.

``delta theta = -g^ij nabla_i theta_j`` and
``kappa = R - 3/2 (|theta|^2 + 2 delta theta)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curvature import (
    christoffel_from_jet,
    contravariant_basis,
    covariant_derivative_arrays,
    covariant_derivative_batch,
    curvature_arrays,
    curvature_package,
    div_weyl,
    gram_schmidt_frame_array,
    weyl_blocks,
    wplus_field,
)
from .errors import (
    ConfigurationError,
    EigenGapError,
    FrameDiscontinuityError,
    HermitianViolationError,
    PreconditionError,
)
from .fields import DIM, DiffConfig, TensorField, as_point, central_pairs, gradient
from .forms import (
    E_FRAME,
    F_FRAME,
    FramePack,
    check_metric,
    exterior_derivative_1form,
    exterior_derivative_2form,
    hermitian_defects,
    j_adapted_frame_array,
    raise_2form,
    tensor_to_frame,
    wedge,
    wedge_1_1,
    wedge_2_2,
)

HERMITIAN_TOL = 1e-8
RIC_J_TOL = 1e-6


def hermitian_form_arrays(g, J):
    """``omega_ij = J^k_i g_kj`` for stacks of components."""
    return np.einsum("...ki,...kj->...ij", J, g)


def hermitian_form_field(g_field, J_field):
    return TensorField(lambda p: hermitian_form_arrays(g_field(p), J_field(p)), (DIM, DIM),
                       (0, 2), "antisymmetric", g_field.domain, "omega")


def _check_hermitian(g, J, tol=HERMITIAN_TOL):
    sq, orth = hermitian_defects(g, J)
    dev = max(sq, orth / max(1.0, float(np.max(np.abs(g)))))
    if dev > tol:
        raise HermitianViolationError(
            f"(g, J) not Hermitian: |J^2+1|={sq:.3e}, |J^T g J - g|={orth:.3e}", dev)
    return dev


def hermitian_form(g_field, J_field, point):
    """The fundamental 2-form at a point.

    Examples
    --------
    Flat metric, standard ``J``: ``omega = dx1^dx2 + dx3^dx4``.
    """
    x = as_point(point)
    g = np.asarray(g_field(x), dtype=np.float64)
    J = np.asarray(J_field(x), dtype=np.float64)
    _check_hermitian(g, J)
    return hermitian_form_arrays(g, J)


def nijenhuis_arrays(J_field, points, cfg=None):
    """``N^i_jk`` of ``J``; zero exactly when ``J`` is integrable."""
    J = np.asarray(J_field(points), dtype=np.float64)
    dJ = gradient(J_field, points, cfg)  # dJ[l, i, k] = d_l J^i_k
    return (np.einsum("...lj,...lik->...ijk", J, dJ) - np.einsum("...lk,...lij->...ijk", J, dJ)
            - np.einsum("...il,...jlk->...ijk", J, dJ) + np.einsum("...il,...klj->...ijk", J, dJ))


# ---------------------------------------------------------------------------
# Lee form, codifferential, conformal scalar curvature


def theta_arrays(g_field, J_field, points, cfg=None):
    """Lee form and ``d omega`` at a batch of points."""
    wf = hermitian_form_field(g_field, J_field)
    g = np.asarray(g_field(points), dtype=np.float64)
    om = np.asarray(wf(points), dtype=np.float64)
    dom = exterior_derivative_2form(gradient(wf, points, cfg))
    theta = 0.5 * np.einsum("...ijk,...jk->...i", dom, raise_2form(om, g))
    return theta, dom, om, g


def theta_field(g_field, J_field, cfg=None):
    return TensorField(lambda p: theta_arrays(g_field, J_field, p, cfg)[0], (DIM,), (0, 1),
                       "none", g_field.domain, "theta", 1)


@dataclass(frozen=True)
class LeeForm:
    """Lee form with the residual ``d omega - theta ^ omega``.

    ``half`` is ``theta / 2``, the solution for the factor-two product.
    """

    theta: np.ndarray
    residual: np.ndarray

    @property
    def half(self):
        return 0.5 * self.theta


def lee_form(g_field, J_field, point, cfg=None):
    x = as_point(point)
    theta, dom, om, g = theta_arrays(g_field, J_field, x, cfg)
    _check_hermitian(g, np.asarray(J_field(x), dtype=np.float64))
    return LeeForm(theta, dom - wedge(theta, om))


def codifferential_arrays(g_field, form_field, points, cfg=None):
    nab = covariant_derivative_batch(form_field, g_field, points, cfg)
    g = np.asarray(g_field(points), dtype=np.float64)
    return -np.einsum("...ij,...ij->...", np.linalg.inv(g), nab)


def codifferential_1form(g_field, form_field, point, cfg=None):
    """``delta theta = -g^ij nabla_i theta_j``.

    Examples
    --------
    Flat metric, ``theta = d|x|^2``: ``delta theta = -8``.
    """
    return float(codifferential_arrays(g_field, form_field, as_point(point), cfg))


def _form_norm2(a, ginv):
    return np.einsum("...i,...ij,...j->...", a, ginv, a)


@dataclass(frozen=True)
class KappaParts:
    scalar: np.ndarray
    theta: np.ndarray
    delta_theta: np.ndarray
    theta_norm2: np.ndarray

    @property
    def x(self):
        """``|theta|^2 + 2 delta theta``."""
        return self.theta_norm2 + 2 * self.delta_theta

    @property
    def kappa(self):
        return self.scalar - 1.5 * self.x


def kappa_arrays(g_field, J_field, points, cfg=None):
    c = curvature_arrays(g_field, points, cfg)
    tf = theta_field(g_field, J_field, cfg)
    theta = np.asarray(tf(points), dtype=np.float64)
    dt = codifferential_arrays(g_field, tf, points, cfg)
    return KappaParts(c.scalar, theta, dt, _form_norm2(theta, c.ginv))


def kappa_field(g_field, J_field, cfg=None):
    return TensorField(lambda p: kappa_arrays(g_field, J_field, p, cfg).kappa, (), (0, 0),
                       "none", g_field.domain, "kappa", 2)


def lee_x_field(g_field, J_field, cfg=None):
    return TensorField(lambda p: kappa_arrays(g_field, J_field, p, cfg).x, (), (0, 0),
                       "none", g_field.domain, "|theta|^2 + 2 delta theta", 2)


def conformal_scalar_curvature(g_field, J_field, point, cfg=None):
    x = as_point(point)
    _check_hermitian(np.asarray(g_field(x), dtype=np.float64),
                     np.asarray(J_field(x), dtype=np.float64))
    return float(kappa_arrays(g_field, J_field, x, cfg).kappa)


@dataclass(frozen=True)
class HermitianPack:
    omega: np.ndarray
    theta: np.ndarray
    delta_theta: float
    kappa: float
    lambda_simple: float


def hermitian_pack(g_field, J_field, point, cfg=None):
    x = as_point(point)
    kp = kappa_arrays(g_field, J_field, x, cfg)
    g = np.asarray(g_field(x), dtype=np.float64)
    J = np.asarray(J_field(x), dtype=np.float64)
    _check_hermitian(g, J)
    frames = FramePack.from_frame(j_adapted_frame_array(g, J), "j-adapted")
    pkg = curvature_package(g_field, x, frames, cfg)
    return HermitianPack(hermitian_form_arrays(g, J), kp.theta, float(kp.delta_theta),
                         float(kp.kappa), float(pkg.wplus[0, 0]))


# ---------------------------------------------------------------------------
# W+ spectrum for Hermitian pairs


@dataclass(frozen=True)
class WplusEigenRecord:
    """Action of W+ on ``omega`` measured in a J-adapted frame.

    ``omega_residual`` is the 2-form norm of ``W(omega) - kappa/6 omega``;
    ``pair`` holds the eigenvalues on the complement of ``omega``.
    """

    kappa: float
    simple: float
    pair: np.ndarray
    omega_residual: float
    pair_deviation: float
    pair_gap: float
    trace: float
    ric_j_defect: float
    ric_j_invariant: bool


def ric_j_defect(ric, J, e=None):
    """Max-abs entry of ``J^T Ric J - Ric``, in the frame ``e`` when given."""
    if e is not None:
        ric = np.swapaxes(e, -1, -2) @ ric @ e
        J = np.linalg.inv(e) @ J @ e
    return float(np.max(np.abs(np.swapaxes(J, -1, -2) @ ric @ J - ric)))


def wplus_eigenstructure_check(g_field, J_field, point, frames=None, cfg=None):
    x = as_point(point)
    g = np.asarray(g_field(x), dtype=np.float64)
    J = np.asarray(J_field(x), dtype=np.float64)
    _check_hermitian(g, J)
    if frames is None:
        frames = FramePack.from_frame(j_adapted_frame_array(g, J), "j-adapted")
    pkg = curvature_package(g_field, x, frames, cfg)
    kap = float(kappa_arrays(g_field, J_field, x, cfg).kappa)
    M = pkg.wplus
    c = M[:, 0].copy()
    c[0] -= kap / 6.0
    pair = np.linalg.eigvalsh(M[1:, 1:])[::-1]
    jd = ric_j_defect(pkg.ricci, J, frames.e)
    return WplusEigenRecord(
        kap, float(M[0, 0]), pair, float(np.sqrt(2.0) * np.linalg.norm(c)),
        float(np.max(np.abs(pair + kap / 12.0))), float(pair[0] - pair[1]), float(np.trace(M)),
        jd, jd <= RIC_J_TOL,
    )


# ---------------------------------------------------------------------------
# Frame fields


def frame_field_from(fn, g_field, name, order=0):
    return TensorField(fn, (DIM, DIM), (1, 0), "none", g_field.domain, name, order)


def gram_schmidt_frame_field(g_field):
    return frame_field_from(
        lambda p: gram_schmidt_frame_array(np.asarray(g_field(p), dtype=np.float64)),
        g_field, "gram-schmidt")


def j_adapted_frame_field(g_field, J_field):
    return frame_field_from(
        lambda p: j_adapted_frame_array(np.asarray(g_field(p), dtype=np.float64),
                                        np.asarray(J_field(p), dtype=np.float64)),
        g_field, "j-adapted")


def _sorted_eig(M):
    lam, Q = np.linalg.eigh(M)
    return lam[..., ::-1], Q[..., ::-1]


def _canonical_signs(Q):
    Q = Q.copy()
    for a in range(3):
        k = np.argmax(np.abs(Q[:, a]))
        if Q[k, a] < 0:
            Q[:, a] *= -1
    if np.linalg.det(Q) < 0:
        Q[:, 2] *= -1
    return Q


def lift_rotation(Q):
    """Frame rotation ``R`` with ``R E_a R^T = sum_b Q_ba E_b`` and ``R F_a R^T = F_a``.

    ``R = exp(sum c_b E_b)`` lies in the subgroup generated by the
    self-dual basis, which commutes with the anti-self-dual one; the adjoint
    action rotates the E-basis by twice the angle of ``c``.
    """
    from scipy.spatial.transform import Rotation

    Q = np.asarray(Q, dtype=np.float64)
    lead = Q.shape[:-2]
    rv = Rotation.from_matrix(Q.reshape(-1, 3, 3)).as_rotvec().reshape(lead + (3,))
    c = 0.5 * rv
    ang = np.linalg.norm(c, axis=-1)
    safe = np.where(ang > 0, ang, 1.0)
    n = c / safe[..., None]
    gen = np.einsum("...b,bij->...ij", n, E_FRAME)
    return (np.cos(ang)[..., None, None] * np.eye(DIM)
            + np.sin(ang)[..., None, None] * gen)


def eigen_frame_field(g_field, center, cfg=None, min_gap=1e-3):
    """Orthonormal frames whose E-basis diagonalises W+ near ``center``.

    Eigenvalues are sorted in decreasing order.  Eigenvector signs are fixed
    at the centre (largest component positive, right-handed) and continued
    to other points by maximal overlap; the E-basis rotation is lifted to a
    tangent frame by `lift_rotation`.

    Raises
    ------
    EigenGapError
        When two W+ eigenvalues at the centre are closer than ``min_gap``.
    """
    x0 = as_point(center)
    c0 = curvature_arrays(g_field, x0, cfg)
    e0 = gram_schmidt_frame_array(c0.g)
    lam0, Q0 = _sorted_eig(weyl_blocks(tensor_to_frame(c0.weyl, e0, 4))[0])
    gaps = np.array([lam0[0] - lam0[1], lam0[1] - lam0[2]])
    if gaps.min() < min_gap:
        raise EigenGapError(f"W+ eigen-gap {gaps.min():.3e} below {min_gap:.1e}", float(gaps.min()))
    Q0 = _canonical_signs(Q0)

    def ev(p):
        c = curvature_arrays(g_field, p, cfg)
        e = gram_schmidt_frame_array(c.g)
        _, Q = _sorted_eig(weyl_blocks(tensor_to_frame(c.weyl, e, 4))[0])
        s = np.sign(np.einsum("...ba,ba->...a", Q, Q0))
        s = np.where(s == 0, 1.0, s)
        Q = Q * s[..., None, :]
        if np.any(np.linalg.det(Q) < 0):
            raise FrameDiscontinuityError("eigenframe orientation flipped across the stencil")
        return e @ lift_rotation(Q)

    return frame_field_from(ev, g_field, "wplus-eigen-continued", 2)


def _e_cov(e):
    th = np.linalg.inv(e)
    return (np.einsum("...ai,xab,...bj->...xij", th, E_FRAME, th),
            np.einsum("...ai,xab,...bj->...xij", th, F_FRAME, th))


@dataclass(frozen=True)
class ConnectionForms:
    """Connection 1-forms of the self-dual and anti-self-dual bases.

    ``plus[a, b]`` holds the frame components of ``Om_a^b`` defined by
    ``nabla E_a = sum_b Om_a^b (x) E_b``; ``minus`` likewise for ``F``.
    ``reconstruction`` is the max frame-component defect of that expansion.
    """

    plus: np.ndarray
    minus: np.ndarray
    frames: FramePack
    reconstruction: float

    @property
    def antisymmetry(self):
        return float(max(np.max(np.abs(self.plus + np.swapaxes(self.plus, 0, 1))),
                         np.max(np.abs(self.minus + np.swapaxes(self.minus, 0, 1)))))


def connection_forms(g_field, frame_field, point, cfg=None, align_threshold=1e-2):
    """Connection 1-forms from the covariant derivative of a frame field.

    ``[Om_a^b]_i = 1/4 (nabla_i E_a)_jk E_b^jk``.

    Raises
    ------
    FrameDiscontinuityError
        When a stencil frame's 2-forms differ from the centre by more than
        ``align_threshold``.
    """
    x = as_point(point)
    ef = TensorField(lambda p: np.concatenate(_e_cov(np.asarray(frame_field(p), dtype=np.float64)),
                                              axis=-3),
                     (6, DIM, DIM), (0, 2), "none", g_field.domain, "E, F", frame_field.order)
    val = np.asarray(ef(x), dtype=np.float64)
    vp, vm = central_pairs(ef, x, cfg)
    jump = float(max(np.max(np.abs(vp - val)), np.max(np.abs(vm - val))))
    if jump > align_threshold:
        raise FrameDiscontinuityError(f"frame jumps by {jump:.3e} across the stencil")
    h = (cfg or DiffConfig()).step(ef.order)
    dval = ((vp - vm) / (2 * h)).astype(np.float64)
    g = np.asarray(g_field(x), dtype=np.float64)
    _, gam = christoffel_from_jet(g, gradient(g_field, x, cfg))
    nab = covariant_derivative_arrays(val, np.moveaxis(dval, 0, 1), gam, (0, 2))
    e = np.asarray(frame_field(x), dtype=np.float64)
    frames = FramePack.from_frame(e, frame_field.name)
    up = np.concatenate([contravariant_basis(e, E_FRAME), contravariant_basis(e, F_FRAME)])
    plus = 0.25 * np.einsum("apjk,bjk->abp", nab[:3], up[:3])
    minus = 0.25 * np.einsum("apjk,bjk->abp", nab[3:], up[3:])
    defect = np.concatenate([nab[:3] - np.einsum("abp,bjk->apjk", plus, val[:3]),
                             nab[3:] - np.einsum("abp,bjk->apjk", minus, val[3:])])
    recon = float(np.max(np.abs(np.einsum("apjk,pq,jr,ks->aqrs", defect, e, e, e))))
    return ConnectionForms(plus @ e, minus @ e, frames, recon)


# ---------------------------------------------------------------------------
# Expansions of nabla W+ and div W+


def _lambda_field(g_field, frame_field, cfg):
    def ev(p):
        c = curvature_arrays(g_field, p, cfg)
        e = np.asarray(frame_field(p), dtype=np.float64)
        mp = weyl_blocks(tensor_to_frame(c.weyl, e, 4))[0]
        return np.diagonal(mp, axis1=-2, axis2=-1)

    return TensorField(ev, (3,), (0, 0), "none", g_field.domain, "lambda", 2)


@dataclass(frozen=True)
class ExpansionResidual:
    absolute: float
    relative: float
    direct_norm: float
    offdiagonal: float
    residual: np.ndarray


def _frame_data(g_field, frame_field, x, cfg):
    e = np.asarray(frame_field(x), dtype=np.float64)
    if np.linalg.det(e) < 0:
        raise PreconditionError("frame field is not oriented like the coordinates")
    c = curvature_arrays(g_field, x, cfg)
    M = weyl_blocks(tensor_to_frame(c.weyl, e, 4))[0]
    off = float(np.max(np.abs(M - np.diag(np.diagonal(M)))))
    lam = np.diagonal(M).copy()
    dlam = gradient(_lambda_field(g_field, frame_field, cfg), x, cfg).T @ e  # (3, 4) frame
    conn = connection_forms(g_field, frame_field, x, cfg)
    return e, lam, dlam, conn, off


def nabla_wplus_expansion_residual(g_field, point, frame_field, cfg=None):
    """Compare ``nabla W+`` with ``1/2 sum_a T_a (x) E_a`` in the frame.

    ``T_a = d lam_a (x) E_a + sum_{b != a} (lam_a - lam_b) Om_a^b (x) E_b``.
    """
    x = as_point(point)
    e, lam, dlam, conn, off = _frame_data(g_field, frame_field, x, cfg)
    direct = tensor_to_frame(covariant_derivative_batch(wplus_field(g_field, cfg), g_field, x, cfg),
                             e, 5)
    om = conn.plus
    T = np.einsum("ap,aij->apij", dlam, E_FRAME)
    for a in range(3):
        for b in ((a + 1) % 3, (a + 2) % 3):
            T[a] += (lam[a] - lam[b]) * np.einsum("p,ij->pij", om[a, b], E_FRAME[b])
    expansion = 0.5 * np.einsum("apij,akl->pijkl", T, E_FRAME)
    diff = direct - expansion
    dn = float(np.linalg.norm(direct))
    ab = float(np.linalg.norm(diff))
    return ExpansionResidual(ab, ab / dn if dn > 0 else ab, dn, off, diff)


def u_forms(lam, dlam, om):
    """``U_a = d lam_a - (lam_a - lam_{a+1}) E_{a+2} Om_a^{a+1}
    + (lam_a - lam_{a+2}) E_{a+1} Om_a^{a+2}`` in frame components."""
    U = np.array(dlam, dtype=np.float64)
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        U[a] = (dlam[a] - (lam[a] - lam[b]) * E_FRAME[c] @ om[a, b]
                + (lam[a] - lam[c]) * E_FRAME[b] @ om[a, c])
    return U


def div_wplus_expansion_residual(g_field, point, frame_field, cfg=None):
    """Self-dual part of ``div W`` against ``-1/2 sum_a (E_a U_a) (x) E_a``.

    Per ``a`` the direct side is the frame 1-form
    ``j -> 1/2 div(W)_jkl E_a^kl`` and the expansion side is ``-E_a U_a``.
    """
    x = as_point(point)
    e, lam, dlam, conn, off = _frame_data(g_field, frame_field, x, cfg)
    frames = FramePack.from_frame(e, frame_field.name)
    direct = div_weyl(g_field, x, frames, cfg).plus @ e
    U = u_forms(lam, dlam, conn.plus)
    expansion = -np.einsum("aij,aj->ai", E_FRAME, U)
    diff = direct - expansion
    dn = float(np.linalg.norm(direct))
    ab = float(np.linalg.norm(diff))
    return ExpansionResidual(ab, ab / dn if dn > 0 else ab, dn, off, diff)


# ---------------------------------------------------------------------------
# Case-2 system and the kappa chain


def j_frame_identities():
    """Defects of ``J E2 = -E3`` and ``J E1 = E1 J = I`` in a J-adapted frame."""
    J = -E_FRAME[0]
    E1, E2, E3 = E_FRAME
    return {
        "JE2=-E3": float(np.max(np.abs(J @ E2 + E3))),
        "JE1=I": float(np.max(np.abs(J @ E1 - np.eye(DIM)))),
        "E1J=I": float(np.max(np.abs(E1 @ J - np.eye(DIM)))),
        "JE2J=E2": float(np.max(np.abs(J @ E2 @ J - E2))),
    }


def ric_j_identities(ric_frame):
    """Defects of ``omega Ric omega = -Ric`` and ``E3 Ric E3 = E2 Ric E2``."""
    E1, E2, E3 = E_FRAME
    return {
        "omega_ric_omega": float(np.max(np.abs(E1 @ ric_frame @ E1 + ric_frame))),
        "e3_ric_e3": float(np.max(np.abs(E3 @ ric_frame @ E3 - E2 @ ric_frame @ E2))),
    }


@dataclass(frozen=True)
class HermitianSolitonData:
    """Frame quantities shared by the Case-2 system and the kappa chain."""

    frames: FramePack
    ricci: np.ndarray
    scalar: float
    gradf: np.ndarray
    df: np.ndarray
    kappa: float
    dkappa: np.ndarray
    theta: np.ndarray
    conn: ConnectionForms
    ric_j_defect: float


def _require(f_field, J_field):
    if f_field is None or J_field is None:
        raise ConfigurationError("this identity needs both f and J")


def hermitian_soliton_data(g_field, f_field, J_field, point, cfg=None, gate=True):
    from .soliton import SOLITON_GATE, soliton_residual_norm

    _require(f_field, J_field)
    x = as_point(point)
    g = check_metric(np.asarray(g_field(x), dtype=np.float64))
    J = np.asarray(J_field(x), dtype=np.float64)
    try:
        _check_hermitian(g, J)
    except HermitianViolationError as exc:
        raise PreconditionError(f"Hermitian precondition: {exc}") from exc
    if gate:
        res = soliton_residual_norm(g_field, f_field, x, cfg)
        if res > SOLITON_GATE:
            raise PreconditionError(f"soliton precondition: residual {res:.2e}")
    ff = j_adapted_frame_field(g_field, J_field)
    e = np.asarray(ff(x), dtype=np.float64)
    c = curvature_arrays(g_field, x, cfg)
    jd = ric_j_defect(c.ricci, J, e)
    if gate and jd > RIC_J_TOL:
        raise PreconditionError(f"J-invariant Ricci precondition: defect {jd:.2e}")
    kp = kappa_arrays(g_field, J_field, x, cfg)
    dk = gradient(kappa_field(g_field, J_field, cfg), x, cfg)
    df = gradient(f_field, x, cfg)
    conn = connection_forms(g_field, ff, x, cfg)
    return HermitianSolitonData(
        FramePack.from_frame(e, "j-adapted"), tensor_to_frame(c.ricci, e, 2), float(c.scalar),
        np.linalg.inv(e) @ np.linalg.solve(c.g, df), df @ e, float(kp.kappa), dk @ e,
        kp.theta @ e, conn, jd)


def case2_system_residual(g_field, f_field, J_field, point, cfg=None):
    """Left minus right sides of the three Case-2 equations, frame 1-forms."""
    d = hermitian_soliton_data(g_field, f_field, J_field, point, cfg)
    E1, E2, E3 = E_FRAME
    I = np.eye(DIM)
    k, ric, R, v = d.kappa, d.ricci, d.scalar, d.gradf
    o12, o13 = d.conn.plus[0, 1], d.conn.plus[0, 2]
    base = (ric - R * I) / 3.0
    eq1 = (k / 3 * I + base - E1 @ ric @ E1) @ v - (2 / 3 * d.dkappa - k * E3 @ o12 + k * E2 @ o13)
    eq2 = (-k / 6 * I + base - E2 @ ric @ E2) @ v - (-d.dkappa / 3 + k * E3 @ o12)
    eq3 = (-k / 6 * I + base - E3 @ ric @ E3) @ v - (-d.dkappa / 3 - k * E2 @ o13)
    return np.array([eq1, eq2, eq3])


def lee_connection_claim_residual(g_field, J_field, point, cfg=None):
    """``E3 Om_1^2 + theta/2`` in a J-adapted frame."""
    x = as_point(point)
    ff = j_adapted_frame_field(g_field, J_field)
    conn = connection_forms(g_field, ff, x, cfg)
    theta = theta_arrays(g_field, J_field, x, cfg)[0] @ conn.frames.e
    return E_FRAME[2] @ conn.plus[0, 1] + 0.5 * theta


def lee_connection_symmetry_residual(g_field, J_field, point, cfg=None):
    """``E3 Om_1^2 + E2 Om_1^3``, zero for integrable ``J``."""
    x = as_point(point)
    conn = connection_forms(g_field, j_adapted_frame_field(g_field, J_field), x, cfg)
    return E_FRAME[2] @ conn.plus[0, 1] + E_FRAME[1] @ conn.plus[0, 2]


@dataclass(frozen=True)
class KappaChain:
    """Norms of the four residuals along the kappa chain.

    a : first Case-2 equation after the J-invariance simplification
    b : ``-X/2 df + dX - 2 kappa theta'``, ``X = |theta|^2 + 2 delta theta``
    c : ``Ric0(grad f, .) ^ theta' + kappa/2 d theta'``
    d : ``d theta ^ omega`` against the volume form

    ``theta' = theta / 2`` throughout.
    """

    a: float
    b: float
    c: float
    d: float

    def as_dict(self):
        return {"a": self.a, "b": self.b, "c": self.c, "d": self.d}


def _two_form_frame_norm(a):
    return float(np.sqrt(0.5 * np.sum(a * a)))


def kappa_chain_residuals(g_field, f_field, J_field, point, cfg=None):
    x = as_point(point)
    d = hermitian_soliton_data(g_field, f_field, J_field, x, cfg)
    I = np.eye(DIM)
    k, ric, R, v = d.kappa, d.ricci, d.scalar, d.gradf
    th2 = 0.5 * d.theta
    a = (((k - R) / 3 * I + 4 / 3 * ric) @ v - 2 / 3 * d.dkappa
         + 2 * k * E_FRAME[2] @ d.conn.plus[0, 1])
    kp = kappa_arrays(g_field, J_field, x, cfg)
    dX = gradient(lee_x_field(g_field, J_field, cfg), x, cfg) @ d.frames.e
    b = -0.5 * float(kp.x) * d.df + dX - 2 * k * th2
    ric0v = (ric - R / 4 * I) @ v
    e = d.frames.e
    dtheta = tensor_to_frame(exterior_derivative_1form(gradient(theta_field(g_field, J_field, cfg),
                                                                x, cfg)), e, 2)
    c = wedge_1_1(ric0v, th2) + 0.5 * k * 0.5 * dtheta
    dd = wedge_2_2(0.5 * dtheta, E_FRAME[0])
    return KappaChain(float(np.linalg.norm(a)), float(np.linalg.norm(b)),
                      _two_form_frame_norm(c), float(abs(dd)))


def lee_closedness(g_field, J_field, point, cfg=None):
    """Frame norm of ``d theta``."""
    x = as_point(point)
    g = np.asarray(g_field(x), dtype=np.float64)
    dth = exterior_derivative_1form(gradient(theta_field(g_field, J_field, cfg), x, cfg))
    e = gram_schmidt_frame_array(g)
    return _two_form_frame_norm(tensor_to_frame(dth, e, 2))
