"""Exterior algebra in four dimensions and the self-dual frame bases.

Frame conventions
-----------------
A tangent frame is stored as a matrix ``e`` whose columns are the frame
vectors in coordinates; the coframe is ``inv(e)`` (rows).  The six constant
matrices below hold the frame components of

    E1 = e12 + e34,  E2 = e13 + e42,  E3 = e32 + e41,
    F1 = e12 - e34,  F2 = e13 - e42,  F3 = e32 - e41,

where ``eab = e^a ^ e^b``.  They are self-dual and anti-self-dual for the
orientation ``e1, e2, e3, e4``, satisfy the quaternion products
``E_a E_{a+1} = E_{a+2}`` as matrices and commute with each other.

Wedge normalisations
--------------------
`wedge` is the determinant-normalised product, ``(e1 ^ e2)_{12} = 1`` and
``(a ^ b)_{1234} = a1 b234 - a2 b134 + a3 b124 - a4 b123`` for a 1-form with a
3-form.  `wedge_1_2` is kept separate: it uses the factor-two component rule
``2 (t_i w_jk + t_j w_ki + t_k w_ij)``, i.e. twice the determinant product.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, HermitianViolationError, InvalidMetricError
from .fields import DIM, gradient


def _basis2(a, b):
    m = np.zeros((DIM, DIM))
    m[a - 1, b - 1] = 1.0
    m[b - 1, a - 1] = -1.0
    return m


E_FRAME = np.array([
    _basis2(1, 2) + _basis2(3, 4),
    _basis2(1, 3) + _basis2(4, 2),
    _basis2(3, 2) + _basis2(4, 1),
])
F_FRAME = np.array([
    _basis2(1, 2) - _basis2(3, 4),
    _basis2(1, 3) - _basis2(4, 2),
    _basis2(3, 2) - _basis2(4, 1),
])

# Frame components of a complex structure with J e1 = e2, J e3 = e4.
J_FRAME = -E_FRAME[0]


def levi_civita(n=DIM):
    """Permutation symbol as a dense ``(n,)*n`` array."""
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        eps[perm] = _perm_sign(perm)
    return eps


def _perm_sign(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


EPS4 = levi_civita()


@dataclass(frozen=True)
class FormComponents:
    """A p-form stored as its full antisymmetric component array."""

    degree: int
    components: np.ndarray

    def __post_init__(self):
        comp = np.asarray(self.components, dtype=np.float64)
        if comp.shape != (DIM,) * self.degree:
            raise ConfigurationError(
                f"degree {self.degree} form needs shape {(DIM,) * self.degree}, got {comp.shape}")
        object.__setattr__(self, "components", comp)

    def __array__(self, dtype=None, copy=None):
        return self.components if dtype is None else self.components.astype(dtype)

    def __getitem__(self, idx):
        return self.components[idx]

    @classmethod
    def from_independent(cls, degree, values):
        """Build from ``{(i, j, ...): value}`` on increasing index tuples."""
        comp = np.zeros((DIM,) * degree)
        for idx, val in values.items():
            for perm in itertools.permutations(range(degree)):
                comp[tuple(idx[p] for p in perm)] = _perm_sign(perm) * val
        return cls(degree, comp)


def antisymmetrize(t, axes):
    """Average of signed permutations over the given trailing axes."""
    t = np.asarray(t)
    axes = list(axes)
    out = np.zeros_like(t, dtype=np.float64)
    for perm in itertools.permutations(range(len(axes))):
        order = list(range(t.ndim))
        for k, p in enumerate(perm):
            order[axes[k]] = axes[p]
        out = out + _perm_sign(perm) * np.transpose(t, order)
    return out / math.factorial(len(axes))


def wedge(a, b):
    """Determinant-normalised exterior product of two forms at one point."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    p, q = a.ndim, b.ndim
    if p + q > DIM:
        return np.zeros((DIM,) * (p + q))
    prod = np.multiply.outer(a, b)
    scale = math.factorial(p + q) / (math.factorial(p) * math.factorial(q))
    return scale * antisymmetrize(prod, range(p + q))


def wedge_1_2(theta, omega):
    """Factor-two product of a 1-form with a 2-form.

    Components are ``2 (t_i w_jk + t_j w_ki + t_k w_ij)``, returned as the
    full antisymmetric ``(4, 4, 4)`` array.
    """
    t = np.asarray(theta, dtype=np.float64)
    w = np.asarray(omega, dtype=np.float64)
    return 2.0 * (np.einsum("...i,...jk->...ijk", t, w)
                  + np.einsum("...j,...ki->...ijk", t, w)
                  + np.einsum("...k,...ij->...ijk", t, w))


def wedge_1_3(alpha, beta):
    """The ``(1, 2, 3, 4)`` coefficient of a 1-form times a 3-form."""
    a = np.asarray(alpha, dtype=np.float64)
    b = np.asarray(beta, dtype=np.float64)
    return (a[..., 0] * b[..., 1, 2, 3] - a[..., 1] * b[..., 0, 2, 3]
            + a[..., 2] * b[..., 0, 1, 3] - a[..., 3] * b[..., 0, 1, 2])


def wedge_2_2(alpha, beta):
    """The ``(1, 2, 3, 4)`` coefficient of the product of two 2-forms."""
    a = np.asarray(alpha, dtype=np.float64)
    b = np.asarray(beta, dtype=np.float64)
    return (a[..., 0, 1] * b[..., 2, 3] - a[..., 0, 2] * b[..., 1, 3]
            + a[..., 0, 3] * b[..., 1, 2] + a[..., 1, 2] * b[..., 0, 3]
            - a[..., 1, 3] * b[..., 0, 2] + a[..., 2, 3] * b[..., 0, 1])


def wedge_1_1(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return np.einsum("...i,...j->...ij", a, b) - np.einsum("...j,...i->...ij", a, b)


def exterior_derivative(form_field, point, cfg=None):
    """d of a p-form field at a point, as `FormComponents` of degree p+1.

    For a 2-form this is ``d_i w_jk - d_j w_ik + d_k w_ij``.
    """
    p = len(form_field.shape)
    grad = gradient(form_field, np.asarray(point, dtype=np.float64), cfg)
    return FormComponents(p + 1, (p + 1) * antisymmetrize(grad, range(p + 1)))


def exterior_derivative_1form(grad):
    """``d_i a_j - d_j a_i`` from the gradient ``grad[..., i, j] = d_i a_j``."""
    return grad - np.swapaxes(grad, -1, -2)


def exterior_derivative_2form(grad):
    """``d_i w_jk - d_j w_ik + d_k w_ij`` from ``grad[..., i, j, k]``."""
    return (grad - np.swapaxes(grad, -3, -2)
            + np.moveaxis(grad, -3, -1))


# ---------------------------------------------------------------------------
# Metric algebra on 2-forms


def check_metric(g, tol=0.0):
    """Raise `InvalidMetricError` unless ``g`` is symmetric positive definite."""
    g = np.asarray(g, dtype=np.float64)
    if not np.all(np.isfinite(g)):
        raise InvalidMetricError("non-finite metric components")
    asym = np.max(np.abs(g - np.swapaxes(g, -1, -2))) if g.size else 0.0
    if asym > 1e-12 * max(1.0, float(np.max(np.abs(g)))):
        raise InvalidMetricError(f"metric not symmetric (defect {asym:.3e})")
    lam = np.linalg.eigvalsh(g)
    if np.any(lam <= tol):
        raise InvalidMetricError(f"metric not positive definite (min eigenvalue {lam.min():.3e})")
    return g


def volume_factor(g):
    return np.sqrt(np.linalg.det(g))


def raise_2form(a, g):
    """Contravariant components ``a^{ij}``."""
    gi = np.linalg.inv(g)
    return np.einsum("...ik,...kl,...jl->...ij", gi, a, gi)


def to_endomorphism(a, g):
    """Endomorphism view ``a^i_j = g^{ik} a_kj``."""
    return np.linalg.inv(g) @ a


def two_form_inner(a, b, g):
    """``-1/2 Tr(A B)`` of the endomorphism views; ``<E_a, E_a> = 2``."""
    ae = to_endomorphism(np.asarray(a, dtype=np.float64), g)
    be = to_endomorphism(np.asarray(b, dtype=np.float64), g)
    return -0.5 * np.einsum("...ij,...ji->...", ae, be)


def hodge_star(a, g, orientation=1):
    """Hodge star of a 2-form, ``(*a)_ij = 1/2 sqrt|g| eps_klij a^kl``."""
    g = np.asarray(g, dtype=np.float64)
    up = raise_2form(np.asarray(a, dtype=np.float64), g)
    vol = orientation * volume_factor(g)
    return 0.5 * vol[..., None, None] * np.einsum("klij,...kl->...ij", EPS4, up)


def volume_coefficient(four_form_1234, g, orientation=1):
    """Coefficient against the Riemannian volume form."""
    return orientation * four_form_1234 / volume_factor(g)


# ---------------------------------------------------------------------------
# Frames


@dataclass(frozen=True)
class FramePack:
    """An orthonormal frame and the induced bases of both 2-form bundles.

    Attributes
    ----------
    e : ndarray, shape ``(..., 4, 4)``
        Frame vectors as columns.
    coframe : ndarray
        ``inv(e)``; row ``a`` is the 1-form ``e^a``.
    E, F : ndarray, shape ``(..., 3, 4, 4)``
        Covariant coordinate components of ``E_a`` and ``F_a``.
    E_end, F_end : ndarray
        Endomorphism views of the same.
    orientation : int
        Sign of ``det e``.
    provenance : str
    """

    e: np.ndarray
    coframe: np.ndarray
    E: np.ndarray
    F: np.ndarray
    E_end: np.ndarray
    F_end: np.ndarray
    orientation: int
    provenance: str

    @classmethod
    def from_frame(cls, e, provenance="given"):
        e = np.asarray(e, dtype=np.float64)
        th = np.linalg.inv(e)
        E = _cov(th, E_FRAME)
        F = _cov(th, F_FRAME)
        Ee = _end(e, th, E_FRAME)
        Fe = _end(e, th, F_FRAME)
        det = np.linalg.det(e)
        orient = int(np.sign(det).flat[0]) if np.ndim(det) else int(np.sign(det))
        return cls(e, th, E, F, Ee, Fe, orient, provenance)

    def vector_to_frame(self, v):
        return np.einsum("...ai,...i->...a", self.coframe, v)

    def form_to_frame(self, t, rank):
        """Frame components of a covariant tensor of the given rank."""
        return tensor_to_frame(np.asarray(t), self.e, rank)


def _cov(th, M):
    return np.einsum("...ai,xab,...bj->...xij", th, M, th)


def _end(e, th, M):
    return np.einsum("...ia,xab,...bj->...xij", e, M, th)


def tensor_to_frame(t, e, rank):
    """Contract the trailing ``rank`` covariant slots of ``t`` with ``e``.

    Leading axes of ``t`` and ``e`` broadcast against each other.
    """
    idx = "ijklm"[:rank]
    out = "abcdf"[:rank]
    terms = ["..." + idx] + [f"...{i}{a}" for i, a in zip(idx, out)]
    return np.einsum(",".join(terms) + "->..." + out, t, *([e] * rank))


def tensor_from_frame(t, coframe, rank):
    """Inverse of `tensor_to_frame`: frame components back to coordinates."""
    idx = "abcdf"[:rank]
    out = "ijklm"[:rank]
    terms = ["..." + idx] + [f"...{a}{i}" for a, i in zip(idx, out)]
    return np.einsum(",".join(terms) + "->..." + out, t, *([coframe] * rank))


def build_frames_gram_schmidt(g, orientation=1):
    """Gram-Schmidt on the coordinate basis, in coordinate order.

    The result equals ``inv(cholesky(g)).T``, the unique upper-triangular
    orthonormal frame with positive diagonal.  ``orientation=-1`` flips
    ``e4``.
    """
    g = check_metric(g)
    if orientation not in (1, -1):
        raise ConfigurationError("orientation must be +1 or -1")
    L = np.linalg.cholesky(g)
    e = np.swapaxes(np.linalg.inv(L), -1, -2).copy()
    if orientation == -1:
        e[..., :, 3] *= -1.0
    return FramePack.from_frame(e, "gram-schmidt")


def hermitian_defects(g, J):
    """Return ``(|J^2 + 1|, |J^T g J - g|)`` as max-abs defects."""
    g = np.asarray(g, dtype=np.float64)
    J = np.asarray(J, dtype=np.float64)
    sq = np.max(np.abs(J @ J + np.eye(DIM)))
    orth = np.max(np.abs(np.swapaxes(J, -1, -2) @ g @ J - g))
    return float(sq), float(orth)


def build_frames_j_adapted(g, J, tol=1e-10):
    """J-adapted orthonormal frame at one point.

    ``e1`` is the normalised first coordinate vector, ``e2 = J e1``; ``e3`` is
    the first of the coordinate vectors 3, 4, 2 with a usable component
    orthogonal to ``span(e1, e2)``, normalised, and ``e4 = J e3``.  Then the
    first basis element ``E1`` equals the fundamental form.
    """
    g = check_metric(g)
    J = np.asarray(J, dtype=np.float64)
    sq, orth = hermitian_defects(g, J)
    scale = max(1.0, float(np.max(np.abs(g))))
    if sq > tol * 10 or orth > tol * 10 * scale:
        raise HermitianViolationError(
            f"(g, J) not Hermitian: |J^2+1|={sq:.3e}, |J^T g J - g|={orth:.3e}",
            max(sq, orth))
    e = j_adapted_frame_array(g, J)
    return FramePack.from_frame(e, "j-adapted")


def j_adapted_frame_array(g, J):
    """Vectorised core of `build_frames_j_adapted`."""
    g = np.asarray(g, dtype=np.float64)
    J = np.asarray(J, dtype=np.float64)

    def ip(u, v):
        return np.einsum("...i,...ij,...j->...", u, g, v)

    lead = g.shape[:-2]
    basis = np.broadcast_to(np.eye(DIM), lead + (DIM, DIM))
    e1 = basis[..., :, 0]
    e1 = e1 / np.sqrt(ip(e1, e1))[..., None]
    e2 = np.einsum("...ij,...j->...i", J, e1)
    best = None
    best_norm = None
    for k in (2, 3, 1):
        v = basis[..., :, k]
        v = v - ip(v, e1)[..., None] * e1 - ip(v, e2)[..., None] * e2
        n = np.sqrt(np.maximum(ip(v, v), 0.0))
        if best is None:
            best, best_norm = v, n
        else:
            use = best_norm < 1e-3
            best = np.where(use[..., None], v, best)
            best_norm = np.where(use, n, best_norm)
    e3 = best / best_norm[..., None]
    e4 = np.einsum("...ij,...j->...i", J, e3)
    return np.stack([e1, e2, e3, e4], axis=-1)


def frame_invariants(frames, g):
    """Max-abs defects of the defining algebra of a frame pack.

    Keys: orthonormality, quaternion, norms, orthogonality, commute,
    self_duality, reassembly.
    """
    g = np.asarray(g, dtype=np.float64)
    e, th = frames.e, frames.coframe
    out = {}
    out["orthonormality"] = float(np.max(np.abs(np.swapaxes(e, -1, -2) @ g @ e - np.eye(DIM))))
    Ee, Fe = frames.E_end, frames.F_end
    quat = 0.0
    for a in range(3):
        b, c = (a + 1) % 3, (a + 2) % 3
        for X in (Ee, Fe):
            quat = max(quat, np.max(np.abs(X[..., a, :, :] @ X[..., a, :, :] + np.eye(DIM))))
            quat = max(quat, np.max(np.abs(X[..., a, :, :] @ X[..., b, :, :] - X[..., c, :, :])))
            quat = max(quat, np.max(np.abs(X[..., a, :, :] @ X[..., b, :, :]
                                           + X[..., b, :, :] @ X[..., a, :, :])))
    out["quaternion"] = float(quat)
    comm = 0.0
    for a in range(3):
        for b in range(3):
            comm = max(comm, np.max(np.abs(Ee[..., a, :, :] @ Fe[..., b, :, :]
                                           - Fe[..., b, :, :] @ Ee[..., a, :, :])))
    out["commute"] = float(comm)
    allf = np.concatenate([frames.E, frames.F], axis=-3)
    gram = two_form_inner(allf[..., :, None, :, :], allf[..., None, :, :, :],
                          g[..., None, None, :, :])
    out["norms"] = float(np.max(np.abs(np.diagonal(gram, axis1=-2, axis2=-1) - 2.0)))
    off = gram - 2.0 * np.eye(6)
    out["orthogonality"] = float(np.max(np.abs(off)))
    o = frames.orientation
    sd = np.max(np.abs(hodge_star(frames.E, g[..., None, :, :], o) - frames.E))
    asd = np.max(np.abs(hodge_star(frames.F, g[..., None, :, :], o) + frames.F))
    out["self_duality"] = float(max(sd, asd))
    # reassemble E_a, F_a from coframe wedges, independent of the constants
    t = [th[..., a, :] for a in range(DIM)]

    def w(a, b):
        return wedge_1_1(t[a - 1], t[b - 1])

    E_direct = np.stack([w(1, 2) + w(3, 4), w(1, 3) + w(4, 2), w(3, 2) + w(4, 1)], axis=-3)
    F_direct = np.stack([w(1, 2) - w(3, 4), w(1, 3) - w(4, 2), w(3, 2) - w(4, 1)], axis=-3)
    out["reassembly"] = float(max(np.max(np.abs(E_direct - frames.E)),
                                  np.max(np.abs(F_direct - frames.F))))
    out["max"] = max(out.values())
    return out
