"""Chart points, tensor fields and central finite differences.

Every field is a vectorised callable mapping an array of chart points with
shape ``(..., 4)`` to component arrays of shape ``(..., *field.shape)``.
Derivatives are again fields, so nesting is plain composition.

Stencil points are formed in extended precision (``np.longdouble``) and base
fields are expected to evaluate in whatever dtype they receive.  Differences
are taken in extended precision and returned as float64.  This brings the
rounding floor of second differences down to roughly ``1e-19 / h**2``.

A field records in ``order`` how many derivatives of the base fields its
evaluation consumes.  Differentiating a field of order 2 or more (curvature
and anything built from it) uses the wider step ``nest_factor * h``: at
that depth the rounding noise of the inner differences, divided by the
outer step, dominates the truncation error of the outer stencil.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigurationError, DomainError

EXT = np.longdouble
DIM = 4


@dataclass(frozen=True)
class DiffConfig:
    """Finite-difference settings.

    Parameters
    ----------
    h : float
        Step of central stencils on fields of order 0 and 1.
    nest_factor : float
        Step multiplier for stencils on fields of order 2 or more.
    """

    h: float = 1e-4
    nest_factor: float = 4.0

    def step(self, order=0):
        """Stencil step for a field whose evaluation uses ``order`` derivatives."""
        return self.h * self.nest_factor if order >= 2 else self.h

    def __post_init__(self):
        h = self.h
        if not np.isfinite(h) or h <= 0.0:
            raise ConfigurationError(f"step h must be positive, got {h!r}")
        if h < 1e3 * np.finfo(np.float64).eps:
            raise ConfigurationError(f"step h={h!r} is below 1e3 machine epsilon")
        if not np.isfinite(self.nest_factor) or self.nest_factor < 1.0:
            raise ConfigurationError(f"nest_factor must be >= 1, got {self.nest_factor!r}")


@dataclass(frozen=True)
class Box:
    """Axis-aligned coordinate box ``lo[i] <= x[i] <= hi[i]``."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != DIM or len(hi) != DIM:
            raise ConfigurationError("box bounds need four entries")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ConfigurationError(f"empty box {lo} .. {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, lo, hi):
        return cls((lo,) * DIM, (hi,) * DIM)

    def check(self, points):
        """Raise `DomainError` naming the first coordinate outside the box."""
        pts = np.asarray(points)
        lo = np.asarray(self.lo, dtype=pts.dtype)
        hi = np.asarray(self.hi, dtype=pts.dtype)
        bad = (pts < lo) | (pts > hi)
        if np.any(bad):
            idx = np.argwhere(bad)[0]
            i = int(idx[-1])
            raise DomainError(
                f"coordinate x{i + 1}={float(pts[tuple(idx)])!r} outside "
                f"[{self.lo[i]}, {self.hi[i]}]"
            )

    def contains(self, points):
        pts = np.asarray(points)
        return np.all((pts >= np.asarray(self.lo)) & (pts <= np.asarray(self.hi)), axis=-1)


def as_point(x, box=None):
    """Validate a single chart point and return it as a float64 array."""
    p = np.asarray(x, dtype=np.float64)
    if p.shape != (DIM,):
        raise ConfigurationError(f"a point needs 4 coordinates, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DomainError(f"non-finite coordinate in {p.tolist()}")
    if box is not None:
        box.check(p)
    return p


@dataclass(frozen=True)
class TensorField:
    """Smooth component field on a chart.

    Parameters
    ----------
    evaluator : callable
        Maps points ``(..., 4)`` to components ``(..., *shape)``.
    shape : tuple of int
        Component shape, e.g. ``(4, 4)`` for a metric.
    valence : (int, int)
        Numbers of contravariant and covariant slots.  Contravariant indices
        come first in the component array.
    symmetry : {"none", "symmetric", "antisymmetric"}
        Declared symmetry of the last two slots.
    domain : Box, optional
        Chart domain; evaluation outside it raises `DomainError`.
    order : int
        Number of derivatives of base fields used by one evaluation.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    shape: tuple = ()
    valence: tuple = (0, 0)
    symmetry: str = "none"
    domain: Box | None = None
    name: str = ""
    order: int = 0

    def __call__(self, points):
        pts = np.asarray(points)
        if pts.shape[-1:] != (DIM,):
            raise ConfigurationError(f"points need a trailing axis of 4, got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DomainError("non-finite coordinate")
        if self.domain is not None:
            self.domain.check(pts)
        return np.asarray(self.evaluator(pts))

    def symmetry_defect(self, point):
        """Largest violation of the declared symmetry at ``point``."""
        val = np.asarray(self(as_point(point)), dtype=np.float64)
        if self.symmetry == "symmetric":
            return float(np.max(np.abs(val - np.swapaxes(val, -1, -2))))
        if self.symmetry == "antisymmetric":
            return float(np.max(np.abs(val + np.swapaxes(val, -1, -2))))
        return 0.0


def constant_field(value, domain=None, name="const", valence=(0, 0)):
    """Field returning the same components everywhere."""
    value = np.asarray(value, dtype=np.float64)

    def ev(p):
        p = np.asarray(p)
        return np.broadcast_to(value.astype(p.dtype), p.shape[:-1] + value.shape)

    return TensorField(ev, value.shape, valence, "none", domain, name)


_UNIT = np.eye(DIM, dtype=np.int64)
_GRAD_OFFSETS = np.concatenate([_UNIT, -_UNIT])


def _pairs():
    return [(i, j) for i in range(DIM) for j in range(i + 1, DIM)]


def _jet_offsets():
    rows = [np.zeros(DIM, dtype=np.int64)]
    rows += list(_UNIT) + list(-_UNIT)
    for i, j in _pairs():
        for si, sj in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            rows.append(si * _UNIT[i] + sj * _UNIT[j])
    return np.array(rows)


_JET_OFFSETS = _jet_offsets()


def _stencil(field, points, offsets, h):
    """Evaluate ``field`` at ``points + h * offsets`` in extended precision."""
    p = np.asarray(points, dtype=EXT)
    pts = p[..., None, :] + EXT(h) * offsets.astype(EXT)
    vals = field(pts)
    return np.asarray(vals).astype(EXT, copy=False)


def _cfg(cfg):
    return DiffConfig() if cfg is None else cfg


def central_pairs(field, points, cfg=None):
    """Values at ``x + h e_i`` and ``x - h e_i``, each ``(..., 4, *shape)``."""
    h = _cfg(cfg).step(field.order)
    v = _stencil(field, points, _GRAD_OFFSETS, h)
    ax = v.ndim - len(field.shape) - 1
    v = np.moveaxis(v, ax, 0)
    return np.moveaxis(v[:DIM], 0, ax), np.moveaxis(v[DIM:], 0, ax)


def gradient(field, points, cfg=None):
    """All first partials, shape ``(..., 4, *field.shape)``."""
    h = _cfg(cfg).step(field.order)
    v = _stencil(field, points, _GRAD_OFFSETS, h)
    ax = v.ndim - len(field.shape) - 1
    v = np.moveaxis(v, ax, 0)
    d = np.moveaxis((v[:DIM] - v[DIM:]) / (2 * EXT(h)), 0, ax)
    return d.astype(np.float64)


def jet2(field, points, cfg=None):
    """Value, first and second partials from one shared 33-point stencil.

    Returns
    -------
    value : ndarray, shape ``(..., *shape)``
    d1 : ndarray, shape ``(..., 4, *shape)``
    d2 : ndarray, shape ``(..., 4, 4, *shape)``, symmetric in the two
        derivative axes.
    """
    h = EXT(_cfg(cfg).step(field.order))
    v = _stencil(field, points, _JET_OFFSETS, float(h))
    lead = v.shape[:-len(field.shape) - 1] if field.shape else v.shape[:-1]
    v = np.moveaxis(v, len(lead), 0)
    c = v[0]
    plus = v[1:1 + DIM]
    minus = v[1 + DIM:1 + 2 * DIM]
    d1 = (plus - minus) / (2 * h)
    d2 = np.empty((DIM, DIM) + c.shape, dtype=EXT)
    for i in range(DIM):
        d2[i, i] = (plus[i] - 2 * c + minus[i]) / (h * h)
    k = 1 + 2 * DIM
    for i, j in _pairs():
        pp, pm, mp, mm = v[k], v[k + 1], v[k + 2], v[k + 3]
        d2[i, j] = d2[j, i] = (pp - pm - mp + mm) / (4 * h * h)
        k += 4
    d1 = np.moveaxis(d1, 0, len(lead))
    d2 = np.moveaxis(d2, [0, 1], [len(lead), len(lead) + 1])
    return c.astype(np.float64), d1.astype(np.float64), d2.astype(np.float64)


def partial_derivative(field, point, direction, cfg=None):
    """Central first difference along coordinate ``direction`` (0-based).

    Examples
    --------
    >>> f = TensorField(lambda p: p[..., 0] * p[..., 1])
    >>> float(partial_derivative(f, [3.0, 5.0, 0.0, 0.0], 0))
    5.0
    """
    _check_direction(direction)
    h = _cfg(cfg).step(field.order)
    offs = np.stack([_UNIT[direction], -_UNIT[direction]])
    v = _stencil(field, as_point(point), offs, h)
    return ((v[0] - v[1]) / (2 * EXT(h))).astype(np.float64)


def second_partial(field, point, i, j, cfg=None):
    """Central second difference; the mixed stencil for ``i != j``."""
    _check_direction(i)
    _check_direction(j)
    h = EXT(_cfg(cfg).step(field.order))
    x = as_point(point)
    if i == j:
        offs = np.stack([_UNIT[i], 0 * _UNIT[i], -_UNIT[i]])
        v = _stencil(field, x, offs, float(h))
        out = (v[0] - 2 * v[1] + v[2]) / (h * h)
    else:
        offs = np.stack([_UNIT[i] + _UNIT[j], _UNIT[i] - _UNIT[j],
                         -_UNIT[i] + _UNIT[j], -_UNIT[i] - _UNIT[j]])
        v = _stencil(field, x, offs, float(h))
        out = (v[0] - v[1] - v[2] + v[3]) / (4 * h * h)
    return out.astype(np.float64)


def _check_direction(i):
    if not (isinstance(i, (int, np.integer)) and 0 <= i < DIM):
        raise ConfigurationError(f"direction must be 0..3, got {i!r}")


def gradient_field(field, cfg=None):
    """The field of first partials, for nested differentiation."""
    cfg = _cfg(cfg)
    r, s = field.valence
    return TensorField(
        lambda p: gradient(field, p, cfg),
        (DIM,) + tuple(field.shape),
        (r, s + 1),
        "none",
        field.domain,
        f"d({field.name})",
        field.order + 1,
    )


def map_field(fn, field, shape, name="", valence=(0, 0), symmetry="none"):
    """Pointwise post-processing of a field's components."""
    return TensorField(lambda p: fn(field(p)), tuple(shape), valence, symmetry,
                       field.domain, name, field.order)


def sample_points(spec, count, seed):
    """Seeded uniform points inside ``spec.sample_box``.

    Parameters
    ----------
    spec : GeometrySpec or Box
    count : int
    seed : int

    Returns
    -------
    ndarray, shape ``(count, 4)``
    """
    box = spec if isinstance(spec, Box) else spec.sample_box
    if int(count) != count or count < 1:
        raise ConfigurationError(f"count must be a positive integer, got {count!r}")
    rng = np.random.default_rng(seed)
    return rng.uniform(np.asarray(box.lo), np.asarray(box.hi), size=(count, DIM))
