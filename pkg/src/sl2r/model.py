"""Projective hyperboloid model of the SL(2,R)~ geometry.

Points are homogeneous row vectors ``(x0, x1, x2, x3)`` stored as numpy
arrays of shape ``(4,)`` (or ``(..., 4)`` where noted).  The interior of the
one-sheeted hyperboloid is ``-x0^2 - x1^2 + x2^2 + x3^2 < 0``; two tuples that
differ by a positive factor are the same point.

Isometries are 4x4 arrays acting on the right, ``p' = p @ M``, so ``g @ h``
means "first g, then h".  Matrices are only meaningful up to a positive
factor; use :func:`proportional` to compare them.

Hyperboloid coordinates ``(r, theta, phi)``::

    x0 = cosh r cos phi          x2 = sinh r cos(theta - phi)
    x1 = cosh r sin phi          x3 = sinh r sin(theta - phi)

with ``(r, theta)`` polar coordinates of the base plane ``x1 = 0`` and ``phi``
the fibre coordinate.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import AtInfinity, NegativeRadius, NonInteriorPoint, NotUnitDeterminant

ORIGIN = np.array([1.0, 0.0, 0.0, 0.0])

# signature (- - + +) of the polarity
FORM = np.diag([-1.0, -1.0, 1.0, 1.0])


class HyperboloidCoords(NamedTuple):
    r: float
    theta: float
    phi: float


class EuclideanModelPoint(NamedTuple):
    x: float
    y: float
    z: float


def form(p):
    """Quadratic form value ``-x0^2 - x1^2 + x2^2 + x3^2`` (vectorised)."""
    p = np.asarray(p, dtype=float)
    return -p[..., 0] ** 2 - p[..., 1] ** 2 + p[..., 2] ** 2 + p[..., 3] ** 2


def _wrap_angle(a):
    """Map an angle into (-pi, pi]."""
    return np.pi - np.mod(np.pi - a, 2.0 * np.pi)


def normalize(p):
    """Positive rescaling of an interior point to form value -1.

    The sign is fixed so that the representative is a positive multiple of
    the input.  Works on stacks of points.
    """
    p = np.asarray(p, dtype=float)
    f = form(p)
    if np.any(~(f < 0)):
        raise NonInteriorPoint(f"point is not interior (form value {np.max(f):.3g} >= 0)")
    return p / np.sqrt(-f)[..., None]


def to_hyperboloid(p) -> HyperboloidCoords:
    """Hyperboloid coordinates of an interior point.

    ``phi`` is the principal value ``atan2(x1, x0)``; the winding on the
    universal cover is left to the caller.  ``theta`` is reported in
    (-pi, pi] and set to 0 on the fibre through the origin.
    """
    q = normalize(p)
    x0, x1, x2, x3 = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    ch = np.sqrt(x0 * x0 + x1 * x1)
    r = np.arccosh(np.maximum(ch, 1.0))
    phi = np.arctan2(x1, x0)
    on_axis = np.hypot(x2, x3) == 0.0
    theta = np.where(on_axis, 0.0, _wrap_angle(phi + np.arctan2(x3, x2)))
    if q.ndim == 1:
        return HyperboloidCoords(float(r), float(theta), float(phi))
    return HyperboloidCoords(r, theta, phi)


def from_hyperboloid(r, theta=None, phi=None):
    """Normalised projective point for hyperboloid coordinates.

    Accepts either a :class:`HyperboloidCoords` or three (array) arguments.
    """
    if theta is None and phi is None:
        r, theta, phi = r
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise NegativeRadius("hyperboloid radius must be >= 0")
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    ch, sh = np.cosh(r), np.sinh(r)
    return np.stack(
        [ch * np.cos(phi), ch * np.sin(phi),
         sh * np.cos(theta - phi), sh * np.sin(theta - phi)],
        axis=-1,
    )


def to_euclidean(p) -> EuclideanModelPoint:
    p = np.asarray(p, dtype=float)
    if np.any(p[..., 0] == 0.0):
        raise AtInfinity("x0 = 0: point has no inhomogeneous coordinates")
    x = p[..., 1] / p[..., 0]
    y = p[..., 2] / p[..., 0]
    z = p[..., 3] / p[..., 0]
    if p.ndim == 1:
        return EuclideanModelPoint(float(x), float(y), float(z))
    return EuclideanModelPoint(x, y, z)


def from_euclidean(e):
    x, y, z = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in e))
    return np.stack([np.ones_like(x), x, y, z], axis=-1)


def sl2_to_point(a, b, c, d, tol=1e-12):
    """Point of the model for the unit-determinant matrix ``[[d, b], [c, a]]``."""
    det = a * d - b * c
    if abs(det - 1.0) > tol:
        raise NotUnitDeterminant(f"ad - bc = {det!r}, expected 1")
    return np.array([(a + d) / 2, (b - c) / 2, (b + c) / 2, (a - d) / 2])


# -- isometries --------------------------------------------------------------

def fibre_translation(phi):
    """Fibre translation ``S(phi)``; ``S(a) @ S(b) == S(a + b)``."""
    c, s = np.cos(phi), np.sin(phi)
    return np.array([
        [c, s, 0.0, 0.0],
        [-s, c, 0.0, 0.0],
        [0.0, 0.0, c, -s],
        [0.0, 0.0, s, c],
    ])


def translation_to(p):
    """Translation mapping the origin onto ``p`` (``ORIGIN @ T ~ p``)."""
    x0, x1, x2, x3 = normalize(p)
    return np.array([
        [x0, x1, x2, x3],
        [-x1, x0, x3, -x2],
        [x2, x3, x0, x1],
        [x3, -x2, -x1, x0],
    ])


def translation_from(p):
    """Inverse of :func:`translation_to` (maps ``p`` back to the origin)."""
    x0, x1, x2, x3 = normalize(p)
    return np.array([
        [x0, -x1, -x2, -x3],
        [x1, x0, -x3, x2],
        [-x2, -x3, x0, -x1],
        [-x3, x2, x1, x0],
    ])


def rotation_about_origin_fibre(omega):
    """Rotation by ``omega`` about the fibre through the origin."""
    omega = _wrap_angle(omega)
    c, s = np.cos(omega), np.sin(omega)
    return np.array([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, c, s],
        [0.0, 0.0, -s, c],
    ])


def rotation_about_fibre(x, omega):
    """Rotation by ``omega`` about the fibre through ``x``, by conjugacy."""
    return translation_from(x) @ rotation_about_origin_fibre(omega) @ translation_to(x)


def foot_point(x):
    """Intersection of the fibre through ``x`` with the base plane ``x1 = 0``."""
    x = np.asarray(x, dtype=float)
    if np.any(~(form(x) < 0)):
        raise NonInteriorPoint("foot point of a non-interior point")
    x0, x1, x2, x3 = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    return np.stack([x0 * x0 + x1 * x1, np.zeros_like(x0),
                     x0 * x2 - x1 * x3, x0 * x3 + x1 * x2], axis=-1)


def proportional(m1, m2, tol=1e-10):
    """Test ``m1 = c * m2`` for some ``c > 0``.

    Returns ``(ok, c, residual)`` where the residual is the max-abs entry of
    ``m1 / c - m2`` relative to the largest entry of ``m2``.
    """
    m1 = np.asarray(m1, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    c = float(np.vdot(m1, m2) / np.vdot(m2, m2))
    if c <= 0.0:
        return False, c, float("inf")
    scale = np.max(np.abs(m2))
    res = float(np.max(np.abs(m1 / c - m2)) / scale)
    return res <= tol, c, res


def isometry_residual(m):
    """Largest violation of the row conditions of an isometry matrix.

    The matrix is first scaled so that row 0 has form value -1.  Both sign
    patterns allowed for rows 1 and 3 are tried and the better one is kept.
    Also checks that ``M J M^T`` is a positive multiple of ``J``.
    """
    m = np.asarray(m, dtype=float)
    f0 = form(m[0])
    if not f0 < 0:
        return float("inf")
    m = m / np.sqrt(-f0)
    r0, r2 = m[0], m[2]
    conds = [
        form(r0) + 1.0,
        form(r2) - 1.0,
        -r0[0] * r2[0] - r0[1] * r2[1] + r0[2] * r2[2] + r0[3] * r2[3],
        -r0[0] * r2[1] + r0[1] * r2[0] - r0[2] * r2[3] + r0[3] * r2[2],
    ]
    best = float("inf")
    for sg in (1.0, -1.0):
        row1 = sg * np.array([-r0[1], r0[0], r0[3], -r0[2]])
        row3 = sg * np.array([r2[1], -r2[0], -r2[3], r2[2]])
        best = min(best, max(np.max(np.abs(m[1] - row1)), np.max(np.abs(m[3] - row3))))
    gram = m @ FORM @ m.T
    best = max(best, float(np.max(np.abs(gram - FORM))))
    return max(best, float(np.max(np.abs(conds))))


# -- metric ------------------------------------------------------------------

def metric_at(r):
    """Metric tensor in ``(r, theta, phi)`` coordinates at radius ``r``."""
    if r < 0:
        raise NegativeRadius("metric_at needs r >= 0")
    s2 = np.sinh(r) ** 2
    c2 = np.cosh(r) ** 2
    return np.array([
        [1.0, 0.0, 0.0],
        [0.0, s2 * (s2 + c2), s2],
        [0.0, s2, 1.0],
    ])


def volume_element(r):
    """``sqrt(det g) = sinh(2r) / 2``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise NegativeRadius("volume_element needs r >= 0")
    return 0.5 * np.sinh(2.0 * r)
