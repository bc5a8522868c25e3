"""Quadrature engines, geodesic-ball volume and sector-like domain volume."""

from __future__ import annotations

import heapq
import math
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import QuadratureFailure, RadiusOutOfRange
from .geodesics import distances_from_origin, geodesic_closed_form, jacobian_J

GAUSS_LEGENDRE = "gauss-legendre"
ADAPTIVE_SIMPSON = "adaptive-simpson"


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-8
    max_subdivisions: int = 200
    rule: str = GAUSS_LEGENDRE
    order: int = 12

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.order < 2:
            raise ValueError("Gauss-Legendre order must be >= 2")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.rule not in (GAUSS_LEGENDRE, ADAPTIVE_SIMPSON):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")

    @classmethod
    def from_env(cls, **overrides):
        """Default spec, with ``SL2R_QUAD_TOL`` setting both tolerances."""
        tol = os.environ.get("SL2R_QUAD_TOL")
        if tol is not None and "abs_tol" not in overrides and "rel_tol" not in overrides:
            overrides["abs_tol"] = overrides["rel_tol"] = float(tol)
        return cls(**overrides)

    def key(self):
        return f"{self.rule}:{self.order}:{self.abs_tol:.3e}:{self.rel_tol:.3e}:{self.max_subdivisions}"


DEFAULT_SPEC = QuadratureSpec()


def _tol(spec, value):
    return max(spec.abs_tol, spec.rel_tol * abs(value))


def _gl_rule(order):
    x, w = leggauss(order)
    return x, w


# -- one dimension -----------------------------------------------------------

def _gl_panel(f, a, b, x, w):
    h = 0.5 * (b - a)
    return h * np.dot(w, f(a + h * (x + 1.0)))


def _integrate_gl(f, a, b, spec):
    x, w = _gl_rule(spec.order)

    def refine(lo, hi):
        mid = 0.5 * (lo + hi)
        whole = _gl_panel(f, lo, hi, x, w)
        halves = (_gl_panel(f, lo, mid, x, w), _gl_panel(f, mid, hi, x, w))
        return halves[0] + halves[1], abs(halves[0] + halves[1] - whole)

    val, err = refine(a, b)
    heap = [(-err, a, b, val)]
    total, total_err = val, err
    splits = 0
    while total_err > _tol(spec, total):
        if splits >= spec.max_subdivisions:
            raise QuadratureFailure("Gauss-Legendre: subdivision limit reached", total, total_err)
        neg_err, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = refine(lo, mid)
        v2, e2 = refine(mid, hi)
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        splits += 1
    return float(total)


def _integrate_simpson(f, a, b, spec):
    def fs(*xs):
        return f(np.array(xs))

    fa, fm, fb = fs(a, 0.5 * (a + b), b)
    whole = (b - a) / 6.0 * (fa + 4 * fm + fb)
    # stack entries: (a, b, fa, fm, fb, whole, tol, depth)
    stack = [(a, b, fa, fm, fb, whole, max(spec.abs_tol, spec.rel_tol * abs(whole)), 0)]
    total = 0.0
    splits = 0
    while stack:
        lo, hi, flo, fmid, fhi, s, tol, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl, fr = fs(0.5 * (lo + mid), 0.5 * (mid + hi))
        left = (mid - lo) / 6.0 * (flo + 4 * fl + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4 * fr + fhi)
        delta = left + right - s
        if abs(delta) <= 15.0 * tol or depth >= 50:
            if depth >= 50:
                raise QuadratureFailure("adaptive Simpson: recursion depth exceeded", total)
            total += left + right + delta / 15.0
            continue
        splits += 1
        if splits > spec.max_subdivisions * 50:
            raise QuadratureFailure("adaptive Simpson: subdivision limit reached", total)
        stack.append((lo, mid, flo, fl, fmid, left, 0.5 * tol, depth + 1))
        stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * tol, depth + 1))
    return float(total)


def integrate_1d(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Adaptive quadrature of a vectorised ``f`` over ``[a, b]``."""
    if a == b:
        return 0.0
    if spec.rule == GAUSS_LEGENDRE:
        return _integrate_gl(f, a, b, spec)
    return _integrate_simpson(f, a, b, spec)


# -- two dimensions ----------------------------------------------------------

def integrate_2d(f: Callable, x_range, y_range, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Adaptive tensor Gauss-Legendre quadrature of ``f(x, y)`` over a rectangle.

    Each cell is compared against its four quarters; the cell with the largest
    discrepancy is split until the summed estimate meets the tolerance.  With
    ``rule="adaptive-simpson"`` the integral is evaluated as nested 1-D
    adaptive Simpson integrals instead.
    """
    (x0, x1), (y0, y1) = x_range, y_range
    if x0 == x1 or y0 == y1:
        return 0.0
    if spec.rule == ADAPTIVE_SIMPSON:
        inner = lambda xs: np.array([integrate_1d(lambda y: f(np.full_like(y, xv), y), y0, y1, spec)
                                     for xv in np.atleast_1d(xs)])
        return integrate_1d(inner, x0, x1, spec)

    nodes, weights = _gl_rule(spec.order)
    ww = np.outer(weights, weights)

    def cell(ax, bx, ay, by):
        hx, hy = 0.5 * (bx - ax), 0.5 * (by - ay)
        X, Y = np.meshgrid(ax + hx * (nodes + 1), ay + hy * (nodes + 1), indexing="ij")
        return hx * hy * float(np.sum(ww * f(X, Y)))

    def refine(ax, bx, ay, by):
        mx, my = 0.5 * (ax + bx), 0.5 * (ay + by)
        quads = [(ax, mx, ay, my), (mx, bx, ay, my), (ax, mx, my, by), (mx, bx, my, by)]
        parts = [cell(*q) for q in quads]
        return sum(parts), quads, parts

    whole = cell(x0, x1, y0, y1)
    val, _, _ = refine(x0, x1, y0, y1)
    heap = [(-abs(val - whole), (x0, x1, y0, y1), val)]
    total, total_err = val, abs(val - whole)
    splits = 0
    while total_err > _tol(spec, total):
        if splits >= spec.max_subdivisions:
            raise QuadratureFailure("2-D Gauss-Legendre: subdivision limit reached", total, total_err)
        neg_err, box, v = heapq.heappop(heap)
        _, quads, parts = refine(*box)
        total += sum(parts) - v
        total_err += neg_err
        for q, pv in zip(quads, parts):
            refined, _, _ = refine(*q)
            e = abs(refined - pv)
            total += refined - pv
            total_err += e
            heapq.heappush(heap, (-e, q, refined))
        splits += 1
    return float(total)


# -- geodesic balls ----------------------------------------------------------

def _check_rho(rho):
    if not (0.0 <= rho < math.pi / 2):
        raise RadiusOutOfRange(f"ball radius {rho!r} outside [0, pi/2)")


def _ball_integrand(s, alpha):
    r, _, _ = geodesic_closed_form(s, alpha)
    return 0.5 * np.sinh(2.0 * r) * np.abs(jacobian_J(s, alpha))


def ball_volume(rho: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Volume of the geodesic ball of radius ``rho`` (``0 <= rho < pi/2``).

    Integrates the volume element pulled back to geodesic polar coordinates
    ``(s, lam, alpha)``.  The longitude contributes ``2 pi`` and the
    ``alpha -> -alpha`` symmetry another factor 2; the altitude integral is
    split at the light direction ``pi/4``.
    """
    _check_rho(rho)
    if rho == 0.0:
        return 0.0
    lower = integrate_2d(_ball_integrand, (0.0, rho), (0.0, math.pi / 4), spec)
    upper = integrate_2d(_ball_integrand, (0.0, rho), (math.pi / 4, math.pi / 2), spec)
    return 4.0 * math.pi * (lower + upper)


def ball_volume_mc_oracle(rho: float, n_samples: int = 1_000_000, seed: int = 0,
                          batch: int = 100_000, n_scan: int = 32):
    """Monte-Carlo estimate of the ball volume by distance membership.

    Samples ``(r, phi)`` uniformly in ``[0, rho] x [-rho, rho]`` (every ball
    point lies there, since ``r`` and ``|phi|`` never exceed the arc length),
    weights by the volume element and keeps samples whose geodesic distance
    from the origin is at most ``rho``.  The ``theta`` direction integrates
    to ``2 pi`` because distance does not depend on it.  Batches draw from
    independent child seeds, so results depend only on ``seed`` and
    ``batch``.

    Returns ``(estimate, standard_error)``.
    """
    _check_rho(rho)
    if rho == 0.0 or n_samples <= 0:
        return 0.0, 0.0
    box = rho * 2.0 * rho * 2.0 * math.pi
    sizes = [batch] * (n_samples // batch)
    if n_samples % batch:
        sizes.append(n_samples % batch)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    s1 = s2 = 0.0
    for size, child in zip(sizes, children):
        rng = np.random.default_rng(child)
        r = rng.uniform(0.0, rho, size)
        phi = rng.uniform(-rho, rho, size)
        d, _ = distances_from_origin(r, phi, n_scan=n_scan, branches=(0,), xtol=1e-10)
        inside = np.nan_to_num(d, nan=np.inf) <= rho
        w = np.where(inside, box * 0.5 * np.sinh(2.0 * r), 0.0)
        s1 += w.sum()
        s2 += (w * w).sum()
    mean = s1 / n_samples
    var = max(s2 / n_samples - mean * mean, 0.0)
    return float(mean), float(math.sqrt(var / n_samples))


# -- sector-like domains -----------------------------------------------------

@dataclass(frozen=True)
class RadialCurve:
    """Curve ``r = r(theta)`` over ``[theta_start, theta_end]``.

    ``r_of_theta`` must accept numpy arrays.  ``samples`` optionally carries
    ``(theta, r)`` arrays for export.
    """
    theta_start: float
    theta_end: float
    r_of_theta: Callable
    samples: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        if not self.theta_start < self.theta_end:
            raise ValueError("RadialCurve needs theta_start < theta_end")

    def __call__(self, theta):
        return self.r_of_theta(theta)


def sector_volume(curve: RadialCurve, Phi: float, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Volume of the solid swept by the sector under ``r(theta)`` through fibre height ``Phi``."""
    if not Phi > 0:
        raise ValueError("fibre height Phi must be positive")

    def integrand(theta):
        return 0.25 * (np.cosh(2.0 * curve(theta)) - 1.0)

    return Phi * integrate_1d(integrand, curve.theta_start, curve.theta_end, spec)
