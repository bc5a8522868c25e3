"""Geodesics from the origin, the geodesic ODE, and geodesic distance.

A unit-speed geodesic leaving the origin is labelled by its arc length ``s``,
longitude ``lam`` and altitude ``alpha``.  With ``k = cos(2 alpha)`` the three
direction types (H2-like ``k > 0``, light ``k = 0``, fibre-like ``k < 0``)
share one closed form::

    F = sinh(s sqrt k) / sqrt k        C = cosh(s sqrt k)
    r     = arsinh(cos(alpha) F)
    theta = -atan2(sin(alpha) F, C)
    phi   = 2 s sin(alpha) + theta

``F`` and ``C`` are entire in ``k`` (they turn into ``sin``/``cos`` for
``k < 0``), so near ``alpha = pi/4`` we switch to their power series and the
light direction needs no special case.  ``atan2`` keeps ``theta`` continuous
past ``s sqrt(-k) = pi/2``.  The longitude is added to ``theta``.
"""

from __future__ import annotations

import math
from enum import Enum
from typing import NamedTuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    ChartOverflow,
    NegativeArcLength,
    NoConvergence,
    OutOfChart,
    SingularStart,
    StepSizeUnderflow,
)
from .model import (
    EuclideanModelPoint,
    from_hyperboloid,
    normalize,
    to_hyperboloid,
    translation_from,
    _wrap_angle,
)

QUARTER = math.pi / 4
HALF = math.pi / 2

# |k s^2| below this uses the power series
_SERIES_SWITCH = 0.5
_SERIES_TERMS = 14
_F_COEF = np.array([1.0 / math.factorial(2 * n + 1) for n in range(_SERIES_TERMS)])
_C_COEF = np.array([1.0 / math.factorial(2 * n) for n in range(_SERIES_TERMS)])
_D_COEF = np.array([(n + 1) / math.factorial(2 * n + 3) for n in range(_SERIES_TERMS)])


class GeodesicRegime(Enum):
    H2_LIKE = "H2-like"
    LIGHT = "light"
    FIBRE_LIKE = "fibre-like"


class GeodesicParams(NamedTuple):
    s: float
    lam: float
    alpha: float


class GeodesicState(NamedTuple):
    r: float
    theta: float
    phi: float
    dr: float
    dtheta: float
    dphi: float


def regime(alpha) -> GeodesicRegime:
    a = abs(alpha)
    if a < QUARTER:
        return GeodesicRegime.H2_LIKE
    if a == QUARTER:
        return GeodesicRegime.LIGHT
    return GeodesicRegime.FIBRE_LIKE


def _horner(coef, x):
    out = np.zeros_like(x)
    for c in coef[::-1]:
        out = out * x + c
    return out


def _entire(s, k):
    """``F``, ``C`` and ``D = dF/dk`` for arrays ``s``, ``k``."""
    s, k = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(k, dtype=float))
    x = k * s * s
    small = np.abs(x) < _SERIES_SWITCH
    F = np.empty_like(x)
    C = np.empty_like(x)
    D = np.empty_like(x)
    if small.any():
        xs, ss = x[small], s[small]
        F[small] = ss * _horner(_F_COEF, xs)
        C[small] = _horner(_C_COEF, xs)
        D[small] = ss ** 3 * _horner(_D_COEF, xs)
    big = ~small
    if big.any():
        kb, sb = k[big], s[big]
        w = np.sqrt(np.abs(kb))
        pos = kb > 0
        Fb = np.where(pos, np.sinh(sb * w), np.sin(sb * w)) / w
        Cb = np.where(pos, np.cosh(sb * w), np.cos(sb * w))
        F[big] = Fb
        C[big] = Cb
        D[big] = (sb * Cb - Fb) / (2.0 * kb)
    return F, C, D


def _check_s(s):
    if np.any(np.asarray(s) < 0):
        raise NegativeArcLength("arc length must be >= 0")


def geodesic_closed_form(s, alpha):
    """Hyperboloid coordinates ``(r, theta, phi)`` at arc length ``s``."""
    _check_s(s)
    k = np.cos(2.0 * np.asarray(alpha, dtype=float))
    F, C, _ = _entire(s, k)
    sa, ca = np.sin(alpha), np.cos(alpha)
    r = np.arcsinh(ca * F)
    theta = -np.arctan2(sa * F, C)
    phi = 2.0 * np.asarray(s) * sa + theta
    return r, theta, phi


def geodesic_partials(s, alpha):
    """Analytic first derivatives of the closed form.

    Returns ``(r_s, r_a, theta_s, theta_a, phi_s, phi_a)``.
    """
    s = np.asarray(s, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    k = np.cos(2.0 * alpha)
    k_a = -2.0 * np.sin(2.0 * alpha)
    F, C, D = _entire(s, k)
    sa, ca = np.sin(alpha), np.cos(alpha)

    u = ca * F
    root = np.sqrt(1.0 + u * u)
    r_s = ca * C / root
    r_a = (-sa * F + ca * D * k_a) / root

    v = sa * F
    v_s, v_a = sa * C, ca * F + sa * D * k_a
    C_s, C_a = k * F, 0.5 * s * F * k_a
    den = C * C + v * v
    th_s = -(C * v_s - v * C_s) / den
    th_a = -(C * v_a - v * C_a) / den
    return r_s, r_a, th_s, th_a, 2.0 * sa + th_s, 2.0 * s * ca + th_a


def jacobian_J(s, alpha):
    """Determinant of d(r, phi)/d(s, alpha)."""
    r_s, r_a, _, _, phi_s, phi_a = geodesic_partials(s, alpha)
    return r_s * phi_a - r_a * phi_s


def speed_squared(r, dr, dtheta, dphi):
    """Squared g-norm of a tangent vector at radius ``r``."""
    sh2 = np.sinh(r) ** 2
    return dr ** 2 + np.cosh(r) ** 2 * sh2 * dtheta ** 2 + (dphi + sh2 * dtheta) ** 2


def unit_speed_residual(s, alpha):
    r, _, _ = geodesic_closed_form(s, alpha)
    r_s, _, th_s, _, phi_s, _ = geodesic_partials(s, alpha)
    return np.abs(speed_squared(r, r_s, th_s, phi_s) - 1.0)


def geodesic_hyperboloid(s, lam, alpha):
    r, theta, phi = geodesic_closed_form(s, alpha)
    return r, theta + lam, phi


def geodesic_projective(s, lam, alpha):
    """Normalised projective point on the geodesic (no chart restriction)."""
    return from_hyperboloid(*geodesic_hyperboloid(s, lam, alpha))


def geodesic_point(g) -> EuclideanModelPoint:
    """Euclidean model coordinates ``(X, Y, Z)`` of a geodesic point.

    Accepts a :class:`GeodesicParams` (arrays allowed in each field).
    """
    s, lam, alpha = g
    r, theta, phi = geodesic_closed_form(s, alpha)
    cphi = np.cos(phi)
    if np.any(np.abs(cphi) < 1e-12):
        raise ChartOverflow("fibre coordinate reached pi/2 (mod pi)")
    t = np.tanh(r) / cphi
    arg = theta - phi + lam
    return EuclideanModelPoint(np.tan(phi), t * np.cos(arg), t * np.sin(arg))


# -- geodesic ODE ------------------------------------------------------------

def geodesic_rhs(_s, y):
    """Second-order geodesic system of the metric as a first-order ODE."""
    r, _, _, dr, dth, dph = y
    sh2r = np.sinh(2.0 * r)
    ddr = sh2r * dth * dph + 0.5 * (np.sinh(4.0 * r) - sh2r) * dth * dth
    ddph = 2.0 * dr * np.tanh(r) * (2.0 * np.sinh(r) ** 2 * dth + dph)
    ddth = -2.0 * dr / sh2r * ((3.0 * np.cosh(2.0 * r) - 1.0) * dth + 2.0 * dph)
    return [dr, dth, dph, ddr, ddth, ddph]


def start_state(alpha, s0=1e-4) -> GeodesicState:
    """State a short way along the geodesic, taken from the closed form.

    The ODE divides by ``sinh(2r)`` so it cannot be started at ``r = 0``.
    """
    r, th, ph = geodesic_closed_form(s0, alpha)
    r_s, _, th_s, _, ph_s, _ = geodesic_partials(s0, alpha)
    return GeodesicState(*(float(v) for v in (r, th, ph, r_s, th_s, ph_s)))


def integrate_ode(initial: GeodesicState, s_end, tol=1e-10, s_start=0.0, s_eval=None):
    """Adaptive (DOP853) integration of the geodesic system.

    Returns the final :class:`GeodesicState`, or an ``(n, 6)`` array of states
    when ``s_eval`` is given.
    """
    if initial.r <= 0.0:
        raise SingularStart("geodesic ODE started on the fibre axis; use start_state()")
    sol = solve_ivp(geodesic_rhs, (s_start, s_end), list(initial), method="DOP853",
                    rtol=tol, atol=tol, t_eval=s_eval)
    if sol.status < 0:
        raise StepSizeUnderflow(sol.message)
    if s_eval is not None:
        return sol.y.T
    return GeodesicState(*sol.y[:, -1])


def ode_path(alpha, s_values, tol=1e-10, s0=1e-4):
    """ODE solution at ``s_values`` (all > ``s0``), bootstrapped at ``s0``."""
    s_values = np.asarray(s_values, dtype=float)
    return integrate_ode(start_state(alpha, s0), float(s_values[-1]), tol, s_start=s0,
                         s_eval=s_values)


# -- distance ----------------------------------------------------------------

class DistanceResult(NamedTuple):
    d: float
    params: GeodesicParams
    residual: float
    branches: tuple  # every (s, alpha, branch) found by the scan, sorted by s


def _arsinh_like(t, k):
    """``arsinh(t sqrt k)/sqrt k`` continued to ``arcsin(t sqrt(-k))/sqrt(-k)``."""
    t, k = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(k, dtype=float))
    out = np.empty_like(t)
    x = k * t * t
    small = np.abs(x) < 1e-2
    if small.any():
        xs = x[small]
        acc = np.zeros_like(xs)
        for n in range(9, -1, -1):
            acc = acc * xs + (-1) ** n * math.comb(2 * n, n) / (4 ** n * (2 * n + 1))
        out[small] = t[small] * acc
    big = ~small
    if big.any():
        kb, tb = k[big], t[big]
        w = np.sqrt(np.abs(kb))
        out[big] = np.where(kb > 0, np.arcsinh(tb * w),
                            np.arcsin(np.clip(tb * w, -1.0, 1.0))) / w
    return out


def _level_s(r_target, alpha, branch):
    """Arc length where the geodesic of altitude ``alpha`` reaches radius ``r_target``.

    Branch 0 is the first crossing; branch 1 the second crossing of a
    fibre-like geodesic (after ``r`` peaks at ``s sqrt(-k) = pi/2``).
    """
    t = np.sinh(r_target) / np.cos(alpha)
    k = np.cos(2.0 * alpha)
    if branch == 0:
        return _arsinh_like(t, k)
    w = np.sqrt(np.maximum(-k, 1e-300))
    return (np.pi - np.arcsin(np.clip(t * w, -1.0, 1.0))) / w


def _alpha_star(r_target):
    """Largest altitude whose geodesic still reaches ``r_target``."""
    sh = np.sinh(r_target)
    return np.arccos(np.minimum(sh / np.sqrt(1.0 + 2.0 * sh * sh), 1.0))


def _scan_roots(r_t, phi_t, branch, n_scan, s_cap, xtol=1e-15):
    """Bracket and bisect roots of ``phi(s(alpha), alpha) - phi_t`` on one branch.

    Returns flat arrays ``(index, s, alpha)`` over all roots of all targets.
    """
    n = r_t.size
    a_star = _alpha_star(r_t)[:, None]
    if branch == 0:
        u = np.linspace(-1.0, 1.0, n_scan + 1)[None, :]
        grid = a_star * u
    else:
        u = np.linspace(0.0, 1.0, n_scan + 1)[1:][None, :]
        side = QUARTER + (a_star - QUARTER) * u
        grid = np.concatenate([-side[:, ::-1], side], axis=1)
    rr = np.broadcast_to(r_t[:, None], grid.shape)
    pp = np.broadcast_to(phi_t[:, None], grid.shape)

    def mismatch(rv, av, pv):
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            s = _level_s(rv, av, branch)
            bad = ~np.isfinite(s) | (s > s_cap)
            s = np.where(bad, 0.0, s)
            g = geodesic_closed_form(s, av)[2] - pv
        return np.where(bad, np.nan, g), s

    g, _ = mismatch(rr, grid, pp)
    lo_g, hi_g = g[:, :-1], g[:, 1:]
    if branch == 1:
        # the two halves of the branch-1 grid are not adjacent
        lo_g = lo_g.copy()
        lo_g[:, n_scan - 1] = np.nan
    hit = np.isfinite(lo_g) & np.isfinite(hi_g) & (lo_g * hi_g <= 0.0)
    idx, j = np.nonzero(hit)
    if idx.size == 0:
        return idx, np.empty(0), np.empty(0)
    a = grid[idx, j].copy()
    b = grid[idx, j + 1].copy()
    ga = lo_g[idx, j].copy()
    rt, pt = r_t[idx], phi_t[idx]
    for _ in range(64):
        if np.all(b - a < xtol):
            break
        m = 0.5 * (a + b)
        gm, _ = mismatch(rt, m, pt)
        left = (ga * gm <= 0.0) | ~np.isfinite(gm)
        b = np.where(left, m, b)
        a = np.where(left, a, m)
        ga = np.where(left, ga, gm)
    alpha = 0.5 * (a + b)
    _, s = mismatch(rt, alpha, pt)
    return idx, s, alpha


def _default_cap(r):
    # every geodesic reaching radius r is at least r long
    return 2 * math.pi + 2.0 * float(np.max(r, initial=0.0))


def distances_from_origin(r, phi, n_scan=64, branches=(0, 1), s_cap=None, xtol=1e-15):
    """Vectorised geodesic distance from the origin to points ``(r, *, phi)``.

    Only ``r`` and ``phi`` matter: the longitude absorbs ``theta``.  Returns
    ``(d, alpha)`` arrays; entries are NaN where no geodesic was found.
    """
    r = np.atleast_1d(np.asarray(r, dtype=float)).ravel()
    phi = np.atleast_1d(np.asarray(phi, dtype=float)).ravel()
    if s_cap is None:
        s_cap = _default_cap(r)
    d = np.full(r.shape, np.inf)
    alpha = np.full(r.shape, np.nan)
    axis = r == 0.0
    d[axis] = np.abs(phi[axis])
    alpha[axis] = np.where(phi[axis] >= 0.0, HALF, -HALF)
    off = np.nonzero(~axis)[0]
    if off.size:
        for br in branches:
            idx, s, a = _scan_roots(r[off], phi[off], br, n_scan, s_cap, xtol)
            if idx.size == 0:
                continue
            tgt = off[idx]
            order = np.argsort(-s)  # smallest s written last wins
            tgt, s, a = tgt[order], s[order], a[order]
            better = s < d[tgt]
            d[tgt[better]] = s[better]
            alpha[tgt[better]] = a[better]
    d[~np.isfinite(d)] = np.nan
    return d, alpha


def _newton_polish(s, a, r_t, phi_t, tol, max_iter=20):
    def resid(s, a):
        r, _, ph = geodesic_closed_form(s, a)
        return np.array([r - r_t, ph - phi_t])

    f = resid(s, a)
    err = float(np.max(np.abs(f)))
    for _ in range(max_iter):
        if err <= tol * 1e-2:
            break
        r_s, r_a, _, _, ph_s, ph_a = geodesic_partials(s, a)
        jac = np.array([[r_s, r_a], [ph_s, ph_a]], dtype=float)
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError:
            break
        lam = 1.0
        while lam > 1e-6:
            s_new, a_new = s - lam * step[0], a - lam * step[1]
            if s_new >= 0.0:
                f_new = resid(s_new, a_new)
                err_new = float(np.max(np.abs(f_new)))
                if err_new < err:
                    s, a, f, err = s_new, a_new, f_new, err_new
                    break
            lam *= 0.5
        else:
            break
    return float(s), float(a), err


def distance_from_origin(p, tol=1e-10, n_scan=64) -> DistanceResult:
    """Geodesic distance from the origin to the interior point ``p``.

    Solves ``r(s, alpha) = r_P``, ``phi(s, alpha) = phi_P`` for the smallest
    ``s``; the longitude is ``theta_P - theta(s, alpha)``.  Requires
    ``|phi_P| < pi/2``.
    """
    h = to_hyperboloid(p)
    if abs(h.phi) >= HALF:
        raise OutOfChart(f"|phi| = {abs(h.phi):.6g} >= pi/2 needs fibre unwinding")
    if h.r == 0.0:
        s = abs(h.phi)
        a = HALF if h.phi >= 0 else -HALF
        lam = _wrap_angle(h.theta - float(geodesic_closed_form(s, a)[1]))
        return DistanceResult(s, GeodesicParams(s, float(lam), a), 0.0, ((s, a, 0),))

    found = []
    for br in (0, 1):
        idx, s, a = _scan_roots(np.array([h.r]), np.array([h.phi]), br, n_scan, _default_cap(h.r))
        found.extend((float(si), float(ai), br) for si, ai in zip(s, a))
    if not found:
        raise NoConvergence("no geodesic from the origin reaches the target", best_residual=None)
    found.sort()
    s, a, err = _newton_polish(found[0][0], found[0][1], h.r, h.phi, tol)
    if err > tol:
        raise NoConvergence(f"distance residual {err:.3g} > {tol:.3g}", best_residual=err)
    lam = _wrap_angle(h.theta - float(geodesic_closed_form(s, a)[1]))
    return DistanceResult(s, GeodesicParams(s, float(lam), a), err, tuple(found))


def distance(p1, p2, tol=1e-10) -> float:
    """Geodesic distance between two interior points."""
    q = normalize(p2) @ translation_from(p1)
    return distance_from_origin(q, tol=tol).d
