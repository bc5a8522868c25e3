"""Regular prism tilings and their groups pq2_1.

The group is generated by ``a``, a ``2 pi/p`` rotation about the fibre through
the origin, and ``b``, a ``2 pi/q`` rotation about the fibre through the
vertex ``A1``.  ``ab`` is a half-screw about the fibre ``f0`` through the edge
midpoint ``H``, and ``tau = abab = baba`` is the fibre translation by the
prism height ``Phi``.

Vertices ``A1..Ap`` lie in the base plane at polar angles ``2 pi k / p``,
so ``Ap`` sits at ``-2 pi / p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import (
    ConventionFailure,
    DegenerateNullspace,
    EndpointMismatch,
    InvalidParams,
    NonMonotoneAngle,
)
from .geodesics import distance_from_origin, geodesic_projective
from .model import (
    fibre_translation,
    foot_point,
    form,
    from_hyperboloid,
    normalize,
    proportional,
    rotation_about_fibre,
    rotation_about_origin_fibre,
    to_hyperboloid,
    translation_from,
    translation_to,
)
from .volumes import DEFAULT_SPEC, QuadratureSpec, RadialCurve, sector_volume


@dataclass(frozen=True)
class TilingParams:
    p: int
    q: float  # an int, or math.inf for the limiting case

    def __post_init__(self):
        if self.p < 3 or self.p != int(self.p):
            raise InvalidParams(f"p = {self.p!r}: need an integer p >= 3")
        if self.q != math.inf and self.q != int(self.q):
            raise InvalidParams(f"q = {self.q!r}: need an integer")
        if not self.q > 2 * self.p / (self.p - 2):
            raise InvalidParams(
                f"(p, q) = ({self.p}, {self.q}) violates q > 2p/(p-2) = {2 * self.p / (self.p - 2):.6g}")


def _params(params) -> TilingParams:
    if isinstance(params, TilingParams):
        return params
    return TilingParams(*params)


def vertex_radius(params) -> float:
    """``b = tanh(OA1)`` for the regular p-gon with angles ``2 pi / q``."""
    pr = _params(params)
    t = math.tan(math.pi / pr.p) * (0.0 if pr.q == math.inf else math.tan(math.pi / pr.q))
    return math.sqrt((1.0 - t) / (1.0 + t))


def prism_height(params) -> float:
    """Fibre height ``Phi = pi - 2 pi/p - 2 pi/q`` of the prism."""
    pr = _params(params)
    inv_q = 0.0 if pr.q == math.inf else 1.0 / pr.q
    return math.pi * (1.0 - 2.0 / pr.p - 2.0 * inv_q)


@dataclass(frozen=True, eq=False)
class PrismData:
    params: TilingParams
    b: float
    Phi: float
    vertices: np.ndarray  # (p, 4), A1..Ap
    gen_a: np.ndarray
    gen_b: np.ndarray
    screw_s: np.ndarray
    tau: np.ndarray
    f0_foot: np.ndarray  # H
    base_curve: Optional[RadialCurve] = None
    side_samples: Optional[np.ndarray] = field(default=None, repr=False)  # (n, 4) feet, A1 -> Ap

    @property
    def half_screw(self):
        return self.gen_a @ self.gen_b

    @property
    def vertex_distance(self):
        return math.atanh(self.b)


def build_generators(params) -> PrismData:
    """Generators, vertices and half-screw axis for ``(p, q)``.

    The sign of the rotation ``b`` is the one for which ``(ab)^2`` is a
    positive multiple of ``S(Phi)``; that single test fixes every
    orientation convention downstream.
    """
    pr = _params(params)
    if pr.q == math.inf:
        raise InvalidParams("the q -> infinity limit has no finite generators")
    b = vertex_radius(pr)
    Phi = prism_height(pr)
    rA = math.atanh(b)
    A1 = from_hyperboloid(rA, 0.0, 0.0)
    gen_a = rotation_about_origin_fibre(2 * math.pi / pr.p)
    S_Phi = fibre_translation(Phi)

    gen_b = None
    for sign in (1.0, -1.0):
        cand = rotation_about_fibre(A1, sign * 2 * math.pi / pr.q)
        m = gen_a @ cand
        ok, _, _ = proportional(m @ m, S_Phi, tol=1e-8)
        if ok:
            gen_b = cand
            break
    if gen_b is None:
        raise ConventionFailure(f"no rotation sign gives (ab)^2 ~ S(Phi) for {pr}")

    verts = np.array([from_hyperboloid(rA, 2 * math.pi * k / pr.p, 0.0) for k in range(pr.p)])
    tau = gen_a @ gen_b @ gen_a @ gen_b
    data = PrismData(
        params=pr, b=b, Phi=Phi, vertices=verts, gen_a=gen_a, gen_b=gen_b,
        screw_s=gen_b @ gen_a @ gen_b, tau=tau, f0_foot=np.zeros(4),
    )
    return replace(data, f0_foot=half_screw_axis(data))


def half_screw_axis(d: PrismData, tol=1e-9) -> np.ndarray:
    """Foot point ``H`` of the invariant fibre of the half-screw ``ab``.

    Points ``X`` of that fibre satisfy ``X ab = X S(Phi/2)``.  A fibre is a
    projective line, so the solution space is two-dimensional; every
    non-zero vector in it is an interior point of the same fibre.
    """
    M = d.gen_a @ d.gen_b
    A = (M - fibre_translation(d.Phi / 2)).T
    _, sv, vt = np.linalg.svd(A)
    scale = max(sv[0], 1.0)
    null_dim = int(np.sum(sv <= tol * scale))
    if null_dim != 2:
        raise DegenerateNullspace(f"half-screw fixed-fibre space has dimension {null_dim}, expected 2")
    basis = vt[-2:]
    X = basis[0] if form(basis[0]) < form(basis[1]) else basis[1]
    if not form(X) < 0:
        raise DegenerateNullspace("half-screw fixed space contains no interior point")
    resid = np.max(np.abs(X @ M - X @ fibre_translation(d.Phi / 2))) / np.max(np.abs(M))
    if resid > 1e-8:
        raise DegenerateNullspace(f"fixed-fibre residual {resid:.3g}")
    return normalize(foot_point(X))


def screw_motion(d: PrismData, t: float) -> np.ndarray:
    """Continuous screw about ``f0``; ``t = 1`` reproduces ``ab`` up to scale."""
    H = d.f0_foot
    return (translation_from(H) @ rotation_about_origin_fibre(t * math.pi)
            @ fibre_translation(t * d.Phi / 2) @ translation_to(H))


def _side_geodesic(d: PrismData):
    """Geodesic from ``A1`` to ``Ap S(Phi/2)``, as (length, lam, alpha) from the origin frame."""
    A1, Ap = d.vertices[0], d.vertices[-1]
    target = Ap @ fibre_translation(d.Phi / 2)
    res = distance_from_origin(target @ translation_from(A1))
    return res.d, res.params.lam, res.params.alpha


def _side_feet(d: PrismData, s, length, lam, alpha):
    pts = geodesic_projective(s, lam, alpha) @ translation_to(d.vertices[0])
    return normalize(foot_point(pts))


def base_curve(d: PrismData, n_samples: int = 129, tol: float = 1e-8) -> PrismData:
    """Attach the side curve of the base figure to ``d``.

    The side surface over the edge ``A1 Ap`` is the union of fibres through
    the geodesic from ``A1`` to ``Ap S(Phi/2)``.  The half-screw ``ab`` maps
    that geodesic onto itself reversed (shifted by ``S(Phi/2)``), so the
    side surface is carried onto itself with ``f1`` and ``fp`` swapped.
    Its foot points form the side curve ``c``, which runs from ``A1``
    through ``H`` to ``Ap``.

    The stored :class:`RadialCurve` covers the sector ``O A1 A2``, obtained
    from ``c`` by the rotation ``a``.
    """
    p = d.params.p
    length, lam, alpha = _side_geodesic(d)
    s = np.linspace(0.0, length, n_samples)
    feet = _side_feet(d, s, length, lam, alpha)

    for label, got, want in (("start", feet[0], d.vertices[0]),
                             ("end", feet[-1], d.vertices[-1])):
        gap = np.max(np.abs(normalize(got) - normalize(want)))
        if gap > tol:
            raise EndpointMismatch(f"side curve {label} misses its vertex by {gap:.3g}")
    mid = _side_feet(d, np.array([0.5 * length]), length, lam, alpha)[0]
    gap = np.max(np.abs(mid - d.f0_foot))
    if gap > tol:
        raise EndpointMismatch(f"side curve midpoint misses H by {gap:.3g}")

    h = to_hyperboloid(feet)
    theta = np.unwrap(h.theta)
    steps = np.diff(theta)
    if not (np.all(steps < 0) or np.all(steps > 0)):
        raise NonMonotoneAngle("side curve polar angle is not monotone")

    sector = 2 * math.pi / p
    th_A1 = float(theta[0])

    def angle_at(sv):
        hm = to_hyperboloid(_side_feet(d, sv, length, lam, alpha))
        return th_A1 + np.mod(hm.theta - th_A1 + math.pi, 2 * math.pi) - math.pi, hm.r

    # theta decreases along the curve; reverse for np.interp
    th_inc, s_inc = theta[::-1], s[::-1]
    ds = 1e-6 * length

    def r_side(th):
        """Radius of ``c`` at polar angle ``th`` in ``[-2pi/p, 0]``."""
        th = np.asarray(th, dtype=float)
        sv = np.interp(th, th_inc, s_inc)
        for _ in range(8):
            f, _ = angle_at(sv)
            slope = (angle_at(np.minimum(sv + ds, length))[0] - angle_at(np.maximum(sv - ds, 0.0))[0]) \
                / (np.minimum(sv + ds, length) - np.maximum(sv - ds, 0.0))
            step = (f - th) / slope
            sv = np.clip(sv - step, 0.0, length)
            if np.all(np.abs(step) < 1e-14 * max(length, 1.0)):
                break
        return angle_at(sv)[1]

    def r_sector(th):
        return r_side(np.asarray(th, dtype=float) - sector)

    curve = RadialCurve(0.0, sector, r_sector, samples=(theta[::-1] + sector, h.r[::-1]))
    return replace(d, base_curve=curve, side_samples=feet)


def full_boundary(curve: RadialCurve, p: int) -> RadialCurve:
    """Whole base-figure boundary over ``[0, 2 pi)`` by the ``p``-fold symmetry."""
    width = curve.theta_end - curve.theta_start

    def r(th):
        return curve(curve.theta_start + np.mod(np.asarray(th, dtype=float) - curve.theta_start, width))

    return RadialCurve(curve.theta_start, curve.theta_start + p * width, r)


def build_prism(params, n_samples: int = 129) -> PrismData:
    return base_curve(build_generators(params), n_samples)


def prism_volume(d: PrismData, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Volume of the bounded prism: ``p`` sector-like domains of height ``Phi``."""
    if d.base_curve is None:
        d = base_curve(d)
    return d.params.p * sector_volume(d.base_curve, d.Phi, spec)


# -- presentation ------------------------------------------------------------

@dataclass(frozen=True)
class RelatorCheck:
    name: str
    ok: bool
    residual: float
    fibre_shift: Optional[float]  # phi of S(phi) when the word is a fibre translation


def _word(gens, letters):
    out = np.eye(4)
    for g, e in letters:
        m = gens[g]
        if e < 0:
            m = np.linalg.inv(m)
        out = out @ np.linalg.matrix_power(m, abs(e))
    return out


def _fibre_shift(m, tol):
    phi = math.atan2(m[0, 1], m[0, 0])
    ok, _, _ = proportional(m, fibre_translation(phi), tol)
    return phi if ok else None


def verify_presentation(d: PrismData, tol: float = 1e-10):
    """Check the defining relators of pq2_1 on the matrix generators.

    Returns a list of :class:`RelatorCheck`; a relator passes when its word
    is a positive multiple of the identity within ``tol``.  Entries named
    with ``~`` or ``=`` are the derived relations (equalities of words, the
    fibre translation ``tau`` and its centrality).
    """
    p, q = d.params.p, int(d.params.q)
    gens = {"a": d.gen_a, "b": d.gen_b, "s": d.screw_s}
    I = np.eye(4)
    relators = {
        "a^p": [("a", p)],
        "b^q": [("b", q)],
        "a s a^-1 s^-1": [("a", 1), ("s", 1), ("a", -1), ("s", -1)],
        "b a b s^-1": [("b", 1), ("a", 1), ("b", 1), ("s", -1)],
        "abab a^-1b^-1a^-1b^-1": [("a", 1), ("b", 1), ("a", 1), ("b", 1),
                                  ("a", -1), ("b", -1), ("a", -1), ("b", -1)],
    }
    report = []
    for name, letters in relators.items():
        m = _word(gens, letters)
        ok, _, res = proportional(m, I, tol)
        report.append(RelatorCheck(name, ok, res, _fibre_shift(m, tol)))

    abab = _word(gens, [("a", 1), ("b", 1)] * 2)
    baba = _word(gens, [("b", 1), ("a", 1)] * 2)
    pairs = {
        "abab = baba": (abab, baba),
        "(ab)^2 ~ S(Phi)": (abab, fibre_translation(d.Phi)),
        "tau a = a tau": (d.tau @ d.gen_a, d.gen_a @ d.tau),
        "tau b = b tau": (d.tau @ d.gen_b, d.gen_b @ d.tau),
    }
    for name, (m1, m2) in pairs.items():
        ok, _, res = proportional(m1, m2, tol)
        report.append(RelatorCheck(name, ok, res, _fibre_shift(m1, tol)))
    return report
