"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest -v tests/test_acceptance.py`` (lines are printed in the
terminal summary) or directly with ``python3 tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest

from sl2r.geodesics import (
    geodesic_closed_form,
    jacobian_J,
    ode_path,
    unit_speed_residual,
)
from sl2r.model import fibre_translation, proportional
from sl2r.packing import pack, sweep
from sl2r.tiling import build_generators, verify_presentation, vertex_radius
from sl2r.volumes import ball_volume, ball_volume_mc_oracle

# reference vertex radii b for p = 3
REF_VERTEX_RADIUS = {8: 0.40561640, 9: 0.47611091, 10: 0.50289355, 50: 0.89636657, 1000: 0.99457331}
REF_B_Q7_RECOMPUTED = 0.3007426

# (p, q): rho_opt, Vol(ball), Vol(prism), density
REF_PACKINGS = {
    (3, 11): (0.237999, 0.057543, 0.169931, 0.338626),
    (3, 12): (0.261799, 0.076892, 0.205617, 0.373960),
    (3, 13): (0.279134, 0.093489, 0.238467, 0.392044),
    (3, 14): (0.287083, 0.101857, 0.268561, 0.379271),
    (3, 50): (0.350810, 0.188371, 0.636918, 0.295754),
    (3, 1000): (0.370822, 0.223543, 0.812627, 0.275087),
    (5, 7): (0.493679, 0.546132, 1.218594, 0.448165),
    (6, 8): (0.654498, 1.350812, 2.570209, 0.525565),
    (6, 9): (0.692287, 1.624770, 2.924327, 0.555605),
    (7, 9): (0.772932, 2.347696, 4.181962, 0.561386),
    (7, 10): (0.789635, 2.523909, 4.568217, 0.552493),
    (8, 10): (0.860471, 3.387783, 5.971111, 0.567362),
    (9, 11): (0.930662, 4.456867, 7.887074, 0.565085),
    (9, 3000): (1.003711, 5.838784, 13.410609, 0.435385),
    (20, 60): (1.361357, 18.712577, 37.065848, 0.504847),
    (20, 2000): (1.387192, 20.205264, 39.883121, 0.506612),
}
HALF_HEIGHT_ROWS = [(3, 11), (3, 12), (5, 7), (6, 8), (7, 9), (20, 60)]
MC_ROWS = [(3, 11), (5, 7), (8, 10), (20, 60)]
RECORD = 0.567362
RELATION_PAIRS = [(3, 7), (3, 8), (3, 12), (4, 5), (4, 8), (5, 7), (6, 8), (7, 9), (8, 10), (9, 11)]

_packs = {}


def _pack(pq):
    if pq not in _packs:
        _packs[pq] = pack(pq)
    return _packs[pq]


def criterion_1():
    lines, ok = [], True
    for q, want in REF_VERTEX_RADIUS.items():
        got = vertex_radius((3, q))
        good = abs(got - want) <= 1e-7
        ok &= good
        lines.append(f"(3,{q}) b={got:.8f} ref={want:.8f} diff={got - want:+.2e} {'ok' if good else 'MISMATCH'}")
    got = vertex_radius((3, 7))
    good = abs(got - REF_B_Q7_RECOMPUTED) <= 1e-7
    ok &= good
    lines.append(f"(3,7) b={got:.8f} recomputed={REF_B_Q7_RECOMPUTED} {'ok' if good else 'MISMATCH'}")
    lim = vertex_radius((3, math.inf))
    ok &= abs(lim - 1.0) <= 1e-9
    lines.append(f"q->inf b={lim!r}")
    return ok, "vertex radius reference values", lines


def criterion_2():
    lines, ok = [], True
    for pq, (rho, *_rest) in REF_PACKINGS.items():
        got = _pack(pq).rho_opt
        good = abs(got - rho) <= 1e-4
        ok &= good
        lines.append(f"{pq} rho={got:.7f} ref={rho} diff={got - rho:+.1e} {_pack(pq).limiting_constraint.value}")
    for p, q in HALF_HEIGHT_ROWS:
        analytic = math.pi / 2 - math.pi / p - math.pi / q
        good = round(analytic, 6) == REF_PACKINGS[(p, q)][0] and _pack((p, q)).rho_opt == pytest.approx(analytic, abs=1e-15)
        ok &= good
        lines.append(f"({p},{q}) pi/2-pi/p-pi/q={analytic:.6f} {'ok' if good else 'MISMATCH'}")
    return ok, "optimal ball radius", lines


def criterion_3():
    lines, ok = [], True
    for pq, (rho, vb, *_rest) in REF_PACKINGS.items():
        got = ball_volume(rho)
        rel = (got - vb) / vb
        good = abs(rel) <= 1e-3
        ok &= good
        lines.append(f"{pq} Vol(B)={got:.6f} ref={vb} rel={rel:+.1e}")
    for pq in MC_ROWS:
        rho, vb = REF_PACKINGS[pq][:2]
        mean, se = ball_volume_mc_oracle(rho, n_samples=1_000_000, seed=2024)
        z = (mean - vb) / se
        good = abs(z) <= 3
        ok &= good
        lines.append(f"{pq} MC={mean:.6f}+-{se:.6f} ref={vb} z={z:+.2f}")
    return ok, "ball volume (quadrature and MC oracle)", lines


def criterion_4():
    lines, ok = [], True
    for pq, (_rho, _vb, vp, dens) in REF_PACKINGS.items():
        res = _pack(pq)
        rel = (res.vol_prism - vp) / vp
        dd = res.density - dens
        good = abs(rel) <= 1e-3 and abs(dd) <= 1e-3
        ok &= good
        lines.append(f"{pq} Vol(P)={res.vol_prism:.6f} ref={vp} rel={rel:+.1e} "
                     f"delta={res.density:.6f} ref={dens} diff={dd:+.1e}")
    return ok, "prism volume and density", lines


def criterion_5():
    start = time.perf_counter()
    table = sweep(range(3, 21), range(3, 61), jobs=8)
    elapsed = time.perf_counter() - start
    best = table.best
    ok = (best is not None and (best.params.p, best.params.q) == (8, 10)
          and abs(best.density - RECORD) <= 1e-3 and not table.errors and elapsed < 1800)
    lines = [f"{len(table.results)} cells, {len(table.skipped)} skipped, {len(table.errors)} errors, {elapsed:.0f} s",
             f"argmax ({best.params.p},{best.params.q}) delta={best.density:.6f} record={RECORD}"]
    return ok, "record density over p<=20, q<=60", lines


def criterion_6():
    alphas = np.linspace(-1.5, 1.5, 8)
    s = np.linspace(1e-4, 2.0, 201)
    dev = 0.0
    for a in alphas:
        states = ode_path(a, s)
        r, th, ph = geodesic_closed_form(s, a)
        dev = max(dev, np.max(np.abs(states[:, :3] - np.column_stack([r, th, ph]))))
    S, A = np.meshgrid(np.linspace(0.0, 2.0, 50), np.linspace(-1.5, 1.5, 50), indexing="ij")
    speed = float(np.max(unit_speed_residual(S, A)))
    ok = dev < 1e-6 and speed < 1e-9
    return ok, "geodesic ODE vs closed form", [f"sup ODE deviation {dev:.2e}", f"max unit-speed residual {speed:.2e}"]


def _fd_jacobian(s, a, h=1e-5):
    def d(f_idx, ds, da):
        return (geodesic_closed_form(s + ds, a + da)[f_idx] - geodesic_closed_form(s - ds, a - da)[f_idx]) / (2 * h)
    return d(0, h, 0) * d(2, 0, h) - d(0, 0, h) * d(2, h, 0)


def criterion_7():
    S, A = np.meshgrid(np.linspace(0.05, 2.0, 40), np.linspace(-1.55, 1.55, 63), indexing="ij")
    keep = np.abs(A - math.pi / 4) >= 1e-3
    S, A = S[keep], A[keep]
    J = jacobian_J(S, A)
    rel = float(np.max(np.abs(_fd_jacobian(S, A) - J) / np.abs(J)))
    return rel < 1e-6, "Jacobian vs finite differences", [f"{S.size} grid points, max relative error {rel:.2e}"]


def criterion_8():
    rho = 0.05
    ratio = ball_volume(rho) / (4 / 3 * math.pi * rho ** 3)
    grid = np.linspace(0.0, 1.5, 50)
    vols = np.array([ball_volume(r) for r in grid])
    mono = bool(np.all(np.diff(vols) > 0))
    ok = 0.997 <= ratio <= 1.003 and mono
    return ok, "small-ball limit and monotone volume", [f"ratio at 0.05: {ratio:.6f}", f"monotone on 50 points: {mono}"]


def criterion_9():
    lines, ok = [], True
    for pq in RELATION_PAIRS:
        d = build_generators(pq)
        report = verify_presentation(d, tol=1e-10)
        M = d.gen_a @ d.gen_b
        phi_ok = proportional(M @ M, fibre_translation(math.pi - 2 * math.pi / pq[0] - 2 * math.pi / pq[1]), 1e-10)[0]
        good = all(c.ok for c in report) and phi_ok
        ok &= good
        worst = max(report, key=lambda c: c.residual)
        lines.append(f"{pq} worst {worst.name!r} residual {worst.residual:.1e}, (ab)^2 ~ S(Phi): {phi_ok}")
    return ok, "group relations", lines


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]
_summary = {}


def _run(n):
    start = time.perf_counter()
    ok, title, lines = CRITERIA[n - 1]()
    _summary[n] = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({time.perf_counter() - start:.1f} s)"
    print(_summary[n])
    for line in lines:
        print("    " + line)
    return ok


@pytest.fixture(scope="module", autouse=True)
def _print_summary(request):
    yield
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    if reporter is not None and _summary:
        reporter.write_line("")
        reporter.write_line("acceptance criteria:")
        for n in sorted(_summary):
            reporter.write_line(_summary[n])


def test_criterion_1_vertex_radius():
    assert _run(1)


def test_criterion_2_optimal_radius():
    assert _run(2)


def test_criterion_3_ball_volume():
    assert _run(3)


def test_criterion_4_prism_volume_and_density():
    assert _run(4)


def test_criterion_5_record_density_sweep():
    assert _run(5)


def test_criterion_6_ode_consistency():
    assert _run(6)


def test_criterion_7_jacobian():
    assert _run(7)


def test_criterion_8_small_ball_and_monotonicity():
    assert _run(8)


def test_criterion_9_group_relations():
    assert _run(9)


if __name__ == "__main__":
    results = [_run(n) for n in range(1, len(CRITERIA) + 1)]
    raise SystemExit(0 if all(results) else 1)
