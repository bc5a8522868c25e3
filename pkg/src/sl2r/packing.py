"""Optimal geodesic-ball packings under the prism groups and (p, q) sweeps."""

from __future__ import annotations

import json
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional

from .errors import InvalidParams, SL2RError
from .geodesics import distance_from_origin
from .model import ORIGIN
from .tiling import PrismData, TilingParams, build_prism, prism_volume
from .volumes import DEFAULT_SPEC, QuadratureSpec, ball_volume


class LimitingConstraint(str, Enum):
    VERTEX_DISTANCE = "VertexDistance"
    HALF_HEIGHT = "HalfHeight"
    SCREW_IMAGE = "ScrewImage"


_ORDER = (LimitingConstraint.VERTEX_DISTANCE, LimitingConstraint.HALF_HEIGHT,
          LimitingConstraint.SCREW_IMAGE)


@dataclass(frozen=True)
class PackingResult:
    params: TilingParams
    rho_candidates: tuple
    rho_opt: float
    vol_ball: float
    vol_prism: float
    density: float
    limiting_constraint: LimitingConstraint
    diagnostics: dict = field(default_factory=dict, compare=False)

    def row(self):
        """Flat record for CSV/JSON output."""
        r1, r2, r3 = self.rho_candidates
        out = {
            "p": self.params.p, "q": self.params.q,
            "rho_opt": self.rho_opt, "vol_ball": self.vol_ball,
            "vol_prism": self.vol_prism, "density": self.density,
            "limiting_constraint": self.limiting_constraint.value,
            "rho_vertex": r1, "rho_half_height": r2, "rho_screw_image": r3,
        }
        out.update(self.diagnostics)
        return out

    @classmethod
    def from_row(cls, row):
        diag_keys = set(row) - {"p", "q", "rho_opt", "vol_ball", "vol_prism", "density",
                                "limiting_constraint", "rho_vertex", "rho_half_height",
                                "rho_screw_image"}
        return cls(
            params=TilingParams(int(row["p"]), int(row["q"])),
            rho_candidates=(row["rho_vertex"], row["rho_half_height"], row["rho_screw_image"]),
            rho_opt=row["rho_opt"], vol_ball=row["vol_ball"], vol_prism=row["vol_prism"],
            density=row["density"],
            limiting_constraint=LimitingConstraint(row["limiting_constraint"]),
            diagnostics={k: row[k] for k in sorted(diag_keys)},
        )


def rho_candidates(d: PrismData):
    """The three radius bounds and solver diagnostics.

    ``r1`` is the distance ``artanh(b)`` from ``O`` to ``A1``, ``r2`` is half
    the prism height and ``r3`` half the distance from ``O`` to its image
    under ``ab`` (which equals ``O b`` since ``a`` fixes ``O``).
    """
    r1 = math.atanh(d.b)
    r2 = d.Phi / 2
    image = ORIGIN @ d.gen_a @ d.gen_b
    res = distance_from_origin(image)
    diag = {
        "half_vertex_distance": 0.5 * r1,
        "screw_image_distance": res.d,
        "distance_residual": res.residual,
    }
    return (r1, r2, 0.5 * res.d), diag


def pack(params, spec: QuadratureSpec = DEFAULT_SPEC) -> PackingResult:
    pr = params if isinstance(params, TilingParams) else TilingParams(*params)
    d = build_prism(pr)
    cands, diag = rho_candidates(d)
    i = min(range(3), key=lambda k: cands[k])
    rho = cands[i]
    vb = ball_volume(rho, spec)
    vp = prism_volume(d, spec)
    return PackingResult(pr, tuple(float(c) for c in cands), float(rho), vb, vp, vb / vp,
                         _ORDER[i], diag)


# -- sweeps ------------------------------------------------------------------

@dataclass
class SweepTable:
    results: list
    skipped: list  # (p, q, reason) for parameter pairs outside the valid range
    errors: list  # (p, q, message) for cells whose computation failed

    @property
    def best(self) -> Optional[PackingResult]:
        if not self.results:
            return None
        return max(self.results, key=lambda r: (r.density, -r.params.p, -r.params.q))


def _cache_path(cache_dir, p, q, spec):
    key = spec.key().replace(":", "_")
    return Path(cache_dir) / f"pack_{p}_{q}_{key}.json"


def _atomic_write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cell(args):
    p, q, spec, cache_dir = args
    if cache_dir is not None:
        path = _cache_path(cache_dir, p, q, spec)
        if path.exists():
            return p, q, json.loads(path.read_text()), None
    try:
        row = pack(TilingParams(p, q), spec).row()
    except SL2RError as exc:
        return p, q, None, f"{type(exc).__name__}: {exc}"
    if cache_dir is not None:
        _atomic_write_text(path, json.dumps(row, sort_keys=True))
    return p, q, row, None


def sweep(p_range: Iterable[int], q_range: Iterable[int], spec: QuadratureSpec = DEFAULT_SPEC,
          jobs: int = 1, cache_dir=None) -> SweepTable:
    """Pack every valid ``(p, q)`` in the product of the ranges.

    Invalid pairs are listed in ``skipped``; cells that raise are listed in
    ``errors`` and the sweep carries on.  Results are sorted by ``(p, q)``
    and do not depend on ``jobs``.  With ``cache_dir`` each finished cell is
    stored as JSON keyed by ``(p, q, spec)`` and reused on the next run.
    """
    cells, skipped = [], []
    for p in p_range:
        for q in q_range:
            try:
                TilingParams(p, q)
            except InvalidParams as exc:
                skipped.append((p, q, str(exc)))
                continue
            cells.append((p, q, spec, cache_dir))

    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_cell, cells, chunksize=1))
    else:
        outs = [_cell(c) for c in cells]

    results, errors = [], []
    for p, q, row, err in outs:
        if err is not None:
            errors.append((p, q, err))
        else:
            results.append(PackingResult.from_row(row))
    results.sort(key=lambda r: (r.params.p, r.params.q))
    return SweepTable(results, skipped, sorted(errors))


SWEEP_COLUMNS = ("p", "q", "rho_opt", "vol_ball", "vol_prism", "density", "limiting_constraint",
                 "rho_vertex", "rho_half_height", "rho_screw_image", "half_vertex_distance",
                 "screw_image_distance", "distance_residual")
