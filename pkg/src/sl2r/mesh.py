"""Triangle meshes of geodesic spheres and OBJ export."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geodesics import GeodesicParams, geodesic_point
from .volumes import _check_rho


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    vertices: np.ndarray  # (n, 3) Euclidean-model coordinates
    faces: np.ndarray  # (m, 3) zero-based vertex indices, outward orientation

    def edge_counts(self):
        e = np.sort(np.concatenate([self.faces[:, [0, 1]], self.faces[:, [1, 2]],
                                    self.faces[:, [2, 0]]]), axis=1)
        _, counts = np.unique(e, axis=0, return_counts=True)
        return counts

    def is_watertight(self):
        """Every edge is shared by exactly two triangles."""
        return bool(np.all(self.edge_counts() == 2))


def sphere_mesh(rho: float, res: int = 32) -> TriangleMesh:
    """Geodesic sphere of radius ``rho`` around the origin.

    ``res`` meridians (longitude ``lam``) cross ``res`` rings of constant
    altitude ``alpha``; the two fibre directions ``alpha = +-pi/2`` are the
    poles.  The mesh has ``res^2 + 2`` vertices and ``2 res^2`` triangles.
    """
    _check_rho(rho)
    if rho == 0.0:
        raise ValueError("a sphere of radius 0 has no surface")
    if res < 3:
        raise ValueError("res must be >= 3")
    lam = 2 * math.pi * np.arange(res) / res
    alpha = -math.pi / 2 + math.pi * np.arange(1, res + 1) / (res + 1)
    A, L = np.meshgrid(alpha, lam, indexing="ij")  # ring-major
    s = np.full(A.shape, rho)
    ring = np.stack(geodesic_point(GeodesicParams(s, L, A)), axis=-1).reshape(-1, 3)
    south = np.array(geodesic_point(GeodesicParams(rho, 0.0, -math.pi / 2)))
    north = np.array(geodesic_point(GeodesicParams(rho, 0.0, math.pi / 2)))
    verts = np.vstack([ring, south, north])
    i_s, i_n = res * res, res * res + 1

    def v(i, j):
        return i * res + j % res

    faces = []
    for j in range(res):
        faces.append((i_s, v(0, j + 1), v(0, j)))
        faces.append((i_n, v(res - 1, j), v(res - 1, j + 1)))
    for i in range(res - 1):
        for j in range(res):
            faces.append((v(i, j), v(i, j + 1), v(i + 1, j + 1)))
            faces.append((v(i, j), v(i + 1, j + 1), v(i + 1, j)))
    mesh = TriangleMesh(verts, np.array(faces, dtype=np.int64))
    if not np.all(np.isfinite(mesh.vertices)):
        raise ValueError("sphere mesh has non-finite vertices")
    return mesh


def obj_text(mesh: TriangleMesh, comment: str = "") -> str:
    lines = [f"# {line}" for line in comment.splitlines()]
    lines += [f"v {x:.12g} {y:.12g} {z:.12g}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    return "\n".join(lines) + "\n"


def read_obj(path) -> TriangleMesh:
    verts, faces = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            faces.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
    return TriangleMesh(np.array(verts), np.array(faces, dtype=np.int64))
