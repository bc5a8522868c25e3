import numpy as np
import pytest

from sl2r.errors import RadiusOutOfRange
from sl2r.geodesics import distance_from_origin
from sl2r.mesh import obj_text, read_obj, sphere_mesh
from sl2r.model import from_euclidean


def test_coarse_mesh_structure():
    m = sphere_mesh(0.5, 4)
    assert m.faces.shape == (32, 3)
    assert m.vertices.shape == (18, 3)
    assert m.is_watertight()


def test_outward_orientation():
    v = sphere_mesh(0.8, 12).vertices
    f = sphere_mesh(0.8, 12).faces
    tri = v[f]
    signed = np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])).sum() / 6
    assert signed > 0


def test_small_sphere_is_round():
    norms = np.linalg.norm(sphere_mesh(0.1, 24).vertices, axis=1)
    assert norms.max() / norms.min() < 1.05


def test_vertices_at_radius():
    m = sphere_mesh(1.3, 16)
    rng = np.random.default_rng(1)
    for i in rng.choice(len(m.vertices), 20, replace=False):
        assert distance_from_origin(from_euclidean(m.vertices[i])).d == pytest.approx(1.3, abs=1e-6)


def test_obj_roundtrip(tmp_path):
    m = sphere_mesh(0.6, 6)
    path = tmp_path / "s.obj"
    path.write_text(obj_text(m, "test"))
    back = read_obj(path)
    assert np.allclose(back.vertices, m.vertices, atol=1e-11)
    assert np.array_equal(back.faces, m.faces)


def test_bad_arguments():
    with pytest.raises(RadiusOutOfRange):
        sphere_mesh(2.0, 8)
    with pytest.raises(ValueError):
        sphere_mesh(0.5, 2)
