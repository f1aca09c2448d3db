from __future__ import annotations

import csv

import numpy as np
import pytest

from mingraph.area import Rectangle
from mingraph.graph_line import LineGraphSurface
from mingraph.mesh import Mesh, graph_mesh, read_obj, write_channels_csv, write_obj
from mingraph.profiles import Constant, Linear, piecewise_example


def test_counts_on_unit_square():
    m = graph_mesh(LineGraphSurface(Constant(0.0)), Rectangle(0, 1, 0, 1), 2)
    assert len(m.vertices) == 9 and len(m.triangles) == 8
    with pytest.raises(ValueError):
        graph_mesh(LineGraphSurface(Constant(0.0)), Rectangle(0, 1, 0, 1), 1)


def test_vertex_heights():
    m = graph_mesh(LineGraphSurface(Constant(0.0)), Rectangle(0, 1, 0, 1), 2)
    i = int(np.flatnonzero((m.vertices[:, 0] == 1.0) & (m.vertices[:, 1] == 1.0))[0])
    assert m.vertices[i, 2] == -1.0
    assert m.points()[i].t == -1.0


def test_singular_channel_marks_the_axis():
    m = graph_mesh(LineGraphSurface(piecewise_example()), Rectangle(-2, 2, -2, 2), 40)
    y = m.vertices[:, 1]
    flag = m.channels["singular"]
    cell = 4 / 40
    assert np.all(flag[np.abs(y) < 1e-12] == 1.0)
    assert np.all(flag[np.abs(y) > cell + 1e-12] == 0.0)
    assert np.all(m.channels["nh"] >= 0)


def test_singular_channel_between_vertices():
    # an odd grid puts the axis between two vertex rows; the flip test still finds it
    m = graph_mesh(LineGraphSurface(Linear(1.0)), Rectangle(-1, 1, -1, 1), 9)
    y = m.vertices[:, 1]
    hit = m.channels["singular"] == 1.0
    assert hit.any() and np.all(np.abs(y[hit]) <= 2 / 9)


def test_mesh_validation():
    v = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [2, 0, 0]], dtype=float)
    Mesh(v, np.array([[0, 1, 2]]))
    with pytest.raises(ValueError, match="out of range"):
        Mesh(v, np.array([[0, 1, 7]]))
    with pytest.raises(ValueError, match="degenerate"):
        Mesh(v, np.array([[0, 1, 3]]))
    with pytest.raises(ValueError, match="channel"):
        Mesh(v, np.array([[0, 1, 2]]), {"nh": np.zeros(3)})


def test_obj_round_trip_preserves_area(tmp_path):
    m = graph_mesh(LineGraphSurface(piecewise_example()), Rectangle(-2, 2, -1, 1), 30)
    path = tmp_path / "g.obj"
    write_obj(m, path)
    again = read_obj(path)
    assert np.array_equal(again.vertices, m.vertices)
    assert np.array_equal(again.triangles, m.triangles)
    assert abs(again.horizontal_area() - m.horizontal_area()) <= 1e-12


def test_read_obj_accepts_suffixes_and_polygons(tmp_path):
    path = tmp_path / "q.obj"
    path.write_text("# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvt 0 0\nf 1/1 2/1 3/1 4/1\n")
    m = read_obj(path)
    assert m.triangles.tolist() == [[0, 1, 2], [0, 2, 3]]
    path.write_text("v 0 0 0\nv 1 0 0\nf 1 2\n")
    with pytest.raises(ValueError, match=":3:"):
        read_obj(path)


def test_channels_csv(tmp_path):
    m = graph_mesh(LineGraphSurface(Constant(1.0)), Rectangle(0, 1, -1, 1), 4)
    path = tmp_path / "c.csv"
    write_channels_csv(m, path)
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["x", "y", "t", "nh", "singular"]
    assert len(rows) == 1 + len(m.vertices)
    assert [float(v) for v in rows[1][:3]] == m.vertices[0].tolist()
