"""Triangulated height fields with per-vertex channels, and OBJ/CSV I/O."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .area import Domain, mesh_horizontal_area
from .heisenberg import Point

DEGENERATE_AREA = 1e-14
SINGULAR_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    triangles: np.ndarray
    channels: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "triangles", t)
        if t.size and (t.min() < 0 or t.max() >= len(v)):
            raise ValueError("triangle index out of range")
        if t.size and np.min(self.triangle_areas()) <= DEGENERATE_AREA:
            raise ValueError("degenerate triangle")
        for name, ch in self.channels.items():
            if len(ch) != len(v):
                raise ValueError(f"channel {name!r} has {len(ch)} values for {len(v)} vertices")

    def points(self) -> list[Point]:
        return [Point(*row) for row in self.vertices.tolist()]

    def triangle_areas(self) -> np.ndarray:
        a, b, c = (self.vertices[self.triangles[:, i]] for i in range(3))
        return 0.5 * np.linalg.norm(np.cross(b - a, c - a), axis=1)

    def horizontal_area(self) -> float:
        return mesh_horizontal_area(self.vertices, self.triangles)


def _singular_indicator(px: np.ndarray, py: np.ndarray, tol: float) -> np.ndarray:
    """1 at vertices where ``(u_x - y, u_y + x)`` vanishes or flips against a grid neighbour."""
    flag = np.hypot(px, py) < tol
    # the field reverses across a singular curve that passes between two vertices
    flip_x = px[:, :-1] * px[:, 1:] + py[:, :-1] * py[:, 1:] < 0
    flip_y = px[:-1, :] * px[1:, :] + py[:-1, :] * py[1:, :] < 0
    flag[:, :-1] |= flip_x
    flag[:, 1:] |= flip_x
    flag[:-1, :] |= flip_y
    flag[1:, :] |= flip_y
    return flag.astype(float)


def graph_mesh(surface, domain: Domain, n: int, singular_tol: float = SINGULAR_TOL) -> Mesh:
    """``(n + 1)^2`` lifted grid vertices over the domain's bounding box, two triangles per cell."""
    if n < 2:
        raise ValueError("n must be >= 2")
    x0, x1, y0, y1 = domain.bounds
    X, Y = np.meshgrid(np.linspace(x0, x1, n + 1), np.linspace(y0, y1, n + 1), indexing="xy")
    U = np.asarray(surface.height(X, Y), dtype=float)
    ux, uy = surface.gradient(X, Y)
    px, py = np.asarray(ux) - Y, np.asarray(uy) + X
    verts = np.column_stack([X.ravel(), Y.ravel(), U.ravel()])
    idx = np.arange((n + 1) ** 2).reshape(n + 1, n + 1)
    a, b = idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()
    c, d = idx[1:, :-1].ravel(), idx[1:, 1:].ravel()
    tris = np.concatenate([np.column_stack([a, b, d]), np.column_stack([a, d, c])])
    channels = {
        "nh": np.hypot(px, py).ravel(),
        "singular": _singular_indicator(px, py, singular_tol).ravel(),
    }
    return Mesh(verts, tris, channels)


def write_obj(mesh: Mesh, path: str | Path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for x, y, t in mesh.vertices.tolist():
            fh.write(f"v {x!r} {y!r} {t!r}\n")
        for i, j, k in (mesh.triangles + 1).tolist():
            fh.write(f"f {i} {j} {k}\n")


def read_obj(path: str | Path) -> Mesh:
    """Read ``v`` and ``f`` records; face entries may carry ``/vt/vn`` suffixes."""
    verts, tris = [], []
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            parts = line.split()
            if not parts or parts[0].startswith("#"):
                continue
            if parts[0] == "v":
                verts.append([float(p) for p in parts[1:4]])
            elif parts[0] == "f":
                ids = [int(p.split("/")[0]) - 1 for p in parts[1:]]
                if len(ids) < 3:
                    raise ValueError(f"{path}:{lineno}: face with fewer than 3 vertices")
                tris.extend([ids[0], ids[i], ids[i + 1]] for i in range(1, len(ids) - 1))
    return Mesh(np.array(verts), np.array(tris, dtype=np.int64))


def write_channels_csv(mesh: Mesh, path: str | Path) -> None:
    names = sorted(mesh.channels)
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "t", *names])
        cols = [mesh.channels[k] for k in names]
        for i, (x, y, t) in enumerate(mesh.vertices.tolist()):
            w.writerow([repr(x), repr(y), repr(t), *(repr(float(c[i])) for c in cols)])
