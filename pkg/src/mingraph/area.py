"""Horizontal area of t-graphs and the divergence of the horizontal normal.

For a graph ``t = u(x, y)`` the horizontal part of the unit normal, times
the Riemannian area element, integrates to

    A(u; D) = int_D |(u_x - y, u_y + x)| dx dy.

:func:`mesh_horizontal_area` evaluates the same quantity from a
triangulation without using the graph formula, so the two can be checked
against each other.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

FD_STEP = 1e-6


class Surface(Protocol):
    def height(self, x, y): ...

    def gradient(self, x, y): ...


class FlatSurface:
    """The plane ``t = 0``; its only singular point is the origin."""

    def height(self, x, y):
        if np.ndim(x) == 0 and np.ndim(y) == 0:
            return 0.0
        return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)

    def gradient(self, x, y):
        return self.height(x, y), self.height(x, y)

    def singular_distance(self, x, y):
        return np.hypot(x, y)

    def horizontal_normal(self, x, y, side: int | None = None):
        r = np.hypot(x, y)
        return np.asarray(y) / r, -np.asarray(x) / r


@dataclass(frozen=True)
class Rectangle:
    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self) -> None:
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError(f"empty rectangle {self!r}")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        return (self.x0, self.x1, self.y0, self.y1)

    def contains(self, x, y):
        return (x >= self.x0) & (x <= self.x1) & (y >= self.y0) & (y <= self.y1)


@dataclass(frozen=True)
class Disk:
    """Closed disk, integrated as an indicator inside its bounding square."""

    radius: float
    cx: float = 0.0
    cy: float = 0.0

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        r = self.radius
        return (self.cx - r, self.cx + r, self.cy - r, self.cy + r)

    def contains(self, x, y):
        return (x - self.cx) ** 2 + (y - self.cy) ** 2 <= self.radius**2


Domain = Rectangle | Disk


def parse_domain(text: str) -> Domain:
    """``"x0,x1,y0,y1"`` or ``"disk:r"`` or ``"disk:r,cx,cy"``."""
    if text.startswith("disk:"):
        vals = [float(v) for v in text[5:].split(",")]
        if len(vals) not in (1, 3):
            raise ValueError(f"bad disk domain {text!r}")
        return Disk(*vals)
    vals = [float(v) for v in text.replace(" ", ",").split(",") if v]
    if len(vals) != 4:
        raise ValueError(f"rectangle domain needs four numbers, got {text!r}")
    return Rectangle(*vals)


@dataclass(frozen=True)
class AreaReport:
    value: float
    cells: int
    error: float

    def to_json(self) -> dict:
        return {"value": self.value, "cells": self.cells, "error": self.error}


def cell_centers(domain: Domain, n: int):
    """Midpoints of an ``n x n`` grid over the domain's bounding box and the cell area."""
    x0, x1, y0, y1 = domain.bounds
    hx, hy = (x1 - x0) / n, (y1 - y0) / n
    xs = x0 + hx * (np.arange(n) + 0.5)
    ys = y0 + hy * (np.arange(n) + 0.5)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    return X, Y, hx * hy


def _fd_gradient(height_fn: Callable, x, y, h: float = FD_STEP):
    ux = (np.asarray(height_fn(x + h, y)) - np.asarray(height_fn(x - h, y))) / (2 * h)
    uy = (np.asarray(height_fn(x, y + h)) - np.asarray(height_fn(x, y - h))) / (2 * h)
    return ux, uy


def graph_gradient(surface, x, y):
    """Gradient of ``surface`` (an object with ``height``/``gradient`` or a bare callable)."""
    if hasattr(surface, "gradient"):
        return surface.gradient(x, y)
    return _fd_gradient(surface, x, y)


def area_integrand(surface, x, y):
    ux, uy = graph_gradient(surface, x, y)
    return np.hypot(np.asarray(ux) - y, np.asarray(uy) + x)


def _row_sums(surface, domain: Domain, n: int, workers: int) -> np.ndarray:
    X, Y, _ = cell_centers(domain, n)
    mask = domain.contains(X, Y) if isinstance(domain, Disk) else None

    def block(rows: slice) -> np.ndarray:
        vals = np.asarray(area_integrand(surface, X[rows], Y[rows]), dtype=float)
        if mask is not None:
            vals = np.where(mask[rows], vals, 0.0)
        if not np.all(np.isfinite(vals)):
            raise FloatingPointError("non-finite area integrand sample")
        return np.sum(vals, axis=1)

    if workers <= 1:
        return block(slice(None))
    step = max(1, -(-n // workers))
    chunks = [slice(i, min(n, i + step)) for i in range(0, n, step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(block, chunks)))


def grid_total(values: np.ndarray, cell: float) -> float:
    """``cell * sum(values)`` summed row by row, then exactly across rows."""
    if not np.all(np.isfinite(values)):
        raise FloatingPointError("non-finite area integrand sample")
    return math.fsum(np.sum(values, axis=1).tolist()) * cell


def _midpoint(surface, domain: Domain, n: int, workers: int) -> float:
    x0, x1, y0, y1 = domain.bounds
    cell = (x1 - x0) * (y1 - y0) / (n * n)
    # row totals are identical however rows are blocked; fsum makes the total exact
    return math.fsum(_row_sums(surface, domain, n, workers).tolist()) * cell


def horizontal_area(surface, domain: Domain, n: int, workers: int = 1) -> AreaReport:
    """Midpoint rule on an ``n x n`` grid; the error is ``|A_n - A_{n/2}|``."""
    if n < 4:
        raise ValueError("n must be >= 4")
    fine = _midpoint(surface, domain, n, workers)
    coarse = _midpoint(surface, domain, n // 2, workers)
    return AreaReport(fine, n * n, abs(fine - coarse))


def mesh_horizontal_area(vertices: np.ndarray, triangles: np.ndarray) -> float:
    """Horizontal area of a triangulated surface.

    Each edge is expressed in the frame ``{X, Y, T}`` at the triangle's
    centroid; the frame is orthonormal, so the cross product of two edge
    vectors has length twice the Riemannian area and its ``(X, Y)`` part
    is that area times the horizontal normal.
    """
    v = np.asarray(vertices, dtype=float)
    tri = np.asarray(triangles, dtype=int)
    a, b, c = v[tri[:, 0]], v[tri[:, 1]], v[tri[:, 2]]
    cen = (a + b + c) / 3.0

    def to_frame(e):
        # dt = e_X * y - e_Y * x + e_T along the frame at the centroid
        return np.column_stack([e[:, 0], e[:, 1], e[:, 2] - cen[:, 1] * e[:, 0] + cen[:, 0] * e[:, 1]])

    n = np.cross(to_frame(b - a), to_frame(c - a))
    return 0.5 * math.fsum(np.hypot(n[:, 0], n[:, 1]).tolist())


def horizontal_normal_field(surface, x, y, side: int | None = None):
    """Horizontal normal ``(f, g)`` as arrays, whichever surface type is given."""
    nu = surface.horizontal_normal(x, y, side)
    if hasattr(nu, "a"):
        return np.asarray(nu.a), np.asarray(nu.b)
    return np.asarray(nu[0]), np.asarray(nu[1])


def divergence_check(surface, p: tuple[float, float], h: float, side: int | None = None) -> float:
    """Divergence of the vertically invariant field ``U = f X + g Y`` with ``nu_H = (f, g)``.

    The frame is orthonormal and left-invariant fields on a unimodular
    group are divergence free, so ``div(f X + g Y) = X(f) + Y(g)``. When ``f`` and
    ``g`` do not depend on ``t`` this is ``f_x + g_y``, evaluated here by
    central differences with step ``h``.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    x, y = float(p[0]), float(p[1])
    dist = float(surface.singular_distance(x, y))
    if dist <= 2.0 * h:
        raise ValueError(f"point {p} is within 2h of the singular set")
    xs = np.array([x + h, x - h, x, x])
    ys = np.array([y, y, y + h, y - h])
    f, g = horizontal_normal_field(surface, xs, ys, side)
    return float((f[0] - f[1]) / (2 * h) + (g[2] - g[3]) / (2 * h))
