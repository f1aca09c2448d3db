"""Group structure of the first Heisenberg group in exponential coordinates.

Points are ``(x, y, t)`` with the product

    [z, t] * [z', t'] = [z + z', t + t' + Im(z conj(z'))],   z = x + iy.

The left-invariant frame is ``X = d/dx + y d/dt``, ``Y = d/dy - x d/dt``,
``T = d/dt``, declared orthonormal. Horizontal vectors are stored by their
``(X, Y)`` coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Point:
    x: float
    y: float
    t: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.t)):
            raise ValueError(f"non-finite point {self!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.t)


@dataclass(frozen=True)
class HorizontalVec:
    """Coefficients ``a X + b Y`` of a horizontal vector."""

    a: float
    b: float

    @property
    def norm(self) -> float:
        return math.hypot(self.a, self.b)

    def is_unit(self, tol: float = 1e-12) -> bool:
        return abs(self.a * self.a + self.b * self.b - 1.0) <= tol


@dataclass(frozen=True)
class AmbientVec:
    """Coordinate vector ``dx d/dx + dy d/dy + dt d/dt``."""

    dx: float
    dy: float
    dt: float


ORIGIN = Point(0.0, 0.0, 0.0)


def group_mul(p: Point, q: Point) -> Point:
    # Im((x + iy)(x' - iy')) = y x' - x y'
    return Point(p.x + q.x, p.y + q.y, p.t + q.t + p.y * q.x - p.x * q.y)


def group_inv(p: Point) -> Point:
    return Point(-p.x, -p.y, -p.t)


def frame_at(p: Point) -> tuple[AmbientVec, AmbientVec, AmbientVec]:
    """Return ``(X_p, Y_p, T_p)`` in coordinates."""
    return (
        AmbientVec(1.0, 0.0, p.y),
        AmbientVec(0.0, 1.0, -p.x),
        AmbientVec(0.0, 0.0, 1.0),
    )


def contact_pairing(p: Point, v: AmbientVec) -> float:
    """Evaluate ``omega = -y dx + x dy + dt`` at ``p`` on ``v``."""
    return -p.y * v.dx + p.x * v.dy + v.dt


def horizontal_to_ambient(p: Point, h: HorizontalVec) -> AmbientVec:
    return AmbientVec(h.a, h.b, h.a * p.y - h.b * p.x)


def j_rotate(h: HorizontalVec) -> HorizontalVec:
    """Quarter turn in the horizontal plane with ``J(X) = Y`` and ``J(Y) = -X``."""
    return HorizontalVec(-h.b, h.a)


def dilate(center: Point, s: float, q: Point) -> Point:
    """Dilation of ratio ``e**s`` centred at ``center``."""
    local = group_mul(group_inv(center), q)
    es = math.exp(s)
    scaled = Point(es * local.x, es * local.y, es * es * local.t)
    return group_mul(center, scaled)


def rotate_z(theta: float, q: Point) -> Point:
    c, s = math.cos(theta), math.sin(theta)
    return Point(c * q.x - s * q.y, s * q.x + c * q.y, q.t)


def horizontal_lift_line(v: float, alpha: float, w: float) -> Point:
    """Point at signed parameter ``w`` on the horizontal halfline leaving ``(v, 0, 0)``.

    For ``w >= 0`` the planar direction is ``(cos alpha, sin alpha)``, for
    ``w <= 0`` it is the mirror ``(cos alpha, -sin alpha)`` and ``|w|`` is the
    arclength.
    """
    if not 0.0 < alpha < math.pi:
        raise ValueError(f"angle {alpha} outside (0, pi)")
    ca, sa = math.cos(alpha), math.sin(alpha)
    aw = abs(w)
    if w >= 0:
        return Point(v + aw * ca, aw * sa, -v * aw * sa)
    return Point(v + aw * ca, -aw * sa, v * aw * sa)


def _geodesic_rhs(state: np.ndarray, lam: float) -> np.ndarray:
    x, y, _, phi = state
    c, s = math.cos(phi), math.sin(phi)
    return np.array([c, s, y * c - x * s, -2.0 * lam])


def geodesic_trace(
    p0: Point, h0: HorizontalVec, lam: float, length: float, steps: int
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate the geodesic equation with classical RK4.

    Writing the velocity as ``cos(phi) X + sin(phi) Y``, the frame identities
    ``D_X Y = -T``, ``D_Y X = T`` and ``D_X X = D_Y Y = 0`` give
    ``D_v v = phi' J(v)``, so ``D_v v + 2 lam J(v) = 0`` becomes ``phi' = -2 lam``.
    The position follows ``(x', y', t') = (cos phi, sin phi, y cos phi - x sin phi)``.

    Returns ``(points, phis)``: an ``(steps + 1, 3)`` array of coordinates and
    the tangent angle at each point.
    """
    if not h0.is_unit():
        raise ValueError("initial velocity must be a unit horizontal vector")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    state = np.array([p0.x, p0.y, p0.t, math.atan2(h0.b, h0.a)])
    out = np.empty((steps + 1, 4))
    out[0] = state
    if length == 0.0:
        return out[:1, :3].copy(), out[:1, 3].copy()
    ds = length / steps
    for k in range(steps):
        k1 = _geodesic_rhs(state, lam)
        k2 = _geodesic_rhs(state + 0.5 * ds * k1, lam)
        k3 = _geodesic_rhs(state + 0.5 * ds * k2, lam)
        k4 = _geodesic_rhs(state + ds * k3, lam)
        state = state + (ds / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = state
    return out[:, :3], out[:, 3]


def geodesic_integrate(
    p0: Point, h0: HorizontalVec, lam: float, length: float, steps: int
) -> list[Point]:
    pts, _ = geodesic_trace(p0, h0, lam, length, steps)
    return [Point(*row) for row in pts]


def geodesic_velocity(points: np.ndarray, phis: np.ndarray) -> np.ndarray:
    """Coordinate velocity ``cos(phi) X + sin(phi) Y`` along a trace, shape ``(m, 3)``."""
    c, s = np.cos(phis), np.sin(phis)
    x, y = points[:, 0], points[:, 1]
    return np.column_stack([c, s, y * c - x * s])


def geodesic_closed_form(p0: Point, phi0: float, lam: float, s: np.ndarray) -> np.ndarray:
    """Exact solution for ``lam != 0``: a circle of radius ``1/(2|lam|)`` in the plane."""
    if lam == 0.0:
        raise ValueError("closed form needs lam != 0")
    s = np.asarray(s, dtype=float)
    phi = phi0 - 2.0 * lam * s
    k = 2.0 * lam
    x = p0.x + (math.sin(phi0) - np.sin(phi)) / k
    y = p0.y + (np.cos(phi) - math.cos(phi0)) / k
    t = (
        p0.t
        + (p0.y * (math.sin(phi0) - np.sin(phi)) - p0.x * (np.cos(phi) - math.cos(phi0))) / k
        + s / k
        - np.sin(k * s) / (k * k)
    )
    return np.column_stack([x, y, t])
