"""Graphs with several singular halflines meeting at the origin.

A configuration is a list of bisector halflines ``L_i`` (angles ``theta_i``)
with profiles ``beta_i`` on ``[0, inf)``. The half-opening of wedge ``i`` is
``alpha_i0 = arccot(beta_i(0))``; the halfline ``R_i`` at angle
``theta_i + alpha_i0`` separates wedge ``i`` from wedge ``i + 1``. Inside
wedge ``i`` the graph is the single-line graph of ``beta_i`` extended by
its value at 0, rotated so that its axis lies along ``L_i``.

Wedges are numbered from 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .graph_line import LineGraphSurface
from .profiles import BetaProfile, Clamped, Constant, angle_from_beta, profile_from_json

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-10
_EDGE_EPS = 1e-12


def _wrap(a):
    """Wrap angles into ``(-pi, pi]``."""
    return np.pi - np.mod(np.pi - np.asarray(a, dtype=float), TWO_PI)


@dataclass(frozen=True, eq=False)
class WedgeConfig:
    bisectors: tuple[float, ...]
    profiles: tuple[BetaProfile, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "bisectors", tuple(float(b) for b in self.bisectors))
        object.__setattr__(self, "profiles", tuple(self.profiles))
        if len(self.bisectors) != len(self.profiles):
            raise ValueError("need one profile per bisector")

    @property
    def k(self) -> int:
        return len(self.bisectors)

    @property
    def half_angles(self) -> np.ndarray:
        return np.array([angle_from_beta(p.eval(0.0)) for p in self.profiles])

    @property
    def boundary_angles(self) -> np.ndarray:
        """Angles of ``R_0, ..., R_{k-1}``."""
        return np.asarray(self.bisectors) + self.half_angles

    @classmethod
    def from_half_angles(cls, half_angles: Sequence[float], first_bisector: float = 0.0,
                         profiles: Sequence[BetaProfile] | None = None) -> "WedgeConfig":
        """Constant-angle configuration; bisectors follow from the half-openings."""
        th = [float(first_bisector)]
        for a, b in zip(half_angles, half_angles[1:]):
            th.append(th[-1] + a + b)
        if profiles is None:
            profiles = [Constant(math.cos(a) / math.sin(a)) for a in half_angles]
        return cls(tuple(th), tuple(profiles))

    @classmethod
    def symmetric(cls, k: int, first_bisector: float = 0.0) -> "WedgeConfig":
        return cls.from_half_angles([math.pi / k] * k, first_bisector)

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "WedgeConfig":
        if not isinstance(obj, dict):
            raise ValueError("wedge config must be a JSON object")
        bis = obj.get("bisectors")
        profs = obj.get("profiles")
        if not isinstance(bis, list) or not all(isinstance(b, (int, float)) for b in bis):
            raise ValueError("config.bisectors: expected a list of angles")
        if not isinstance(profs, list) or len(profs) != len(bis):
            raise ValueError("config.profiles: expected one profile per bisector")
        parsed = []
        for i, p in enumerate(profs):
            try:
                parsed.append(profile_from_json(p))
            except ValueError as exc:
                raise ValueError(f"config.profiles[{i}]: {exc}") from None
        return cls(tuple(bis), tuple(parsed))

    def to_json(self) -> dict[str, Any]:
        return {"bisectors": list(self.bisectors), "profiles": [p.to_json() for p in self.profiles]}


def validate_config(c: WedgeConfig) -> tuple[bool, str | None]:
    """Check the wedge invariants; returns ``(ok, first violated constraint)``."""
    if c.k < 2:
        return False, "k must be >= 2"
    for i, p in enumerate(c.profiles):
        b0 = float(p.eval(0.0))
        if not math.isfinite(b0):
            return False, f"profile {i}: non-finite value at 0"
        if not p.certificate:
            return False, f"profile {i}: beta not non-decreasing (alpha not non-increasing)"
    alphas = c.half_angles
    total = float(np.sum(alphas))
    if abs(total - math.pi) > ANGLE_TOL:
        return False, f"half-openings sum to {total!r}, not pi"
    th = c.bisectors
    for i in range(c.k):
        j = (i + 1) % c.k
        gap = float(np.mod(th[j] - th[i], TWO_PI))
        want = float(alphas[i] + alphas[j])
        if abs(gap - want) > ANGLE_TOL and abs(gap + TWO_PI - want) > ANGLE_TOL:
            return False, (
                f"bisectors {i} and {j} are {gap!r} apart; "
                f"half-openings require {want!r}"
            )
    return True, None


def _wedge_index(c: WedgeConfig, x, y) -> np.ndarray:
    phi = np.arctan2(y, x)
    alphas = c.half_angles
    idx = np.full(np.shape(phi), -1, dtype=int)
    for i in range(c.k):
        d = _wrap(phi - c.bisectors[i])
        # half-open (R_{i-1}, R_i]: a point on R_i belongs to wedge i
        inside = (d > -alphas[i] + _EDGE_EPS) & (d <= alphas[i] + _EDGE_EPS) & (idx < 0)
        idx = np.where(inside, i, idx)
    return idx


def locate_wedge(c: WedgeConfig, x: float, y: float) -> int:
    if x == 0.0 and y == 0.0:
        raise ValueError("the origin lies in every wedge")
    return int(_wedge_index(c, x, y))


def _extend(p: BetaProfile) -> BetaProfile:
    """Hold ``p`` at ``p(0)`` on the negative axis; constants already are, and keep their exact foot."""
    return p if isinstance(p, Constant) else Clamped(p, 0.0)


def _rotate(x, y, theta):
    ct, st = np.cos(theta), np.sin(theta)
    return ct * x - st * y, st * x + ct * y


def _halfline_distance(x, y, theta):
    lx, ly = _rotate(np.asarray(x, dtype=float), np.asarray(y, dtype=float), -theta)
    return np.where(lx >= 0.0, np.abs(ly), np.hypot(lx, ly))


@dataclass(frozen=True, eq=False)
class MultiWedgeSurface:
    config: WedgeConfig
    pieces: tuple[LineGraphSurface, ...] = field(init=False)

    def __post_init__(self) -> None:
        ok, why = validate_config(self.config)
        if not ok:
            raise ValueError(f"invalid wedge configuration: {why}")
        object.__setattr__(
            self,
            "pieces",
            tuple(LineGraphSurface(_extend(p)) for p in self.config.profiles),
        )

    @property
    def exact_gradient(self) -> bool:
        return all(p.exact_gradient for p in self.pieces)

    def locate(self, x, y) -> np.ndarray:
        return _wedge_index(self.config, x, y)

    def _local(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        idx = self.locate(x, y)
        theta = np.asarray(self.config.bisectors)[np.maximum(idx, 0)]
        lx, ly = _rotate(x, y, -theta)
        return x, y, idx, theta, lx, ly

    def height_in_wedge(self, i: int, x, y):
        """Height of wedge ``i``'s graph at ``(x, y)``, whether or not it lies in wedge ``i``."""
        lx, ly = _rotate(np.asarray(x, dtype=float), np.asarray(y, dtype=float),
                         -self.config.bisectors[i])
        return self.pieces[i].height(lx, ly)

    def height(self, x, y):
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        x, y, idx, _, lx, ly = self._local(x, y)
        u = np.zeros(x.shape)
        for i, piece in enumerate(self.pieces):
            m = idx == i
            if m.any():
                u[m] = piece.height(lx[m], ly[m])
        u = np.where((x == 0.0) & (y == 0.0), 0.0, u)
        return float(u) if scalar else u

    def gradient(self, x, y):
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        x, y, idx, theta, lx, ly = self._local(x, y)
        gx, gy = np.zeros(x.shape), np.zeros(x.shape)
        for i, piece in enumerate(self.pieces):
            m = idx == i
            if m.any():
                gx[m], gy[m] = piece.gradient(lx[m], ly[m])
        gx, gy = _rotate(gx, gy, theta)
        origin = (x == 0.0) & (y == 0.0)
        gx, gy = np.where(origin, 0.0, gx), np.where(origin, 0.0, gy)
        if scalar:
            return float(gx), float(gy)
        return gx, gy

    def singular_distance(self, x, y):
        """Planar distance to the union of the bisector halflines."""
        return np.min([_halfline_distance(x, y, th) for th in self.config.bisectors], axis=0)

    def horizontal_normal(self, x, y, side: int | None = None):
        """Per-wedge horizontal normal rotated back to the global frame.

        ``side`` picks the one-sided limit on a bisector, in the wedge's own
        orientation.
        """
        x, y, idx, theta, lx, ly = self._local(x, y)
        a, b = np.zeros(x.shape), np.zeros(x.shape)
        for i, piece in enumerate(self.pieces):
            m = idx == i
            if m.any():
                a[m], b[m] = piece.horizontal_normal(lx[m], ly[m], side)
        return _rotate(a, b, theta)


def make_cone(c: WedgeConfig) -> MultiWedgeSurface:
    if not all(isinstance(p, Constant) for p in c.profiles):
        raise ValueError("a cone needs constant angle profiles")
    return MultiWedgeSurface(c)


@dataclass(frozen=True, eq=False)
class SingularHalflineSurface:
    """One singular halfline ``L`` from the origin, patched with the plane ``t = 0``.

    Inside the wedge bounded by the two halflines leaving the origin at
    angles ``+-alpha(0)`` from ``L`` the graph is the single-line graph of
    ``beta`` (held at ``beta(0)`` behind the origin); outside it is ``t = 0``.
    """

    profile: BetaProfile
    direction: float = 0.0
    piece: LineGraphSurface = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "piece", LineGraphSurface(_extend(self.profile)))

    @property
    def exact_gradient(self) -> bool:
        return self.piece.exact_gradient

    @property
    def half_angle(self) -> float:
        return angle_from_beta(self.profile.eval(0.0))

    def _local(self, x, y):
        x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
        lx, ly = _rotate(x, y, -self.direction)
        inside = lx >= float(self.profile.eval(0.0)) * np.abs(ly)
        return x, y, lx, ly, inside

    def height(self, x, y):
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        x, y, lx, ly, inside = self._local(x, y)
        u = np.zeros(x.shape)
        if inside.any():
            u[inside] = self.piece.height(lx[inside], ly[inside])
        return float(u) if scalar else u

    def gradient(self, x, y):
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        x, y, lx, ly, inside = self._local(x, y)
        gx, gy = np.zeros(x.shape), np.zeros(x.shape)
        if inside.any():
            gx[inside], gy[inside] = self.piece.gradient(lx[inside], ly[inside])
        gx, gy = _rotate(gx, gy, self.direction)
        if scalar:
            return float(gx), float(gy)
        return gx, gy

    def singular_distance(self, x, y):
        return _halfline_distance(x, y, self.direction)

    def horizontal_normal(self, x, y, side: int | None = None):
        """``normalize(y - u_x, -x - u_y)``; on the plane part this is ``(y, -x) / r``."""
        ux, uy = self.gradient(x, y)
        p = np.asarray(y, dtype=float) - ux
        q = -np.asarray(x, dtype=float) - uy
        r = np.hypot(p, q)
        return p / r, q / r
