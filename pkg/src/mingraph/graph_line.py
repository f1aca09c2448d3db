"""Entire t-graphs with one singular line built from a monotone profile.

Over each ``Gamma(v) = (v, 0, 0)`` two horizontal halflines leave with
angles ``+alpha(v)`` and ``-alpha(v)``, ``beta = cot(alpha)`` non-decreasing.
Their union is the graph of ``u(x, y) = -y xi(x, y)`` where ``xi`` is the
foot of the halfline over ``(x, y)``: the unique root of
``v + |y| beta(v) = x``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .heisenberg import HorizontalVec, Point
from .profiles import BetaProfile, angle_from_beta

FD_STEP = 1e-6


class BracketError(RuntimeError):
    """Raised when no sign change is found; the profile is not monotone."""


def _arrays(x, y):
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return x, y


def _ret(scalar: bool, *arrs):
    if scalar:
        vals = tuple(float(a) for a in arrs)
    else:
        vals = arrs
    return vals[0] if len(vals) == 1 else vals


def solve_monotone(beta: BetaProfile, x, ay, tol: float = 1e-12, growth: float = 2.0,
                   max_expand: int = 200, max_iter: int = 200) -> np.ndarray:
    """Vectorised bracketed bisection for ``v + ay * beta(v) = x`` with ``ay >= 0``."""
    shape = np.shape(x)
    x = np.asarray(x, dtype=float).ravel()
    ay = np.asarray(ay, dtype=float).ravel()

    def g(v, xx, aa):
        return v + aa * beta.eval(v) - xx

    half = ay * (np.abs(beta.eval(x)) + 1.0) + 1.0
    lo, hi = x - half, x + half
    glo, ghi = g(lo, x, ay), g(hi, x, ay)
    for _ in range(max_expand):
        bad_lo, bad_hi = glo > 0.0, ghi < 0.0
        if not (bad_lo.any() or bad_hi.any()):
            break
        width = hi - lo
        if bad_lo.any():
            lo = np.where(bad_lo, lo - (growth - 1.0) * width, lo)
            glo = np.where(bad_lo, g(lo, x, ay), glo)
        if bad_hi.any():
            hi = np.where(bad_hi, hi + (growth - 1.0) * width, hi)
            ghi = np.where(bad_hi, g(hi, x, ay), ghi)
    else:
        raise BracketError("no sign change after bracket expansion; profile not monotone?")
    if np.any(~np.isfinite(glo) | ~np.isfinite(ghi)):
        raise BracketError("non-finite profile values while bracketing")

    stop = tol * (1.0 + np.abs(x))
    idx = np.flatnonzero((hi - lo) > stop)
    for _ in range(max_iter):
        if idx.size == 0:
            break
        l, h = lo[idx], hi[idx]
        mid = l + 0.5 * (h - l)
        gm = g(mid, x[idx], ay[idx])
        go_right = gm <= 0.0
        exact = gm == 0.0
        lo[idx] = np.where(go_right, mid, l)
        hi[idx] = np.where(go_right & ~exact, h, mid)
        keep = ((hi[idx] - lo[idx]) > stop[idx]) & (mid > l) & (mid < h)
        idx = idx[keep]
    return (lo + 0.5 * (hi - lo)).reshape(shape)


@dataclass(frozen=True, eq=False)
class LineGraphSurface:
    """The graph ``t = u(x, y)`` built from ``beta`` with singular line ``y = 0``."""

    beta: BetaProfile
    tol: float = 1e-12
    growth: float = 2.0

    def __post_init__(self) -> None:
        if not self.beta.certificate:
            raise ValueError("profile is not non-decreasing")

    @property
    def exact_gradient(self) -> bool:
        return self.beta.differentiable

    def rho_inverse(self, x, y):
        """Foot ``xi`` of the halfline over ``(x, y)``; closed form for affine profiles."""
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        x, y = _arrays(x, y)
        ay = np.abs(y)
        exact = getattr(self.beta, "foot", None)
        if exact is not None:
            xi = exact(x, ay)
        else:
            xi = solve_monotone(self.beta, x, ay, self.tol, self.growth)
        xi = np.where(y == 0.0, x, xi)
        return _ret(scalar, xi)

    def height(self, x, y):
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        x, y = _arrays(x, y)
        u = -y * np.asarray(self.rho_inverse(x, y))
        u = np.where(y == 0.0, 0.0, u)
        return _ret(scalar, u)

    def implicit_residual(self, x, y, t):
        scalar = all(np.ndim(a) == 0 for a in (x, y, t))
        x, y, t = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x, y, t)))
        if np.any(y == 0.0):
            raise ValueError("implicit equation is undefined on y = 0")
        f = t + x * y - y * np.abs(y) * self.beta.eval(-t / y)
        return _ret(scalar, f)

    def parametric(self, v: float, w: float) -> Point:
        a = angle_from_beta(self.beta.eval(float(v)))
        ca, sa = math.cos(a), math.sin(a)
        aw = abs(w)
        if w >= 0:
            return Point(v + aw * ca, aw * sa, -v * aw * sa)
        return Point(v + aw * ca, -aw * sa, v * aw * sa)

    def parametric_inverse(self, x: float, y: float) -> tuple[float, float]:
        xi = float(self.rho_inverse(x, y))
        return xi, math.copysign(math.hypot(x - xi, y), y) if y != 0 else 0.0

    def gradient(self, x, y):
        """``(u_x, u_y)``; closed form when ``beta'`` is known, else central differences.

        On ``y = 0`` the limits ``(0, -x)`` are returned.
        """
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        x, y = _arrays(x, y)
        if self.exact_gradient:
            xi = np.asarray(self.rho_inverse(x, y))
            b = np.asarray(self.beta.eval(xi))
            db = np.asarray(self.beta.deriv(xi))
            ay = np.abs(y)
            den = 1.0 + ay * db
            ux = -y / den
            uy = (-x + ay * (2.0 * b - db * xi)) / den
        else:
            h = FD_STEP
            ux = (np.asarray(self.height(x + h, y)) - np.asarray(self.height(x - h, y))) / (2 * h)
            uy = (np.asarray(self.height(x, y + h)) - np.asarray(self.height(x, y - h))) / (2 * h)
        on_axis = y == 0.0
        ux = np.where(on_axis, 0.0, ux)
        uy = np.where(on_axis, -x, uy)
        return _ret(scalar, ux, uy)

    def horizontal_normal(self, x, y, side: int | None = None):
        """Unit horizontal normal ``(1, -sgn(y) beta(xi)) / sqrt(1 + beta(xi)^2)``.

        On ``y = 0`` a one-sided limit needs ``side`` in ``{+1, -1}``.
        """
        scalar = np.ndim(x) == 0 and np.ndim(y) == 0
        x, y = _arrays(x, y)
        sgn = np.sign(y)
        if np.any(sgn == 0.0):
            if side not in (1, -1):
                raise ValueError("horizontal normal on y = 0 needs side=+1 or side=-1")
            sgn = np.where(sgn == 0.0, float(side), sgn)
        b = np.asarray(self.beta.eval(np.asarray(self.rho_inverse(x, y))))
        r = np.sqrt(1.0 + b * b)
        a, c = 1.0 / r, -sgn * b / r
        if scalar:
            return HorizontalVec(float(a), float(c))
        return a, c

    def singular_distance(self, x, y):
        """Planar distance to the projection ``y = 0`` of the singular line."""
        return np.abs(np.asarray(y, dtype=float))

    def normal_from_gradient(self, x, y):
        """``normalize(y - u_x, -(x + u_y))``: the subgraph's outer horizontal normal."""
        ux, uy = self.gradient(x, y)
        p, q = np.asarray(y - ux), np.asarray(-(x + uy))
        r = np.hypot(p, q)
        return p / r, q / r


def riemannian_normal(surface, x, y):
    """Unit normal ``(u_x - y, u_y + x, -1) / |.|`` in ``{X, Y, T}`` coefficients.

    Oriented towards the subgraph, matching the orientation used for the
    cone normals.
    """
    ux, uy = surface.gradient(x, y)
    a = np.asarray(ux - np.asarray(y))
    b = np.asarray(uy + np.asarray(x))
    r = np.sqrt(1.0 + a * a + b * b)
    return a / r, b / r, -1.0 / r


def horizontal_gradient_norm(surface, x, y):
    """``|(u_x - y, u_y + x)|``: vanishes exactly over the singular set."""
    ux, uy = surface.gradient(x, y)
    return np.hypot(np.asarray(ux) - y, np.asarray(uy) + x)


def singular_scan(surface, domain: tuple[float, float, float, float], n: int,
                  tol: float = 1e-6) -> list[tuple[float, float]]:
    """Grid points of ``domain = (x0, x1, y0, y1)`` where the horizontal gradient vanishes."""
    if n < 2:
        raise ValueError("n must be >= 2")
    x0, x1, y0, y1 = domain
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    # snap near-zero samples so a grid through the axis hits it exactly
    xs[np.abs(xs) < 1e-14 * max(1.0, abs(x0), abs(x1))] = 0.0
    ys[np.abs(ys) < 1e-14 * max(1.0, abs(y0), abs(y1))] = 0.0
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    g = horizontal_gradient_norm(surface, X, Y)
    hit = g < tol
    return sorted(zip(X[hit].tolist(), Y[hit].tolist()))
