"""Monotone cotangent profiles ``beta = cot(alpha)`` and their mollifications.

Every profile evaluates vectorised over numpy arrays. ``deriv`` returns the
(right) derivative where the kind has one in closed form and ``None`` when
the profile is merely continuous, so callers can fall back to differences.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Sequence

import numpy as np

MONOTONE_SLACK = 1e-12


def beta_from_angle(alpha):
    a = np.asarray(alpha, dtype=float)
    if np.any((a <= 0.0) | (a >= math.pi)):
        raise ValueError("angle outside (0, pi)")
    out = np.cos(a) / np.sin(a)
    return float(out) if out.ndim == 0 else out


def angle_from_beta(beta):
    """Inverse cotangent onto ``(0, pi)``."""
    out = 0.5 * np.pi - np.arctan(np.asarray(beta, dtype=float))
    return float(out) if out.ndim == 0 else out


class BetaProfile:
    """Base class for continuous non-decreasing profiles."""

    kind: str = "abstract"

    def __call__(self, v):
        return self.eval(v)

    def eval(self, v):
        raise NotImplementedError

    def deriv(self, v):
        return None

    @property
    def differentiable(self) -> bool:
        return True

    def _certify(self) -> bool:
        return validate_monotone(self, (-10.0, 10.0), 4001)

    @cached_property
    def certificate(self) -> bool:
        """True when the profile is known to be non-decreasing."""
        return self._certify()

    def to_json(self) -> dict[str, Any]:
        raise NotImplementedError


def _arr(v) -> np.ndarray:
    return np.asarray(v, dtype=float)


def _out(v_in, arr: np.ndarray):
    return float(arr) if np.ndim(v_in) == 0 else arr


@dataclass(frozen=True, eq=False)
class Constant(BetaProfile):
    beta: float
    kind = "constant"

    def eval(self, v):
        return _out(v, np.full(np.shape(v), float(self.beta)))

    def deriv(self, v):
        return _out(v, np.zeros(np.shape(v)))

    def _certify(self) -> bool:
        return math.isfinite(self.beta)

    def foot(self, x, ay):
        """Exact root of ``v + ay * beta = x``."""
        return np.asarray(x, dtype=float) - np.asarray(ay, dtype=float) * self.beta

    def to_json(self):
        return {"kind": self.kind, "beta": self.beta}


@dataclass(frozen=True, eq=False)
class Linear(BetaProfile):
    slope: float
    offset: float = 0.0
    kind = "linear"

    def eval(self, v):
        return _out(v, self.slope * _arr(v) + self.offset)

    def deriv(self, v):
        return _out(v, np.full(np.shape(v), float(self.slope)))

    def _certify(self) -> bool:
        return self.slope >= 0.0

    def foot(self, x, ay):
        """Exact root of ``v + ay * (slope * v + offset) = x``."""
        ay = np.asarray(ay, dtype=float)
        return (np.asarray(x, dtype=float) - ay * self.offset) / (1.0 + ay * self.slope)

    def to_json(self):
        return {"kind": self.kind, "slope": self.slope, "offset": self.offset}


@dataclass(frozen=True, eq=False)
class PiecewiseLinear(BetaProfile):
    """Linear interpolation through ``breakpoints`` with linear end extensions."""

    breakpoints: tuple[tuple[float, float], ...]
    left_slope: float = 0.0
    right_slope: float = 0.0
    kind = "piecewise_linear"

    def __post_init__(self) -> None:
        pts = tuple((float(a), float(b)) for a, b in self.breakpoints)
        if not pts:
            raise ValueError("piecewise_linear needs at least one breakpoint")
        xs = [p[0] for p in pts]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must have strictly increasing abscissae")
        object.__setattr__(self, "breakpoints", pts)

    @cached_property
    def _xs(self) -> np.ndarray:
        return np.array([p[0] for p in self.breakpoints])

    @cached_property
    def _ys(self) -> np.ndarray:
        return np.array([p[1] for p in self.breakpoints])

    @cached_property
    def slopes(self) -> np.ndarray:
        """Slopes of the pieces, left extension first, right extension last."""
        inner = np.diff(self._ys) / np.diff(self._xs)
        return np.concatenate([[self.left_slope], inner, [self.right_slope]])

    def eval(self, v):
        va = _arr(v)
        xs, ys = self._xs, self._ys
        out = np.interp(va, xs, ys)
        out = np.where(va < xs[0], ys[0] + self.left_slope * (va - xs[0]), out)
        out = np.where(va > xs[-1], ys[-1] + self.right_slope * (va - xs[-1]), out)
        return _out(v, out)

    def deriv(self, v):
        # right derivative: a breakpoint takes the slope of the piece starting there
        idx = np.searchsorted(self._xs, _arr(v), side="right")
        return _out(v, self.slopes[idx])

    def ramps(self) -> tuple[float, float, np.ndarray, np.ndarray]:
        """Write the profile as ``c + s0 * v + sum_k d_k * max(v - a_k, 0)``.

        Returns ``(c, s0, a, d)``.
        """
        s = self.slopes
        jumps = np.diff(s)
        x0, y0 = self._xs[0], self._ys[0]
        return y0 - s[0] * x0, float(s[0]), self._xs.copy(), jumps

    def _certify(self) -> bool:
        return bool(np.all(self.slopes >= 0.0))

    def to_json(self):
        return {
            "kind": self.kind,
            "breakpoints": [list(p) for p in self.breakpoints],
            "left_slope": self.left_slope,
            "right_slope": self.right_slope,
        }


class Table(PiecewiseLinear):
    """Sampled profile, linearly interpolated and held constant outside the samples."""

    kind = "table"

    def __init__(self, samples: Sequence[Sequence[float]]):
        super().__init__(tuple(tuple(s) for s in sorted(samples)), 0.0, 0.0)

    def to_json(self):
        return {"kind": self.kind, "samples": [list(p) for p in self.breakpoints]}


_CANTOR_DIGITS = 53
_CANTOR_BITS = 62


def cantor(x):
    """Cantor's devil's staircase, 0 left of 0 and 1 right of 1.

    The argument is rounded to a multiple of ``2**-62`` and its ternary digits
    are extracted exactly in unsigned 64-bit arithmetic, so digit errors from
    repeated floating multiplication by 3 never occur.
    """
    xa = _arr(x)
    flat = np.clip(xa.ravel(), 0.0, 1.0)
    res = np.zeros(flat.shape)
    inside = (flat > 0.0) & (flat < 1.0)
    res[flat >= 1.0] = 1.0
    one = np.uint64(1) << np.uint64(_CANTOR_BITS)
    mask = one - np.uint64(1)
    r = np.round(flat[inside] * float(one)).astype(np.uint64)
    acc = np.zeros(r.shape)
    active = np.ones(r.shape, dtype=bool)
    half = 0.5
    three = np.uint64(3)
    shift = np.uint64(_CANTOR_BITS)
    for _ in range(_CANTOR_DIGITS):
        r = r * three
        d = r >> shift
        r = r & mask
        # digit 1: inside a removed middle third, value is fixed from here on
        hit = active & (d == 1)
        acc[hit] += half
        acc[active & (d == 2)] += half
        active &= d != 1
        if not active.any():
            break
        half *= 0.5
    res[inside] = acc
    out = res.reshape(xa.shape)
    return _out(x, out)


@dataclass(frozen=True, eq=False)
class Cantor(BetaProfile):
    """``beta(v) = c((v - shift) / scale)`` with ``c`` the Cantor function."""

    scale: float = 1.0
    shift: float = 0.0
    kind = "cantor"

    def __post_init__(self) -> None:
        if not self.scale > 0.0:
            raise ValueError("cantor scale must be positive")

    def eval(self, v):
        return _out(v, np.asarray(cantor((_arr(v) - self.shift) / self.scale)))

    @property
    def differentiable(self) -> bool:
        return False

    def _certify(self) -> bool:
        return True

    def to_json(self):
        return {"kind": self.kind, "scale": self.scale, "shift": self.shift}


# --- mollifier -------------------------------------------------------------

_GL_ORDER = 64
_GL_T, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


def _bump(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    m = np.abs(t) < 1.0
    out[m] = np.exp(-1.0 / (1.0 - t[m] ** 2))
    return out


def _half_integrals(s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalised ``int_{-1}^s bump`` and ``int_{-1}^s t bump`` for ``-1 < s <= 0``."""
    half = 0.5 * (s + 1.0)
    nodes = -1.0 + half[:, None] * (_GL_T + 1.0)
    vals = _bump(nodes)
    return half * np.sum(_GL_W * vals, axis=-1), half * np.sum(_GL_W * nodes * vals, axis=-1)


_BUMP_MASS = 2.0 * float(_half_integrals(np.zeros(1))[0][0])


def bump(t):
    """Normalised ``C^inf`` bump on ``(-1, 1)``: ``exp(-1/(1-t^2)) / Z``."""
    return _bump(t) / _BUMP_MASS


def bump_cdf_moment(s) -> tuple[np.ndarray, np.ndarray]:
    """``Phi(s) = int_{-1}^s bump`` and ``M(s) = int_{-1}^s t bump(t) dt``.

    Gauss-Legendre on ``[-1, -|s|]``, then the kernel's evenness gives
    ``Phi(s) = 1 - Phi(-s)`` and ``M(s) = M(-s)``; the nodes move smoothly
    with ``s`` so both are smooth functions of ``s``.
    """
    s = np.asarray(s, dtype=float)
    cdf = np.where(s >= 1.0, 1.0, 0.0)
    mom = np.zeros(s.shape)
    inside = (s > -1.0) & (s < 1.0)
    if inside.any():
        si = s[inside]
        c, m = _half_integrals(-np.abs(si))
        c, m = c / _BUMP_MASS, m / _BUMP_MASS
        cdf[inside] = np.where(si > 0.0, 1.0 - c, c)
        mom[inside] = m
    return cdf, mom


@dataclass(frozen=True, eq=False)
class Mollified(BetaProfile):
    """Convolution ``beta * eta_eps`` with the normalised bump of radius ``eps``.

    Piecewise linear bases are convolved exactly through the bump's CDF and
    first moment (``ramp * eta_eps(x) = (x-a) Phi(s) - eps M(s)``,
    ``s = (x-a)/eps``). Other bases use fixed-order Gauss-Legendre quadrature
    over the kernel support.
    """

    base: BetaProfile
    eps: float
    kind = "mollified"

    def __post_init__(self) -> None:
        if not self.eps > 0.0:
            raise ValueError("mollifier radius must be positive")

    @property
    def exact(self) -> bool:
        return isinstance(self.base, (PiecewiseLinear, Linear, Constant))

    @cached_property
    def _ramps(self):
        b = self.base
        if isinstance(b, PiecewiseLinear):
            return b.ramps()
        if isinstance(b, Linear):
            return b.offset, b.slope, np.empty(0), np.empty(0)
        return b.beta, 0.0, np.empty(0), np.empty(0)

    @cached_property
    def _weights(self) -> np.ndarray:
        w = _GL_W * _bump(_GL_T)
        return w / w.sum()

    def eval_quadrature(self, v):
        va = _arr(v)
        pts = va[..., None] - self.eps * _GL_T
        return _out(v, np.sum(self._weights * self.base.eval(pts), axis=-1))

    def eval(self, v):
        if not self.exact:
            return self.eval_quadrature(v)
        va = _arr(v)
        c, s0, a, d = self._ramps
        out = c + s0 * va
        for ak, dk in zip(a, d):
            r = va - ak
            cdf, mom = bump_cdf_moment(r / self.eps)
            out = out + dk * (r * cdf - self.eps * mom)
        return _out(v, out)

    def deriv(self, v):
        va = _arr(v)
        if self.exact:
            c, s0, a, d = self._ramps
            out = np.full(va.shape, s0)
            for ak, dk in zip(a, d):
                cdf, _ = bump_cdf_moment((va - ak) / self.eps)
                out = out + dk * cdf
            return _out(v, out)
        if not self.base.differentiable:
            return None
        pts = va[..., None] - self.eps * _GL_T
        return _out(v, np.sum(self._weights * self.base.deriv(pts), axis=-1))

    @property
    def differentiable(self) -> bool:
        return self.exact or self.base.differentiable

    def _certify(self) -> bool:
        return self.base.certificate

    def to_json(self):
        return {"kind": self.kind, "base": self.base.to_json(), "eps": self.eps}


def mollify(profile: BetaProfile, eps: float) -> BetaProfile:
    if not eps > 0.0:
        raise ValueError("mollifier radius must be positive")
    if isinstance(profile, Constant):
        return profile
    return Mollified(profile, float(eps))


@dataclass(frozen=True, eq=False)
class Clamped(BetaProfile):
    """``v -> base(max(v, start))``: constant continuation to the left of ``start``."""

    base: BetaProfile
    start: float = 0.0
    kind = "clamped"

    def eval(self, v):
        return _out(v, _arr(self.base.eval(np.maximum(_arr(v), self.start))))

    def deriv(self, v):
        va = _arr(v)
        d = self.base.deriv(np.maximum(va, self.start))
        if d is None:
            return None
        return _out(v, np.where(va >= self.start, d, 0.0))

    @property
    def differentiable(self) -> bool:
        return self.base.differentiable

    def _certify(self) -> bool:
        return self.base.certificate

    def to_json(self):
        return {"kind": self.kind, "base": self.base.to_json(), "start": self.start}


@dataclass(frozen=True)
class AngleProfile:
    """Angle function ``alpha = arccot(beta)`` with values in ``(0, pi)``.

    ``alpha`` is non-increasing exactly when ``beta`` is non-decreasing.
    """

    beta: BetaProfile
    origin: float = 0.0
    direction: float = 0.0

    def __call__(self, v):
        return angle_from_beta(self.beta.eval(v))


def piecewise_example() -> PiecewiseLinear:
    """``beta = 0`` for ``v <= 0`` and ``beta = v`` for ``v >= 0``."""
    return PiecewiseLinear(((0.0, 0.0),), left_slope=0.0, right_slope=1.0)


def validate_monotone(profile: BetaProfile, interval: tuple[float, float], n: int) -> bool:
    if n < 2:
        raise ValueError("need at least two samples")
    v = np.linspace(interval[0], interval[1], n)
    b = np.asarray(profile.eval(v), dtype=float)
    if not np.all(np.isfinite(b)):
        return False
    return bool(np.all(np.diff(b) >= -MONOTONE_SLACK))


_KINDS = ("constant", "linear", "piecewise_linear", "cantor", "table", "mollified", "clamped")


def profile_from_json(obj: dict[str, Any]) -> BetaProfile:
    """Build a profile from its JSON form; raises ``ValueError`` naming the bad field."""
    if not isinstance(obj, dict):
        raise ValueError("profile must be a JSON object")
    kind = obj.get("kind")
    if kind not in _KINDS:
        raise ValueError(f"profile.kind: expected one of {_KINDS}, got {kind!r}")

    def num(key: str, default: float | None = None) -> float:
        if key not in obj:
            if default is None:
                raise ValueError(f"profile.{key}: missing for kind {kind!r}")
            return default
        val = obj[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
            raise ValueError(f"profile.{key}: expected a finite number, got {val!r}")
        return float(val)

    def pairs(key: str) -> list[tuple[float, float]]:
        raw = obj.get(key)
        if not isinstance(raw, list) or not raw:
            raise ValueError(f"profile.{key}: expected a non-empty list of [v, beta] pairs")
        out = []
        for i, p in enumerate(raw):
            if not (isinstance(p, (list, tuple)) and len(p) == 2):
                raise ValueError(f"profile.{key}[{i}]: expected [v, beta]")
            out.append((float(p[0]), float(p[1])))
        return out

    if kind == "constant":
        return Constant(num("beta"))
    if kind == "linear":
        return Linear(num("slope"), num("offset", 0.0))
    if kind == "piecewise_linear":
        return PiecewiseLinear(
            tuple(pairs("breakpoints")), num("left_slope", 0.0), num("right_slope", 0.0)
        )
    if kind == "cantor":
        return Cantor(num("scale", 1.0), num("shift", 0.0))
    if kind == "table":
        return Table(pairs("samples"))
    if kind == "mollified":
        return Mollified(profile_from_json(obj.get("base")), num("eps"))
    return Clamped(profile_from_json(obj.get("base")), num("start", 0.0))


def load_json_text(text: str) -> Any:
    """``json.loads`` with the decoder's line and column in the error message."""
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def parse_profile(text: str) -> BetaProfile:
    """Parse a JSON profile or one of the shorthands used on the command line.

    Shorthands: ``zero``, ``constant:B``, ``linear:SLOPE[,OFFSET]``,
    ``example`` (the kinked ``max(v, 0)`` profile), ``cantor[:SCALE,SHIFT]``.
    """
    text = text.strip()
    if text.startswith("{"):
        return profile_from_json(load_json_text(text))
    name, _, args = text.partition(":")
    vals = [float(a) for a in args.split(",")] if args else []
    if name == "zero":
        return Constant(0.0)
    if name == "constant" and len(vals) == 1:
        return Constant(vals[0])
    if name == "linear" and len(vals) in (1, 2):
        return Linear(*vals)
    if name == "example" and not vals:
        return piecewise_example()
    if name == "cantor" and len(vals) in (0, 2):
        return Cantor(*vals)
    raise ValueError(f"unrecognised profile {text!r}")
