"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest, or directly with ``python tests/test_acceptance.py`` for
the summary alone.
"""

from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest

from mingraph.area import Rectangle, divergence_check
from mingraph.graph_line import LineGraphSurface, singular_scan, solve_monotone
from mingraph.heisenberg import (
    HorizontalVec,
    Point,
    contact_pairing,
    dilate,
    frame_at,
    geodesic_closed_form,
    geodesic_trace,
    group_mul,
    horizontal_lift_line,
    j_rotate,
)
from mingraph.multiwedge import (
    MultiWedgeSurface,
    SingularHalflineSurface,
    WedgeConfig,
    make_cone,
)
from mingraph.profiles import Cantor, Constant, Linear, mollify, piecewise_example
from mingraph.verifier import (
    convex_oracle_area,
    discrete_area,
    dilation_invariance_check,
    mollification_convergence,
    perturb_test,
    side_second_derivative,
)


def report(number: int, ok: bool, detail: str) -> str:
    return f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def grid(lo: float, hi: float, n: int):
    xs = np.linspace(lo, hi, n)
    return np.meshgrid(xs, xs, indexing="xy")


def seven_surfaces() -> dict:
    return {
        "beta=0": LineGraphSurface(Constant(0.0)),
        "cone beta0=1": LineGraphSurface(Constant(1.0)),
        "beta(v)=v": LineGraphSurface(Linear(1.0)),
        "piecewise": LineGraphSurface(piecewise_example()),
        "cantor": LineGraphSurface(Cantor()),
        "3-wedge cone": make_cone(WedgeConfig.symmetric(3)),
        "halfline beta0=1": SingularHalflineSurface(Constant(1.0)),
    }


def graded_three_wedge() -> MultiWedgeSurface:
    """Three wedges with distinct opening angles and strictly increasing profiles."""
    halves = (math.pi / 2, math.pi / 3, math.pi / 6)
    profiles = [Linear(0.5, math.cos(a) / math.sin(a)) for a in halves]
    return MultiWedgeSurface(WedgeConfig.from_half_angles(halves, 0.3, profiles))


def criterion_1():
    X, Y = grid(-3.0, 3.0, 201)
    ref = -X * Y / (1.0 + np.abs(Y))
    t0 = time.perf_counter()
    u = LineGraphSurface(Linear(1.0)).height(X, Y)
    elapsed = time.perf_counter() - t0
    # the general bisection path must meet the same tolerance
    u_bis = -Y * solve_monotone(Linear(1.0), X, np.abs(Y))
    err = float(np.max(np.abs(u - ref)))
    err_bis = float(np.max(np.abs(u_bis - ref)))
    ok = err <= 1e-10 and err_bis <= 1e-10 and elapsed < 2.0
    return ok, f"max err {err:.2e} (bisection {err_bis:.2e}), {elapsed:.3f}s"


def criterion_2():
    X, Y = grid(-3.0, 3.0, 201)
    rng = np.random.default_rng(2)
    pts = rng.uniform(-1.0, 1.0, size=(200, 2))
    worst_h = worst_d = 0.0
    for b0 in (-1.0, 0.5, 1.0, 3.0):
        s = LineGraphSurface(Constant(b0))
        worst_h = max(worst_h, float(np.max(np.abs(s.height(X, Y) - (-X * Y + b0 * Y * np.abs(Y))))))
        for center in (Point(0.0, 0.0, 0.0), Point(0.7, 0.0, 0.0), Point(-1.3, 0.0, 0.0)):
            worst_d = max(worst_d, dilation_invariance_check(s, center, (-1.0, 0.5, 2.0), pts))
    ok = worst_h <= 1e-10 and worst_d <= 1e-10
    return ok, f"height err {worst_h:.2e}, dilation err {worst_d:.2e}"


def criterion_3():
    rng = np.random.default_rng(3)
    x = rng.uniform(-3.0, 3.0, 20_000)
    y = rng.uniform(-3.0, 3.0, 20_000)
    keep = np.abs(y) > 0.1
    x, y = x[keep][:10_000], y[keep][:10_000]
    errs, upper, antipodal = [], [], []
    for beta in (Linear(1.0), Linear(0.5, -1.0), mollify(piecewise_example(), 0.1)):
        s = LineGraphSurface(beta)
        p, q = s.normal_from_gradient(x, y)
        a, b = s.horizontal_normal(x, y)
        d = np.hypot(p - a, q - b)
        errs.append(float(np.max(d)))
        upper.append(float(np.max(d[y > 0])))
        antipodal.append(float(np.max(np.hypot(p + a, q + b)[y < 0])))
    err = max(errs)
    ok = err <= 1e-8
    detail = (f"max err {err:.2e}; y>0 err {max(upper):.2e}; "
              f"y<0 gradient normal = -(formula) to {max(antipodal):.2e}")
    return ok, detail


def _observed_order(errs: list[float], hs: list[float]) -> float:
    if max(errs) < 1e-9:
        return math.inf  # exact up to rounding
    rates = [math.log(errs[i] / errs[i + 1]) / math.log(hs[i] / hs[i + 1])
             for i in range(len(errs) - 1)]
    return min(rates)


def criterion_4():
    hs = [1e-2, 1e-3, 1e-4]
    worst_grad = 0.0
    worst_order = math.inf
    for beta, xs in ((Constant(1.0), (0.0, 1.5)), (Linear(1.0), (1.0, -0.5)),
                     (piecewise_example(), (1.0, -1.0))):
        s = LineGraphSurface(beta)
        for x in xs:
            gx, gy = s.gradient(x, 0.0)
            worst_grad = max(worst_grad, abs(gx), abs(gy + x))
            b = float(beta.eval(x))
            up = [abs(side_second_derivative(s, x, h)[0] - 2 * b) for h in hs]
            dn = [abs(side_second_derivative(s, x, h)[1] + 2 * b) for h in hs]
            worst_order = min(worst_order, _observed_order(up, hs), _observed_order(dn, hs))
    ok = worst_grad == 0.0 and worst_order >= 0.9
    return ok, f"axis gradient err {worst_grad:.1e}, min observed order {worst_order:.2f}"


def _near_bisectors(pts, angles, cell):
    p = np.asarray(pts)
    d = np.full(len(p), np.inf)
    for th in angles:
        lx = p[:, 0] * math.cos(th) + p[:, 1] * math.sin(th)
        ly = -p[:, 0] * math.sin(th) + p[:, 1] * math.cos(th)
        d = np.minimum(d, np.where(lx >= 0, np.abs(ly), np.hypot(lx, ly)))
    return bool(np.all(d <= cell))


def criterion_5():
    dom = (-2.0, 2.0, -2.0, 2.0)
    cell = 4.0 / 200
    bad = []
    for name in ("beta=0", "cone beta0=1", "beta(v)=v", "piecewise", "cantor"):
        pts = singular_scan(seven_surfaces()[name], dom, 201, 1e-6)
        if not pts or not all(abs(y) <= cell for _, y in pts):
            bad.append(name)
    cones = {
        "3-wedge": make_cone(WedgeConfig.symmetric(3)),
        "2-wedge": make_cone(WedgeConfig((0.0, math.pi), (Constant(1.0), Constant(-1.0)))),
        "4-wedge": make_cone(WedgeConfig.from_half_angles([math.pi / 4] * 4, 0.0)),
    }
    for name, s in cones.items():
        pts = singular_scan(s, dom, 201, 1e-6)
        if not pts or not _near_bisectors(pts, s.config.bisectors, cell):
            bad.append(name)
    return not bad, "all scans within one cell" if not bad else f"off-set points: {bad}"


def criterion_6():
    dom = Rectangle(-2.0, 2.0, -2.0, 2.0)
    t0 = time.perf_counter()
    lines, ok = [], True
    for name, s in seven_surfaces().items():
        r = perturb_test(s, dom, trials=100, amplitude=0.5, seed=2024, n=200)
        ok &= r.passed
        lines.append(f"{name}: {r.worst_deficit:+.1e}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 60.0
    return ok, f"{elapsed:.1f}s; worst deficits " + ", ".join(lines)


def criterion_7():
    dom = Rectangle(-1.0, 1.0, -1.0, 1.0)
    worst = 0.0
    for s in seven_surfaces().values():
        ref = discrete_area(s, dom, 64)
        for init in ("surface", "zero"):
            got = convex_oracle_area(s, dom, 64, 50_000, init=init)
            worst = max(worst, abs(got - ref) / ref)
    return worst <= 1e-3, f"max relative gap {worst:.2e}"


def criterion_8():
    sups = mollification_convergence(
        piecewise_example(), (0.2, 0.1, 0.05, 0.025), Rectangle(-2.0, 2.0, -2.0, 2.0), 201
    )
    ok = all(b < a for a, b in zip(sups, sups[1:])) and sups[-1] <= 0.05
    return ok, "sup errors " + ", ".join(f"{v:.2e}" for v in sups)


def _angular_margin(x, y, angles, margin):
    phi = np.arctan2(y, x)
    for th in angles:
        d = np.abs(np.angle(np.exp(1j * (phi - th))))
        if np.any(d < margin):
            return False
    return True


def criterion_9():
    rng = np.random.default_rng(9)
    h = 1e-4
    worst = 0.0
    smooth = [Linear(1.0), Linear(0.3, 0.5), Constant(0.7), mollify(piecewise_example(), 0.1)]
    for beta in smooth:
        s = LineGraphSurface(beta)
        count = 0
        while count < 1000:
            x, y = rng.uniform(-2.0, 2.0, 2)
            if abs(y) <= 0.05:
                continue
            worst = max(worst, abs(divergence_check(s, (x, y), h)))
            count += 1
    for s in (make_cone(WedgeConfig.symmetric(3)),
              make_cone(WedgeConfig.from_half_angles((math.pi / 2, math.pi / 3, math.pi / 6)))):
        walls = list(s.config.boundary_angles) + list(s.config.bisectors)
        count = 0
        while count < 1000:
            x, y = rng.uniform(-2.0, 2.0, 2)
            if math.hypot(x, y) < 0.05 or not _angular_margin(x, y, walls, 0.02):
                continue
            worst = max(worst, abs(divergence_check(s, (x, y), h)))
            count += 1
    return worst <= 1e-6, f"max |div| {worst:.2e}"


def criterion_10():
    rng = np.random.default_rng(10)
    worst_jump = 0.0
    worst_ratio = 0.0
    for s in (make_cone(WedgeConfig.symmetric(3)), graded_three_wedge()):
        c = s.config
        k = c.k
        for i, ang in enumerate(c.boundary_angles):
            r = rng.uniform(0.0, 3.0, 1000)
            x, y = r * math.cos(ang), r * math.sin(ang)
            left = s.height_in_wedge(i, x, y)
            right = s.height_in_wedge((i + 1) % k, x, y)
            worst_jump = max(worst_jump, float(np.max(np.abs(left - right))))
        # per-wedge lipschitz constants on the unit disk from sampled gradients
        rad = np.sqrt(rng.uniform(0.0, 1.0, 20_000))
        th = rng.uniform(0.0, 2 * math.pi, 20_000)
        gx, gy = s.gradient(rad * np.cos(th), rad * np.sin(th))
        lip = float(np.max(np.hypot(gx, gy)))
        p = rng.uniform(-1.0, 1.0, (4000, 2))
        q = rng.uniform(-1.0, 1.0, (4000, 2))
        keep = (np.hypot(*p.T) <= 1) & (np.hypot(*q.T) <= 1)
        p, q = p[keep], q[keep]
        quot = np.abs(s.height(*p.T) - s.height(*q.T)) / np.hypot(*(p - q).T)
        worst_ratio = max(worst_ratio, float(np.max(quot)) / lip)
    ok = worst_jump <= 1e-9 and worst_ratio <= 1.05
    return ok, f"max jump {worst_jump:.2e}, lipschitz quotient / bound {worst_ratio:.3f}"


def _left_translate_differential(p: Point, q: Point, v, eps: float = 1e-3):
    """Differential of ``q -> p * q`` applied to ``v`` by central differences (exact: affine in q)."""
    plus = group_mul(p, Point(q.x + eps * v.dx, q.y + eps * v.dy, q.t + eps * v.dt))
    minus = group_mul(p, Point(q.x - eps * v.dx, q.y - eps * v.dy, q.t - eps * v.dt))
    return np.array([(plus.x - minus.x), (plus.y - minus.y), (plus.t - minus.t)]) / (2 * eps)


def criterion_11():
    rng = np.random.default_rng(11)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(500):
        p, q, r = (Point(*rng.uniform(-5, 5, 3)) for _ in range(3))
        a = group_mul(group_mul(p, q), r)
        b = group_mul(p, group_mul(q, r))
        worst = max(worst, abs(a.x - b.x), abs(a.y - b.y), abs(a.t - b.t))
        pq = group_mul(p, q)
        for e_q, e_pq in zip(frame_at(q), frame_at(pq)):
            pushed = _left_translate_differential(p, q, e_q)
            worst = max(worst, float(np.max(np.abs(pushed - [e_pq.dx, e_pq.dy, e_pq.dt]))))
        h = HorizontalVec(*rng.uniform(-3, 3, 2))
        jj = j_rotate(j_rotate(h))
        worst = max(worst, abs(jj.a + h.a), abs(jj.b + h.b))
        s1, s2 = rng.uniform(-1.5, 1.5, 2)
        c = Point(*rng.uniform(-2, 2, 3))
        d1 = dilate(c, s1, dilate(c, s2, p))
        d2 = dilate(c, s1 + s2, p)
        scale = max(1.0, abs(d2.t))
        worst = max(worst, abs(d1.x - d2.x), abs(d1.y - d2.y), abs(d1.t - d2.t) / scale)
        o = Point(0.0, 0.0, 0.0)
        hom = group_mul(dilate(o, s1, p), dilate(o, s1, q))
        ref = dilate(o, s1, pq)
        worst = max(worst, abs(hom.x - ref.x), abs(hom.y - ref.y),
                    abs(hom.t - ref.t) / max(1.0, abs(ref.t)))
    elapsed = time.perf_counter() - t0
    return worst <= 1e-10 and elapsed < 1.0, f"max err {worst:.2e}, {elapsed:.3f}s"


def criterion_12():
    rng = np.random.default_rng(12)
    worst_line = worst_omega = worst_speed = worst_closed = 0.0
    for _ in range(5):
        v = float(rng.uniform(-2, 2))
        alpha = float(rng.uniform(0.1, math.pi - 0.1))
        pts, phis = geodesic_trace(Point(v, 0.0, 0.0), HorizontalVec(math.cos(alpha), math.sin(alpha)),
                                   0.0, 10.0, 1000)
        s = np.linspace(0.0, 10.0, 1001)
        ref = np.array([horizontal_lift_line(v, alpha, si).as_tuple() for si in s])
        worst_line = max(worst_line, float(np.max(np.abs(pts - ref))))
    for lam in (-1.3, 0.4, 2.0):
        p0 = Point(*rng.uniform(-1, 1, 3))
        phi0 = float(rng.uniform(0, 2 * math.pi))
        pts, phis = geodesic_trace(p0, HorizontalVec(math.cos(phi0), math.sin(phi0)), lam, 10.0, 1000)
        for (x, y, t), ph in zip(pts, phis):
            q = Point(x, y, t)
            # the integrator's velocity, expanded in coordinates through the frame at q
            fx, fy, _ = frame_at(q)
            a, b = math.cos(ph), math.sin(ph)
            vel = type(fx)(a * fx.dx + b * fy.dx, a * fx.dy + b * fy.dy, a * fx.dt + b * fy.dt)
            worst_omega = max(worst_omega, abs(contact_pairing(q, vel)))
            worst_speed = max(worst_speed, abs(math.hypot(vel.dx, vel.dy) - 1.0))
        exact = geodesic_closed_form(p0, phi0, lam, np.linspace(0.0, 10.0, 1001))
        worst_closed = max(worst_closed, float(np.max(np.abs(pts - exact))))
    ok = worst_line <= 1e-8 and worst_omega <= 1e-9 and worst_speed <= 1e-8 and worst_closed <= 1e-6
    return ok, (f"line err {worst_line:.2e}, |omega| {worst_omega:.2e}, "
                f"speed err {worst_speed:.2e}, closed-form err {worst_closed:.2e}")


CRITERIA = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
    5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8,
    9: criterion_9, 10: criterion_10, 11: criterion_11, 12: criterion_12,
}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, detail = CRITERIA[number]()
    with capsys.disabled():
        print("\n" + report(number, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for number, check in CRITERIA.items():
        ok, detail = check()
        failed += not ok
        print(report(number, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
