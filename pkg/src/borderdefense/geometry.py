"""
Apollonius-circle geometry for the border defense game.

The border is the line y = 0 and play happens in y >= 0. For a pursuer P and
an evader E with speed ratio alpha = v_E / v_P < 1, the Apollonius circle is
the locus of points S with |ES| = alpha * |PS|. Its interior is the evader's
dominance region. Everything here is closed form; nothing iterates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

# intersections closer than this (times the larger radius) collapse to one
TANGENCY_TOL = 1e-9
# |dx| below this (times the larger radius) counts as vertically aligned centers
ALIGNED_TOL = 1e-12


class GeometryError(ValueError):
    pass


class DegenerateInputError(GeometryError):
    """Coincident foci or a speed ratio outside (0, 1)."""


class EqualSpeedError(GeometryError):
    """Pursuer-pair circle requested for (numerically) equal speeds."""


class CoincidentCirclesError(GeometryError):
    pass


class DegenerateConfigurationError(GeometryError):
    """The F/G/D closed form is undefined (D or G vanish)."""


class Point2(NamedTuple):
    x: float
    y: float


def dist(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class Circle:
    """A dominance boundary.

    ``kind`` is ``"pe"`` for a pursuer-evader circle (foci = pursuer, evader)
    or ``"pp"`` for a pursuer-pair circle (foci = slow pursuer, fast pursuer).
    ``ratio`` is the speed ratio that generated it.
    """

    center: Point2
    radius: float
    kind: str
    ratio: float
    foci: Tuple[Point2, Point2]

    def contains(self, p: Sequence[float], tol: float = 0.0) -> bool:
        return dist(self.center, p) <= self.radius + tol

    def point_at(self, theta: float) -> Point2:
        return Point2(self.center.x + self.radius * math.cos(theta),
                      self.center.y + self.radius * math.sin(theta))


@dataclass(frozen=True)
class CapturePoint:
    """Lowest point of an evader's dominance region.

    mode is ``"solo"`` (one pursuer index in ``pursuers``) or
    ``"simultaneous"`` (two indices).
    """

    point: Point2
    mode: str
    pursuers: Tuple[int, ...]

    @property
    def y(self) -> float:
        return self.point.y


def _check_ratio(alpha: float) -> None:
    if not (0.0 < alpha < 1.0) or not math.isfinite(alpha):
        raise DegenerateInputError(f"speed ratio must lie in (0, 1), got {alpha!r}")


def _ratio_circle(a: Sequence[float], b: Sequence[float], alpha: float) -> Tuple[Point2, float]:
    # locus |S b| = alpha |S a|
    d = dist(a, b)
    if d == 0.0:
        raise DegenerateInputError("foci coincide")
    k = 1.0 - alpha * alpha
    cx = (b[0] - alpha * alpha * a[0]) / k
    cy = (b[1] - alpha * alpha * a[1]) / k
    return Point2(cx, cy), alpha * d / k


def apollonius_circle(pursuer: Sequence[float], evader: Sequence[float], alpha: float) -> Circle:
    _check_ratio(alpha)
    center, radius = _ratio_circle(pursuer, evader, alpha)
    return Circle(center, radius, "pe", alpha, (Point2(*pursuer), Point2(*evader)))


def lowest_point(c: Circle, pursuer: int = 0) -> CapturePoint:
    if c.kind != "pe":
        raise GeometryError("lowest_point needs a pursuer-evader circle")
    return CapturePoint(Point2(c.center.x, c.center.y - c.radius), "solo", (pursuer,))


def pursuer_pair_circle(p_slow: Sequence[float], p_fast: Sequence[float], alpha_pp: float) -> Circle:
    """Points the two pursuers reach at the same instant.

    ``alpha_pp`` is v_slow / v_fast. Equal speeds make this a bisector line,
    which is rejected.
    """
    if abs(1.0 - alpha_pp) < 1e-12:
        raise EqualSpeedError("pursuer speeds are equal; the pair circle is a line")
    _check_ratio(alpha_pp)
    center, radius = _ratio_circle(p_fast, p_slow, alpha_pp)
    return Circle(center, radius, "pp", alpha_pp, (Point2(*p_slow), Point2(*p_fast)))


def circle_intersections(c1: Circle, c2: Circle) -> Tuple[Point2, ...]:
    """Intersection points of two circles, sorted by ascending y (then x).

    The chord midpoint is found on the radical line by projecting onto the
    line of centers, so vertically aligned centers need no special branch.
    """
    rmax = max(c1.radius, c2.radius)
    dx = c2.center.x - c1.center.x
    dy = c2.center.y - c1.center.y
    d = math.hypot(dx, dy)
    tol = TANGENCY_TOL * rmax
    if d < tol:
        if abs(c1.radius - c2.radius) < tol:
            raise CoincidentCirclesError("circles are identical")
        return ()
    if d > c1.radius + c2.radius + tol or d < abs(c1.radius - c2.radius) - tol:
        return ()
    a = (c1.radius ** 2 - c2.radius ** 2 + d * d) / (2.0 * d)
    h2 = c1.radius ** 2 - a * a
    ux, uy = dx / d, dy / d
    mx, my = c1.center.x + a * ux, c1.center.y + a * uy
    if h2 <= (0.5 * tol) ** 2:
        return (Point2(mx, my),)
    h = math.sqrt(h2)
    pts = [Point2(mx - h * uy, my + h * ux), Point2(mx + h * uy, my - h * ux)]
    pts.sort(key=lambda p: (p.y, p.x))
    return tuple(pts)


def cooperative_lowest_point(p_a: Sequence[float], p_b: Sequence[float], e: Sequence[float],
                             alpha_a: float, alpha_b: float,
                             ids: Tuple[int, int] = (0, 1)) -> CapturePoint:
    """Lowest point of the intersection of the two Apollonius disks.

    Returns a solo capture when one disk's own lowest point already lies in
    the other disk (this covers containment), otherwise the lower crossing
    of the two circles with mode ``"simultaneous"``.
    """
    ca = apollonius_circle(p_a, e, alpha_a)
    cb = apollonius_circle(p_b, e, alpha_b)
    la = lowest_point(ca, ids[0])
    lb = lowest_point(cb, ids[1])
    try:
        pts = circle_intersections(ca, cb)
    except CoincidentCirclesError:
        return la
    tol = 1e-12 * max(ca.radius, cb.radius)
    if len(pts) < 2:
        # no proper crossing: the smaller disk sits inside the larger one
        return la if ca.radius <= cb.radius else lb
    in_b = cb.contains(la.point, tol)
    in_a = ca.contains(lb.point, tol)
    if in_b and in_a:
        return la if la.y <= lb.y else lb
    if in_b:
        return la
    if in_a:
        return lb
    return CapturePoint(pts[0], "simultaneous", (ids[0], ids[1]))


def closed_form_terms(p_i: Sequence[float], p_iprime: Sequence[float], e: Sequence[float],
                      alpha_i: float, alpha_iprime: float, alpha_pp: float) -> dict:
    """Intermediate scalars of the two-pursuer closed form.

    ``p_iprime`` is the faster pursuer and ``alpha_pp = v_i / v_iprime``.
    Returns the circle parameters together with F, G, D and R.
    """
    ci = apollonius_circle(p_i, e, alpha_i)
    cj = apollonius_circle(p_iprime, e, alpha_iprime)
    cp = pursuer_pair_circle(p_i, p_iprime, alpha_pp)
    xi, yi = ci.center
    xj, yj = cj.center
    xp, yp = cp.center
    dx, dy = xi - xj, yi - yj
    R = ci.radius ** 2 - cj.radius ** 2 - xi * xi + xj * xj - yi * yi + yj * yj
    D = dx * dx + dy * dy
    F = yp * dx * dx - dy * (R / 2.0 + xp * dx)
    G = cp.radius ** 2 * D - (R / 2.0 + xp * dx + yp * dy) ** 2
    return {"xi": xi, "yi": yi, "xj": xj, "yj": yj, "xp": xp, "yp": yp,
            "ri": ci.radius, "rj": cj.radius, "rp": cp.radius,
            "F": F, "G": G, "D": D, "R": R}


def vs_closed_form(p_i: Sequence[float], p_iprime: Sequence[float], e: Sequence[float],
                   alpha_i: float, alpha_iprime: float, alpha_pp: float) -> float:
    """Height of the simultaneous capture point from the F/G/D/R expression.

    Used as a cross-check of the direct two-circle intersection; it is not
    defined for equal pursuer speeds.
    """
    t = closed_form_terms(p_i, p_iprime, e, alpha_i, alpha_iprime, alpha_pp)
    scale = max(t["ri"], t["rj"], t["rp"])
    if t["D"] <= (ALIGNED_TOL * scale) ** 2:
        raise DegenerateConfigurationError("D vanishes: circle centers coincide")
    if t["G"] <= 1e-12 * t["rp"] ** 2 * t["D"]:
        raise DegenerateConfigurationError("G vanishes: both crossings at the same height")
    dx = t["xi"] - t["xj"]
    return (t["F"] - abs(dx) * math.sqrt(t["G"])) / t["D"]


def closed_form_aimpoint(p_i: Sequence[float], p_iprime: Sequence[float], e: Sequence[float],
                         alpha_i: float, alpha_iprime: float, alpha_pp: float) -> Point2:
    """Shared aimpoint of the closed form; x follows from the radical line."""
    t = closed_form_terms(p_i, p_iprime, e, alpha_i, alpha_iprime, alpha_pp)
    y = vs_closed_form(p_i, p_iprime, e, alpha_i, alpha_iprime, alpha_pp)
    scale = max(t["ri"], t["rj"])
    if abs(t["xj"] - t["xi"]) < ALIGNED_TOL * scale:
        raise DegenerateConfigurationError("vertically aligned centers; x is not determined by the radical line")
    x = (t["R"] - 2.0 * (t["yj"] - t["yi"]) * y) / (2.0 * (t["xj"] - t["xi"]))
    return Point2(x, y)


def lower_intersection_y(c1: Circle, c2: Circle) -> Optional[float]:
    pts = circle_intersections(c1, c2)
    return pts[0].y if pts else None
