"""Geometry of attainable mean-value regions in the unit disc.

A SetSpec describes a closed target set S containing 1 (finite points, a
real interval, roots of unity, or the angular sector pinched at 1) together
with its convex hull and its opening angle at 1.  The module samples the
spiral family exp(-k(1-alpha)) over the hull, evaluates the explicit
inscribed-disc radii, traces the attainable boundary contour for the
symmetric three-point set of a given angle, builds the product region that
bounds the logarithmic spectrum, and verifies disc, projection, and spiral
envelope containments on sampled point clouds.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .kernels import DISC_TOL, SQRT_E, StepFunction

#: Collinearity band for the orientation predicates.
GEOM_EPS = 1e-12

#: Disc containment constant: the spectrum of a set with angle theta lies in
#: the disc centred at DISC_COEFF * cos^2(theta) of radius 1 - centre.
DISC_COEFF = 28.0 / 411.0

#: Projection bound constant: projections onto set elements stay below
#: 1 - PROJ_COEFF * cos^2(theta).
PROJ_COEFF = 56.0 / 411.0


def _cross(o: complex, a: complex, b: complex) -> float:
    return (a.real - o.real) * (b.imag - o.imag) - (a.imag - o.imag) * (b.real - o.real)


def convex_hull(points, eps: float = GEOM_EPS):
    """Monotone-chain convex hull, counterclockwise, degenerate-safe.

    Returns one point for a single-point cloud and the two extreme points
    for a collinear one.
    """
    pts = sorted(set((complex(p).real, complex(p).imag) for p in points))
    pts = [complex(x, y) for x, y in pts]
    if len(pts) <= 2:
        return pts
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= eps:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= eps:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # fully collinear input collapses the chains
        return [pts[0], pts[-1]]
    return hull


def _segment_distance(z: complex, a: complex, b: complex) -> float:
    ab = b - a
    denom = abs(ab) ** 2
    if denom == 0.0:
        return abs(z - a)
    t = max(0.0, min(1.0, ((z - a).real * ab.real + (z - a).imag * ab.imag) / denom))
    return abs(z - (a + t * ab))


def point_in_polygon(z: complex, poly, eps: float = GEOM_EPS) -> bool:
    """Even-odd containment with an eps-wide boundary band counted inside."""
    poly = [complex(p) for p in poly]
    if len(poly) == 1:
        return abs(z - poly[0]) <= eps
    if len(poly) == 2:
        return _segment_distance(z, poly[0], poly[1]) <= eps
    for a, b in zip(poly, poly[1:] + poly[:1]):
        if _segment_distance(z, a, b) <= eps:
            return True
    inside = False
    x, y = z.real, z.imag
    for a, b in zip(poly, poly[1:] + poly[:1]):
        if (a.imag > y) != (b.imag > y):
            x_cross = a.real + (y - a.imag) * (b.real - a.real) / (b.imag - a.imag)
            if x_cross > x:
                inside = not inside
    return inside


def hausdorff_distance(points_a, points_b) -> float:
    """Symmetric Hausdorff distance between two finite point clouds."""
    a = np.asarray([complex(p) for p in points_a])
    b = np.asarray([complex(p) for p in points_b])
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _interior_lattice(poly, cap: int = 200):
    """Deterministic triangular lattice of at most cap points inside poly."""
    poly = [complex(p) for p in poly]
    if len(poly) < 3:
        return []
    xs = [p.real for p in poly]
    ys = [p.imag for p in poly]
    width = max(xs) - min(xs)
    height = max(ys) - min(ys)
    span = max(width, height)
    if span <= 0:
        return []
    spacing = span / 14.0
    while True:
        pts = []
        ny = int(height / (spacing * math.sqrt(3) / 2)) + 2
        nx = int(width / spacing) + 2
        for iy in range(ny):
            y = min(ys) + iy * spacing * math.sqrt(3) / 2
            offset = 0.5 * spacing if iy % 2 else 0.0
            for ix in range(nx):
                z = complex(min(xs) + offset + ix * spacing, y)
                if point_in_polygon(z, poly, eps=1e-9):
                    pts.append(z)
        if len(pts) <= cap:
            return pts
        spacing *= 1.5


@dataclass(frozen=True)
class SetSpec:
    """A closed subset of the unit disc containing 1, with hull and angle."""

    kind: str
    generators: tuple
    hull: tuple
    angle: float
    label: str = ""

    def __post_init__(self):
        for p in self.generators:
            if abs(p) > 1.0 + DISC_TOL:
                raise ValidationError(f"set point {p} outside the closed unit disc")
        if min(abs(p - 1.0) for p in self.generators) > DISC_TOL:
            raise ValidationError("the set must contain 1")

    @staticmethod
    def _angle_of(points) -> float:
        best = 0.0
        for p in points:
            if abs(p - 1.0) <= 1e-14:
                continue
            best = max(best, abs(cmath.phase(1.0 - p)))
        return best

    @classmethod
    def from_points(cls, points, label: str = "") -> "SetSpec":
        pts = tuple(complex(p) for p in points)
        hull = tuple(convex_hull(pts))
        return cls("points", pts, hull, cls._angle_of(pts), label or "points")

    @classmethod
    def real_interval(cls, lo: float = -1.0, hi: float = 1.0) -> "SetSpec":
        if not (-1.0 <= lo < hi <= 1.0):
            raise ValidationError("interval must satisfy -1 <= lo < hi <= 1")
        if hi != 1.0:
            raise ValidationError("the interval must contain 1")
        gens = (complex(lo), complex(hi))
        return cls("real-interval", gens, gens, 0.0, f"[{lo},{hi}]")

    @classmethod
    def roots_of_unity(cls, k: int) -> "SetSpec":
        if k < 1:
            raise ValidationError("k must be positive")
        pts = tuple(cmath.exp(2j * math.pi * j / k) for j in range(k))
        hull = tuple(convex_hull(pts))
        return cls("roots-of-unity", pts, hull, cls._angle_of(pts), f"roots:{k}")

    @classmethod
    def sector(cls, theta: float, arc_points: int = 64) -> "SetSpec":
        """All z in the disc with |arg(1-z)| <= theta (plus z = 1)."""
        if not (0.0 < theta < math.pi / 2):
            raise ValidationError("sector angle must lie in (0, pi/2)")
        phis = np.linspace(math.pi - 2 * theta, math.pi + 2 * theta, arc_points)
        gens = (1.0 + 0.0j,) + tuple(cmath.exp(1j * p) for p in phis)
        hull = tuple(convex_hull(gens))
        return cls("sector", gens, hull, theta, f"sector:{theta}")

    def on_unit_circle(self) -> bool:
        return all(abs(abs(p) - 1.0) <= 1e-9 for p in self.generators)


def ang(target) -> float:
    """Opening angle at 1: sup of |arg(1-v)| over the points of the input.

    Accepts a complex number, a SetSpec, or a RegionCloud; by convention the
    angle of {1} is 0.
    """
    if isinstance(target, SetSpec):
        return target.angle
    if isinstance(target, RegionCloud):
        return SetSpec._angle_of(target.points)
    z = complex(target)
    if abs(z) > 1.0 + DISC_TOL:
        raise ValidationError(f"point {z} outside the closed unit disc")
    if abs(z - 1.0) <= 1e-14:
        return 0.0
    return abs(cmath.phase(1.0 - z))


@dataclass(frozen=True)
class RegionCloud:
    """A finite sample of a region of the unit disc."""

    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.points, dtype=np.complex128)
        if np.any(np.abs(arr) > 1.0 + DISC_TOL):
            worst = float(np.max(np.abs(arr)))
            raise ValidationError(f"cloud escapes the unit disc: max |z| = {worst}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "points", arr)

    def __len__(self) -> int:
        return len(self.points)


def euler_spiral_cloud(S: SetSpec, k_max: float = 8.0, n_alpha: int = 40,
                       n_k: int = 50) -> RegionCloud:
    """Sample of the spirals exp(-k(1-alpha)) over the hull of S.

    alpha runs over the hull vertices, boundary subdivisions, and a bounded
    interior lattice; k over [0, k_max].  When S has points off the real
    axis the two extreme-angle spirals are traced over a full revolution
    together with the real segment closing each loop.
    """
    hull = [complex(p) for p in S.hull]
    alphas = list(hull)
    if len(hull) >= 2:
        per_edge = max(1, n_alpha // max(1, len(hull)))
        for a, b in zip(hull, hull[1:] + hull[:1]):
            for t in np.linspace(0.0, 1.0, per_edge + 2)[1:-1]:
                alphas.append(a + t * (b - a))
    alphas.extend(_interior_lattice(hull))
    ks = np.linspace(0.0, k_max, n_k)
    alpha_arr = np.asarray(alphas, dtype=np.complex128)
    pts = np.exp(-np.outer(ks, 1.0 - alpha_arr)).ravel()

    extras = []
    for side in (1.0, -1.0):
        candidates = [p for p in S.generators if side * p.imag > 1e-12]
        if not candidates:
            continue
        z_star = max(candidates, key=lambda p: abs(cmath.phase(1.0 - p)))
        k_full = 2.0 * math.pi / abs(z_star.imag)
        extras.append(np.exp(-np.linspace(0.0, k_full, n_k) * (1.0 - z_star)))
        r_end = math.exp(-2.0 * math.pi * (1.0 - z_star.real) / abs(z_star.imag))
        extras.append(np.linspace(r_end, 1.0, n_k).astype(np.complex128))
    if extras:
        pts = np.concatenate([pts] + extras)
    return RegionCloud(pts, {"kind": "euler-spirals", "set": S.label,
                             "k_max": k_max})


def special_radii(spec: dict) -> float:
    """Guaranteed inscribed-disc radius around 0 for two explicit families.

    ``{"kind": "sk", "k": k}`` gives exp(-pi tan(pi/k)) for the k-th roots
    of unity (k >= 3); ``{"kind": "two-angles", "alpha": a, "beta": b}``
    gives exp(-2 pi / |cot(a/2) - cot(b/2)|) when 1, e^{ia}, e^{ib} are
    distinct points of the set.
    """
    kind = spec.get("kind")
    if kind == "sk":
        k = spec.get("k")
        if not isinstance(k, int) or k < 3:
            raise ValidationError("sk radius needs an integer k >= 3")
        return math.exp(-math.pi * math.tan(math.pi / k))
    if kind == "two-angles":
        a, b = float(spec["alpha"]), float(spec["beta"])
        for t in (a, b):
            if abs(math.sin(t / 2.0)) < 1e-12:
                raise ValidationError("angles must be nonzero mod 2*pi")
        denom = abs(1.0 / math.tan(a / 2.0) - 1.0 / math.tan(b / 2.0))
        if denom < 1e-12:
            raise ValidationError("degenerate pair: cot(alpha/2) = cot(beta/2)")
        return math.exp(-2.0 * math.pi / denom)
    raise ValidationError(f"unknown radius family {kind!r}")


def _contour_inner_integral(u: float) -> float:
    """int_1^{u-1} log(u-t)/t dt by adaptive quadrature (abs err <= 1e-9)."""
    from scipy.integrate import quad
    if u <= 2.0:
        return 0.0
    val, _ = quad(lambda t: math.log(u - t) / t, 1.0, u - 1.0,
                  epsabs=1e-10, epsrel=1e-10, limit=200)
    return val


def sector_set_contour(theta: float, n: int = 120) -> RegionCloud:
    """Closed attainable boundary for the set {1, alpha, conj(alpha)}.

    alpha = exp(i(pi - 2 theta)) has opening angle theta at 1.  The upper
    half consists of the straight piece 1 - (1-alpha) log u for u in [1, 2],
    the corrected contour on [2, 1+sqrt(e)], and the spiral
    c(1+sqrt(e)) e^{-t(1-alpha)} until it meets the real axis; the lower
    half is the complex conjugate, and the points are ordered around the
    loop.
    """
    if not (0.0 < theta < math.pi / 2):
        raise ValidationError("theta must lie in (0, pi/2)")
    alpha = cmath.exp(1j * (math.pi - 2.0 * theta))
    w = 1.0 - alpha
    us1 = np.linspace(1.0, 2.0, n)
    seg = 1.0 - w * np.log(us1)
    us2 = np.linspace(2.0, 1.0 + SQRT_E, n)[1:]
    arc = np.array([1.0 - w * math.log(u) + 0.5 * w * w * _contour_inner_integral(u)
                    for u in us2])
    z_end = arc[-1]
    # Spiral until the imaginary part first crosses zero, with the crossing
    # interpolated linearly in the spiral parameter.
    t_step = min(0.02, math.pi / (64.0 * abs(w.imag))) if w.imag else 0.02
    spiral = []
    t = 0.0
    prev = z_end
    for _ in range(200000):
        t += t_step
        cur = z_end * cmath.exp(-t * w)
        if prev.imag != 0 and (cur.imag == 0 or (cur.imag > 0) != (prev.imag > 0)):
            frac = prev.imag / (prev.imag - cur.imag)
            spiral.append(prev + frac * (cur - prev))
            break
        spiral.append(cur)
        prev = cur
    upper = np.concatenate([seg, arc, np.asarray(spiral, dtype=np.complex128)])
    lower = np.conjugate(upper[::-1])
    pts = np.concatenate([upper, lower[1:-1]])
    return RegionCloud(pts, {"kind": "sector-contour", "theta": theta,
                             "alpha": alpha, "closed": True})


def log_spectrum_products(S: SetSpec, depth: int, max_points: int = 200000) -> np.ndarray:
    """All distinct products of (1+s)/2 over hull samples, lengths <= depth."""
    if depth < 1:
        raise ValidationError("depth must be at least 1")
    hull = [complex(p) for p in S.hull]
    gens = list(hull)
    if len(hull) >= 2:
        gens += [0.5 * (a + b) for a, b in zip(hull, hull[1:] + hull[:1])]
        gens.append(sum(hull) / len(hull))
    factors = np.unique(np.round(np.asarray([(1.0 + g) / 2.0 for g in gens]), 12))
    level = np.array([1.0 + 0.0j])
    collected = [level]
    for _ in range(depth):
        level = np.unique(np.round(np.outer(level, factors).ravel(), 12))
        collected.append(level)
        if sum(len(c) for c in collected) > max_points:
            break
    return np.unique(np.concatenate(collected))


def log_spectrum_region(S: SetSpec, depth: int):
    """Convex polygon (ccw vertices) bounding the logarithmic spectrum of S."""
    return tuple(convex_hull(log_spectrum_products(S, depth)))


def containment_report(cloud: RegionCloud, S: SetSpec,
                       *, log_products: bool = False, tol: float = 1e-9) -> dict:
    """Verify the disc, projection, and spiral-envelope containments.

    Returns a report with per-check violation lists (never raises).  The
    disc check needs angle(S) < pi/2; the projection check runs only when S
    lies on the unit circle; the spiral envelope |z| <= cos(d)^(|arg z|/d),
    d = pi/2 - angle, applies to product clouds for the logarithmic
    spectrum.
    """
    theta = S.angle
    pts = cloud.points
    report = {
        "n_points": int(len(pts)),
        "set": S.label,
        "angle": theta,
        "checks_run": [],
        "disc_violations": [],
        "projection_violations": [],
        "envelope_violations": [],
    }
    if theta < math.pi / 2:
        centre = DISC_COEFF * math.cos(theta) ** 2
        report["disc_center"] = centre
        # Upper bound on the best possible centre, reported for context only.
        report["disc_center_cap"] = (0.5 * (1.0 - math.exp(-math.pi / math.tan(theta)))
                                     if theta > 0 else 0.5)
        report["checks_run"].append("disc")
        bad = np.abs(pts - centre) > (1.0 - centre) + tol
        report["disc_violations"] = [complex(z) for z in pts[bad]]
    if S.on_unit_circle():
        bound = 1.0 - PROJ_COEFF * math.cos(theta) ** 2
        report["projection_bound"] = bound
        report["checks_run"].append("projection")
        for zeta in S.generators:
            if abs(zeta - 1.0) <= 1e-12:
                continue
            proj = (np.conjugate(zeta) * pts).real
            bad = proj > bound + tol
            report["projection_violations"].extend(
                (complex(zeta), complex(z)) for z in pts[bad])
    if log_products and 0.0 < theta < math.pi / 2:
        delta = math.pi / 2 - theta
        report["checks_run"].append("envelope")
        mod = np.abs(pts)
        cap = math.cos(delta) ** (np.abs(np.angle(pts)) / delta)
        bad = mod > cap + tol
        report["envelope_violations"] = [complex(z) for z in pts[bad]]
    report["total_violations"] = (len(report["disc_violations"])
                                  + len(report["projection_violations"])
                                  + len(report["envelope_violations"]))
    return report


def kernel_in_hull(chi: StepFunction, S: SetSpec, tol: float = 1e-12) -> None:
    """Raise unless every kernel value lies in the convex hull of S."""
    for v in chi.segment_values():
        if not point_in_polygon(v, S.hull, eps=tol):
            raise ValidationError(f"kernel value {v} outside the hull of {S.label}")
