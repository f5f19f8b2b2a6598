"""Convex hulls with exact volumes, concave envelopes, and concavity fitting.

Hulls of lattice sets are computed on integer corner coordinates, so volumes,
centroids, membership tests and hull excesses are exact rationals in any of
the supported dimensions.  Envelopes of real-valued grid functions lift the
graph to an integer lattice (values quantized at 2^-48) and take the upper
hull, which keeps every envelope evaluation a rational plane query, accurate
far below the tolerances used by the fitting diagnostics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ._hull import (
    hull_2d, hull_3d, hull_3d_centroid, hull_volume6, point_in_hull3d,
    point_in_polygon, polygon_area2, polygon_centroid, clip_polygon_box,
    polygon_area2_frac,
)
from .vset import LatticeSet

__all__ = [
    "Polytope", "GridFunction", "EnvelopeFit", "convex_hull", "hull_excess",
    "lattice_polytope_overlap", "concave_envelope", "four_point_residual",
    "concavity_fit", "linear_fit", "level_set_convexity_integral",
]

_LIFT_BITS = 48  # value quantization for lifted envelope hulls


# ---------------------------------------------------------------------------
# exact polytopes


@dataclass(frozen=True)
class Polytope:
    """Convex polytope with vertices on an integer lattice scaled by 1/scale."""
    dim: int
    scale: int
    verts: tuple                 # integer coordinate tuples
    faces: tuple = ()            # 3D: outward-oriented vertex index triples
    volume: Fraction = Fraction(0)

    @classmethod
    def from_rational_points(cls, points, dim=None) -> "Polytope":
        pts = [tuple(Fraction(x) for x in p) for p in points]
        if not pts:
            raise ValueError("polytope needs at least one point")
        if dim is None:
            dim = len(pts[0])
        L = 1
        for p in pts:
            for x in p:
                L = math.lcm(L, x.denominator)
        ipts = [tuple(int(x * L) for x in p) for p in pts]
        if dim == 1:
            lo = min(p[0] for p in ipts)
            hi = max(p[0] for p in ipts)
            return cls(1, L, ((lo,), (hi,)), (), Fraction(hi - lo, L))
        if dim == 2:
            h = hull_2d(ipts)
            vol = Fraction(polygon_area2(h), 2 * L * L)
            return cls(2, L, tuple(h), (), vol)
        verts, faces = hull_3d(ipts)
        vol = hull_volume6(verts, faces) / (6 * L ** 3)
        return cls(3, L, tuple(verts), tuple(faces), vol)

    @property
    def vertices(self) -> tuple:
        """Vertices in original coordinates, as Fraction tuples."""
        return tuple(tuple(Fraction(x, self.scale) for x in v) for v in self.verts)

    def contains(self, point) -> bool:
        p = tuple(Fraction(x) * self.scale for x in point)
        if self.dim == 1:
            return self.verts[0][0] <= p[0] <= self.verts[1][0]
        if self.dim == 2:
            return point_in_polygon(p, self.verts)
        if not self.faces:
            return False  # degenerate 3D hull: treated as volume 0, no interior
        return point_in_hull3d(p, self.verts, self.faces)

    def centroid(self) -> tuple:
        if self.dim == 1:
            return (Fraction(self.verts[0][0] + self.verts[1][0], 2 * self.scale),)
        if self.dim == 2:
            cx, cy = polygon_centroid(self.verts)
            return (cx / self.scale, cy / self.scale)
        cx, cy, cz = hull_3d_centroid(self.verts, self.faces)
        return (cx / self.scale, cy / self.scale, cz / self.scale)

    def translate(self, v) -> "Polytope":
        v = tuple(Fraction(x) for x in v)
        L = self.scale
        for x in v:
            L = math.lcm(L, x.denominator)
        k = L // self.scale
        verts = tuple(tuple(c * k + int(x * L) for c, x in zip(vert, v))
                      for vert in self.verts)
        return Polytope(self.dim, L, verts, self.faces, self.volume)

    def scale_about(self, center, factor) -> "Polytope":
        """Dilation x -> center + factor*(x - center), factor a rational > 0."""
        f = Fraction(factor)
        c = tuple(Fraction(x) for x in center)
        new_pts = []
        for vert in self.vertices:
            new_pts.append(tuple(ci + f * (xi - ci) for ci, xi in zip(c, vert)))
        L = 1
        for p in new_pts:
            for x in p:
                L = math.lcm(L, x.denominator)
        verts = tuple(tuple(int(x * L) for x in p) for p in new_pts)
        return Polytope(self.dim, L, verts, self.faces, self.volume * f ** self.dim)


def convex_hull(E: LatticeSet) -> Polytope:
    """Exact convex hull of all cell corners of a lattice set."""
    if E.is_empty():
        raise ValueError("convex_hull needs a nonempty set")
    corners = E.corner_points()
    pts = [tuple(Fraction(c, E.denom) for c in pt) for pt in corners]
    return Polytope.from_rational_points(pts, dim=E.dim)


def hull_excess(E: LatticeSet) -> Fraction:
    """volume(co E) - |E|, exact and always >= 0."""
    return convex_hull(E).volume - E.measure()


def lattice_polytope_overlap(E: LatticeSet, K: Polytope):
    """Certified bracket [lo, hi] for |E intersect K|.

    Exact (lo == hi) for dim <= 2 via polygon clipping against each cell.
    For dim 3 the bracket counts cells certified inside (all corners in K)
    against cells not certified disjoint (no face plane separates).
    """
    if E.dim != K.dim:
        raise ValueError("dimension mismatch")
    m = E.denom
    if E.dim == 1:
        lo = Fraction(K.verts[0][0], K.scale)
        hi = Fraction(K.verts[1][0], K.scale)
        total = Fraction(0)
        for (i,) in E.cells:
            a, b = max(lo, Fraction(i, m)), min(hi, Fraction(i + 1, m))
            if b > a:
                total += b - a
        return total, total
    if E.dim == 2:
        total = Fraction(0)
        hull = K.vertices
        for i, j in E.cells:
            poly = clip_polygon_box(
                hull, Fraction(i, m), Fraction(i + 1, m),
                Fraction(j, m), Fraction(j + 1, m))
            total += polygon_area2_frac(poly) / 2
        return total, total
    lo_cells = 0
    hi_cells = 0
    planes = _face_planes(K)
    for cell in E.cells:
        corners = [tuple(Fraction(cell[a] + o[a], m) for a in range(3))
                   for o in _CUBE_OFFS]
        if all(K.contains(c) for c in corners):
            lo_cells += 1
            hi_cells += 1
        elif not _separated(corners, planes):
            hi_cells += 1
    vol = Fraction(1, m ** 3)
    return lo_cells * vol, hi_cells * vol


_CUBE_OFFS = [(i, j, k) for i in (0, 1) for j in (0, 1) for k in (0, 1)]


def _face_planes(K: Polytope):
    """Outward plane (normal, offset) per face, in scaled integer coords."""
    planes = []
    for i, j, k in K.faces:
        a, b, c = K.verts[i], K.verts[j], K.verts[k]
        u = tuple(b[t] - a[t] for t in range(3))
        v = tuple(c[t] - a[t] for t in range(3))
        n = (u[1] * v[2] - u[2] * v[1],
             u[2] * v[0] - u[0] * v[2],
             u[0] * v[1] - u[1] * v[0])
        planes.append((n, sum(n[t] * a[t] for t in range(3))))
    return planes


def _separated(corners, planes):
    """True if some face plane certifies the cell disjoint from the hull."""
    for (n, d) in planes:
        if all(sum(n[t] * c[t] for t in range(3)) > d for c in corners):
            return True
    return False


# ---------------------------------------------------------------------------
# grid functions


@dataclass(frozen=True)
class GridFunction:
    """Real values on a finite set of (n-1)-dim lattice indices with pitch h."""
    base_dim: int
    spacing: Fraction
    points: tuple               # index tuples
    values: tuple               # floats
    bound: float = field(default=0.0)

    def __post_init__(self):
        pts = tuple(tuple(int(x) for x in p) for p in self.points)
        vals = tuple(float(v) for v in self.values)
        if len(pts) != len(vals):
            raise ValueError("points/values length mismatch")
        if len(set(pts)) != len(pts):
            raise ValueError("duplicate grid points")
        for p in pts:
            if len(p) != self.base_dim:
                raise ValueError("index arity mismatch")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "spacing", Fraction(self.spacing))
        bound = max((abs(v) for v in vals), default=0.0)
        object.__setattr__(self, "bound", max(float(self.bound), bound))

    def as_dict(self):
        return dict(zip(self.points, self.values))

    def coords(self, p):
        return tuple(float(self.spacing) * x for x in p)

    def cell_weight(self) -> float:
        return float(self.spacing) ** self.base_dim

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.base_dim, self.spacing, self.points, tuple(values))


# ---------------------------------------------------------------------------
# concave envelope


def concave_envelope(f: GridFunction) -> GridFunction:
    """Upper concave envelope of f on its grid, via the lifted upper hull.

    The returned function majorizes f (enforced exactly) and is minimal among
    concave grid majorants up to the 2^-48 lift quantization.
    """
    if not f.points:
        raise ValueError("empty domain")
    if len(f.points) <= 2:
        return f.with_values(f.values)
    if f.base_dim == 1:
        env = _envelope_1d([(p[0], v) for p, v in zip(f.points, f.values)])
    else:
        env = _envelope_2d(f)
    vals = [max(env[p], v) for p, v in zip(f.points, f.values)]
    return f.with_values(vals)


def _envelope_1d(pairs):
    """Upper concave chain over integer abscissae; exact rational interp."""
    pts = sorted((x, Fraction(v)) for x, v in pairs)
    chain = []
    for x, v in pts:
        while len(chain) >= 2:
            (x0, v0), (x1, v1) = chain[-2], chain[-1]
            # pop x1 if it lies below segment (x0 .. x)
            if (v1 - v0) * (x - x0) <= (v - v0) * (x1 - x0):
                chain.pop()
            else:
                break
        chain.append((x, v))
    out = {}
    ci = 0
    for x, _ in pts:
        while ci + 1 < len(chain) and chain[ci + 1][0] < x:
            ci += 1
        if chain[ci][0] == x:
            out[(x,)] = float(chain[ci][1])
        else:
            (x0, v0), (x1, v1) = chain[ci], chain[ci + 1]
            out[(x,)] = float(v0 + (v1 - v0) * Fraction(x - x0, x1 - x0))
    return out


def _collinear_axis(points):
    """If all index points are collinear, return a spread axis, else None."""
    p0 = points[0]
    d = None
    for p in points[1:]:
        v = tuple(p[a] - p0[a] for a in range(len(p0)))
        if any(v):
            d = v
            break
    if d is None:
        return 0
    for p in points[1:]:
        v = tuple(p[a] - p0[a] for a in range(len(p0)))
        if d[0] * v[1] - d[1] * v[0] != 0:
            return None
    return 0 if d[0] != 0 else 1


def _envelope_2d(f: GridFunction):
    axis = _collinear_axis(f.points)
    if axis is not None:
        env1 = _envelope_1d([(p[axis], v) for p, v in zip(f.points, f.values)])
        return {p: env1[(p[axis],)] for p in f.points}
    scale = 1 << _LIFT_BITS
    lifted = [(p[0], p[1], round(v * scale))
              for p, v in zip(f.points, f.values)]
    verts, faces = hull_3d(lifted)
    if not faces:  # coplanar lift: f is affine, envelope equals f
        return dict(zip(f.points, f.values))
    out = {}
    upper = []
    for i, j, k in faces:
        a, b, c = verts[i], verts[j], verts[k]
        u = (b[0] - a[0], b[1] - a[1], b[2] - a[2])
        w = (c[0] - a[0], c[1] - a[1], c[2] - a[2])
        n = (u[1] * w[2] - u[2] * w[1],
             u[2] * w[0] - u[0] * w[2],
             u[0] * w[1] - u[1] * w[0])
        if n[2] > 0:
            upper.append(((a, b, c), n))
    for p in f.points:
        val = None
        for (a, b, c), n in upper:
            if point_in_polygon(p, [(a[0], a[1]), (b[0], b[1]), (c[0], c[1])]) or \
               point_in_polygon(p, [(a[0], a[1]), (c[0], c[1]), (b[0], b[1])]):
                d = n[0] * a[0] + n[1] * a[1] + n[2] * a[2]
                z = Fraction(d - n[0] * p[0] - n[1] * p[1], n[2])
                val = float(z) / scale
                break
        if val is None:
            # numerically safe fallback: point on a vertical boundary facet
            val = max(float(v[2]) / scale for v in verts
                      if (v[0], v[1]) == p) if any(
                          (v[0], v[1]) == p for v in verts) else None
        if val is None:
            raise RuntimeError(f"grid point {p} not covered by an upper facet")
        out[p] = val
    return out


# ---------------------------------------------------------------------------
# residuals and fits


def four_point_residual(f: GridFunction, g: GridFunction, t) -> dict:
    """Worst 3-point and 4-point concavity violations over the shared grid.

    res3 scans t*f(y') + (1-t)*g(y'') <= [t*f + (1-t)*g](y) over admissible
    triples (y = t*y' + (1-t)*y'' also on the grid); res4 scans the induced
    4-point inequality for f alone with t' = 1/(2-t) (and with 1-t for g).
    Reports whether res4 <= (2/t)*res3 (respectively (2/(1-t))*res3).
    """
    t = Fraction(t)
    if not (0 < t < 1):
        raise ValueError("t must lie in (0,1)")
    if f.points != g.points or f.spacing != g.spacing:
        raise ValueError("f and g must share a grid")
    fd = f.as_dict()
    gd = g.as_dict()
    pts = f.points

    res3 = 0.0
    for y1 in pts:
        for y2 in pts:
            y = _combo(y1, y2, t)
            if y is None:
                continue
            fy = fd.get(y)
            if fy is None:
                continue
            viol = float(t) * fd[y1] + float(1 - t) * gd[y2] \
                - (float(t) * fy + float(1 - t) * gd[y])
            if viol > res3:
                res3 = viol

    res4_f = _four_point_scan(fd, pts, Fraction(1, 2 - t))
    res4_g = _four_point_scan(gd, pts, Fraction(1, 1 + t))
    return {
        "res3": res3,
        "res4_f": res4_f,
        "res4_g": res4_g,
        "bound_f": 2.0 / float(t) * res3,
        "bound_g": 2.0 / float(1 - t) * res3,
        "res4_f_within_bound": res4_f <= 2.0 / float(t) * res3 + 1e-12,
        "res4_g_within_bound": res4_g <= 2.0 / float(1 - t) * res3 + 1e-12,
    }


def _combo(y1, y2, w: Fraction):
    out = []
    for a, b in zip(y1, y2):
        v = w * a + (1 - w) * b
        if v.denominator != 1:
            return None
        out.append(int(v))
    return tuple(out)


def _four_point_scan(vals: dict, pts, t_prime: Fraction) -> float:
    worst = 0.0
    for y1 in pts:
        for y2 in pts:
            y12a = _combo(y1, y2, t_prime)
            y12b = _combo(y1, y2, 1 - t_prime)
            if y12a is None or y12b is None:
                continue
            va = vals.get(y12a)
            vb = vals.get(y12b)
            if va is None or vb is None:
                continue
            viol = vals[y1] + vals[y2] - va - vb
            if viol > worst:
                worst = viol
    return worst


def level_set_convexity_integral(psi: GridFunction, H=None):
    """Level integrals of hull excess inside H and of raw measure outside H.

    Superlevel sets are unions of grid cells; levels run over the attained
    value range, where the integrand is a step function, so the two integrals
    are finite sums.  H is a list of (lo, hi) level windows; None means all
    levels are in H.
    """
    w = psi.cell_weight()
    order = sorted(set(psi.values), reverse=True)
    if len(order) <= 1:
        return 0.0, 0.0
    pairs = sorted(zip(psi.values, psi.points), key=lambda q: -q[0])
    in_H = 0.0
    out_H = 0.0
    k = psi.base_dim
    idx = 0
    active = []
    for v_hi, v_lo in zip(order, order[1:]):
        while idx < len(pairs) and pairs[idx][0] >= v_hi:
            active.append(pairs[idx][1])
            idx += 1
        length = v_hi - v_lo
        mid = (v_hi + v_lo) / 2
        meas = len(active) * w
        if _level_in_H(mid, H):
            excess = _cell_hull_volume(active, k) * float(psi.spacing) ** k - meas
            in_H += excess * length
        else:
            out_H += meas * length
    return in_H, out_H


def _level_in_H(level, H) -> bool:
    if H is None:
        return True
    return any(lo <= level <= hi for lo, hi in H)


def _cell_hull_volume(cells, k) -> float:
    if k == 1:
        lo = min(c[0] for c in cells)
        hi = max(c[0] for c in cells) + 1
        return float(hi - lo)
    corners = set()
    for c in cells:
        for o in ((0, 0), (0, 1), (1, 0), (1, 1)):
            corners.add((c[0] + o[0], c[1] + o[1]))
    return polygon_area2(hull_2d(corners)) / 2.0


@dataclass(frozen=True)
class EnvelopeFit:
    sigma: float
    varsigma: float
    tau: Fraction
    t_prime: Fraction
    t_dprime: Fraction
    beta_internal: float       # exponent used by the construction
    gamma: float               # truncation exponent (beta_internal / 2)
    beta_target: float         # tau / (16 (n-1) |log tau|), the headline rate
    level_h: float             # truncation level actually used
    Phi: GridFunction          # concave majorant of the penalized profile
    Psi: GridFunction          # final fitted function on the original scale
    l1_error: float
    diagnostics: dict

    @property
    def calibration_constant(self):
        base = (self.sigma + self.varsigma) ** self.beta_target * max(
            self.diagnostics["Mhat"], 1e-300)
        if base == 0:
            return None
        return self.l1_error / base


def concavity_fit(psi: GridFunction, sigma, varsigma, tau, t_prime=None,
                  H=None) -> EnvelopeFit:
    """Constructive concave fitting of an almost-concave grid function.

    Runs the quadratic-penalty + level-truncation + concave-envelope pipeline
    literally: psi is rescaled to |psi| <= 1, penalized by
    20*(sigma+varsigma)^beta * |y|^2, truncated at the smallest level whose
    superlevel measure drops to (sigma+varsigma)^gamma (gamma = beta/2), and
    the concave envelope of the result, shifted back, is returned with its
    measured L1 distance from psi.  Constants are reported as calibration
    outputs, never asserted; at desk-scale noise the quadratic penalty can
    dominate, which the diagnostics record (range_ok).
    """
    tau = Fraction(tau)
    if not (0 < tau <= Fraction(1, 2)):
        raise ValueError("tau must lie in (0, 1/2]")
    if not psi.points:
        raise ValueError("empty domain")
    sigma = float(sigma)
    varsigma = float(varsigma)
    if t_prime is None:
        t_prime = Fraction(1, 2 - tau)
    t_prime = Fraction(t_prime)
    n_minus_1 = psi.base_dim
    n = n_minus_1 + 1

    Mhat = max(psi.bound, 1.0)
    scaled = [v / Mhat for v in psi.values]

    log_tau = abs(math.log(float(tau)))
    beta = min(math.log(2) / 3, abs(math.log(1 - float(tau) / 2)) / 4) \
        / (n_minus_1 * abs(math.log(float(tau) / 2)))
    gamma = beta / 2
    beta_target = float(tau) / (16 * n_minus_1 * log_tau)

    s = sigma + varsigma
    penalty = 20.0 * s ** beta if s > 0 else 0.0
    phi = []
    for p, v in zip(psi.points, scaled):
        y = psi.coords(p)
        phi.append(v + 2.0 - penalty * sum(c * c for c in y))

    w = psi.cell_weight()
    target = s ** gamma if s > 0 else 0.0
    level_h = _truncation_level(phi, w, target)
    phi_bar = [min(v, level_h) for v in phi]

    Phi = concave_envelope(psi.with_values(phi_bar))
    Psi_vals = [(v - 2.0) * Mhat for v in Phi.values]
    Psi = psi.with_values(Psi_vals)

    l1 = sum(abs(a - b) for a, b in zip(Psi_vals, psi.values)) * w

    contact = sum(1 for a, b in zip(Phi.values, phi_bar) if a <= b + 1e-9)
    in_H, out_H = level_set_convexity_integral(psi, H)
    res4 = _four_point_scan(psi.as_dict(), psi.points, t_prime)
    diagnostics = {
        "Mhat": Mhat,
        "penalty_coefficient": penalty,
        "contact_density": contact / len(psi.points),
        "level_excess_in_H": in_H,
        "level_mass_out_H": out_H,
        "four_point_res4": res4,
        "range_ok": all(-2 * Mhat - 1e-9 <= v <= 2 * Mhat + 1e-9 for v in Psi_vals),
        "roundness": _domain_roundness(psi),
    }
    return EnvelopeFit(
        sigma=sigma, varsigma=varsigma, tau=tau,
        t_prime=t_prime, t_dprime=1 - t_prime,
        beta_internal=beta, gamma=gamma, beta_target=beta_target,
        level_h=level_h, Phi=Phi, Psi=Psi, l1_error=l1,
        diagnostics=diagnostics,
    )


def _truncation_level(phi, w, target) -> float:
    """Smallest level u >= 0 whose strict superlevel measure is <= target."""
    vals = sorted(phi, reverse=True)
    k_max = int(target / w)  # measure k*w <= target  <=>  k <= target/w
    if k_max >= len(vals):
        return 0.0
    return max(vals[k_max], 0.0)


def _domain_roundness(psi: GridFunction) -> dict:
    """Inradius/outradius of co(F) about the origin (diagnostic only)."""
    h = float(psi.spacing)
    if psi.base_dim == 1:
        xs = [p[0] * h for p in psi.points]
        r_out = max(abs(min(xs)), abs(max(xs)))
        r_in = min(abs(min(xs)), abs(max(xs))) if min(xs) < 0 < max(xs) else 0.0
        return {"r_in": r_in, "r_out": r_out}
    hull = hull_2d([p for p in psi.points])
    if len(hull) < 3:
        return {"r_in": 0.0, "r_out": 0.0}
    r_out = max(math.hypot(p[0] * h, p[1] * h) for p in hull)
    r_in = None
    inside = point_in_polygon((0, 0), hull)
    for i in range(len(hull)):
        a, b = hull[i], hull[(i + 1) % len(hull)]
        dx, dy = b[0] - a[0], b[1] - a[1]
        nrm = math.hypot(dx, dy)
        if nrm == 0:
            continue
        dist = abs(dx * (-a[1]) - dy * (-a[0])) / nrm * h
        r_in = dist if r_in is None else min(r_in, dist)
    return {"r_in": (r_in or 0.0) if inside else 0.0, "r_out": r_out}


def linear_fit(f: GridFunction, m1, m2, t_prime=None) -> dict:
    """Endpoint-anchored affine fit on a 1D grid function.

    The line passes through (m1, f(m1)) and (m2, f(m2)); returns the sup
    deviation over the window [m1, m2] and over the whole domain.  When
    t_prime is given, the 4-point residual of f at that weight is reported
    alongside (the hypothesis under which the bounded deviation is expected).
    """
    if f.base_dim != 1:
        raise ValueError("linear_fit needs a 1D grid function")
    m1, m2 = Fraction(m1), Fraction(m2)
    if m2 <= m1:
        raise ValueError("need m1 < m2")
    vals = {Fraction(p[0]) * f.spacing: v for p, v in zip(f.points, f.values)}
    if m1 not in vals or m2 not in vals:
        raise ValueError("anchor points must belong to the domain")
    v1, v2 = vals[m1], vals[m2]
    slope = (v2 - v1) / float(m2 - m1)

    def ell(x: Fraction) -> float:
        return v1 + slope * float(x - m1)

    sup_window = 0.0
    sup_all = 0.0
    for x, v in vals.items():
        d = abs(v - ell(x))
        sup_all = max(sup_all, d)
        if m1 <= x <= m2:
            sup_window = max(sup_window, d)
    out = {
        "slope": slope,
        "value_at_m1": v1,
        "value_at_m2": v2,
        "sup_dev": sup_window,
        "sup_dev_all": sup_all,
        "anchored": ell(m1) == v1 and abs(ell(m2) - v2) < 1e-12,
    }
    if t_prime is not None:
        out["four_point_res4"] = _four_point_scan(
            f.as_dict(), f.points, Fraction(t_prime))
    return out
