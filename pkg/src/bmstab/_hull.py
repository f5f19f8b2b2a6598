"""Exact convex hull primitives over integer and rational coordinates.

Everything here is branch-exact: orientation predicates are signs of integer
(or Fraction) determinants, so hulls, volumes, centroids and membership tests
carry no floating-point error.  2D hulls use the monotone chain; 3D hulls use
an incremental algorithm with exact visibility tests.  Inputs are sequences
of coordinate tuples; integer coordinates keep everything fast.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = [
    "hull_2d", "polygon_area2", "polygon_centroid", "point_in_polygon",
    "clip_polygon_box", "polygon_area2_frac",
    "hull_3d", "hull_volume6", "hull_3d_centroid", "point_in_hull3d",
]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_2d(points):
    """Convex hull of 2D points, CCW vertex list (collinear points dropped).

    Degenerate inputs return the reduced hull: a single point or a segment.
    """
    pts = sorted(set(map(tuple, points)))
    if len(pts) <= 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:  # all collinear
        return [pts[0], pts[-1]]
    return hull


def polygon_area2(hull) -> int:
    """Twice the (positive) area of a CCW polygon, exact."""
    if len(hull) < 3:
        return 0
    s = 0
    for i in range(len(hull)):
        x0, y0 = hull[i]
        x1, y1 = hull[(i + 1) % len(hull)]
        s += x0 * y1 - x1 * y0
    return s


def polygon_area2_frac(hull) -> Fraction:
    if len(hull) < 3:
        return Fraction(0)
    s = Fraction(0)
    for i in range(len(hull)):
        x0, y0 = hull[i]
        x1, y1 = hull[(i + 1) % len(hull)]
        s += Fraction(x0) * Fraction(y1) - Fraction(x1) * Fraction(y0)
    return s


def polygon_centroid(hull):
    """Centroid of a CCW polygon with nonzero area, as exact Fractions."""
    a2 = polygon_area2_frac(hull)
    if a2 == 0:
        xs = [Fraction(p[0]) for p in hull]
        ys = [Fraction(p[1]) for p in hull]
        return sum(xs) / len(xs), sum(ys) / len(ys)
    cx = Fraction(0)
    cy = Fraction(0)
    for i in range(len(hull)):
        x0, y0 = hull[i]
        x1, y1 = hull[(i + 1) % len(hull)]
        w = Fraction(x0) * y1 - Fraction(x1) * y0
        cx += (x0 + x1) * w
        cy += (y0 + y1) * w
    return cx / (3 * a2), cy / (3 * a2)


def point_in_polygon(p, hull) -> bool:
    """Point in (or on the boundary of) a CCW convex polygon, exact."""
    n = len(hull)
    if n == 0:
        return False
    if n == 1:
        return tuple(p) == tuple(hull[0])
    if n == 2:
        a, b = hull
        if _cross(a, b, p) != 0:
            return False
        return (min(a[0], b[0]) <= p[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= p[1] <= max(a[1], b[1]))
    for i in range(n):
        if _cross(hull[i], hull[(i + 1) % n], p) < 0:
            return False
    return True


def clip_polygon_box(hull, xlo, xhi, ylo, yhi):
    """Intersect a convex polygon with an axis box; vertices become Fractions."""
    poly = [(Fraction(x), Fraction(y)) for x, y in hull]
    for coord, bound, keep_le in ((0, xhi, True), (0, xlo, False),
                                  (1, yhi, True), (1, ylo, False)):
        if not poly:
            return []
        out = []
        m = len(poly)
        for i in range(m):
            cur, nxt = poly[i], poly[(i + 1) % m]
            cin = (cur[coord] <= bound) if keep_le else (cur[coord] >= bound)
            nin = (nxt[coord] <= bound) if keep_le else (nxt[coord] >= bound)
            if cin:
                out.append(cur)
            if cin != nin:
                t = (bound - cur[coord]) / (nxt[coord] - cur[coord])
                out.append((cur[0] + t * (nxt[0] - cur[0]),
                            cur[1] + t * (nxt[1] - cur[1])))
        poly = out
    return poly


# ---------------------------------------------------------------------------
# 3D


def _orient3d(a, b, c, d):
    """Sign of det[b-a; c-a; d-a]: > 0 when d is on the positive side of abc."""
    adx, ady, adz = b[0] - a[0], b[1] - a[1], b[2] - a[2]
    bdx, bdy, bdz = c[0] - a[0], c[1] - a[1], c[2] - a[2]
    cdx, cdy, cdz = d[0] - a[0], d[1] - a[1], d[2] - a[2]
    det = (adx * (bdy * cdz - bdz * cdy)
           - ady * (bdx * cdz - bdz * cdx)
           + adz * (bdx * cdy - bdy * cdx))
    return (det > 0) - (det < 0)


def hull_3d(points):
    """Exact incremental convex hull in 3D.

    Returns (vertices, faces) where faces are index triples oriented outward.
    Degenerate input (affine dimension < 3) returns (reduced_points, []).
    """
    pts = sorted(set(map(tuple, points)))
    if len(pts) < 4:
        return pts, []

    # Seed simplex: first two distinct points, then a non-collinear point,
    # then a non-coplanar point.
    p0, p1 = pts[0], pts[1]
    p2 = None
    for q in pts[2:]:
        ux, uy, uz = p1[0] - p0[0], p1[1] - p0[1], p1[2] - p0[2]
        vx, vy, vz = q[0] - p0[0], q[1] - p0[1], q[2] - p0[2]
        if (uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx) != (0, 0, 0):
            p2 = q
            break
    if p2 is None:
        return [pts[0], pts[-1]], []
    p3 = None
    for q in pts:
        if _orient3d(p0, p1, p2, q) != 0:
            p3 = q
            break
    if p3 is None:
        # Coplanar point cloud: reduce to the planar hull, no volume.
        return pts, []

    verts = [p0, p1, p2, p3]
    if _orient3d(p0, p1, p2, p3) > 0:
        faces = [(0, 2, 1), (0, 1, 3), (1, 2, 3), (2, 0, 3)]
    else:
        faces = [(0, 1, 2), (0, 3, 1), (1, 3, 2), (2, 3, 0)]

    index = {v: i for i, v in enumerate(verts)}
    for q in pts:
        if q in index:
            continue
        visible = []
        for fi, (i, j, k) in enumerate(faces):
            if _orient3d(verts[i], verts[j], verts[k], q) > 0:
                visible.append(fi)
        if not visible:
            continue
        visible_set = set(visible)
        # Horizon: directed edges of visible faces whose reverse edge belongs
        # to a hidden face.
        edge_owner = {}
        for fi in visible:
            i, j, k = faces[fi]
            for e in ((i, j), (j, k), (k, i)):
                edge_owner[e] = fi
        horizon = []
        for (i, j) in edge_owner:
            if (j, i) not in edge_owner:
                horizon.append((i, j))
        faces = [f for fi, f in enumerate(faces) if fi not in visible_set]
        qi = len(verts)
        verts.append(q)
        index[q] = qi
        for (i, j) in horizon:
            faces.append((i, j, qi))

    used = sorted({i for f in faces for i in f})
    remap = {old: new for new, old in enumerate(used)}
    verts_out = [verts[i] for i in used]
    faces_out = [(remap[i], remap[j], remap[k]) for i, j, k in faces]
    return verts_out, faces_out


def hull_volume6(verts, faces) -> Fraction:
    """Six times the volume enclosed by outward-oriented faces, exact."""
    if not faces:
        return Fraction(0)
    total = Fraction(0)
    for i, j, k in faces:
        a, b, c = verts[i], verts[j], verts[k]
        det = (Fraction(a[0]) * (Fraction(b[1]) * c[2] - Fraction(b[2]) * c[1])
               - Fraction(a[1]) * (Fraction(b[0]) * c[2] - Fraction(b[2]) * c[0])
               + Fraction(a[2]) * (Fraction(b[0]) * c[1] - Fraction(b[1]) * c[0]))
        total += det
    return abs(total)


def hull_3d_centroid(verts, faces):
    """Centroid of the enclosed solid, exact Fractions (needs volume > 0)."""
    vol6 = Fraction(0)
    cx = cy = cz = Fraction(0)
    for i, j, k in faces:
        a, b, c = verts[i], verts[j], verts[k]
        det = (Fraction(a[0]) * (Fraction(b[1]) * c[2] - Fraction(b[2]) * c[1])
               - Fraction(a[1]) * (Fraction(b[0]) * c[2] - Fraction(b[2]) * c[0])
               + Fraction(a[2]) * (Fraction(b[0]) * c[1] - Fraction(b[1]) * c[0]))
        vol6 += det
        cx += det * (a[0] + b[0] + c[0])
        cy += det * (a[1] + b[1] + c[1])
        cz += det * (a[2] + b[2] + c[2])
    if vol6 == 0:
        xs = [Fraction(v[0]) for v in verts]
        ys = [Fraction(v[1]) for v in verts]
        zs = [Fraction(v[2]) for v in verts]
        n = len(verts)
        return sum(xs) / n, sum(ys) / n, sum(zs) / n
    return cx / (4 * vol6), cy / (4 * vol6), cz / (4 * vol6)


def point_in_hull3d(p, verts, faces) -> bool:
    """Point inside or on an outward-oriented 3D hull, exact."""
    if not faces:
        return False
    for i, j, k in faces:
        if _orient3d(verts[i], verts[j], verts[k], p) > 0:
            return False
    return True
