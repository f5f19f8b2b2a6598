"""Stability pipelines: containing convex sets, hull distance, constants.

The hull distance realizes the "up to a translation" quantifier directly:
it minimizes the measure of co(A u (B+v)) minus both sets over fine-lattice
translations, each candidate evaluated exactly.  The constants calculator
runs the explicit recurrences for the admissible exponent eps_n(tau) and
smallness threshold M_n(tau) at 220-bit precision and cross-checks them
against their closed-form bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .convexity import Polytope, lattice_polytope_overlap
from .minkowski import DeficitRecord, deficit
from .vset import LatticeSet, reconcile

__all__ = [
    "ConstantsTable", "StabilityReport", "constants", "hull_distance",
    "cos_pipeline", "check_stability",
]

_PREC_BITS = 220


@dataclass(frozen=True)
class ConstantsTable:
    n: int
    tau: Fraction
    beta: object          # mpf or None for n = 1
    alpha_bar: object
    eta: object
    zeta: object
    eps: object           # admissible exponent eps_n(tau)
    M: object             # smallness threshold M_n(tau)
    eps_lower_bound: object
    M_upper_bound: object

    @property
    def bounds_ok(self) -> bool:
        return bool(self.eps >= self.eps_lower_bound and self.M <= self.M_upper_bound)

    def as_text(self) -> str:
        def fmt(x):
            return "none" if x is None else mp.nstr(x, 12)
        lines = [
            f"n={self.n}",
            f"tau={self.tau}",
            f"beta={fmt(self.beta)}",
            f"alpha_bar={fmt(self.alpha_bar)}",
            f"eta={fmt(self.eta)}",
            f"zeta={fmt(self.zeta)}",
            f"eps={fmt(self.eps)}",
            f"M={fmt(self.M)}",
            f"eps_lower_bound={fmt(self.eps_lower_bound)}",
            f"M_upper_bound={fmt(self.M_upper_bound)}",
            f"bounds_ok={self.bounds_ok}",
        ]
        return "\n".join(lines) + "\n"


def _eps_M(n: int, tau: Fraction, cache: dict):
    key = (n, tau)
    if key in cache:
        return cache[key]
    if n == 1:
        eps = mp.mpf(1)
        M = abs(mp.log(mp.mpf(tau.numerator) / tau.denominator / 3))
        cache[key] = (eps, M, None, None, None, None)
        return cache[key]
    t = mp.mpf(tau.numerator) / tau.denominator
    logt = abs(mp.log(t))
    beta = t / (16 * (n - 1) * logt)
    alpha_bar = beta / (8 * n)
    eta = alpha_bar / n ** 2
    eps_prev_tau, _, *_ = _eps_M(n - 1, tau, cache)
    eps_prev_half, M_prev_half, *_ = _eps_M(n - 1, tau / 2, cache)
    zeta = eps_prev_tau / 3 * eta
    eps = zeta * beta / (8 * n ** 2) * eps_prev_half
    M = 4 / zeta * M_prev_half
    cache[key] = (eps, M, beta, alpha_bar, eta, zeta)
    return cache[key]


def constants(n: int, tau) -> ConstantsTable:
    """Constant table for dimension n and weight floor tau in (0, 1/2]."""
    tau = Fraction(tau)
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0 < tau <= Fraction(1, 2)):
        raise ValueError("tau must lie in (0, 1/2]")
    with mp.workprec(_PREC_BITS):
        eps, M, beta, alpha_bar, eta, zeta = _eps_M(n, tau, {})
        t = mp.mpf(tau.numerator) / tau.denominator
        logt = abs(mp.log(t))
        p = mp.mpf(3) ** n
        eps_lb = t ** p / (mp.mpf(2) ** (3 ** (n + 1)) * mp.mpf(n) ** p * logt ** p)
        M_ub = mp.mpf(2) ** (3 ** (n + 2)) * mp.mpf(n) ** p * logt ** p / t ** p
        return ConstantsTable(
            n=n, tau=tau, beta=beta, alpha_bar=alpha_bar, eta=eta, zeta=zeta,
            eps=eps, M=M, eps_lower_bound=eps_lb, M_upper_bound=M_ub,
        )


# ---------------------------------------------------------------------------
# hull distance


def _hull_points(E: LatticeSet):
    """Hull vertices of the corner cloud, as integer tuples at the set denom."""
    corners = list(E.corner_points())
    if E.dim == 1:
        lo = min(c[0] for c in corners)
        hi = max(c[0] for c in corners)
        return [(lo,), (hi,)]
    if E.dim == 2:
        from ._hull import hull_2d
        return hull_2d(corners)
    from ._hull import hull_3d

    verts, _ = hull_3d(corners)
    return verts


def _union_hull_volume(ptsA, ptsB, v, dim, m) -> Fraction:
    pts = list(ptsA) + [tuple(p[a] + v[a] for a in range(dim)) for p in ptsB]
    if dim == 1:
        lo = min(p[0] for p in pts)
        hi = max(p[0] for p in pts)
        return Fraction(hi - lo, m)
    if dim == 2:
        from ._hull import hull_2d, polygon_area2
        return Fraction(polygon_area2(hull_2d(pts)), 2 * m * m)
    from ._hull import hull_3d, hull_volume6
    verts, faces = hull_3d(pts)
    return hull_volume6(verts, faces) / (6 * m ** 3)


def hull_distance(A: LatticeSet, B: LatticeSet) -> dict:
    """Translation-minimized hull distance.

    Minimizes D(v) = |co(A u (B+v)) \\ A| + |co(A u (B+v)) \\ (B+v)| over
    fine-lattice translations v, with every D(v) evaluated exactly; since the
    set measures are fixed, this is 2*vol(hull) - |A| - |B|.  Coarse stride
    scan over the alignment window, then stride halving to 1; deterministic
    lexicographic tie-breaking.
    """
    if A.is_empty() or B.is_empty():
        raise ValueError("hull_distance needs nonempty operands")
    A, B = reconcile(A, B)
    m = A.denom
    dim = A.dim
    ptsA = _hull_points(A)
    ptsB = _hull_points(B)
    volA, volB = A.measure(), B.measure()

    boxA = A.bounding_box()
    boxB = B.bounding_box()
    lo = [boxA[a][0] - boxB[a][1] - 1 for a in range(dim)]
    hi = [boxA[a][1] - boxB[a][0] + 1 for a in range(dim)]

    def D(v) -> Fraction:
        return 2 * _union_hull_volume(ptsA, ptsB, v, dim, m) - volA - volB

    best_v = (0,) * dim
    best = D(best_v)
    stride = max(1, m // 4)
    # coarse scan of the full window
    for v in _lattice_window(lo, hi, stride):
        d = D(v)
        if d < best or (d == best and v < best_v):
            best, best_v = d, v
    # halving descent
    while stride > 1:
        stride = max(1, stride // 2)
        span = [(max(l, best_v[a] - 2 * stride), min(h, best_v[a] + 2 * stride + 1))
                for a, (l, h) in enumerate(zip(lo, hi))]
        for v in _lattice_window([s[0] for s in span], [s[1] for s in span], stride):
            d = D(v)
            if d < best or (d == best and v < best_v):
                best, best_v = d, v

    union_pts = [tuple(Fraction(c, m) for c in p) for p in ptsA]
    union_pts += [tuple(Fraction(p[a] + best_v[a], m) for a in range(dim)) for p in ptsB]
    K = Polytope.from_rational_points(union_pts, dim=dim)
    return {
        "v_star": tuple(Fraction(x, m) for x in best_v),
        "K": K,
        "D_star": best,
        "D_at_zero": D((0,) * dim),
    }


def _lattice_window(lo, hi, stride):
    axes = [range(l, h, stride) for l, h in zip(lo, hi)]
    if len(axes) == 1:
        return [(i,) for i in axes[0]]
    if len(axes) == 2:
        return [(i, j) for i in axes[0] for j in axes[1]]
    return [(i, j, k) for i in axes[0] for j in axes[1] for k in axes[2]]


# ---------------------------------------------------------------------------
# containing convex set pipeline


def _box_union_overlap(cellsA, mA, cellsB, mB, shift):
    """Exact |A intersect (B + shift)| for two cell unions, any rational shift."""
    shift = tuple(Fraction(s) for s in shift)
    dim = len(shift)
    boxesB = []
    for c in cellsB:
        boxesB.append(tuple((Fraction(c[a], mB) + shift[a],
                             Fraction(c[a] + 1, mB) + shift[a]) for a in range(dim)))
    total = Fraction(0)
    for c in cellsA:
        boxA = tuple((Fraction(c[a], mA), Fraction(c[a] + 1, mA)) for a in range(dim))
        for boxB in boxesB:
            v = Fraction(1)
            for a in range(dim):
                o = min(boxA[a][1], boxB[a][1]) - max(boxA[a][0], boxB[a][0])
                if o <= 0:
                    v = Fraction(0)
                    break
                v *= o
            total += v
    return total


def cos_pipeline(A: LatticeSet, B: LatticeSet, K_A: Polytope, K_B: Polytope,
                 t, tau, snap_denom: int = 1 << 16) -> dict:
    """Build a convex set containing A and B from nearby convex bodies.

    Measures zeta = |A d K_A| + |B d K_B| (exact for dim <= 2, certified
    bracket for dim 3), aligns K_A and K_B (with their sets) to a common
    barycenter, and inflates co(K_A u K_B) about it by 1 + c*zeta^(1/(2n^3)),
    growing c geometrically from 1 until every cell corner of A and of the
    translated B is inside; the first sufficient c is the calibrated
    constant.  Also reports |A d B| in the aligned frame against the
    zeta^(1/(2n)) trend.
    """
    t = Fraction(t)
    tau = Fraction(tau)
    n = A.dim
    if not (0 < tau <= Fraction(1, 2)) or not (tau <= t <= 1 - tau):
        raise ValueError("need 0 < tau <= 1/2 and t in [tau, 1-tau]")
    ovA = lattice_polytope_overlap(A, K_A)
    ovB = lattice_polytope_overlap(B, K_B)
    zeta_lo = A.measure() + K_A.volume - 2 * ovA[1] \
        + B.measure() + K_B.volume - 2 * ovB[1]
    zeta_hi = A.measure() + K_A.volume - 2 * ovA[0] \
        + B.measure() + K_B.volume - 2 * ovB[0]
    zeta_lo = max(zeta_lo, Fraction(0))

    gA = K_A.centroid()
    gB = K_B.centroid()
    shiftB = tuple(a - b for a, b in zip(gA, gB))
    K_B2 = K_B.translate(shiftB)
    if zeta_hi == 0:
        if not all(K_A.contains(tuple(Fraction(c, A.denom) for c in p))
                   for p in A.corner_points()):
            raise ValueError("zeta = 0 but A is not contained in K_A")

    K0 = Polytope.from_rational_points(K_A.vertices + K_B2.vertices, dim=n)
    g0 = K0.centroid()

    cornersA = [tuple(Fraction(c, A.denom) for c in p) for p in A.corner_points()]
    cornersB = [tuple(Fraction(c, B.denom) + s for c, s in zip(p, shiftB))
                for p in B.corner_points()]

    root = float(zeta_hi) ** (1.0 / (2 * n ** 3)) if zeta_hi > 0 else 0.0
    c = 1.0
    factor = Fraction(1)
    K = K0
    for _ in range(80):
        bump = Fraction(math.ceil(c * root * snap_denom), snap_denom) if root > 0 else Fraction(0)
        factor = 1 + bump
        K = K0.scale_about(g0, factor) if factor != 1 else K0
        if all(K.contains(p) for p in cornersA) and all(K.contains(p) for p in cornersB):
            break
        c *= 2.0
    else:
        raise RuntimeError("inflation failed to capture A and B")

    sym_AB = A.measure() + B.measure() - 2 * _box_union_overlap(
        A.cells, A.denom, B.cells, B.denom, shiftB)
    return {
        "zeta_lo": zeta_lo,
        "zeta_hi": zeta_hi,
        "K": K,
        "K0": K0,
        "inflation_c": c,
        "inflation_factor": factor,
        "excess_A": K.volume - A.measure(),
        "excess_B": K.volume - B.measure(),
        "sym_diff_AB": sym_AB,
        "barycenter": gA,
        "shift_B": shiftB,
    }


# ---------------------------------------------------------------------------
# stability verdicts


@dataclass(frozen=True)
class StabilityReport:
    instance_id: str
    n: int
    t: Fraction
    tau: Fraction
    record: DeficitRecord
    v_star: tuple
    K: Polytope
    D_star: Fraction
    bound: float
    threshold: float      # e^(-M_n(tau)); hypothesis ceiling for delta
    verdict: str          # pass | vacuous | fail
    eps_exponent: float

    CSV_HEADER = "id,n,t,tau,delta_norm,delta_raw,vx,vy,vz,D_star,bound,verdict"

    def csv_row(self) -> str:
        v = [float(x) for x in self.v_star] + [0.0] * (3 - len(self.v_star))
        fields = [
            self.instance_id, str(self.n), str(self.t), str(self.tau),
            f"{float(self.record.delta_norm):.12g}",
            f"{self.record.delta_raw:.12g}",
            f"{v[0]:.12g}", f"{v[1]:.12g}", f"{v[2]:.12g}",
            f"{float(self.D_star):.12g}",
            f"{self.bound:.12g}",
            self.verdict,
        ]
        return ",".join(fields)


def check_stability(A: LatticeSet, B: LatticeSet, t, tau,
                       N_n: int | None = None,
                       instance_id: str = "instance") -> StabilityReport:
    """Measure (delta, D*) for one instance and grade it against the bound.

    The verdict is `vacuous` when delta exceeds e^(-M_n(tau)) (the typical
    desk-scale outcome, reported honestly), `pass` when the hypothesis holds
    and D* <= tau^(-N_n) * delta^(eps_n(tau)), and `fail` otherwise.  The
    measured pair feeds empirical-exponent fits regardless of the verdict.
    """
    t = Fraction(t)
    tau = Fraction(tau)
    n = A.dim
    if N_n is None:
        N_n = 5 * n
    rec = deficit(A, B, t)
    hd = hull_distance(A, B)
    table = constants(n, tau)
    delta = rec.delta_norm
    with mp.workprec(_PREC_BITS):
        threshold = float(mp.e ** (-table.M))
        if delta == 0:
            bound = 0.0
        else:
            d = mp.mpf(delta.numerator) / delta.denominator
            bound = float(mp.mpf(tau.numerator) / tau.denominator) ** (-N_n) \
                * float(d ** table.eps)
        eps_f = float(table.eps)
    if delta > threshold:
        verdict = "vacuous"
    elif float(hd["D_star"]) <= bound:
        verdict = "pass"
    else:
        verdict = "fail"
    return StabilityReport(
        instance_id=instance_id, n=n, t=t, tau=tau, record=rec,
        v_star=hd["v_star"], K=hd["K"], D_star=hd["D_star"],
        bound=bound, threshold=threshold, verdict=verdict,
        eps_exponent=eps_f,
    )
