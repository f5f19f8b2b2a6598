"""Exact Minkowski convex combinations, volume deficits, and the 1D engine.

The lattice-set combination S = t*A + (1-t)*B with rational t = p/q is exact:
after the operands share a denom m, every cell pair contributes the cube of
side 1/m whose fine corner (at denom m*q) is p*i + (q-p)*j.  Two engines
compute the corner sumset: a vectorized pairwise enumeration for small
operands, and carry-free big-integer polynomial multiplication (via gmpy2)
for large ones.  Both are exact integer arithmetic; randomized tests compare
them against a pure-Python brute force.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

try:
    import gmpy2
    _HAVE_GMPY2 = True
except ImportError:  # pragma: no cover
    _HAVE_GMPY2 = False

from ._roots import nth_root_brackets
from .vset import LatticeSet, reconcile

__all__ = [
    "convex_combination", "convex_combination_bruteforce", "deficit",
    "DeficitRecord", "IntervalSet", "interval_sumset", "kemperman_stability",
    "write_iset", "parse_iset",
]

_DENOM_GUARD = 1 << 20
_GRID_GUARD = 1 << 25
_PAIRWISE_LIMIT = 1 << 22  # pair count below which broadcasting beats big ints


def _as_lowest_terms(t) -> Fraction:
    t = Fraction(t)
    if not (0 < t < 1):
        raise ValueError(f"t must lie in (0,1), got {t}")
    return t


def convex_combination(A: LatticeSet, B: LatticeSet, t) -> LatticeSet:
    """Exact S = t*A + (1-t)*B at denom m*q (t = p/q in lowest terms).

    t must be rational; a caller holding an irrational weight picks a
    rational approximation first (the combination measure is continuous in
    t, so the approximation error is the caller's to budget).
    """
    t = _as_lowest_terms(t)
    p, q = t.numerator, t.denominator
    A, B = reconcile(A, B)
    m = A.denom
    if q * m > _DENOM_GUARD:
        raise ValueError(f"fine denom {q * m} exceeds guard {_DENOM_GUARD}")
    if A.is_empty() or B.is_empty():
        return LatticeSet(A.dim, m * q)
    n = A.dim

    ca = np.fromiter((x for c in A.cells for x in c), dtype=np.int64,
                     count=len(A.cells) * n).reshape(-1, n) * p
    cb = np.fromiter((x for c in B.cells for x in c), dtype=np.int64,
                     count=len(B.cells) * n).reshape(-1, n) * (q - p)
    lo = ca.min(axis=0) + cb.min(axis=0)
    ext = (ca.max(axis=0) + cb.max(axis=0)) - lo + 1
    if int(np.prod(ext + q - 1)) > _GRID_GUARD:
        raise ValueError("combination grid too large; reduce denom or set size")

    ca -= ca.min(axis=0)
    cb -= cb.min(axis=0)
    if len(ca) * len(cb) <= _PAIRWISE_LIMIT or not _HAVE_GMPY2:
        corners = _corner_grid_pairwise(ca, cb, ext)
    else:
        same = p == q - p and A.cells == B.cells
        corners = _corner_grid_bigint(ca, cb, ext, same)

    # Each corner spans the q^n block of fine cells filling a cube of side 1/m.
    out = np.zeros(tuple(int(e) + q - 1 for e in ext), dtype=bool)
    for off in np.ndindex(*(q,) * n):
        sl = tuple(slice(int(o), int(o) + int(e)) for o, e in zip(off, ext))
        out[sl] |= corners
    coords = np.argwhere(out) + lo
    cols = [col.tolist() for col in coords.T]
    cells = frozenset(zip(*cols)) if n > 1 else frozenset((x,) for x in cols[0])
    return LatticeSet(n, m * q, cells)


def _corner_grid_pairwise(ca, cb, ext):
    n = ca.shape[1]
    sums = (ca[:, None, :] + cb[None, :, :]).reshape(-1, n)
    grid = np.zeros(tuple(int(e) for e in ext), dtype=bool)
    grid[tuple(sums[:, a] for a in range(n))] = True
    return grid


def _corner_grid_bigint(ca, cb, ext, same_operands=False):
    """Sumset support via carry-free polynomial multiplication over Z.

    Cells become monomials z^(flattened index); the product's nonzero
    coefficients mark the corner sumset.  Coefficients count contributing
    pairs, bounded by min(|A|, |B|), so the digit width below keeps the
    encoding carry-free.
    """
    ext = [int(e) for e in ext]
    strides = [0] * len(ext)
    acc = 1
    for a in reversed(range(len(ext))):
        strides[a] = acc
        acc *= ext[a]
    total = acc
    width = 4 if min(len(ca), len(cb)) < (1 << 32) else 8
    dtype = "<u4" if width == 4 else "<u8"

    def encode(cells):
        flat = np.zeros(total, dtype=dtype)
        idx = sum(cells[:, a] * strides[a] for a in range(len(ext)))
        flat[idx] = 1
        return gmpy2.mpz(int.from_bytes(flat.tobytes(), "little"))

    za = encode(ca)
    zb = za if same_operands else encode(cb)
    prod = za * zb
    # ext covers all pairwise coordinate sums, so the product has at most
    # `total` digits.
    raw = int(prod).to_bytes(total * width, "little")
    counts = np.frombuffer(raw, dtype=dtype)
    return (counts > 0).reshape(ext)


def convex_combination_bruteforce(A: LatticeSet, B: LatticeSet, t) -> LatticeSet:
    """Pure-Python pairwise cube-sum rasterization (test oracle)."""
    t = _as_lowest_terms(t)
    p, q = t.numerator, t.denominator
    A, B = reconcile(A, B)
    n = A.dim
    if A.is_empty() or B.is_empty():
        return LatticeSet(n, A.denom * q)
    offs = list(np.ndindex(*(q,) * n))
    cells = set()
    for i in A.cells:
        for j in B.cells:
            base = tuple(p * i[a] + (q - p) * j[a] for a in range(n))
            for off in offs:
                cells.add(tuple(base[a] + off[a] for a in range(n)))
    return LatticeSet(n, A.denom * q, frozenset(cells))


# ---------------------------------------------------------------------------
# deficits


@dataclass(frozen=True)
class DeficitRecord:
    t: Fraction
    tau: Fraction
    volA: Fraction
    volB: Fraction
    volS: Fraction
    delta_norm: Fraction
    delta_raw_lo: Fraction
    delta_raw_hi: Fraction

    @property
    def delta_raw(self) -> float:
        return float((self.delta_raw_lo + self.delta_raw_hi) / 2)

    @property
    def delta_raw_err(self) -> float:
        return float((self.delta_raw_hi - self.delta_raw_lo) / 2)

    @property
    def exact(self) -> bool:
        return self.delta_raw_lo == self.delta_raw_hi


def deficit(A: LatticeSet, B: LatticeSet, t, root_bits: int = 64,
            S: LatticeSet | None = None) -> DeficitRecord:
    """Both deficit flavors for (A, B, t); S is recomputed unless supplied.

    delta_norm = ||A|-1| + ||B|-1| + ||S|-1| is exact; the root-form gap
    |S|^(1/n) - t|A|^(1/n) - (1-t)|B|^(1/n) comes with a certified rational
    bracket [delta_raw_lo, delta_raw_hi].
    """
    t = _as_lowest_terms(t)
    if A.is_empty() or B.is_empty():
        raise ValueError("deficit needs nonempty operands")
    if S is None:
        S = convex_combination(A, B, t)
    n = A.dim
    vA, vB, vS = A.measure(), B.measure(), S.measure()
    one = Fraction(1)
    delta_norm = abs(vA - one) + abs(vB - one) + abs(vS - one)
    sA = nth_root_brackets(vA, n, root_bits)
    sB = nth_root_brackets(vB, n, root_bits)
    sS = nth_root_brackets(vS, n, root_bits)
    lo = sS[0] - t * sA[1] - (1 - t) * sB[1]
    hi = sS[1] - t * sA[0] - (1 - t) * sB[0]
    return DeficitRecord(
        t=t, tau=min(t, 1 - t), volA=vA, volB=vB, volS=vS,
        delta_norm=delta_norm, delta_raw_lo=lo, delta_raw_hi=hi,
    )


# ---------------------------------------------------------------------------
# exact 1D interval engine


@dataclass(frozen=True)
class IntervalSet:
    """Finite union of disjoint closed intervals with rational endpoints."""
    components: tuple

    def __post_init__(self):
        comps = tuple((Fraction(a), Fraction(b)) for a, b in self.components)
        for a, b in comps:
            if a > b:
                raise ValueError(f"interval [{a}, {b}] reversed")
        for (a0, b0), (a1, b1) in zip(comps, comps[1:]):
            if not b0 < a1:
                raise ValueError("components must be sorted and disjoint")
        object.__setattr__(self, "components", comps)

    @classmethod
    def from_intervals(cls, pairs) -> "IntervalSet":
        """Normalize arbitrary closed intervals: sort, merge overlap/contact."""
        pairs = sorted((Fraction(a), Fraction(b)) for a, b in pairs if a <= b)
        merged = []
        for a, b in pairs:
            if merged and a <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))

    def measure(self) -> Fraction:
        return sum((b - a for a, b in self.components), Fraction(0))

    def is_empty(self) -> bool:
        return not self.components

    def hull(self):
        if not self.components:
            raise ValueError("empty interval set has no hull")
        return self.components[0][0], self.components[-1][1]

    def translate(self, v) -> "IntervalSet":
        v = Fraction(v)
        return IntervalSet(tuple((a + v, b + v) for a, b in self.components))


def interval_sumset(A: IntervalSet, B: IntervalSet) -> IntervalSet:
    """Exact A + B as a normalized interval union."""
    if A.is_empty() or B.is_empty():
        raise ValueError("interval_sumset needs nonempty operands")
    sums = [(a0 + a1, b0 + b1)
            for a0, b0 in A.components for a1, b1 in B.components]
    return IntervalSet.from_intervals(sums)


def kemperman_stability(A: IntervalSet, B: IntervalSet) -> dict:
    """1D near-equality check: delta = |A+B| - |A| - |B| bounds hull excesses.

    Applicable iff delta < min(|A|, |B|) -- strict, because the underlying
    hypothesis is a strict inequality and equality cases genuinely violate
    the conclusion (e.g. A = [0,2] u [2+g, 4+g] against any B with
    |B| = g <= 2, where the hull excess is g while delta = g as well only
    when the sum's two branches stay disjoint, i.e. g >= |B|).  When
    applicable, the hulls I, J of A, B must satisfy |I \\ A| <= delta and
    |J \\ B| <= delta.
    """
    if A.is_empty() or B.is_empty():
        raise ValueError("kemperman_stability needs nonempty operands")
    S = interval_sumset(A, B)
    delta = S.measure() - A.measure() - B.measure()
    I = A.hull()
    J = B.hull()
    excessA = (I[1] - I[0]) - A.measure()
    excessB = (J[1] - J[0]) - B.measure()
    applicable = delta < min(A.measure(), B.measure())
    passed = bool(applicable and excessA <= delta and excessB <= delta)
    return {
        "applicable": bool(applicable),
        "delta": delta,
        "I": I,
        "J": J,
        "excessA": excessA,
        "excessB": excessB,
        "pass": passed,
    }


def write_iset(A: IntervalSet) -> str:
    lines = [f"iset {len(A.components)}"]
    for a, b in A.components:
        lines.append(f"{a.numerator}/{a.denominator} {b.numerator}/{b.denominator}")
    return "\n".join(lines) + "\n"


def parse_iset(text: str) -> IntervalSet:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty iset payload")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "iset":
        raise ValueError(f"bad iset header: {lines[0]!r}")
    count = int(head[1])
    if len(lines) - 1 != count:
        raise ValueError(f"expected {count} components, got {len(lines) - 1}")
    comps = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise ValueError(f"bad component line: {ln!r}")
        comps.append((Fraction(parts[0]), Fraction(parts[1])))
    return IntervalSet(tuple(comps))
