"""Why a smallness threshold is unavoidable: the far-point family.

A unit-volume ball plus one far cell has a halving combination of measure
exactly 1 + 2^-n, yet its convex hull grows linearly with the separation L.
The script brackets the combination measure with certified inner/outer
rasterizations and shows the hull distance growing while the deficit stays
pinned at 2^-n.
"""

from fractions import Fraction

from bmstab.minkowski import convex_combination, deficit
from bmstab.scenarios import ScenarioSpec, generate_scenario
from bmstab.stability import hull_distance

## The combination measure, bracketed from both sides

for denom in (16, 32, 64):
    measures = {}
    for side in ("inner", "outer"):
        spec = ScenarioSpec(family="counterexample", n=2, denom=denom, L=4,
                            bracket=side)
        A, B = generate_scenario(spec)
        S = convex_combination(A, B, Fraction(1, 2))
        measures[side] = S.measure()
    lo, hi = measures["inner"], measures["outer"]
    print(f"denom {denom:3d}:  |A/2 + B/2| in [{float(lo):.5f}, {float(hi):.5f}]"
          f"   target 1.25 inside: {lo <= Fraction(5, 4) <= hi}"
          f"   gap {float(hi - lo):.5f}")

## Deficit pinned near 2^-n = 1/4, hull distance growing with L

print()
for L in (2, 4, 8):
    spec = ScenarioSpec(family="counterexample", n=2, denom=8, L=L,
                        bracket="inner")
    A, B = generate_scenario(spec)
    rec = deficit(A, B, Fraction(1, 2))
    hd = hull_distance(A, B)
    print(f"L = {L}:  delta_norm = {float(rec.delta_norm):.4f}"
          f"   hull distance D* = {float(hd['D_star']):.3f}")

print("\nThe deficit never shrinks below ~1/4, so for any claimed bound the")
print("instance sits in the vacuous regime while D* is made arbitrarily large.")
