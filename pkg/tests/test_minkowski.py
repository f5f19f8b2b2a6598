import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import bmstab.minkowski as mk
from bmstab.minkowski import (
    IntervalSet, convex_combination, convex_combination_bruteforce, deficit,
    interval_sumset, kemperman_stability, parse_iset, write_iset,
)
from bmstab.vset import LatticeSet


def random_set(rng, n=2, m=2, max_cells=8, span=4):
    k = rng.randrange(1, max_cells)
    cells = frozenset(tuple(rng.randrange(-span, span) for _ in range(n))
                      for _ in range(k))
    return LatticeSet(n, m, cells)


def test_identity_cube():
    for n in (1, 2, 3):
        m = 2
        cells = {1: [(i,) for i in range(m)],
                 2: [(i, j) for i in range(m) for j in range(m)],
                 3: [(i, j, k) for i in range(m) for j in range(m) for k in range(m)]}[n]
        cube = LatticeSet(n, m, frozenset(cells))
        S = convex_combination(cube, cube, Fraction(1, 2))
        assert S.measure() == 1


def test_matches_bruteforce_randomized():
    rng = random.Random(17)
    for _ in range(60):
        n = rng.choice([1, 2, 3])
        A = random_set(rng, n=n, m=rng.choice([1, 2]))
        B = random_set(rng, n=n, m=rng.choice([1, 2, 3]))
        t = Fraction(rng.randrange(1, 6), 6)
        if not 0 < t < 1:
            continue
        assert convex_combination(A, B, t) == convex_combination_bruteforce(A, B, t)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 31 - 1),
       st.integers(min_value=1, max_value=5))
def test_combination_matches_bruteforce_property(seed, tnum):
    rng = random.Random(seed)
    n = rng.choice([1, 2, 3])
    A = random_set(rng, n=n, m=rng.choice([1, 2]))
    B = random_set(rng, n=n, m=rng.choice([1, 2, 3]))
    t = Fraction(tnum, 6)
    assert convex_combination(A, B, t) == convex_combination_bruteforce(A, B, t)


def test_engines_agree(monkeypatch):
    rng = random.Random(23)
    for _ in range(25):
        n = rng.choice([1, 2, 3])
        A = random_set(rng, n=n)
        B = random_set(rng, n=n)
        t = Fraction(1, 3)
        ref = convex_combination(A, B, t)
        monkeypatch.setattr(mk, "_PAIRWISE_LIMIT", 0)  # force the bigint engine
        assert convex_combination(A, B, t) == ref
        monkeypatch.undo()


def test_monotone_in_first_argument():
    rng = random.Random(5)
    for _ in range(20):
        A = random_set(rng)
        extra = random_set(rng)
        A_big = LatticeSet(2, 2, A.refine(1).cells | extra.cells)
        B = random_set(rng)
        S1 = convex_combination(A, B, Fraction(1, 3))
        S2 = convex_combination(A_big, B, Fraction(1, 3))
        assert S1.cells <= S2.cells


def test_t_validation_and_guard():
    cube = LatticeSet(2, 1, frozenset([(0, 0)]))
    with pytest.raises(ValueError):
        convex_combination(cube, cube, Fraction(3, 2))
    with pytest.raises(ValueError):
        convex_combination(cube, cube, Fraction(1, 1 << 21))


def test_deficit_cube_exact_zero():
    cube = LatticeSet(2, 4, frozenset((i, j) for i in range(4) for j in range(4)))
    rec = deficit(cube, cube, Fraction(1, 2))
    assert rec.delta_raw_lo == rec.delta_raw_hi == 0
    assert rec.delta_norm == 0
    assert rec.exact


def test_deficit_nonnegative_and_oracle():
    rng = random.Random(29)
    for _ in range(25):
        n = rng.choice([1, 2, 3])
        A = random_set(rng, n=n)
        B = random_set(rng, n=n)
        t = Fraction(rng.randrange(1, 4), 4)
        rec = deficit(A, B, t)
        # certified lower bound never dips below the bracket width
        assert rec.delta_raw_hi >= 0
        assert rec.delta_raw_lo >= -Fraction(1, 2 ** 60)
        # oracle recomputation from the combination + measures
        S = convex_combination(A, B, t)
        assert rec.volS == S.measure()
        one = Fraction(1)
        assert rec.delta_norm == abs(rec.volA - one) + abs(rec.volB - one) \
            + abs(rec.volS - one)


def test_deficit_rejects_empty():
    cube = LatticeSet(2, 1, frozenset([(0, 0)]))
    empty = LatticeSet(2, 1)
    with pytest.raises(ValueError):
        deficit(cube, empty, Fraction(1, 2))


def test_deficit_bracket_contains_highprec_value():
    # independent recomputation of the root-form gap at 120-bit precision
    import mpmath as mp
    rng = random.Random(31)
    with mp.workprec(120):
        for _ in range(15):
            n = rng.choice([2, 3])
            A = random_set(rng, n=n)
            B = random_set(rng, n=n)
            t = Fraction(rng.randrange(1, 4), 4)
            rec = deficit(A, B, t)

            def root(x):
                return mp.root(mp.mpf(x.numerator) / x.denominator, n)

            ref = root(rec.volS) - mp.mpf(t.numerator) / t.denominator * root(rec.volA) \
                - mp.mpf((1 - t).numerator) / (1 - t).denominator * root(rec.volB)
            lo = mp.mpf(rec.delta_raw_lo.numerator) / rec.delta_raw_lo.denominator
            hi = mp.mpf(rec.delta_raw_hi.numerator) / rec.delta_raw_hi.denominator
            assert lo <= ref <= hi


def test_far_point_counterexample_deficit_quarter():
    # unit-volume ball plus a far cell: the halving combination gains 2^-n,
    # so the normalized deficit sits at 1/4 up to the rasterization slack,
    # which shrinks like 1/denom (the acceptance suite pins the tight case)
    from bmstab.scenarios import ScenarioSpec, generate_scenario
    vals = {}
    for denom in (16, 32):
        for side in ("inner", "outer"):
            spec = ScenarioSpec(family="counterexample", n=2, denom=denom,
                                L=4, bracket=side)
            A, B = generate_scenario(spec)
            vals[(denom, side)] = deficit(A, B, Fraction(1, 2)).delta_norm
    for denom in (16, 32):
        assert abs(vals[(denom, "inner")] - Fraction(1, 4)) < Fraction(8, 100)
        assert abs(vals[(denom, "outer")] - Fraction(1, 4)) < Fraction(15, 100)
    # slack shrinks under refinement
    assert abs(vals[(32, "outer")] - Fraction(1, 4)) < \
        abs(vals[(16, "outer")] - Fraction(1, 4))
    assert abs(vals[(32, "inner")] - Fraction(1, 4)) < \
        abs(vals[(16, "inner")] - Fraction(1, 4))


# --- intervals ---------------------------------------------------------------


def test_interval_normalization():
    s = IntervalSet.from_intervals([(Fraction(1), Fraction(2)), (0, 1), (3, 4)])
    assert s.components == ((Fraction(0), Fraction(2)), (Fraction(3), Fraction(4)))
    with pytest.raises(ValueError):
        IntervalSet(((0, 1), (1, 2)))  # touching components must be merged


def test_interval_sumset_examples():
    I = IntervalSet.from_intervals([(0, 1)])
    assert interval_sumset(I, I).components == ((Fraction(0), Fraction(2)),)
    B = IntervalSet.from_intervals([(0, Fraction(2, 5)), (Fraction(1, 2), 1)])
    assert interval_sumset(I, B).components == ((Fraction(0), Fraction(2)),)
    point = IntervalSet.from_intervals([(Fraction(3), Fraction(3))])
    A = IntervalSet.from_intervals([(0, Fraction(1, 4)), (1, 2)])
    assert interval_sumset(A, point).components == tuple(
        (a + 3, b + 3) for a, b in A.components)


def test_kemperman_examples():
    I = IntervalSet.from_intervals([(0, 1)])
    v = kemperman_stability(I, I)
    assert v["applicable"] and v["delta"] == 0 and v["pass"]
    B = IntervalSet.from_intervals([(0, Fraction(2, 5)), (Fraction(1, 2), 1)])
    v = kemperman_stability(I, B)
    assert v["delta"] == Fraction(1, 10)
    assert v["excessB"] == Fraction(1, 10) and v["excessA"] == 0
    assert v["pass"]
    far = IntervalSet.from_intervals([(0, Fraction(1, 10)), (5, Fraction(51, 10))])
    assert not kemperman_stability(I, far)["applicable"]


def test_kemperman_randomized_sound():
    rng = random.Random(41)
    for _ in range(300):
        def rand_set():
            k = rng.randrange(1, 4)
            cuts = sorted(rng.randrange(0, 65) for _ in range(2 * k))
            comps = [(Fraction(a, 16), Fraction(b, 16))
                     for a, b in zip(cuts[::2], cuts[1::2]) if b > a]
            return IntervalSet.from_intervals(comps) if comps else None
        A, B = rand_set(), rand_set()
        if A is None or B is None or A.is_empty() or B.is_empty():
            continue
        v = kemperman_stability(A, B)
        if v["applicable"]:
            assert v["pass"], (A.components, B.components, v)


def test_iset_round_trip():
    s = IntervalSet.from_intervals([(Fraction(1, 3), Fraction(1, 2)), (2, 3)])
    assert parse_iset(write_iset(s)) == s
    with pytest.raises(ValueError):
        parse_iset("iset 2\n0/1 1/1\n")
