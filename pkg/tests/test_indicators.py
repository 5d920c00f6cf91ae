import itertools

import numpy as np
import pytest

from moscal.indicators import (
    IndicatorConfig,
    WilcoxonResult,
    hypervolume,
    r_measure,
    r_weight_set,
    union_reference_points,
    wilcoxon_signed_rank,
)


def oracle_r(points, weights, ref):
    values = []
    for w in weights:
        values.append(
            min(max(w[j] * (p[j] - ref[j]) for j in range(len(ref))) for p in points)
        )
    return sum(values) / len(values)


def grid_hv(points, ref):
    """Exact dominated volume for integer points by unit-cell counting."""
    dims = len(ref)
    count = 0
    for cell in itertools.product(*(range(int(ref[d])) for d in range(dims))):
        if any(all(p[d] <= cell[d] for d in range(dims)) for p in points):
            count += 1
    return float(count)


def oracle_wilcoxon(diffs):
    """Brute-force two-sided p over all sign assignments."""
    n = len(diffs)
    abs_d = sorted((abs(d), i) for i, d in enumerate(diffs))
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and abs_d[j + 1][0] == abs_d[i][0]:
            j += 1
        for k in range(i, j + 1):
            ranks[abs_d[k][1]] = (i + j) / 2 + 1
        i = j + 1
    observed = sum(r for r, d in zip(ranks, diffs) if d > 0)
    stats = []
    for signs in itertools.product((0, 1), repeat=n):
        stats.append(sum(r for r, s in zip(ranks, signs) if s))
    p_low = sum(1 for s in stats if s <= observed) / len(stats)
    p_high = sum(1 for s in stats if s >= observed) / len(stats)
    return observed, min(1.0, 2 * min(p_low, p_high))


def test_r_weight_set_counts():
    two = r_weight_set(2)
    three = r_weight_set(3)
    assert len(two) == 1000
    assert len(three) == 7626
    for w in (two[0], two[-1], three[0], three[-1]):
        assert sum(tuple(w)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        r_weight_set(4)


def test_r_measure_hand_examples():
    pts = [(0.0, 10.0), (10.0, 0.0)]
    psi = [(0.5, 0.5)]
    assert r_measure(pts, np.array(psi), (0.0, 0.0)) == pytest.approx(5.0)
    pts_plus = pts + [(1.0, 1.0)]
    assert r_measure(pts_plus, np.array(psi), (0.0, 0.0)) == pytest.approx(0.5)


def test_r_measure_zero_when_reference_in_set():
    rng = np.random.default_rng(1)
    pts = rng.uniform(0, 50, size=(12, 2))
    ref = tuple(pts.min(axis=0))
    with_ref = np.vstack([pts, ref])
    weights = np.asarray([tuple(w) for w in r_weight_set(2)])
    assert r_measure(with_ref, weights, ref) == pytest.approx(0.0)


def test_r_measure_matches_oracle_and_chunking():
    rng = np.random.default_rng(2)
    pts = rng.uniform(-5, 40, size=(30, 2))
    ref = pts.min(axis=0) - 1.0
    weights = np.asarray([tuple(w) for w in r_weight_set(2)])  # 1000 > chunk size
    got = r_measure(pts, weights, tuple(ref))
    want = oracle_r([tuple(p) for p in pts], weights.tolist(), tuple(ref))
    assert got == pytest.approx(want, rel=1e-10)
    # three objectives, list-of-weight-vectors input form
    pts3 = rng.uniform(0, 20, size=(15, 3))
    ref3 = tuple(pts3.min(axis=0))
    small = [(0.2, 0.3, 0.5), (1.0, 0.0, 0.0), (1 / 3, 1 / 3, 1 / 3)]
    got3 = r_measure(pts3, np.asarray(small), ref3)
    assert got3 == pytest.approx(oracle_r([tuple(p) for p in pts3], small, ref3), rel=1e-10)


def test_r_measure_monotone_in_point_set():
    rng = np.random.default_rng(3)
    weights = np.asarray([tuple(w) for w in r_weight_set(2)])
    for _ in range(20):
        pts = rng.uniform(0, 30, size=(10, 2))
        extra = rng.uniform(0, 30, size=(4, 2))
        ref = (-1.0, -1.0)
        base = r_measure(pts, weights, ref)
        grown = r_measure(np.vstack([pts, extra]), weights, ref)
        assert grown <= base + 1e-12


def test_r_measure_validation():
    with pytest.raises(ValueError):
        r_measure([], np.array([(0.5, 0.5)]), (0.0, 0.0))
    with pytest.raises(ValueError):
        r_measure([(1.0, 2.0)], np.empty((0, 2)), (0.0, 0.0))
    with pytest.raises(ValueError):
        r_measure([(1.0, 2.0)], np.array([(0.5, 0.5)]), (0.0, 0.0, 0.0))


def test_hypervolume_hand_examples():
    assert hypervolume([(0.0, 0.0)], (1.0, 1.0)) == pytest.approx(1.0)
    assert hypervolume([(1.0, 3.0), (2.0, 2.0), (3.0, 1.0)], (4.0, 4.0)) == pytest.approx(6.0)
    assert hypervolume([(0.0, 0.0, 0.0)], (1.0, 1.0, 1.0)) == pytest.approx(1.0)


def test_hypervolume_2d_matches_grid_oracle():
    rng = np.random.default_rng(5)
    for _ in range(50):
        pts = rng.integers(0, 11, size=(int(rng.integers(1, 12)), 2))
        ref = (11.0, 11.0)
        assert hypervolume(pts.astype(float), ref) == pytest.approx(
            grid_hv(pts.tolist(), ref)
        )


def test_hypervolume_3d_matches_grid_oracle():
    rng = np.random.default_rng(6)
    for _ in range(25):
        pts = rng.integers(0, 9, size=(int(rng.integers(1, 10)), 3))
        ref = (9.0, 9.0, 9.0)
        assert hypervolume(pts.astype(float), ref) == pytest.approx(
            grid_hv(pts.tolist(), ref)
        )


def test_hypervolume_objective_permutation_invariance():
    rng = np.random.default_rng(7)
    pts = rng.uniform(0, 5, size=(20, 3))
    ref = (6.0, 7.0, 8.0)
    base = hypervolume(pts, ref)
    for perm in itertools.permutations(range(3)):
        assert hypervolume(pts[:, perm], tuple(ref[d] for d in perm)) == pytest.approx(base)


def test_hypervolume_dominated_point_no_change():
    pts = [(1.0, 3.0), (3.0, 1.0)]
    ref = (5.0, 5.0)
    base = hypervolume(pts, ref)
    assert hypervolume(pts + [(4.0, 4.0)], ref) == pytest.approx(base)
    assert hypervolume(pts + [(2.0, 2.0)], ref) > base


def test_hypervolume_validation():
    with pytest.raises(ValueError):
        hypervolume([(1.0, 1.0)], (1.0, 2.0))  # not strictly dominating
    with pytest.raises(ValueError):
        hypervolume([(0.0, 0.0, 0.0, 0.0)], (1.0, 1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        hypervolume([], (1.0, 1.0))


def test_union_reference_points():
    z_star, hv_ref = union_reference_points([[(0.0, 10.0), (4.0, 2.0)], [(2.0, 3.0)]])
    assert z_star == (0.0, 2.0)
    assert hv_ref == pytest.approx((4.0 + 0.04, 10.0 + 0.08))
    z_d, hv_d = union_reference_points([[(1.0, 5.0)]])
    assert z_d == (1.0, 5.0)
    assert hv_d == (2.0, 6.0)  # zero span widens by 1
    with pytest.raises(ValueError):
        union_reference_points([])
    with pytest.raises(ValueError):
        union_reference_points([[(1.0, 2.0)], [(1.0, 2.0, 3.0)]])


def test_indicator_config_validation():
    cfg = IndicatorConfig(1000, (0.0, 0.0), (10.0, 10.0))
    assert cfg.r_weight_count == 1000
    with pytest.raises(ValueError):
        IndicatorConfig(0, (0.0, 0.0), (1.0, 1.0))
    with pytest.raises(ValueError):
        IndicatorConfig(10, (0.0, 0.0), (1.0, 1.0, 1.0))


def test_wilcoxon_all_positive():
    a = [float(i + 10) for i in range(10)]
    b = [float(i) for i in range(10)]
    res = wilcoxon_signed_rank(a, b)
    assert isinstance(res, WilcoxonResult)
    assert res.statistic == pytest.approx(55.0)
    assert res.p_value == pytest.approx(2 / 1024)
    assert res.significant


def test_wilcoxon_identical_samples():
    a = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    res = wilcoxon_signed_rank(a, a)
    assert res.p_value == 1.0
    assert not res.significant


def test_wilcoxon_antisymmetry():
    rng = np.random.default_rng(11)
    a = rng.normal(size=12)
    b = rng.normal(size=12)
    assert wilcoxon_signed_rank(a, b).p_value == pytest.approx(
        wilcoxon_signed_rank(b, a).p_value
    )


def test_wilcoxon_matches_enumeration_oracle():
    rng = np.random.default_rng(13)
    nonzero = np.array([-4, -3, -2, -1, 1, 2, 3, 4], dtype=float)
    for _ in range(40):
        n = int(rng.integers(5, 13))
        d = rng.choice(nonzero, size=n)
        a = rng.integers(0, 100, size=n).astype(float)
        b = a - d  # integer-valued, so the differences reproduce d exactly
        want_stat, want_p = oracle_wilcoxon(d.tolist())
        res = wilcoxon_signed_rank(a, b)
        assert res.statistic == pytest.approx(want_stat)
        assert res.p_value == pytest.approx(want_p, rel=1e-12)


def test_wilcoxon_drops_zero_differences():
    a = [1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0]
    b = [1.0, 2.0, 3.0, 4.0, 5.0, 0.0, 1.0, 2.0, 3.0, 4.0, 5.0]
    res = wilcoxon_signed_rank(a, b)
    want_stat, want_p = oracle_wilcoxon([10.0] * 6)
    assert res.statistic == pytest.approx(want_stat)
    assert res.p_value == pytest.approx(want_p)


def test_wilcoxon_large_sample_normal_path():
    n = 25
    a = [float(i + 3) for i in range(n)]
    b = [float(i) for i in range(n)]
    res = wilcoxon_signed_rank(a, b)
    assert 0.0 < res.p_value < 1e-3
    assert res.significant
    close_a = [float(i) + (0.5 if i % 2 else -0.5) for i in range(n)]
    close_b = [float(i) for i in range(n)]
    res2 = wilcoxon_signed_rank(close_a, close_b)
    assert res2.p_value > 0.2


def test_wilcoxon_validation():
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0] * 6, [1.0] * 5)
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([1.0] * 6, [2.0] * 6, alpha=1.5)
