import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from gwas_limits import entropy as em
from gwas_limits.rng import substream
from gwas_limits.subseq import (ball, ball_size, check_subsequence, dist, dist_ints_equivalence,
                                enumerate_subsequences, format_subsequence, ints, parse_subsequence,
                                sample_uniform_subsequence)


def one_based(*idx):
    return tuple(i - 1 for i in idx)


def test_dist_examples():
    assert dist(one_based(1, 2, 3), one_based(2, 3, 4)) == 2
    assert dist(one_based(1, 2, 3), one_based(1, 2, 3)) == 0
    assert dist(one_based(1, 2), one_based(3, 4)) == 4


def test_dist_rejects_mismatched_lengths():
    with pytest.raises(ValueError):
        dist((0, 1), (0, 1, 2))
    with pytest.raises(ValueError):
        dist((1, 0), (0, 1))


def test_ints_examples():
    assert ints(one_based(1, 3, 5), one_based(2, 3, 5)) == one_based(3, 5)
    assert ints((0, 4), (0, 4)) == (0, 4)
    assert ints((0, 1), (2, 3)) == ()


def test_dist_ints_equivalence_exhaustive():
    S = list(enumerate_subsequences(2, 6))
    assert len(S) == 15
    assert all(dist_ints_equivalence(s, t, 0.5) for s in S for t in S)


def test_dist_ints_equivalence_edges():
    assert dist_ints_equivalence((0, 2), (0, 2), 0.3)
    assert dist_ints_equivalence((0, 1), (2, 3), 0.999)


def test_enumerate_subsequences():
    assert list(enumerate_subsequences(2, 3)) == [(0, 1), (0, 2), (1, 2)]
    assert sum(1 for _ in enumerate_subsequences(2, 6)) == math.comb(6, 2)
    assert sum(1 for _ in enumerate_subsequences(1, 9)) == 9
    with pytest.raises(ValueError):
        enumerate_subsequences(3, 3)


@pytest.mark.parametrize("G,L", [(5, 2), (7, 3), (8, 1), (6, 4)])
def test_enumeration_distinct_and_valid(G, L):
    S = list(enumerate_subsequences(L, G))
    assert len(set(S)) == len(S) == math.comb(G, L)
    for s in S:
        check_subsequence(s, L, G)
    assert S == sorted(S)


def test_ball_examples():
    assert ball((0, 1), 0.4, 4) == [(0, 1)]
    b = ball((0, 1), 1.0, 4)
    assert b == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]
    S = list(enumerate_subsequences(2, 5))
    assert ball((1, 3), 2.0, 5) == S


def test_ball_matches_filter_oracle():
    for G in range(3, 8):
        for L in range(1, G):
            S = list(enumerate_subsequences(L, G))
            for eps in (0.0, 0.5, 1.0, 1.5, 2.0):
                for c in S[:: max(1, len(S) // 5)]:
                    expected = [t for t in S if dist(c, t) <= L * eps]
                    assert ball(c, eps, G) == expected
                    assert ball_size(G, L, eps) == len(expected)


def test_ball_size_bound_when_radius_at_least_one():
    for G in range(3, 9):
        for L in range(1, (G + 1) // 2):
            for k in range(1, L + 1):
                eps = k / L
                if 2 * eps * L / G > 1:
                    continue
                assert math.log2(ball_size(G, L, eps)) <= em.ball_size_log_bound(G, L, eps) + 1e-12


def test_metric_properties_exhaustive():
    for G in range(2, 8):
        for L in range(1, min(G, 4)):
            S = list(enumerate_subsequences(L, G))
            for a, b in itertools.product(S, repeat=2):
                d = dist(a, b)
                assert d == dist(b, a)
                assert (d == 0) == (a == b)
                assert d % 2 == 0 and 0 <= d <= 2 * L
                assert d == 2 * (L - len(ints(a, b)))
            if len(S) <= 35:
                for a, b, c in itertools.product(S, repeat=3):
                    assert dist(a, c) <= dist(a, b) + dist(b, c)


def test_ball_size_center_independent():
    for G in range(3, 8):
        for L in range(1, G):
            for eps in (0.5, 1.0, 1.5):
                sizes = {len(ball(c, eps, G)) for c in enumerate_subsequences(L, G)}
                assert len(sizes) == 1


def test_sample_uniform_two_point():
    rng = substream(11)
    draws = [sample_uniform_subsequence(rng, 1, 2) for _ in range(10_000)]
    assert abs(np.mean([d == (0,) for d in draws]) - 0.5) < 0.02


def test_sample_uniform_chi_square():
    rng = substream(12)
    S = list(enumerate_subsequences(2, 5))
    counts = dict.fromkeys(S, 0)
    for _ in range(10_000):
        counts[sample_uniform_subsequence(rng, 2, 5)] += 1
    assert stats.chisquare(list(counts.values())).pvalue > 0.001


def test_sample_uniform_deterministic():
    a = [sample_uniform_subsequence(substream(5, 3), 3, 10) for _ in range(3)]
    b = [sample_uniform_subsequence(substream(5, 3), 3, 10) for _ in range(3)]
    assert a == b


def test_text_rendering_is_one_based():
    assert format_subsequence((1, 4, 8)) == "2,5,9"
    assert parse_subsequence("2,5,9") == (1, 4, 8)
    with pytest.raises(ValueError):
        parse_subsequence("3,2")
    with pytest.raises(ValueError):
        parse_subsequence("1,9", G=8)


@given(st.sets(st.integers(0, 19), min_size=3, max_size=3), st.sets(st.integers(0, 19), min_size=3, max_size=3))
def test_dist_ints_relation(a, b):
    s, t = tuple(sorted(a)), tuple(sorted(b))
    assert dist(s, t) == 2 * (3 - len(ints(s, t)))
    for eps in (0.1, 0.5, 0.9):
        assert dist_ints_equivalence(s, t, eps)
