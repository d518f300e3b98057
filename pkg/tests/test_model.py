import itertools
import math

import numpy as np
import pytest
from scipy import stats

from gwas_limits.model import (Dataset, ModelParams, PatternFunction, decode_word, encode_rows, encode_word,
                               evaluate, extract, generate_dataset, read_dataset, sample_function,
                               subset_sum_concentration_check, write_dataset)
from gwas_limits.rng import substream


def params(**kw):
    base = dict(q=2, G=12, L=2, N=100, m=1, alpha=0.05)
    base.update(kw)
    return ModelParams(**base)


def test_params_derived_quantities():
    p = params()
    assert p.gamma == 0.25
    assert p.beta == pytest.approx(0.25 * 0.95 + 0.75 * 0.05)
    assert 0 < p.capacity < 1


@pytest.mark.parametrize("bad", [dict(G=4, L=2), dict(m=4), dict(m=0), dict(alpha=0.5), dict(q=1), dict(N=0)])
def test_params_reject(bad):
    with pytest.raises(ValueError):
        params(**bad)


def test_word_encoding_msb_first():
    assert encode_word((0, 1), 2) == 1
    assert encode_word((1, 0), 2) == 2
    assert encode_word((2, 1, 0), 3) == 21
    for code in range(27):
        assert encode_word(decode_word(code, 3, 3), 3) == code
    assert list(encode_rows(np.array([[0, 1], [1, 1]]), 2)) == [1, 3]


def test_sample_function_two_functions():
    rng = substream(21)
    draws = [sample_function(rng, 2, 1, 1).patterns for _ in range(10_000)]
    assert abs(np.mean([d == (0,) for d in draws]) - 0.5) < 0.02


def test_sample_function_rejects_degenerate():
    with pytest.raises(ValueError):
        sample_function(substream(0), 2, 2, 4)


def test_sample_function_chi_square():
    rng = substream(22)
    sets = list(itertools.combinations(range(4), 2))
    counts = dict.fromkeys(sets, 0)
    for _ in range(6000):
        counts[sample_function(rng, 2, 2, 2).patterns] += 1
    assert stats.chisquare(list(counts.values())).pvalue > 0.001


def test_evaluate():
    f = PatternFunction(2, 2, (encode_word((0, 1), 2),))
    assert evaluate(f, (0, 1)) == 1
    assert evaluate(f, (1, 1)) == 0
    g = PatternFunction(3, 2, (0, 4, 7))
    assert sum(evaluate(g, w) for w in itertools.product(range(3), repeat=2)) == 3
    with pytest.raises(ValueError):
        evaluate(f, (0, 1, 1))
    with pytest.raises(ValueError):
        evaluate(f, (0, 2))


def test_pattern_function_validation():
    with pytest.raises(ValueError):
        PatternFunction(2, 2, (1, 1))
    with pytest.raises(ValueError):
        PatternFunction(2, 2, (4,))
    assert PatternFunction(2, 2, (3, 0)).patterns == (0, 3)


def test_extract():
    x = np.array([10, 11, 12, 13])
    assert list(extract(x, (1, 3))) == [11, 13]
    assert list(extract(x, (0, 1))) == [10, 11]
    y = x.copy()
    y[[0, 2]] = 99
    assert list(extract(y, (1, 3))) == list(extract(x, (1, 3)))
    with pytest.raises(IndexError):
        extract(x, (2, 4))


def _truth(seed, p):
    rng = substream(seed, 0, 1)
    s = tuple(sorted(rng.choice(p.G, p.L, replace=False).tolist()))
    return s, sample_function(rng, p.q, p.L, p.m)


def test_noiseless_labels_equal_function():
    p = params(alpha=0.0, N=500, q=3, m=2)
    s, f = _truth(1, p)
    data = generate_dataset(substream(1, 0, 2), p, s, f)
    expected = [evaluate(f, extract(x, s)) for x in data.genomes]
    assert list(data.labels) == expected


def test_label_rate_matches_beta():
    p = params(N=100_000, alpha=0.1)
    s, f = _truth(2, p)
    data = generate_dataset(substream(2, 0, 2), p, s, f)
    assert abs(data.labels.mean() - p.beta) < 3 * math.sqrt(p.beta * (1 - p.beta) / p.N)


def test_generation_deterministic():
    p = params()
    s, f = _truth(3, p)
    a = generate_dataset(substream(3, 0, 2), p, s, f)
    b = generate_dataset(substream(3, 0, 2), p, s, f)
    assert a == b
    assert np.array_equal(a.genomes, b.genomes)


def test_labels_reconstruct_from_noise():
    p = params(q=4, G=9, L=3, N=2000, m=5, alpha=0.3)
    s, f = _truth(4, p)
    data = generate_dataset(substream(4, 0, 2), p, s, f, keep_noise=True)
    clean = f.lookup_table()[encode_rows(extract(data.genomes, s), p.q)]
    assert np.array_equal(clean ^ data.noise, data.labels)


def test_genome_marginals_uniform():
    p = params(q=3, G=5, L=2, N=100_000, m=2)
    s, f = _truth(5, p)
    data = generate_dataset(substream(5, 0, 2), p, s, f, keep_noise=True)
    sigma = math.sqrt((1 / 3) * (2 / 3) / p.N)
    for a in range(3):
        assert np.all(np.abs((data.genomes == a).mean(axis=0) - 1 / 3) < 4 * sigma)
    clean = f.lookup_table()[encode_rows(extract(data.genomes, s), p.q)]
    assert abs(clean.mean() - p.gamma) < 4 * math.sqrt(p.gamma * (1 - p.gamma) / p.N)
    assert abs(data.noise.mean() - p.alpha) < 4 * math.sqrt(p.alpha * (1 - p.alpha) / p.N)


def test_generate_rejects_mismatched_function():
    p = params()
    with pytest.raises(ValueError):
        generate_dataset(substream(0), p, (0, 1), PatternFunction(2, 2, (0, 1)))


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 4)), np.zeros(2))
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 4)), np.array([0, 1, 2]))


def test_dataset_round_trip(tmp_path):
    p = params(q=3, N=57, alpha=0.123456789)
    s, f = _truth(6, p)
    data = generate_dataset(substream(6, 0, 2), p, s, f)
    path = tmp_path / "d.txt"
    write_dataset(path, data, p, seed=6, s=s, f=f)
    back, p2, meta = read_dataset(path)
    assert back == data and p2 == p
    assert meta == {"seed": 6, "s": s, "f": f}
    lines = path.read_text().splitlines()
    assert lines[0].startswith("#gwas-dataset q=3 G=12 L=2 N=57 m=1 alpha=0.123456789 seed=6")
    assert len(lines) == 58 and "\t" in lines[1]
    path2 = tmp_path / "e.txt"
    write_dataset(path2, back, p2, seed=6, s=s, f=f)
    assert path2.read_bytes() == path.read_bytes()


def _exact_subset_tail(n, m, t, eps):
    # enumerate every weight-m vector
    hits = total = 0
    for chosen in itertools.combinations(range(n), m):
        k = sum(1 for i in chosen if i < t)
        total += 1
        hits += abs(k / t - m / n) >= eps - 1e-12
    return hits / total


def test_concentration_unreachable_deviation():
    emp, bound = subset_sum_concentration_check(substream(31), 4, 2, (0, 1), 1.0, 5000)
    assert _exact_subset_tail(4, 2, 2, 1.0) == 0.0
    assert emp == 0.0 and bound == pytest.approx(2 * 5 * math.exp(-4))


def test_concentration_deterministic_vector():
    emp, _ = subset_sum_concentration_check(substream(32), 2, 2, (1,), 0.1, 1000)
    assert emp == 0.0


def test_concentration_matches_hypergeometric():
    n, m, T, eps, trials = 20, 10, range(5), 0.3, 100_000
    emp, bound = subset_sum_concentration_check(substream(33), n, m, T, eps, trials)
    exact = sum(stats.hypergeom.pmf(k, n, m, 5) for k in range(6) if abs(k / 5 - 0.5) >= 0.3 - 1e-12)
    assert bound == pytest.approx(2 * 21 * math.exp(-0.9))
    se = math.sqrt(exact * (1 - exact) / trials)
    assert emp <= bound + 3 * se
    assert abs(emp - exact) < 4 * se


def test_concentration_exhaustive_small():
    n, m, T, eps = 8, 3, (0, 1, 2), 0.3
    exact = _exact_subset_tail(n, m, 3, eps)
    emp, _ = subset_sum_concentration_check(substream(34), n, m, T, eps, 50_000)
    assert abs(emp - exact) < 4 * math.sqrt(exact * (1 - exact) / 50_000)


def test_concentration_domain():
    with pytest.raises(ValueError):
        subset_sum_concentration_check(substream(0), 3, 4, (0,), 0.1, 10)
    with pytest.raises(ValueError):
        subset_sum_concentration_check(substream(0), 3, 1, (), 0.1, 10)
