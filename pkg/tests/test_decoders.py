import math

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.linear_model import LogisticRegression
from sklearn.pipeline import Pipeline

from gwas_limits import BallRefinementDecoder, MLDecoder, ModelParams, PatternFunction, TypicalityDecoder
from gwas_limits.decoders import (DecodeResult, function_space, ml_decode, pattern_count, refine_in_ball,
                                  typicality_decode)
from gwas_limits.entropy import sauer_bound
from gwas_limits.exceptions import InfeasibleError
from gwas_limits.harness.verify import brute_force_ml
from gwas_limits.model import encode_rows, generate_dataset, sample_function
from gwas_limits.rng import substream
from gwas_limits.subseq import ball, sample_uniform_subsequence
from gwas_limits.typicality import is_jointly_typical, joint_pmf


def _instance(seed, params, s=None):
    rng = substream(seed)
    s = s if s is not None else sample_uniform_subsequence(rng, params.L, params.G)
    f = sample_function(rng, params.q, params.L, params.m)
    return s, f, generate_dataset(rng, params, s, f), rng


def test_function_space():
    M = function_space(4, 2)
    assert M.shape == (6, 4)
    assert (M.sum(axis=1) == 2).all()
    assert M[0].tolist() == [1, 1, 0, 0]
    assert M[-1].tolist() == [0, 0, 1, 1]


def test_noiseless_single_locus_recovery():
    params = ModelParams(q=2, G=6, L=1, m=1, N=64, alpha=0.0)
    hits = 0
    for k in range(100):
        s, _, data, rng = _instance(1000 + k, params)
        res = typicality_decode(data, params, tau=0.1, rng=rng)
        hits += s in res.accepted
    assert hits >= 95


def test_witness_reproduces_labels_when_noiseless():
    params = ModelParams(q=2, G=6, L=2, m=1, N=200, alpha=0.0)
    s, f, data, rng = _instance(5, params)
    res = typicality_decode(data, params, tau=0.1, rng=rng)
    assert res.status == "unique-typical"
    assert res.estimate == s and res.witness_function == f


def test_budget_guard():
    params = ModelParams(q=2, G=40, L=4, m=3, N=10, alpha=0.1)
    _, _, data, rng = _instance(2, params)
    with pytest.raises(InfeasibleError):
        typicality_decode(data, params, rng=rng, budget=10**6)
    with pytest.raises(InfeasibleError):
        ml_decode(data, params, rng=rng, budget=10**4)


def test_fallback_status():
    # N = 31 keeps every empirical cell frequency off the true pmf
    params = ModelParams(q=2, G=5, L=1, m=1, N=31, alpha=0.1)
    _, _, data, rng = _instance(3, params)
    res = typicality_decode(data, params, tau=1e-9, rng=rng)
    assert res.status == "fallback-random"
    assert res.witness_function is None and res.accepted == ()
    assert res.candidates_examined == 5 * 2


def test_decode_result_contract():
    with pytest.raises(ValueError):
        DecodeResult((0,), "unique-typical", 1)
    with pytest.raises(ValueError):
        DecodeResult((0,), "fallback-random", 1, PatternFunction(2, 1, (0,)))


def test_singleton_ball_returns_center():
    params = ModelParams(q=2, G=8, L=3, m=2, N=40, alpha=0.1)
    _, _, data, rng = _instance(4, params)
    for center in [(0, 1, 2), (2, 5, 7)]:
        res = refine_in_ball(data, center, 0.0, params, tau=0.2, rng=rng)
        assert res.estimate == center


def test_refine_examined_bound():
    params = ModelParams(q=2, G=8, L=3, m=2, N=40, alpha=0.1)
    s, _, data, rng = _instance(6, params)
    for eps in (0.0, 0.34, 0.67, 1.0):
        res = refine_in_ball(data, s, eps, params, tau=0.1, rng=rng)
        assert res.candidates_examined <= len(ball(s, eps, params.G)) * math.comb(params.n_words, params.m)
        assert res.estimate in ball(s, eps, params.G)


def test_refine_full_ball_matches_full_scan():
    params = ModelParams(q=2, G=7, L=2, m=1, N=50, alpha=0.1)
    s, _, data, _ = _instance(7, params)
    a = typicality_decode(data, params, 0.1, substream(99))
    b = refine_in_ball(data, (0, 1), 2.0, params, 0.1, substream(99))
    assert a == b


def test_wrong_candidate_acceptance_decays():
    # fixed g, wrong candidate (2, 3) at distance 4 from the truth (0, 1)
    base = ModelParams(q=2, G=6, L=2, m=1, N=50, alpha=0.1)
    g = PatternFunction(2, 2, (3,))
    pmf = joint_pmf(base.gamma, base.alpha)
    rates, ses = [], []
    for N in (50, 100, 200, 400):
        params = base.replace(N=N)
        acc = 0
        for k in range(1000):
            data = generate_dataset(substream(8, k), params, (0, 1), g)
            u = g.lookup_table()[encode_rows(data.genomes[:, [2, 3]], 2)]
            acc += is_jointly_typical(u, data.labels, pmf, 0.5).is_typical
        p = acc / 1000
        rates.append(p)
        ses.append(math.sqrt(p * (1 - p) / 1000))
    for i in range(len(rates) - 1):
        assert rates[i + 1] <= rates[i] + 2 * math.hypot(ses[i], ses[i + 1])
    assert rates[-1] < rates[0]


def test_determinism_and_parallel():
    params = ModelParams(q=3, G=7, L=2, m=3, N=60, alpha=0.2)
    _, _, data, _ = _instance(9, params)
    serial = typicality_decode(data, params, 0.3, substream(1))
    again = typicality_decode(data, params, 0.3, substream(1))
    parallel = typicality_decode(data, params, 0.3, substream(1), n_jobs=2)
    assert serial == again == parallel


def test_alphabet_relabel_symmetry():
    params = ModelParams(q=3, G=6, L=2, m=3, N=80, alpha=0.1)
    _, _, data, _ = _instance(10, params)
    perm = np.array([2, 0, 1], dtype=np.uint8)
    relabeled = type(data)(perm[data.genomes], data.labels)
    a = typicality_decode(data, params, 0.2, substream(3))
    b = typicality_decode(relabeled, params, 0.2, substream(3))
    assert a.accepted == b.accepted


def test_ml_noiseless_scores_all():
    params = ModelParams(q=2, G=6, L=2, m=1, N=50, alpha=0.0)
    s, _, data, rng = _instance(11, params)
    res = ml_decode(data, params, rng)
    assert res.score == 50 and s in res.accepted
    assert res.witness_function is None


@pytest.mark.parametrize("seed", range(5))
def test_ml_matches_brute_force(seed):
    params = ModelParams(q=2, G=4, L=1, m=1, N=8, alpha=0.2)
    _, _, data, rng = _instance(200 + seed, params)
    res = ml_decode(data, params, rng)
    arg, best = brute_force_ml(data, params)
    assert sorted(res.accepted) == arg and res.score == best


def test_pattern_count_examples():
    genomes = np.array([[0], [1], [0], [1], [1]])
    assert pattern_count(genomes, (0,), 2, 1, 1) == 2
    genomes = np.array([[0, 0], [0, 1], [1, 0]])
    # three distinct words on 4 patterns with m = 1: one label vector per word, plus all-zero
    assert pattern_count(genomes, (0, 1), 2, 2, 1) == 4
    rng = substream(12)
    for _ in range(20):
        N = int(rng.integers(2, 9))
        g = rng.integers(0, 2, size=(N, 4))
        c = pattern_count(g, (0, 2), 2, 2, 2)
        assert math.log2(c) <= sauer_bound(N, 2) + 1e-12
    with pytest.raises(ValueError):
        pattern_count(np.zeros((1, 3)), (0,), 2, 1, 2)


def test_estimator_api():
    params = ModelParams(q=2, G=6, L=2, m=1, N=200, alpha=0.0)
    s, f, data, _ = _instance(13, params)
    X, y = data.genomes, data.labels
    est = TypicalityDecoder(L=2, m=1, alpha=0.0, q=2, tau=0.1, random_state=0)
    assert est.get_params()["tau"] == 0.1
    assert clone(est).get_params() == est.get_params()
    est.fit(X, y)
    assert est.support_ == s
    assert est.get_support(indices=True).tolist() == list(s)
    assert est.transform(X).shape == (200, 2)
    assert (est.predict(X) == y).all()
    assert est.score(X, y) == 1.0

    ml = MLDecoder(L=2, m=1, alpha=0.0, q=2, random_state=0).fit(X, y)
    assert ml.support_ == s and (ml.predict(X) == y).all()

    br = BallRefinementDecoder(L=2, m=1, alpha=0.0, epsilon=0.5, q=2, tau=0.1, random_state=0).fit(X, y)
    assert br.center_ == s and br.support_ == s

    pipe = Pipeline([("select", TypicalityDecoder(L=2, m=1, alpha=0.0, q=2, tau=0.1, random_state=0)),
                     ("clf", LogisticRegression())])
    pipe.fit(X, y)
    assert pipe.predict(X).shape == (200,)


def test_estimator_input_checks():
    est = TypicalityDecoder(L=1, m=1, alpha=0.1, q=2)
    with pytest.raises(ValueError):
        est.fit(np.array([[0, 2], [1, 0]]), [0, 1])
    with pytest.raises(ValueError):
        est.fit(np.zeros((3, 2)), [0, 1])
