"""Exhaustive recovery procedures for the causal subsequence.

* :func:`typicality_decode` scans every candidate subsequence and every
  pattern function and keeps the candidates that admit a jointly typical
  witness.
* :func:`refine_in_ball` runs the same rule restricted to a ball around a
  coarse estimate.
* :func:`ml_decode` is an exact maximum-likelihood oracle. For a fixed
  candidate the number of labels matched by ``g`` is
  ``n0_total + sum_{p in g} (n1(p) - n0(p))``, so the optimal ``g`` takes
  the ``m`` patterns with the largest ``n1 - n0``; no search over
  functions is needed.

The first three also come as scikit-learn estimators. They are feature
selectors (``get_support`` / ``transform`` expose the recovered columns) and
``predict`` applies the recovered pattern function.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.feature_selection import SelectorMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import InfeasibleError
from .model import Dataset, ModelParams, PatternFunction, encode_rows
from .rng import as_generator
from .subseq import ball, check_subsequence, enumerate_subsequences
from .typicality import default_tau, deviations_from_counts, joint_pmf
from .utils.validation import check_dataset, check_genomes_labels

DEFAULT_BUDGET = 10**8

UNIQUE = "unique-typical"
TIE = "tie-broken-random"
FALLBACK = "fallback-random"
ML_ARGMAX = "ml-argmax"
ML_TIE = "ml-tie-broken"


@dataclass(frozen=True)
class DecodeResult:
    estimate: tuple
    status: str
    candidates_examined: int
    witness_function: PatternFunction | None = None
    accepted: tuple = field(default=(), repr=False)
    score: int | None = None

    def __post_init__(self):
        typical = self.status in (UNIQUE, TIE)
        if typical != (self.witness_function is not None):
            raise ValueError("a witness function accompanies exactly the typicality acceptances")


def function_space(n_words: int, m: int) -> np.ndarray:
    """Indicator matrix (C(n_words, m), n_words) of all pattern sets, in
    lexicographic order of the sorted pattern tuples."""
    combos = np.array(list(itertools.combinations(range(n_words), m)), dtype=np.int64)
    M = np.zeros((combos.shape[0], n_words), dtype=np.int64)
    np.put_along_axis(M, combos, 1, axis=1)
    return M


def _check_budget(n_candidates: int, per_candidate: int, budget: int):
    cost = n_candidates * per_candidate
    if cost > budget:
        raise InfeasibleError(
            f"{n_candidates} candidates x {per_candidate} evaluations = {cost} exceeds budget {budget}")


def pattern_counts(data: Dataset, candidates: np.ndarray, q: int, L: int):
    """Per-candidate label-1 and label-0 counts of every word.

    Returns ``(n1, n0)``, each of shape (len(candidates), q**L).
    """
    n_words = q**L
    K = candidates.shape[0]
    X = np.asarray(data.genomes, dtype=np.int64)
    weights = q ** np.arange(L - 1, -1, -1, dtype=np.int64)
    # codes[n, k] = word of individual n at candidate k
    codes = np.tensordot(X[:, candidates], weights, axes=([2], [0]))
    codes = codes + n_words * np.arange(K, dtype=np.int64)
    ones = data.labels.astype(bool)
    n1 = np.bincount(codes[ones].ravel(), minlength=K * n_words).reshape(K, n_words)
    n0 = np.bincount(codes[~ones].ravel(), minlength=K * n_words).reshape(K, n_words)
    return n1, n0


def _scan_chunk(data, candidates, params, pmf, tau, funcs):
    """Acceptance flag, witness index and evaluation count per candidate."""
    n1, n0 = pattern_counts(data, candidates, params.q, params.L)
    tot1 = n1.sum(axis=1, keepdims=True)
    tot0 = n0.sum(axis=1, keepdims=True)
    n11 = n1 @ funcs.T
    n10 = n0 @ funcs.T
    d_u, d_v, d_uv = deviations_from_counts(n11, n10, tot1 - n11, tot0 - n10, pmf)
    typical = (d_u < tau) & (d_v < tau) & (d_uv < tau)
    accepted = typical.any(axis=1)
    first = np.argmax(typical, axis=1)
    examined = np.where(accepted, first + 1, funcs.shape[0])
    return accepted, first, examined


def _candidate_chunks(candidates: np.ndarray, n_funcs: int, N: int, n_chunks: int):
    per = max(1, min(2_000_000 // max(n_funcs, 1), 4_000_000 // max(N, 1)))
    per = min(per, max(1, math.ceil(len(candidates) / max(n_chunks, 1))))
    return [candidates[i:i + per] for i in range(0, len(candidates), per)]


def _typicality_scan(data, candidate_list, params, tau, rng, budget, n_jobs, fallback_pool):
    n_funcs = math.comb(params.n_words, params.m)
    _check_budget(len(candidate_list), n_funcs, budget)
    if tau <= 0:
        raise ValueError("tau must be positive")
    pmf = joint_pmf(params.gamma, params.alpha)
    funcs = function_space(params.n_words, params.m)
    cands = np.array(candidate_list, dtype=np.int64).reshape(len(candidate_list), params.L)
    workers = 1 if n_jobs in (None, 1) else n_jobs
    chunks = _candidate_chunks(cands, n_funcs, data.N, workers)
    if workers == 1:
        parts = [_scan_chunk(data, c, params, pmf, tau, funcs) for c in chunks]
    else:
        parts = Parallel(n_jobs=workers)(delayed(_scan_chunk)(data, c, params, pmf, tau, funcs) for c in chunks)
    accepted = np.concatenate([p[0] for p in parts])
    first = np.concatenate([p[1] for p in parts])
    examined = int(sum(int(p[2].sum()) for p in parts))
    # canonical (lexicographic) order before the tie-break draw
    order = sorted(range(len(candidate_list)), key=lambda k: candidate_list[k])
    acc_idx = [k for k in order if accepted[k]]
    acc = tuple(candidate_list[k] for k in acc_idx)
    if not acc:
        est = fallback_pool(rng)
        return DecodeResult(est, FALLBACK, examined, None, ())
    pick = acc_idx[int(rng.integers(len(acc_idx)))] if len(acc_idx) > 1 else acc_idx[0]
    combo = np.flatnonzero(funcs[first[pick]])
    witness = PatternFunction(params.q, params.L, tuple(int(p) for p in combo))
    status = UNIQUE if len(acc_idx) == 1 else TIE
    return DecodeResult(candidate_list[pick], status, examined, witness, acc)


def typicality_decode(data: Dataset, params: ModelParams, tau: float | None = None, rng=None,
                      budget: int = DEFAULT_BUDGET, n_jobs: int | None = None) -> DecodeResult:
    """Joint-typicality decoder over all of S_{L,G}.

    ``tau`` defaults to 5% of the joint entropy of (f(X_s), Y).
    """
    check_dataset(data, params)
    rng = as_generator(rng)
    if tau is None:
        tau = default_tau(joint_pmf(params.gamma, params.alpha))
    candidates = list(enumerate_subsequences(params.L, params.G))
    return _typicality_scan(data, candidates, params, tau, rng, budget, n_jobs,
                            lambda r: candidates[int(r.integers(len(candidates)))])


def refine_in_ball(data: Dataset, s_tilde, epsilon: float, params: ModelParams, tau: float | None = None,
                   rng=None, budget: int = DEFAULT_BUDGET, n_jobs: int | None = None) -> DecodeResult:
    """Typicality rule restricted to the ball of radius L*epsilon around ``s_tilde``."""
    check_dataset(data, params)
    s_tilde = check_subsequence(s_tilde, params.L, params.G)
    rng = as_generator(rng)
    if tau is None:
        tau = default_tau(joint_pmf(params.gamma, params.alpha))
    candidates = ball(s_tilde, epsilon, params.G)
    return _typicality_scan(data, candidates, params, tau, rng, budget, n_jobs,
                            lambda r: candidates[int(r.integers(len(candidates)))])


def _ml_scores(data, candidates, params):
    n1, n0 = pattern_counts(data, candidates, params.q, params.L)
    gain = n1 - n0
    # greedy top-m per candidate; ties broken towards smaller pattern codes
    order = np.argsort(-gain, axis=1, kind="stable")[:, :params.m]
    best = np.take_along_axis(gain, order, axis=1).sum(axis=1)
    return n0.sum(axis=1) + best, order


def ml_function(data: Dataset, s, params: ModelParams) -> PatternFunction:
    """Pattern function matching the most labels on candidate ``s``."""
    s = check_subsequence(s, params.L, params.G)
    _, order = _ml_scores(data, np.array([s], dtype=np.int64), params)
    return PatternFunction(params.q, params.L, tuple(int(p) for p in order[0]))


def ml_decode(data: Dataset, params: ModelParams, rng=None, budget: int = DEFAULT_BUDGET) -> DecodeResult:
    """Maximum-likelihood estimate of s (uniform prior on s and f, alpha < 1/2)."""
    check_dataset(data, params)
    rng = as_generator(rng)
    candidates = list(enumerate_subsequences(params.L, params.G))
    _check_budget(len(candidates), params.n_words, budget)
    cands = np.array(candidates, dtype=np.int64)
    scores = []
    for chunk in _candidate_chunks(cands, params.n_words, data.N, 1):
        scores.append(_ml_scores(data, chunk, params)[0])
    scores = np.concatenate(scores)
    top = np.flatnonzero(scores == scores.max())
    if len(top) == 1:
        k, status = int(top[0]), ML_ARGMAX
    else:
        k, status = int(top[int(rng.integers(len(top)))]), ML_TIE
    return DecodeResult(candidates[k], status, len(candidates) * params.n_words, None,
                        tuple(candidates[i] for i in top), int(scores[k]))


def pattern_count(genomes, t, q: int, L: int, m: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of distinct label vectors (g(x_{n,t}))_n over all g in F_{L,m}."""
    genomes = np.asarray(genomes)
    if genomes.ndim != 2:
        raise ValueError("genomes must be a 2-d array")
    N = genomes.shape[0]
    if N < m:
        raise ValueError(f"need N={N} >= m={m}")
    t = check_subsequence(t, L, genomes.shape[1])
    n_words = q**L
    if not 1 <= m <= n_words - 1:
        raise ValueError(f"m={m} must lie in [1, {n_words - 1}]")
    _check_budget(1, math.comb(n_words, m) * N, budget)
    codes = encode_rows(genomes[:, list(t)], q)
    funcs = function_space(n_words, m)
    vectors = funcs[:, codes].astype(np.uint8)
    return len({row.tobytes() for row in vectors})


# -- estimator front-ends ----------------------------------------------------


class _SubsequenceDecoder(SelectorMixin, ClassifierMixin, BaseEstimator):
    def _model_params(self, X):
        q = self.q if self.q is not None else max(2, int(X.max()) + 1)
        if X.max() >= q:
            raise ValueError(f"genome symbols must be below q={q}")
        return ModelParams(q=q, G=X.shape[1], L=self.L, N=X.shape[0], m=self.m, alpha=self.alpha)

    def _decode(self, data, params, rng):
        raise NotImplementedError

    def fit(self, X, y):
        X, y = check_genomes_labels(X, y)
        params = self._model_params(X)
        data = Dataset(X, y)
        rng = as_generator(self.random_state)
        self.params_ = params
        self.n_features_in_ = X.shape[1]
        self.result_ = self._decode(data, params, rng)
        self.support_ = self.result_.estimate
        self.function_ = self.result_.witness_function or ml_function(data, self.support_, params)
        self.classes_ = np.array([0, 1])
        return self

    def _get_support_mask(self):
        check_is_fitted(self, "support_")
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[list(self.support_)] = True
        return mask

    def predict(self, X):
        """Noise-free label prediction f(x_s) with the recovered (s, f)."""
        check_is_fitted(self, "support_")
        X, _ = check_genomes_labels(X, None, n_features=self.n_features_in_)
        codes = encode_rows(X[:, list(self.support_)], self.params_.q)
        return self.function_.lookup_table()[codes].astype(int)


class TypicalityDecoder(_SubsequenceDecoder):
    """Joint-typicality decoder as an estimator.

    Parameters
    ----------
    L, m : int
        Causal length and pattern count.
    alpha : float
        Label noise probability in [0, 1/2).
    q : int, optional
        Alphabet size; inferred from the data when omitted.
    tau : float, optional
        Typicality slack, default 5% of H(f(X_s), Y).
    random_state : int or numpy Generator, optional
        Drives tie-breaks and fallbacks.
    """

    def __init__(self, L=1, m=1, alpha=0.0, q=None, tau=None, random_state=None,
                 budget=DEFAULT_BUDGET, n_jobs=None):
        self.L = L
        self.m = m
        self.alpha = alpha
        self.q = q
        self.tau = tau
        self.random_state = random_state
        self.budget = budget
        self.n_jobs = n_jobs

    def _decode(self, data, params, rng):
        return typicality_decode(data, params, self.tau, rng, self.budget, self.n_jobs)


class BallRefinementDecoder(_SubsequenceDecoder):
    """Typicality decoding inside the ball of radius ``L * epsilon`` around
    ``center`` (0-based). Without a centre, a full typicality scan supplies it."""

    def __init__(self, L=1, m=1, alpha=0.0, epsilon=0.25, center=None, q=None, tau=None,
                 random_state=None, budget=DEFAULT_BUDGET, n_jobs=None):
        self.L = L
        self.m = m
        self.alpha = alpha
        self.epsilon = epsilon
        self.center = center
        self.q = q
        self.tau = tau
        self.random_state = random_state
        self.budget = budget
        self.n_jobs = n_jobs

    def _decode(self, data, params, rng):
        center = self.center
        if center is None:
            center = typicality_decode(data, params, self.tau, rng, self.budget, self.n_jobs).estimate
        self.center_ = tuple(center)
        return refine_in_ball(data, center, self.epsilon, params, self.tau, rng, self.budget, self.n_jobs)


class MLDecoder(_SubsequenceDecoder):
    """Exact maximum-likelihood decoder as an estimator."""

    def __init__(self, L=1, m=1, alpha=0.0, q=None, random_state=None, budget=DEFAULT_BUDGET):
        self.L = L
        self.m = m
        self.alpha = alpha
        self.q = q
        self.random_state = random_state
        self.budget = budget

    def _decode(self, data, params, rng):
        return ml_decode(data, params, rng, self.budget)
