"""Property suites over every module, runnable from the command line.

Each check reports pass/fail and its measured slack (how far the tightest
case sits from violating the property; negative means a violation).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from .. import divergence as dv
from .. import entropy as em
from ..decoders import function_space, ml_decode, pattern_count
from ..model import (ModelParams, PatternFunction, encode_rows, evaluate, extract, generate_dataset,
                     sample_function, subset_sum_concentration_check)
from ..rng import substream
from ..subseq import ball, dist, enumerate_subsequences, ints, sample_uniform_subsequence

TOL = 1e-12
SUITES = ("inequalities", "combinatorics", "divergence", "model", "decoder-oracle")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    slack: float
    detail: str = ""

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: slack={self.slack:.3g} {self.detail}".rstrip()


def _check(name, slack, tol=0.0, detail=""):
    return Check(name, bool(slack >= -tol), float(slack), detail)


# -- inequalities ------------------------------------------------------------

def check_capacity_grid(n_points: int = 50) -> Check:
    """capacity and converse_bound against an independent mpmath evaluation."""
    import mpmath

    mpmath.mp.dps = 40

    def h(p):
        p = mpmath.mpf(p)
        if p == 0 or p == 1:
            return mpmath.mpf(0)
        return -p * mpmath.log(p, 2) - (1 - p) * mpmath.log(1 - p, 2)

    rng = substream(101)
    worst = 0.0
    for _ in range(n_points):
        alpha = float(rng.uniform(0.0, 0.45))
        beta = float(rng.uniform(alpha + 1e-3, 1 - alpha - 1e-3))
        eps = float(rng.uniform(1e-3, 0.45))
        cap_ref = h(beta) - h(alpha)
        conv_ref = cap_ref / (1 - h(eps))
        worst = max(worst, abs(em.capacity(alpha, beta) - float(cap_ref)),
                    abs(em.converse_bound(alpha, beta, eps) - float(conv_ref)))
    return _check("capacity/converse vs 40-digit evaluation", 1e-12 - worst, detail=f"max_err={worst:.2e}")


def check_entropy_symmetry_concavity(n: int = 10_000) -> list[Check]:
    rng = substream(102)
    p = rng.random(n)
    r = rng.random(n)
    h = em.binary_entropy_array
    sym = float(np.max(np.abs(h(p) - h(1 - p))))
    conc = float(np.min(h((p + r) / 2) - (h(p) + h(r)) / 2))
    return [_check("h symmetry", 1e-12 - sym), _check("h midpoint concavity", conc, TOL)]


def check_entropy_product(n: int = 200) -> Check:
    x = np.linspace(0.0, 0.5, n)
    X, Y = np.meshgrid(x, x)
    h = em.binary_entropy_array
    gap = h(X) * h(Y) - h(2 * X * Y)
    return _check(f"h(2xy) <= h(x)h(y) on {n}x{n} grid", float(gap.min()), TOL)


def check_delta_identity(eps_values=(0.05, 0.1, 0.25, 0.4), grid_points: int = 100_000) -> list[Check]:
    out = []
    for e in eps_values:
        sup = em.delta_sup_numeric(e, grid_points)
        out.append(_check(f"delta_sup({e}) agrees with h(eps)", 1e-6 - abs(sup - em.binary_entropy(e))))
    coarse = [em.binary_entropy(e) + 1e-9 - em.delta_sup_numeric(e, 1000) for e in np.linspace(0.01, 0.49, 25)]
    out.append(_check("delta_sup <= h(eps) + 1e-9", float(min(coarse))))
    return out


def check_converse_dominates() -> Check:
    worst = math.inf
    for alpha in np.linspace(0, 0.45, 10):
        for beta in np.linspace(alpha + 0.01, 1 - alpha - 0.01, 10):
            for eps in np.linspace(0.01, 0.45, 10):
                worst = min(worst, em.converse_bound(alpha, beta, eps) - em.capacity(alpha, beta))
    return _check("converse_bound >= capacity", worst, TOL)


def check_beta_range() -> Check:
    worst = math.inf
    for g in np.linspace(0.01, 0.99, 50):
        for a in np.linspace(0.01, 0.49, 50):
            b = em.beta_from(g, a)
            worst = min(worst, b - a, 1 - a - b)
    return _check("beta_from in (alpha, 1 - alpha)", worst - 1e-15)


def suite_inequalities() -> list[Check]:
    return [check_capacity_grid(), *check_entropy_symmetry_concavity(), check_entropy_product(),
            *check_delta_identity(), check_converse_dominates(), check_beta_range()]


# -- combinatorics -----------------------------------------------------------

def check_sauer(max_n: int = 64) -> Check:
    worst = math.inf
    for N in range(1, max_n + 1):
        for m in range(1, N + 1):
            worst = min(worst, em.sauer_bound(N, m) - math.log2(em.sauer_exact_sum(N, m)))
    return _check(f"Sauer sum <= (eN/m)^m for 1 <= m <= N <= {max_n}", worst, TOL)


def check_binom_bracket(max_g: int = 40) -> Check:
    worst = math.inf
    for G in range(2, max_g + 1):
        for L in range(1, G):
            lo, hi = em.binom_entropy_bounds(G, L)
            exact = math.log2(math.comb(G, L))
            worst = min(worst, exact - lo, hi - exact)
    return _check(f"log2 C(G, L) bracket for G <= {max_g}", worst, TOL)


def _ball_eps_values(L):
    # every radius that changes the ball, plus non-integer radii in between
    return sorted({k / L for k in range(1, 2 * L + 1)} | {(k + 0.5) / L for k in range(1, 2 * L)})


def check_ball_bound(max_g: int = 8) -> Check:
    worst = math.inf
    cases = 0
    for G in range(3, max_g + 1):
        for L in range(1, (G + 1) // 2):
            center = tuple(range(L))
            for eps in _ball_eps_values(L):
                if L * eps < 1 or eps > 1 or 2 * eps * L / G > 1:
                    continue
                size = len(ball(center, eps, G))
                worst = min(worst, em.ball_size_log_bound(G, L, eps) - math.log2(size))
                cases += 1
    return _check(f"|ball| <= 2^bound for G <= {max_g}", worst, TOL, f"cases={cases}")


def check_ball_center_independent(max_g: int = 7) -> Check:
    bad = 0
    for G in range(3, max_g + 1):
        for L in range(1, (G + 1) // 2):
            for eps in _ball_eps_values(L):
                sizes = {len(ball(c, eps, G)) for c in enumerate_subsequences(L, G)}
                bad += len(sizes) != 1
    return _check("|ball| independent of centre", -bad)


def check_metric(max_g: int = 7) -> list[Check]:
    tri = ident = rel = 0
    for G in range(2, max_g + 1):
        for L in range(1, G):
            S = list(enumerate_subsequences(L, G))
            D = {(a, b): dist(a, b) for a in S for b in S}
            for a in S:
                for b in S:
                    ident += (D[a, b] == 0) != (a == b)
                    ident += D[a, b] != D[b, a]
                    rel += D[a, b] != 2 * (L - len(ints(a, b)))
            if len(S) <= 40:
                for a, b, c in itertools.product(S, repeat=3):
                    tri += D[a, c] > D[a, b] + D[b, c]
    return [_check("dist identity and symmetry", -ident), _check("dist triangle inequality", -tri),
            _check("dist = 2 (L - len ints)", -rel)]


def suite_combinatorics() -> list[Check]:
    return [check_sauer(), check_binom_bracket(), check_ball_bound(), check_ball_center_independent(),
            *check_metric()]


# -- divergence --------------------------------------------------------------

def _random_joint(rng, nu, nv):
    w = rng.random((nu, nv)) ** 2 + 1e-3
    return w / w.sum()


def _random_channel(rng, n_in, n_out):
    w = rng.random((n_in, n_out)) + 1e-3
    return w / w.sum(axis=1, keepdims=True)


def check_dpi(cases: int = 500) -> list[Check]:
    rng = substream(201)
    out = []
    for kernel in (dv.TV, dv.KL):
        worst = math.inf
        for _ in range(cases):
            nu, nv, nw = rng.integers(2, 5, size=3)
            i_uv, i_uw = dv.dpi_check(_random_joint(rng, nu, nv), _random_channel(rng, nv, nw), kernel)
            worst = min(worst, i_uv - i_uw)
        out.append(_check(f"data processing ({kernel.name}), {cases} chains", worst, TOL))
    return out


def check_markov4(cases: int = 500) -> Check:
    rng = substream(202)
    worst = math.inf
    for _ in range(cases):
        nu, nv, nw, nt = rng.integers(2, 5, size=4)
        outer, inner = dv.markov4_tv_check(_random_joint(rng, nv, nw), _random_channel(rng, nv, nu),
                                           _random_channel(rng, nw, nt))
        worst = min(worst, inner - outer)
    return _check(f"four-variable Markov L1 inequality, {cases} chains", worst, TOL)


def check_binary_tv_bound(cases: int = 10_000) -> Check:
    rng = substream(203)
    worst = math.inf
    for _ in range(cases):
        lhs, rhs = dv.tv_bound_binary(_random_joint(rng, int(rng.integers(1, 6)), 2))
        worst = min(worst, rhs - lhs)
    return _check(f"binary conditional L1 bound, {cases} joints", worst, TOL)


def check_mu_from_tv(cases: int = 10_000) -> Check:
    rng = substream(204)
    bad = 0
    for _ in range(cases):
        joint = _random_joint(rng, int(rng.integers(1, 5)), int(rng.integers(1, 5)))
        bad += not dv.mu_independent(joint, dv.mu_from_tv(joint))
    return _check(f"mu_from_tv validates mu-independence, {cases} joints", -bad)


def check_norms(cases: int = 10_000) -> Check:
    rng = substream(205)
    worst = math.inf
    for _ in range(cases):
        inf, l1, n_inf = dv.norm_sandwich(rng.normal(size=int(rng.integers(1, 10))))
        worst = min(worst, l1 - inf, n_inf - l1)
    return _check("l_inf <= l_1 <= n l_inf", worst, TOL)


def check_tv_matches_kernel(cases: int = 1000) -> Check:
    rng = substream(206)
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 8))
        p = rng.dirichlet(np.ones(n))
        q = rng.dirichlet(np.ones(n))
        worst = max(worst, abs(dv.total_variation(p, q) - dv.f_divergence(p, q, dv.TV)))
    return _check("total_variation equals the TV f-divergence", 1e-12 - worst)


def suite_divergence() -> list[Check]:
    return [*check_dpi(), check_markov4(), check_binary_tv_bound(), check_mu_from_tv(), check_norms(),
            check_tv_matches_kernel()]


# -- model -------------------------------------------------------------------

BETA_SETTINGS = (
    dict(q=2, L=1, m=1, alpha=0.0),
    dict(q=2, L=2, m=1, alpha=0.1),
    dict(q=2, L=2, m=2, alpha=0.3),
    dict(q=3, L=2, m=4, alpha=0.05),
    dict(q=4, L=1, m=3, alpha=0.2),
)


def check_beta_monte_carlo(n_samples: int = 100_000, seed: int = 301) -> list[Check]:
    out = []
    for k, cfg in enumerate(BETA_SETTINGS):
        params = ModelParams(G=2 * cfg["L"] + 1, N=n_samples, **cfg)
        rng = substream(seed, k, 1)
        s = sample_uniform_subsequence(rng, params.L, params.G)
        data = generate_dataset(substream(seed, k, 2), params, s, sample_function(rng, params.q, params.L, params.m))
        beta = params.beta
        se = math.sqrt(beta * (1 - beta) / n_samples)
        err = abs(data.labels.mean() - beta)
        out.append(_check(f"Pr(Y=1) = beta for {cfg}", 3 * se - err, detail=f"|err|={err:.2e} 3se={3 * se:.2e}"))
    return out


def check_generation_invariants(seed: int = 302) -> list[Check]:
    params = ModelParams(q=3, G=7, L=2, N=100_000, m=3, alpha=0.15)
    rng = substream(seed, 0, 1)
    s = sample_uniform_subsequence(rng, params.L, params.G)
    f = sample_function(rng, params.q, params.L, params.m)
    data = generate_dataset(substream(seed, 0, 2), params, s, f, keep_noise=True)
    clean = f.lookup_table()[encode_rows(extract(data.genomes, s), params.q)]
    rebuilt = int(np.count_nonzero((clean ^ data.noise) != data.labels))
    sigma = math.sqrt((1 / params.q) * (1 - 1 / params.q) / params.N)
    freq = np.stack([(data.genomes == a).mean(axis=0) for a in range(params.q)])
    marg = float(np.max(np.abs(freq - 1 / params.q)))
    g_sigma = math.sqrt(params.gamma * (1 - params.gamma) / params.N)
    a_sigma = math.sqrt(params.alpha * (1 - params.alpha) / params.N)
    return [
        _check("labels rebuilt from (s, f, noise)", -rebuilt),
        _check("uniform genome marginals within 4 sigma", 4 * sigma - marg),
        _check("Pr(f(X_s)=1) = gamma within 4 sigma", 4 * g_sigma - abs(clean.mean() - params.gamma)),
        _check("Pr(Y != f(X_s)) = alpha within 4 sigma", 4 * a_sigma - abs(data.noise.mean() - params.alpha)),
    ]


CONCENTRATION_SETTINGS = (
    (4, 2, (0, 1), 1.0),
    (2, 2, (0,), 0.5),
    (20, 10, tuple(range(5)), 0.3),
    (10, 3, (0, 1, 2), 0.2),
    (12, 6, tuple(range(6)), 0.25),
    (30, 5, tuple(range(10)), 0.1),
    (8, 1, (2, 5), 0.4),
    (16, 8, tuple(range(0, 16, 2)), 0.15),
    (25, 12, tuple(range(20)), 0.05),
    (40, 20, tuple(range(3, 13)), 0.2),
)


def exact_subset_tail(n: int, m: int, t: int, epsilon: float) -> float:
    """Exact Pr(|K/t - m/n| >= eps) for K ~ Hypergeometric(n, m, t), in rationals."""
    eps = Fraction(epsilon).limit_denominator(10**9)
    total = 0.0
    for k in range(max(0, m + t - n), min(m, t) + 1):
        if abs(Fraction(k, t) - Fraction(m, n)) >= eps:
            total += stats.hypergeom.pmf(k, n, m, t)
    return float(total)


def check_concentration(trials: int = 20_000, seed: int = 303) -> list[Check]:
    out = []
    for k, (n, m, T, eps) in enumerate(CONCENTRATION_SETTINGS):
        emp, bound = subset_sum_concentration_check(substream(seed, k), n, m, T, eps, trials)
        exact = exact_subset_tail(n, m, len(T), eps)
        se = math.sqrt(max(exact * (1 - exact), 1.0 / trials) / trials)
        out.append(_check(f"subset concentration n={n} m={m} |T|={len(T)} eps={eps}",
                          min(bound + 3 * se - emp, 4 * se - abs(emp - exact)),
                          detail=f"emp={emp:.4f} exact={exact:.4f} bound={bound:.3g}"))
    return out


def suite_model() -> list[Check]:
    return [*check_beta_monte_carlo(), *check_generation_invariants(), *check_concentration()]


# -- decoder oracles -------------------------------------------------------

def brute_force_ml(data, params):
    """Argmax set and best score of label matches over every (s, f) pair,
    by direct evaluation of each function on each individual."""
    best, arg = -1, []
    for s in enumerate_subsequences(params.L, params.G):
        words = [tuple(extract(x, s)) for x in data.genomes]
        for pats in itertools.combinations(range(params.n_words), params.m):
            f = PatternFunction(params.q, params.L, pats)
            score = sum(int(evaluate(f, w) == y) for w, y in zip(words, data.labels))
            if score > best:
                best, arg = score, [s]
            elif score == best and s not in arg:
                arg.append(s)
    return sorted(arg), best


def micro_instances(count: int = 50, seed: int = 401):
    for k in range(count):
        rng = substream(seed, k)
        G = int(rng.integers(3, 6))
        L = int(rng.integers(1, 3)) if G >= 5 else 1
        m = int(rng.integers(1, 3)) if L == 2 else 1
        params = ModelParams(q=2, G=G, L=L, N=int(rng.integers(2, 11)), m=m, alpha=float(rng.choice([0.0, 0.1, 0.3])))
        s = sample_uniform_subsequence(rng, L, G)
        f = sample_function(rng, 2, L, m)
        yield params, generate_dataset(rng, params, s, f), rng


def check_ml_vs_brute(count: int = 50) -> Check:
    bad = 0
    for params, data, rng in micro_instances(count):
        res = ml_decode(data, params, rng)
        arg, best = brute_force_ml(data, params)
        bad += (sorted(res.accepted) != arg) or res.score != best or res.estimate not in arg
    return _check(f"ml_decode equals brute force on {count} micro-instances", -bad)


def check_pattern_count(count: int = 100, seed: int = 402) -> Check:
    worst = math.inf
    for k in range(count):
        rng = substream(seed, k)
        L = int(rng.integers(1, 3))
        m = int(rng.integers(1, 3)) if L == 2 else 1
        N = int(rng.integers(m, 7))
        genomes = rng.integers(0, 2, size=(N, 4))
        t = sample_uniform_subsequence(rng, L, 4)
        c = pattern_count(genomes, t, 2, L, m)
        cap = min(math.comb(2**L, m), em.sauer_exact_sum(N, m))
        worst = min(worst, cap - c, em.sauer_bound(N, m) - math.log2(c))
    return _check(f"pattern_count <= min(C(q^L, m), Sauer sum), {count} instances", worst, TOL)


def check_greedy_vs_functions(count: int = 30, seed: int = 403) -> Check:
    bad = 0
    for k in range(count):
        rng = substream(seed, k)
        N = int(rng.integers(1, 11))
        params = ModelParams(q=2, G=5, L=2, N=N, m=2, alpha=0.1)
        s = sample_uniform_subsequence(rng, 2, 5)
        data = generate_dataset(rng, params, s, sample_function(rng, 2, 2, 2))
        codes = encode_rows(extract(data.genomes, s), 2)
        funcs = function_space(4, 2)
        matches = (funcs[:, codes] == data.labels).sum(axis=1).max()
        from ..decoders import ml_function
        g = ml_function(data, s, params)
        bad += int((g.lookup_table()[codes] == data.labels).sum()) != int(matches)
    return _check("greedy top-m equals exhaustive function search", -bad)


def suite_decoder_oracle() -> list[Check]:
    return [check_ml_vs_brute(), check_pattern_count(), check_greedy_vs_functions()]


_SUITES = {
    "inequalities": suite_inequalities,
    "combinatorics": suite_combinatorics,
    "divergence": suite_divergence,
    "model": suite_model,
    "decoder-oracle": suite_decoder_oracle,
}


def verify(suite: str) -> list[Check]:
    if suite not in _SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    return _SUITES[suite]()
