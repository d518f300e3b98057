"""Monte-Carlo error estimation, sweeps and the coarse-plus-refine pipeline.

Every trial draws from substreams keyed by (master_seed, trial_index,
stage), so decoders compared on the same seed see identical data and
results never depend on the number of workers.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from joblib import Parallel, delayed

from .. import entropy
from ..decoders import DEFAULT_BUDGET, ml_decode, refine_in_ball, typicality_decode
from ..exceptions import ConfigError, InfeasibleError
from ..model import ModelParams, generate_dataset, sample_function
from ..rng import Stage, substream
from ..subseq import dist, enumerate_subsequences, sample_uniform_subsequence

log = logging.getLogger(__name__)

DECODERS = ("typicality", "ml", "refine")
ERROR_MODES = ("average", "worst_case_exhaustive", "worst_case_sampled")
WORST_CASE_EXHAUSTIVE_CAP = 500
WORST_CASE_SAMPLES = 32


@dataclass(frozen=True)
class TrialSpec:
    params: ModelParams
    tau: float | None = None
    epsilon: float = 0.4
    decoder: str = "typicality"
    ball_epsilon: float | None = None
    trials: int = 200
    master_seed: int = 0
    error_mode: str = "average"
    wc_samples: int = WORST_CASE_SAMPLES
    wc_cap: int = WORST_CASE_EXHAUSTIVE_CAP
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if not 0 < self.epsilon:
            raise ConfigError("epsilon must be positive")
        if self.decoder not in DECODERS:
            raise ConfigError(f"decoder must be one of {DECODERS}")
        if self.decoder == "refine" and self.ball_epsilon is None:
            raise ConfigError("the refine decoder needs ball_epsilon")
        if self.error_mode not in ERROR_MODES:
            raise ConfigError(f"error_mode must be one of {ERROR_MODES}")
        if self.tau is not None and self.tau <= 0:
            raise ConfigError("tau must be positive")
        if self.error_mode == "worst_case_exhaustive":
            n = math.comb(self.params.G, self.params.L)
            if n > self.wc_cap:
                raise ConfigError(f"C(G, L) = {n} exceeds the exhaustive worst-case cap {self.wc_cap}")

    @property
    def resolved_tau(self) -> float:
        if self.tau is not None:
            return self.tau
        from ..typicality import default_tau, joint_pmf
        return default_tau(joint_pmf(self.params.gamma, self.params.alpha))


@dataclass(frozen=True)
class ErrorEstimate:
    p_err: float
    stderr: float
    trials: int
    per_s_breakdown: dict | None = field(default=None, compare=False)

    @classmethod
    def from_bits(cls, bits, per_s=None) -> ErrorEstimate:
        bits = np.asarray(bits, dtype=float)
        p = float(bits.mean())
        return cls(p, math.sqrt(p * (1 - p) / bits.size), int(bits.size), per_s)


def _draw_truth(spec: TrialSpec, trial_index: int, s_fixed=None):
    p = spec.params
    rng = substream(spec.master_seed, trial_index, Stage.SAMPLE)
    s = tuple(s_fixed) if s_fixed is not None else sample_uniform_subsequence(rng, p.L, p.G)
    f = sample_function(rng, p.q, p.L, p.m)
    data = generate_dataset(substream(spec.master_seed, trial_index, Stage.DATA), p, s, f)
    return s, f, data


def _decode(spec: TrialSpec, data, trial_index: int):
    tie = substream(spec.master_seed, trial_index, Stage.TIEBREAK)
    p = spec.params
    if spec.decoder == "ml":
        return ml_decode(data, p, tie, spec.budget)
    coarse = typicality_decode(data, p, spec.resolved_tau, tie, spec.budget)
    if spec.decoder == "typicality":
        return coarse
    refine = substream(spec.master_seed, trial_index, Stage.REFINE)
    return refine_in_ball(data, coarse.estimate, spec.ball_epsilon, p, spec.resolved_tau, refine, spec.budget)


def error_bit(s_true, s_hat, epsilon: float) -> int:
    return int(dist(s_hat, s_true) / len(s_true) > epsilon)


def run_trial(spec: TrialSpec, trial_index: int, s_fixed=None) -> tuple[tuple, tuple, int]:
    """One seeded trial: returns (s_true, s_hat, err_bit)."""
    s, _, data = _draw_truth(spec, trial_index, s_fixed)
    s_hat = _decode(spec, data, trial_index).estimate
    return s, s_hat, error_bit(s, s_hat, spec.epsilon)


def _run_many(spec, jobs, n_jobs):
    """``jobs`` is a list of (trial_index, s_fixed); output keeps that order."""
    if n_jobs in (None, 1):
        return [run_trial(spec, i, s) for i, s in jobs]
    return Parallel(n_jobs=n_jobs)(delayed(run_trial)(spec, i, s) for i, s in jobs)


def _worst_case_set(spec: TrialSpec) -> list[tuple]:
    p = spec.params
    if spec.error_mode == "worst_case_exhaustive":
        return list(enumerate_subsequences(p.L, p.G))
    rng = substream(spec.master_seed, 0, 0)
    pool = list(enumerate_subsequences(p.L, p.G)) if math.comb(p.G, p.L) <= 10**6 else None
    k = spec.wc_samples
    if pool is not None:
        k = min(k, len(pool))
        return [pool[i] for i in sorted(rng.choice(len(pool), size=k, replace=False))]
    return sorted({sample_uniform_subsequence(rng, p.L, p.G) for _ in range(k)})


def estimate_error(spec: TrialSpec, n_jobs: int | None = None) -> ErrorEstimate:
    """Average error over fresh (s, f) draws, or the worst case over s."""
    if spec.error_mode == "average":
        results = _run_many(spec, [(i, None) for i in range(spec.trials)], n_jobs)
        return ErrorEstimate.from_bits([r[2] for r in results])
    s_set = _worst_case_set(spec)
    per = max(1, spec.trials // len(s_set))
    jobs = [(k * per + j, s) for k, s in enumerate(s_set) for j in range(per)]
    results = _run_many(spec, jobs, n_jobs)
    breakdown = {}
    for k, s in enumerate(s_set):
        bits = [r[2] for r in results[k * per:(k + 1) * per]]
        breakdown[s] = float(np.mean(bits))
    worst = max(breakdown, key=lambda s: (breakdown[s], [-i for i in s]))
    p = breakdown[worst]
    return ErrorEstimate(p, math.sqrt(p * (1 - p) / per), per * len(s_set), breakdown)


@dataclass(frozen=True)
class RefineEstimate:
    coarse: ErrorEstimate
    refined: ErrorEstimate


def refine_pipeline(spec: TrialSpec, epsilon_coarse: float, epsilon_fine: float,
                    n_jobs: int | None = None) -> RefineEstimate:
    """Typicality decode, then refine inside the radius-L*epsilon_coarse ball;
    both stages are scored at ``epsilon_fine`` on the same trials."""
    if not epsilon_fine < epsilon_coarse:
        raise ConfigError("epsilon_fine must be below epsilon_coarse")
    if not (0 < epsilon_coarse < 0.5 and entropy.binary_entropy(epsilon_coarse) < 0.5):
        warnings.warn(f"epsilon_coarse={epsilon_coarse} is outside the regime h(eps) < 1/2, eps < 1/2",
                      stacklevel=2)
    coarse_spec = replace(spec, decoder="typicality", epsilon=epsilon_fine)
    refine_spec = replace(spec, decoder="refine", ball_epsilon=epsilon_coarse, epsilon=epsilon_fine)
    jobs = [(i, None) for i in range(spec.trials)]
    coarse = _run_many(coarse_spec, jobs, n_jobs)
    refined = _run_many(refine_spec, jobs, n_jobs)
    return RefineEstimate(ErrorEstimate.from_bits([r[2] for r in coarse]),
                          ErrorEstimate.from_bits([r[2] for r in refined]))


# -- sweeps ------------------------------------------------------------------

SWEEP_COLUMNS = ["N", "G", "L", "m", "q", "alpha", "beta", "gamma", "tau", "epsilon", "rate",
                 "capacity", "p_err", "stderr", "seed", "decoder", "m_over_N", "m_over_N_flag", "status"]
M_OVER_N_FLAG = 0.1


@dataclass(frozen=True)
class SweepRow:
    N: int
    G: int
    L: int
    m: int
    q: int
    alpha: float
    tau: float
    epsilon: float
    p_err: float
    stderr: float
    seed: int
    decoder: str
    status: str = "ok"

    @property
    def beta(self) -> float:
        return entropy.beta_from(entropy.gamma_param(self.m, self.q, self.L), self.alpha)

    @property
    def gamma(self) -> float:
        return entropy.gamma_param(self.m, self.q, self.L)

    @property
    def rate(self) -> float:
        return entropy.rate(self.G, self.L, self.N)

    @property
    def capacity(self) -> float:
        return entropy.capacity(self.alpha, self.beta)

    @property
    def m_over_N(self) -> float:
        return self.m / self.N

    def as_record(self) -> dict:
        rec = {c: getattr(self, c) for c in SWEEP_COLUMNS if c != "m_over_N_flag"}
        rec["m_over_N_flag"] = int(self.m_over_N > M_OVER_N_FLAG)
        return rec


def grid_specs(base: TrialSpec, grid: dict) -> list[TrialSpec]:
    """Expand a grid over any of ``N``, ``tau``, ``epsilon`` and ``GL`` pairs.

    The result is sorted by (G, L, N, tau, epsilon).
    """
    unknown = set(grid) - {"N", "tau", "epsilon", "GL"}
    if unknown:
        raise ConfigError(f"unknown grid axes {sorted(unknown)}")
    p = base.params
    GLs = [tuple(x) for x in grid.get("GL", [(p.G, p.L)])]
    Ns = grid.get("N", [p.N])
    taus = grid.get("tau", [base.tau])
    eps = grid.get("epsilon", [base.epsilon])
    specs = []
    for G, L in GLs:
        for N in Ns:
            for tau in taus:
                for e in eps:
                    try:
                        params = p.replace(G=int(G), L=int(L), N=int(N))
                    except ValueError as exc:
                        raise ConfigError(str(exc)) from exc
                    specs.append(replace(base, params=params, tau=tau, epsilon=float(e)))
    specs.sort(key=lambda s: (s.params.G, s.params.L, s.params.N, s.resolved_tau, s.epsilon))
    return specs


def sweep(base: TrialSpec, grid: dict, n_jobs: int | None = None) -> list[SweepRow]:
    """One row per grid point. On an infeasible point the rows so far are
    returned followed by a single ``status='infeasible'`` marker row."""
    rows = []
    for spec in grid_specs(base, grid):
        p = spec.params
        common = dict(N=p.N, G=p.G, L=p.L, m=p.m, q=p.q, alpha=p.alpha, tau=spec.resolved_tau,
                      epsilon=spec.epsilon, seed=spec.master_seed, decoder=spec.decoder)
        try:
            est = estimate_error(spec, n_jobs)
        except InfeasibleError as exc:
            log.error("sweep stopped at N=%d G=%d L=%d: %s", p.N, p.G, p.L, exc)
            rows.append(SweepRow(p_err=math.nan, stderr=math.nan, status="infeasible", **common))
            break
        log.info("N=%d G=%d L=%d tau=%.4g eps=%.4g p_err=%.4f", p.N, p.G, p.L, spec.resolved_tau,
                 spec.epsilon, est.p_err)
        rows.append(SweepRow(p_err=est.p_err, stderr=est.stderr, **common))
    return rows


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        rec = row.as_record()
        writer.writerow([_fmt(rec[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def write_csv(path, rows: list[SweepRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))


def read_csv(path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))
