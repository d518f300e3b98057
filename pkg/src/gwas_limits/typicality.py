"""Joint law of (f(X_s), Y) and entropy-typicality tests.

Throughout, ``u`` is the pattern-function output and ``v`` the observed
label. Empirical quantities are computed from cell counts, which makes
them exact up to a single rounding per cell regardless of N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .entropy import beta_from, binary_entropy


def _neglog(p: float) -> float:
    return math.inf if p == 0.0 else -math.log2(p)


@dataclass(frozen=True)
class JointPmf:
    p11: float
    p10: float
    p01: float
    p00: float

    @property
    def marginal_u(self) -> float:
        return self.p11 + self.p10

    @property
    def marginal_v(self) -> float:
        return self.p11 + self.p01

    @property
    def H_u(self) -> float:
        return binary_entropy(min(1.0, self.marginal_u))

    @property
    def H_v(self) -> float:
        return binary_entropy(min(1.0, self.marginal_v))

    @property
    def H_uv(self) -> float:
        return math.fsum(p * _neglog(p) for p in self.cells if p > 0)

    @property
    def cells(self) -> tuple:
        return (self.p11, self.p10, self.p01, self.p00)

    def as_matrix(self) -> np.ndarray:
        """2x2 array indexed [u, v]."""
        return np.array([[self.p00, self.p01], [self.p10, self.p11]])

    def neglog_tables(self):
        """(-log2 p_u, -log2 p_v, -log2 p_uv) indexed by u, v and [u, v]."""
        pu = self.marginal_u
        pv = self.marginal_v
        a_u = np.array([_neglog(1.0 - pu), _neglog(pu)])
        a_v = np.array([_neglog(1.0 - pv), _neglog(pv)])
        a_uv = np.array([[_neglog(self.p00), _neglog(self.p01)],
                         [_neglog(self.p10), _neglog(self.p11)]])
        return a_u, a_v, a_uv


def joint_pmf(gamma: float, alpha: float) -> JointPmf:
    """Law of (u, v) when u ~ Bernoulli(gamma) and v = u XOR Bernoulli(alpha)."""
    beta_from(gamma, alpha)  # domain checks
    return JointPmf(
        p11=gamma * (1.0 - alpha),
        p10=gamma * alpha,
        p01=(1.0 - gamma) * alpha,
        p00=(1.0 - gamma) * (1.0 - alpha),
    )


def empirical_neglog(symbols, probs) -> float:
    """-(1/N) sum_n log2 probs[symbols[n]]; +inf if a zero-mass symbol occurs.

    ``probs`` is indexed by symbol. For the joint law pass ``2*u + v`` and
    ``JointPmf.as_matrix().ravel()``.
    """
    symbols = np.asarray(symbols, dtype=np.int64).ravel()
    if symbols.size == 0:
        raise ValueError("sequence must be non-empty")
    probs = np.asarray(probs, dtype=float)
    counts = np.bincount(symbols, minlength=probs.size)
    if counts.size > probs.size:
        raise ValueError("symbol outside the support of probs")
    terms = []
    for c, p in zip(counts, probs):
        if c == 0:
            continue
        if p == 0.0:
            return math.inf
        terms.append(c * -math.log2(p))
    return math.fsum(terms) / symbols.size


@dataclass(frozen=True)
class TypicalityVerdict:
    dev_u: float
    dev_v: float
    dev_uv: float
    tau: float

    @property
    def is_typical(self) -> bool:
        return self.dev_u < self.tau and self.dev_v < self.tau and self.dev_uv < self.tau

    def __bool__(self):
        return self.is_typical


def default_tau(pmf: JointPmf) -> float:
    return 0.05 * pmf.H_uv


def _weighted(counts, table):
    # 0 * inf contributes 0; positive count on an infinite cell gives inf
    counts = np.asarray(counts, dtype=float)
    with np.errstate(invalid="ignore"):
        prod = counts * table
    return np.where(counts > 0, prod, 0.0)


def deviations_from_counts(n11, n10, n01, n00, pmf: JointPmf):
    """Vectorised (dev_u, dev_v, dev_uv) from joint cell counts.

    Count arguments broadcast against each other.
    """
    n11, n10, n01, n00 = np.broadcast_arrays(*(np.asarray(c, dtype=np.int64) for c in (n11, n10, n01, n00)))
    N = n11 + n10 + n01 + n00
    if np.any(N <= 0):
        raise ValueError("sequences must be non-empty")
    a_u, a_v, a_uv = pmf.neglog_tables()
    emp_u = (_weighted(n11 + n10, a_u[1]) + _weighted(n01 + n00, a_u[0])) / N
    emp_v = (_weighted(n11 + n01, a_v[1]) + _weighted(n10 + n00, a_v[0])) / N
    emp_uv = (_weighted(n11, a_uv[1, 1]) + _weighted(n10, a_uv[1, 0])
              + _weighted(n01, a_uv[0, 1]) + _weighted(n00, a_uv[0, 0])) / N
    return np.abs(emp_u - pmf.H_u), np.abs(emp_v - pmf.H_v), np.abs(emp_uv - pmf.H_uv)


def is_jointly_typical(u, v, pmf: JointPmf, tau: float) -> TypicalityVerdict:
    """Entropy-typicality of the pair (u, v) with respect to ``pmf``."""
    u = np.asarray(u, dtype=np.int64).ravel()
    v = np.asarray(v, dtype=np.int64).ravel()
    if u.shape != v.shape:
        raise ValueError("u and v must have equal length")
    if u.size == 0:
        raise ValueError("sequences must be non-empty")
    if tau <= 0:
        raise ValueError("tau must be positive")
    if not (np.isin(u, (0, 1)).all() and np.isin(v, (0, 1)).all()):
        raise ValueError("u and v must be binary")
    counts = np.bincount(2 * u + v, minlength=4)
    d_u, d_v, d_uv = deviations_from_counts(counts[3], counts[2], counts[1], counts[0], pmf)
    return TypicalityVerdict(float(d_u), float(d_v), float(d_uv), float(tau))
