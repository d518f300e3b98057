"""f-divergences, f-information, total variation and approximate
independence on finite supports.

Pmfs are 1-d arrays, joints are 2-d arrays indexed ``[u, v]`` and channels
are row-stochastic matrices ``channel[v, w] = p(w | v)``.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

PMF_ATOL = 1e-12


class Kernel:
    """Convex generator of an f-divergence.

    ``slope_at_infinity`` is lim_{t->inf} f(t)/t, which fixes the
    contribution ``p * slope`` of cells with p > 0 and q = 0.
    """

    def __init__(self, func: Callable[[float], float], name: str = "f", slope_at_infinity: float = math.inf):
        if abs(func(1.0)) > 1e-12:
            raise ValueError(f"kernel {name!r} must satisfy f(1) = 0, got {func(1.0)}")
        self.func = func
        self.name = name
        self.slope_at_infinity = slope_at_infinity

    def __call__(self, t: float) -> float:
        return self.func(t)

    def __repr__(self):
        return f"Kernel({self.name})"


def _tv(t):
    return 0.5 * abs(1.0 - t)


def _kl(t):
    return 0.0 if t == 0 else t * math.log2(t)


TV = Kernel(_tv, "tv", slope_at_infinity=0.5)
KL = Kernel(_kl, "kl", slope_at_infinity=math.inf)


def as_kernel(f) -> Kernel:
    if isinstance(f, Kernel):
        return f
    if isinstance(f, str):
        return {"tv": TV, "kl": KL}[f.lower()]
    return Kernel(f)


def check_pmf(p, ndim=1) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d probability array")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("masses must be finite and non-negative")
    if abs(p.sum() - 1.0) > PMF_ATOL:
        raise ValueError(f"masses sum to {p.sum()}, not 1")
    return p


def check_channel(channel, n_in=None) -> np.ndarray:
    """Stochastic matrix ``channel[v, w] = p(w | v)``: one row per input symbol, rows sum to 1."""
    c = np.asarray(channel, dtype=float)
    if c.ndim != 2:
        raise ValueError("channel must be a 2-d matrix")
    if n_in is not None and c.shape[0] != n_in:
        raise ValueError(f"channel has {c.shape[0]} input rows, expected {n_in}")
    if np.any(c < 0) or np.any(np.abs(c.sum(axis=1) - 1.0) > PMF_ATOL):
        raise ValueError("channel rows must be probability vectors")
    return c


def f_divergence(p, q, f=TV) -> float:
    """D_f(p || q) = sum_u q(u) f(p(u) / q(u))."""
    f = as_kernel(f)
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    if p.shape != q.shape:
        raise ValueError("p and q must share a support")
    terms = []
    for pu, qu in zip(p, q):
        if qu > 0:
            terms.append(qu * f(pu / qu))
        elif pu > 0:
            if math.isinf(f.slope_at_infinity):
                return math.inf
            terms.append(pu * f.slope_at_infinity)
    return math.fsum(terms)


def total_variation(p, q) -> float:
    p = np.asarray(p, dtype=float).ravel()
    q = np.asarray(q, dtype=float).ravel()
    if p.shape != q.shape:
        raise ValueError("p and q must share a support")
    return 0.5 * math.fsum(np.abs(p - q))


def marginals(joint):
    joint = check_pmf(joint, ndim=2)
    return joint.sum(axis=1), joint.sum(axis=0)


def product_of_marginals(joint) -> np.ndarray:
    pu, pv = marginals(joint)
    return np.outer(pu, pv)


def l1_dependence(joint) -> float:
    """||p_UV - p_U p_V||_1."""
    return math.fsum(np.abs(np.asarray(joint, dtype=float) - product_of_marginals(joint)).ravel())


def f_information(joint, f=TV) -> float:
    """I_f(U; V) = D_f(p_UV || p_U p_V)."""
    return f_divergence(joint, product_of_marginals(joint), f)


def mu_independent(joint, mu: float, rtol: float = 1e-12) -> bool:
    """True iff p_UV(u, v) <= mu p_U(u) p_V(v) in every cell.

    ``rtol`` absorbs floating rounding of the marginals.
    """
    if mu < 1:
        raise ValueError("mu must be at least 1")
    joint = check_pmf(joint, ndim=2)
    rhs = mu * product_of_marginals(joint)
    return bool(np.all(joint <= rhs * (1 + rtol) + 1e-300))


def mu_from_tv(joint) -> float:
    """mu = 1 + ||p_UV - p_U p_V||_1 / (min p_U * min p_V)."""
    pu, pv = marginals(joint)
    if pu.min() <= 0 or pv.min() <= 0:
        raise ValueError("marginals must be strictly positive")
    return 1.0 + l1_dependence(joint) / (pu.min() * pv.min())


def tv_bound_binary(joint) -> tuple[float, float]:
    """(||p_UV - p_U p_V||_1, 2 max_u |p(V=1 | u) - p(V=1)|) for binary V."""
    joint = check_pmf(joint, ndim=2)
    if joint.shape[1] != 2:
        raise ValueError("V must be binary (two columns)")
    pu, pv = marginals(joint)
    if pu.min() <= 0:
        raise ValueError("p_U must be strictly positive")
    cond = joint[:, 1] / pu
    return l1_dependence(joint), 2.0 * float(np.max(np.abs(cond - pv[1])))


def dpi_check(joint_uv, channel_w_given_v, f=TV) -> tuple[float, float]:
    """(I_f(U; V), I_f(U; W)) where W is V passed through the channel."""
    joint_uv = check_pmf(joint_uv, ndim=2)
    channel = check_channel(channel_w_given_v, joint_uv.shape[1])
    joint_uw = joint_uv @ channel
    return f_information(joint_uv, f), f_information(joint_uw, f)


def markov4_tv_check(joint_vw, channel_u_given_v, channel_t_given_w) -> tuple[float, float]:
    """(||p_UT - p_U p_T||_1, ||p_VW - p_V p_W||_1) for the chain U - V - W - T."""
    joint_vw = check_pmf(joint_vw, ndim=2)
    a = check_channel(channel_u_given_v, joint_vw.shape[0])
    b = check_channel(channel_t_given_w, joint_vw.shape[1])
    joint_ut = a.T @ joint_vw @ b
    return l1_dependence(joint_ut), l1_dependence(joint_vw)


def norm_sandwich(w) -> tuple[float, float, float]:
    """(||w||_inf, ||w||_1, n ||w||_inf)."""
    w = np.asarray(w, dtype=float).ravel()
    inf = float(np.max(np.abs(w))) if w.size else 0.0
    return inf, math.fsum(np.abs(w)), w.size * inf
