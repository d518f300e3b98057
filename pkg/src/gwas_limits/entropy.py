"""Closed-form scalar quantities: entropies, rates, capacities and bounds.

All logarithms are base two.
"""
import math

import numpy as np

LOG2E = math.log2(math.e)


def _check_prob(p, name="p", lo=0.0, hi=1.0, open_lo=False, open_hi=False):
    bad_lo = p <= lo if open_lo else p < lo
    bad_hi = p >= hi if open_hi else p > hi
    if not np.isfinite(p) or bad_lo or bad_hi:
        lb = "(" if open_lo else "["
        rb = ")" if open_hi else "]"
        raise ValueError(f"{name}={p!r} outside {lb}{lo}, {hi}{rb}")


def binary_entropy(p: float) -> float:
    """Binary entropy h(p) in bits, with h(0) = h(1) = 0."""
    p = float(p)
    _check_prob(p)
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def binary_entropy_array(p) -> np.ndarray:
    """Vectorised h(.) for grids; same conventions as :func:`binary_entropy`."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0) | (p > 1)) or not np.all(np.isfinite(p)):
        raise ValueError("probabilities must lie in [0, 1]")
    out = np.zeros_like(p)
    inner = (p > 0) & (p < 1)
    q = p[inner]
    out[inner] = -q * np.log2(q) - (1.0 - q) * np.log2(1.0 - q)
    return out


def rate(G: int, L: int, N: int) -> float:
    """Sample-normalised rate G * h(L/G) / N."""
    if L <= 0 or G <= 0:
        raise ValueError("G and L must be positive")
    if N < 1:
        raise ValueError("N must be at least 1")
    ratio = L / G
    if not 0.0 < ratio < 0.5:
        raise ValueError(f"L/G={ratio} must lie in (0, 1/2)")
    return G * binary_entropy(ratio) / N


def gamma_param(m: int, q: int, L: int) -> float:
    """Fraction m / q**L of length-L words on which a pattern function fires."""
    if q < 2:
        raise ValueError("alphabet size q must be at least 2")
    if L < 1:
        raise ValueError("L must be positive")
    total = q**L
    if not 1 <= m <= total - 1:
        raise ValueError(f"m={m} must lie in [1, {total - 1}]")
    return m / total


def beta_from(gamma: float, alpha: float) -> float:
    """Marginal Pr(Y=1) = gamma(1 - alpha) + (1 - gamma) alpha."""
    _check_prob(gamma, "gamma", open_lo=True, open_hi=True)
    _check_prob(alpha, "alpha", hi=0.5, open_hi=True)
    return gamma * (1.0 - alpha) + (1.0 - gamma) * alpha


def _check_alpha_beta(alpha, beta):
    _check_prob(alpha, "alpha", hi=0.5, open_hi=True)
    if not alpha < beta < 1.0 - alpha:
        raise ValueError(f"beta={beta} must lie in (alpha, 1 - alpha) = ({alpha}, {1 - alpha})")


def capacity(alpha: float, beta: float) -> float:
    """Zero-error-rate capacity h(beta) - h(alpha)."""
    _check_alpha_beta(alpha, beta)
    return binary_entropy(beta) - binary_entropy(alpha)


def delta(epsilon: float) -> float:
    """sup over x in (0, 1/2) of h(2 eps x) / h(x), which equals h(eps)."""
    _check_prob(epsilon, "epsilon", hi=0.5, open_lo=True, open_hi=True)
    return binary_entropy(epsilon)


def delta_sup_numeric(epsilon: float, grid_points: int = 100_000) -> float:
    """Grid maximum of h(2 eps x) / h(x) over x_k = k / (2 n), k = 1..n.

    The ratio extends continuously to x = 1/2, so the right endpoint is kept:
    the supremum over the open interval equals the maximum over (0, 1/2].
    """
    _check_prob(epsilon, "epsilon", hi=0.5, open_lo=True, open_hi=True)
    if grid_points < 100:
        raise ValueError("grid_points must be at least 100")
    x = np.arange(1, grid_points + 1) * (0.5 / grid_points)
    ratio = binary_entropy_array(2.0 * epsilon * x) / binary_entropy_array(x)
    return float(ratio.max())


def converse_bound(alpha: float, beta: float, epsilon: float) -> float:
    """Upper bound (h(beta) - h(alpha)) / (1 - h(eps)) on eps-achievable rates."""
    cap = capacity(alpha, beta)
    d = delta(epsilon)
    if d >= 1.0:
        raise ValueError("delta(epsilon) must be below 1")
    return cap / (1.0 - d)


def entropy_product_gap(x: float, y: float) -> float:
    """h(x) h(y) - h(2xy), non-negative on [0, 1/2]^2."""
    _check_prob(x, "x", hi=0.5)
    _check_prob(y, "y", hi=0.5)
    return binary_entropy(x) * binary_entropy(y) - binary_entropy(2.0 * x * y)


def sauer_bound(N: int, m: int) -> float:
    """log2 of (e N / m)**m."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if N < m:
        raise ValueError(f"N={N} must be at least m={m}")
    return m * (math.log2(N) - math.log2(m) + LOG2E)


def sauer_exact_sum(N: int, d: int) -> int:
    """sum_{i=0}^{d} C(N, i), exactly."""
    if not 0 <= d <= N:
        raise ValueError(f"need 0 <= d={d} <= N={N}")
    return sum(math.comb(N, i) for i in range(d + 1))


def log2_comb(n: int, k: int) -> float:
    """log2 C(n, k); exact integer route up to n = 64, lgamma beyond."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k={k} <= n={n}")
    if n <= 64:
        return math.log2(math.comb(n, k))
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) * LOG2E


def binom_entropy_bounds(G: int, L: int) -> tuple[float, float]:
    """Bracket (G h(L/G) - log2(G+1), G h(L/G)) around log2 C(G, L)."""
    if not 0 < L < G:
        raise ValueError(f"need 0 < L={L} < G={G}")
    upper = G * binary_entropy(L / G)
    return upper - math.log2(G + 1), upper


def ball_size_log_bound(G: int, L: int, epsilon: float) -> float:
    """log2(L eps) + G h(2 eps L / G), bounding log2 of a radius-L*eps ball.

    Returns 0 when L*eps < 1, since the ball is then the singleton centre.
    The bound counts at most L*eps swapped positions out of L, so it is only
    defined for eps <= 1, and for L/G < 1/2 like the rest of the model.
    """
    if not 0 < 2 * L < G:
        raise ValueError(f"need 0 < L={L} < G/2")
    if not 0 <= epsilon <= 1:
        raise ValueError(f"epsilon={epsilon} must lie in [0, 1]")
    radius = L * epsilon
    if radius < 1:
        return 0.0
    frac = 2.0 * epsilon * L / G
    if frac > 1.0:
        raise ValueError(f"2 eps L / G = {frac} exceeds 1")
    return math.log2(radius) + G * binary_entropy(frac)
