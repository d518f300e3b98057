"""Index-sequence combinatorics over S_{L,G}.

Subsequences are tuples of strictly increasing 0-based positions. Text
rendering (CSV, dataset files, logs) is 1-based, e.g. ``"2,5,9"``.
"""
import itertools
import math
from typing import Iterator

import numpy as np

Subsequence = tuple


def check_subsequence(s, L: int | None = None, G: int | None = None) -> tuple:
    s = tuple(int(i) for i in s)
    if L is not None and len(s) != L:
        raise ValueError(f"subsequence {s} must have length {L}")
    if any(b <= a for a, b in zip(s, s[1:])):
        raise ValueError(f"subsequence {s} is not strictly increasing")
    if s and s[0] < 0:
        raise ValueError(f"subsequence {s} has a negative index")
    if G is not None and s and s[-1] >= G:
        raise ValueError(f"subsequence {s} has an index beyond G={G}")
    return s


def _check_pair(s, t):
    s = check_subsequence(s)
    t = check_subsequence(t)
    if len(s) != len(t):
        raise ValueError("subsequences must have equal length")
    return s, t


def dist(s, t) -> int:
    """Size of the symmetric difference of the index sets."""
    s, t = _check_pair(s, t)
    return len(set(s).symmetric_difference(t))


def ints(s, t) -> tuple:
    """Sorted common indices of ``s`` and ``t``."""
    s, t = _check_pair(s, t)
    return tuple(sorted(set(s).intersection(t)))


def dist_ints_equivalence(s, t, epsilon: float) -> bool:
    """True iff [dist >= L eps] agrees with [len(ints) <= L (1 - eps/2)]."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    L = len(s)
    far = dist(s, t) >= L * epsilon
    small_overlap = len(ints(s, t)) <= L * (1 - epsilon / 2)
    return far == small_overlap


def _check_LG(L, G):
    if not 0 < L < G:
        raise ValueError(f"need 0 < L={L} < G={G}")


def enumerate_subsequences(L: int, G: int) -> Iterator[tuple]:
    """All C(G, L) subsequences in lexicographic order."""
    _check_LG(L, G)
    return itertools.combinations(range(G), L)


def ball(center, epsilon: float, G: int) -> list[tuple]:
    """Sorted list of all t in S_{L,G} with dist(center, t) <= L * epsilon.

    Built by swapping out j <= floor(L eps / 2) centre elements for j
    outside positions, so the cost is the ball size rather than C(G, L).
    """
    L = len(center)
    center = check_subsequence(center, L, G)
    _check_LG(L, G)
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    # dist = 2j for j swapped elements
    max_swaps = min(L, G - L, math.floor(L * epsilon / 2 + 1e-12))
    inside = set(center)
    outside = [i for i in range(G) if i not in inside]
    out = []
    for j in range(max_swaps + 1):
        for drop in itertools.combinations(center, j):
            kept = inside.difference(drop)
            for add in itertools.combinations(outside, j):
                out.append(tuple(sorted(kept.union(add))))
    out.sort()
    return out


def ball_size(G: int, L: int, epsilon: float) -> int:
    """Closed-form |ball|: sum over j of C(L, j) C(G - L, j)."""
    _check_LG(L, G)
    max_swaps = min(L, G - L, math.floor(L * epsilon / 2 + 1e-12))
    return sum(math.comb(L, j) * math.comb(G - L, j) for j in range(max_swaps + 1))


def sample_uniform_subsequence(rng: np.random.Generator, L: int, G: int) -> tuple:
    """Uniform draw from S_{L,G}."""
    _check_LG(L, G)
    return tuple(sorted(int(i) for i in rng.choice(G, size=L, replace=False)))


def format_subsequence(s) -> str:
    """1-based comma-separated rendering."""
    return ",".join(str(i + 1) for i in s)


def parse_subsequence(text: str, G: int | None = None) -> tuple:
    """Inverse of :func:`format_subsequence`."""
    text = text.strip()
    if not text:
        return ()
    s = tuple(int(tok) - 1 for tok in text.split(","))
    return check_subsequence(s, G=G)
