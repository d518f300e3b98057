"""The generative model: uniform genomes, a hidden pattern function on a
hidden causal subsequence, and Bernoulli(alpha) label noise."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import entropy
from .subseq import check_subsequence, format_subsequence, parse_subsequence


@dataclass(frozen=True)
class ModelParams:
    q: int
    G: int
    L: int
    N: int
    m: int
    alpha: float

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("alphabet size q must be at least 2")
        if self.q > 256:
            raise ValueError("alphabet size q above 256 is not supported")
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if not 0 < self.L / self.G < 0.5 or self.L < 1:
            raise ValueError(f"L/G = {self.L}/{self.G} must lie in (0, 1/2)")
        entropy.gamma_param(self.m, self.q, self.L)
        if not 0.0 <= self.alpha < 0.5:
            raise ValueError(f"alpha={self.alpha} must lie in [0, 1/2)")

    @property
    def n_words(self) -> int:
        return self.q**self.L

    @property
    def gamma(self) -> float:
        return entropy.gamma_param(self.m, self.q, self.L)

    @property
    def beta(self) -> float:
        return entropy.beta_from(self.gamma, self.alpha)

    @property
    def rate(self) -> float:
        return entropy.rate(self.G, self.L, self.N)

    @property
    def capacity(self) -> float:
        return entropy.capacity(self.alpha, self.beta)

    def replace(self, **changes) -> ModelParams:
        values = {k: getattr(self, k) for k in ("q", "G", "L", "N", "m", "alpha")}
        values.update(changes)
        return ModelParams(**values)


@dataclass(frozen=True)
class PatternFunction:
    """Boolean function on length-L words, stored as its preimage of 1.

    Words are encoded base q, most significant symbol first.
    """

    q: int
    L: int
    patterns: tuple

    def __post_init__(self):
        pats = tuple(sorted(int(p) for p in self.patterns))
        if len(set(pats)) != len(pats):
            raise ValueError("patterns must be distinct")
        if pats and (pats[0] < 0 or pats[-1] >= self.q**self.L):
            raise ValueError(f"pattern codes must lie in [0, {self.q ** self.L})")
        object.__setattr__(self, "patterns", pats)

    @property
    def m(self) -> int:
        return len(self.patterns)

    def lookup_table(self) -> np.ndarray:
        table = np.zeros(self.q**self.L, dtype=np.uint8)
        table[list(self.patterns)] = 1
        return table

    def __call__(self, word) -> int:
        return evaluate(self, word)


def encode_word(word, q: int) -> int:
    code = 0
    for sym in word:
        sym = int(sym)
        if not 0 <= sym < q:
            raise ValueError(f"symbol {sym} outside alphabet of size {q}")
        code = code * q + sym
    return code


def decode_word(code: int, q: int, L: int) -> tuple:
    out = []
    for _ in range(L):
        code, r = divmod(code, q)
        out.append(r)
    return tuple(reversed(out))


def encode_rows(words: np.ndarray, q: int) -> np.ndarray:
    """Row-wise base-q codes of an (N, L) symbol array."""
    words = np.asarray(words, dtype=np.int64)
    weights = q ** np.arange(words.shape[1] - 1, -1, -1, dtype=np.int64)
    return words @ weights


def sample_function(rng: np.random.Generator, q: int, L: int, m: int) -> PatternFunction:
    """Uniform draw from F_{L,m}: a uniform m-subset of the q**L words."""
    entropy.gamma_param(m, q, L)
    pats = rng.choice(q**L, size=m, replace=False)
    return PatternFunction(q, L, tuple(int(p) for p in pats))


def evaluate(f: PatternFunction, word) -> int:
    if len(word) != f.L:
        raise ValueError(f"word length {len(word)} does not match L={f.L}")
    code = encode_word(word, f.q)
    return int(code in set(f.patterns))


def extract(x, s) -> np.ndarray:
    """Symbols of genome(s) ``x`` at positions ``s``; works on (G,) or (N, G)."""
    x = np.asarray(x)
    s = check_subsequence(s)
    if s and s[-1] >= x.shape[-1]:
        raise IndexError(f"index {s[-1]} out of range for genome length {x.shape[-1]}")
    return x[..., list(s)]


@dataclass(frozen=True, eq=False)
class Dataset:
    genomes: np.ndarray
    labels: np.ndarray
    noise: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        g = np.asarray(self.genomes)
        y = np.asarray(self.labels)
        if g.ndim != 2:
            raise ValueError("genomes must be a 2-d array")
        if y.shape != (g.shape[0],):
            raise ValueError("labels must have one entry per genome")
        if y.size and not np.isin(y, (0, 1)).all():
            raise ValueError("labels must be binary")
        object.__setattr__(self, "genomes", g)
        object.__setattr__(self, "labels", y.astype(np.uint8))

    @property
    def N(self) -> int:
        return self.genomes.shape[0]

    @property
    def G(self) -> int:
        return self.genomes.shape[1]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return np.array_equal(self.genomes, other.genomes) and np.array_equal(self.labels, other.labels)


def generate_dataset(rng: np.random.Generator, params: ModelParams, s, f: PatternFunction,
                     keep_noise: bool = False) -> Dataset:
    """N i.i.d. uniform genomes, labelled y = f(x_s) XOR Bernoulli(alpha)."""
    s = check_subsequence(s, params.L, params.G)
    if f.q != params.q or f.L != params.L or f.m != params.m:
        raise ValueError("pattern function does not match params")
    genomes = rng.integers(0, params.q, size=(params.N, params.G), dtype=np.uint8)
    noise = (rng.random(params.N) < params.alpha).astype(np.uint8)
    clean = f.lookup_table()[encode_rows(genomes[:, list(s)], params.q)]
    labels = clean ^ noise
    return Dataset(genomes, labels, noise if keep_noise else None)


def subset_sum_concentration_check(rng: np.random.Generator, n: int, m: int, T: Iterable[int],
                                   epsilon: float, trials: int) -> tuple[float, float]:
    """Empirical Pr(|mean of V over T - m/n| >= eps) for V uniform among
    weight-m binary vectors, together with the bound 2(n+1) exp(-2|T| eps^2).

    ``T`` holds 0-based positions.
    """
    T = sorted(set(int(i) for i in T))
    if not 1 <= m <= n:
        raise ValueError(f"need 1 <= m={m} <= n={n}")
    if not T or T[0] < 0 or T[-1] >= n:
        raise ValueError("T must be a non-empty subset of range(n)")
    if epsilon <= 0 or trials < 1:
        raise ValueError("epsilon and trials must be positive")
    bound = 2 * (n + 1) * math.exp(-2 * len(T) * epsilon**2)
    in_T = np.zeros(n, dtype=bool)
    in_T[T] = True
    hits = 0
    chunk = max(1, min(trials, 2**20 // n))
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        # the first m entries of a uniform permutation are a uniform m-subset
        order = np.argsort(rng.random((k, n)), axis=1)[:, :m]
        means = in_T[order].sum(axis=1) / len(T)
        hits += int(np.count_nonzero(np.abs(means - m / n) >= epsilon - 1e-12))
        done += k
    return hits / trials, bound


# -- plain-text dataset files ------------------------------------------------

HEADER_TAG = "#gwas-dataset"


def write_dataset(path, data: Dataset, params: ModelParams, seed: int | None = None,
                  s=None, f: PatternFunction | None = None) -> None:
    if params.q > 10:
        raise ValueError("text format stores one digit per symbol; q must be at most 10")
    if data.G != params.G or data.N != params.N:
        raise ValueError("dataset shape does not match params")
    fields = [f"q={params.q}", f"G={params.G}", f"L={params.L}", f"N={params.N}",
              f"m={params.m}", f"alpha={params.alpha!r}", f"seed={'' if seed is None else seed}"]
    if s is not None:
        fields.append(f"s={format_subsequence(s)}")
    if f is not None:
        fields.append("f=" + ",".join(str(p) for p in f.patterns))
    lines = [" ".join([HEADER_TAG] + fields)]
    digits = np.asarray(data.genomes, dtype=np.uint8) + ord("0")
    for row, y in zip(digits, data.labels):
        lines.append(row.tobytes().decode("ascii") + "\t" + str(int(y)))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_dataset(path) -> tuple[Dataset, ModelParams, dict]:
    """Returns (dataset, params, meta) where meta may hold seed, s and f."""
    with open(path, encoding="ascii") as fh:
        header = fh.readline().split()
        if not header or header[0] != HEADER_TAG:
            raise ValueError(f"{path}: missing {HEADER_TAG} header")
        kv = dict(tok.split("=", 1) for tok in header[1:])
        params = ModelParams(q=int(kv["q"]), G=int(kv["G"]), L=int(kv["L"]), N=int(kv["N"]),
                             m=int(kv["m"]), alpha=float(kv["alpha"]))
        rows, labels = [], []
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            sym, y = line.split("\t")
            rows.append(np.frombuffer(sym.encode("ascii"), dtype=np.uint8) - ord("0"))
            labels.append(int(y))
    genomes = np.array(rows, dtype=np.uint8).reshape(len(rows), params.G)
    if genomes.shape[0] != params.N:
        raise ValueError(f"{path}: header says N={params.N} but {genomes.shape[0]} rows found")
    if genomes.size and genomes.max() >= params.q:
        raise ValueError(f"{path}: symbol outside alphabet")
    meta = {"seed": int(kv["seed"]) if kv.get("seed") else None}
    if kv.get("s"):
        meta["s"] = parse_subsequence(kv["s"], params.G)
    if kv.get("f"):
        meta["f"] = PatternFunction(params.q, params.L, tuple(int(p) for p in kv["f"].split(",")))
    return Dataset(genomes, np.array(labels, dtype=np.uint8)), params, meta
