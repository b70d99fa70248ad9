"""Shared brute-force oracles for the test suite.

These deliberately avoid the library's own fast paths: moments come from
exhaustive sums over all cycle types, sampler laws are checked against the
exact type probabilities, and spacing formulas against full enumeration.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from permspectra import (
    Arc,
    CycleCounts,
    EwensParams,
    count_arc_perm,
    cycle_type_probability,
    iter_cycle_types,
)
from permspectra.ewens import _sample_age_ordered_batch


def counts_from_lengths(lengths) -> CycleCounts:
    lengths = [int(x) for x in lengths]
    return CycleCounts(n=sum(lengths), counts=dict(Counter(lengths)))


def partition_key(counts: CycleCounts) -> tuple:
    out = []
    for j in sorted(counts.counts, reverse=True):
        out.extend([j] * counts.counts[j])
    return tuple(out)


def partition_probabilities(n: int, theta: float):
    """All cycle types of size n with their exact Ewens probabilities."""
    params = EwensParams(theta)
    types = list(iter_cycle_types(n))
    probs = np.array([cycle_type_probability(t, params) for t in types])
    return types, probs


def exhaustive_moments_perm(n: int, theta: float, arc: Arc) -> tuple[float, float]:
    """Mean and variance of the arc count by summing over every cycle type."""
    types, probs = partition_probabilities(n, theta)
    values = np.array([count_arc_perm(t, arc) for t in types], dtype=np.float64)
    mean = float(probs @ values)
    return mean, float(probs @ values**2) - mean**2


def feller_type_counts(n: int, theta: float, trials: int, rng) -> dict:
    """Cycle-type frequencies of the word sampler, fully vectorised.

    Words of length n are encoded as integers over bits 2..n (bit 1 is 1
    surely), counted with bincount, and each realised code is decoded once.
    """
    k = np.arange(2, n + 1, dtype=np.float64)
    bits = rng.random((trials, n - 1)) < theta / (theta + k - 1.0)
    codes = bits @ (1 << np.arange(n - 1)).astype(np.int64)
    code_counts = np.bincount(codes.astype(np.int64), minlength=1 << (n - 1))
    freq: dict[tuple, int] = {}
    for code in np.flatnonzero(code_counts):
        word = [1] + [(int(code) >> i) & 1 for i in range(n - 1)]
        ones = [i + 1 for i, b in enumerate(word) if b] + [n + 1]
        key = tuple(sorted(np.diff(ones).tolist(), reverse=True))
        freq[key] = freq.get(key, 0) + int(code_counts[code])
    return freq


def crp_type_counts(n: int, theta: float, trials: int, rng) -> dict:
    """Cycle-type frequencies of the restaurant sampler, vectorised over trials."""
    labels = _sample_age_ordered_batch(n, theta, trials, rng)
    sizes = (labels[:, :, None] == np.arange(n)[None, None, :]).sum(axis=1)
    sizes = np.sort(sizes, axis=1)[:, ::-1]
    base = (n + 1) ** np.arange(n, dtype=np.int64)
    keys = sizes @ base
    uniq, cnt = np.unique(keys, return_counts=True)
    freq = {}
    for key, c in zip(uniq, cnt):
        digits = []
        k = int(key)
        for _ in range(n):
            digits.append(k % (n + 1))
            k //= n + 1
        freq[tuple(sorted((d for d in digits if d), reverse=True))] = int(c)
    return freq


def type_chisquare_pvalue(freq: dict, n: int, theta: float, trials: int) -> float:
    """Chi-square p-value of observed type frequencies against the exact law."""
    from scipy.stats import chisquare

    types, probs = partition_probabilities(n, theta)
    observed = np.array([freq.get(partition_key(t), 0) for t in types], dtype=float)
    expected = probs * trials
    # guard: exact probabilities sum to 1, but renormalise away float dust
    expected *= observed.sum() / expected.sum()
    return float(chisquare(observed, expected).pvalue)
