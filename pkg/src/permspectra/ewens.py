"""Sampling Ewens-distributed cycle structures.

The Ewens measure of parameter ``theta`` weights an n-permutation ``sigma``
by ``theta**K(sigma)`` where K is its number of cycles.  Everything this
package measures is a function of the cycle type, so permutations are never
materialised as arrays; we sample cycle counts directly through the word
construction:

    draw independent bits xi_1, xi_2, ..., with P(xi_k = 1) = theta/(theta+k-1)
    (so xi_1 = 1 surely), and read the cycle counts of sigma_n off the word
    (1, xi_2, ..., xi_n, 1): a_{n,j} is the number of j-spacings between
    consecutive ones.

The same word, continued past position n, yields the coupled variables

    W_j = number of j-spacings between consecutive ones in the infinite word,

which are independent Poisson(theta/j).  ``sample_coupled`` materialises the
word far enough that the expected number of uncounted tail spacings is below
a requested bound, computed in closed form from the psi weights.

Two equivalent samplers are provided for the word itself: a dense one that
draws every bit, and a sparse one that jumps straight from one 1 to the next
by inverting the exact survival function of the gap (the expected number of
ones up to n is only ~theta log n, so large n costs almost nothing).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "EwensParams",
    "BernoulliWord",
    "CycleCounts",
    "CoupledSample",
    "AgeOrderedCycles",
    "sample_bernoulli_word",
    "cycle_counts_from_word",
    "sample_cycle_counts",
    "sample_coupled",
    "sample_age_ordered",
    "cycle_type_probability",
    "sample_gem",
    "expected_total_cycles",
    "coupling_tail_expectation",
    "coupling_horizon",
    "coupling_distance",
    "iter_cycle_types",
]

#: hard cap on the materialised word horizon in sample_coupled
HORIZON_HARD_CAP = 2**40

#: dense bit sampling is faster below this size, gap skipping above
_SPARSE_THRESHOLD = 65536


@dataclass(frozen=True)
class EwensParams:
    """Parameter of the Ewens measure; theta = 1 is the uniform measure."""

    theta: float

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")


@dataclass
class BernoulliWord:
    """Realised prefix of the word (xi_1, ..., xi_horizon).

    ``bits[k-1]`` is xi_k; xi_1 is always 1.  ``n`` is the permutation size
    the word encodes, ``horizon`` how many bits are materialised (>= n).
    """

    n: int
    bits: np.ndarray
    horizon: int

    def __post_init__(self):
        if self.n < 1 or self.horizon < self.n or len(self.bits) != self.horizon:
            raise ValueError("inconsistent word dimensions")
        if self.bits[0] != 1:
            raise ValueError("first bit must be 1")


@dataclass
class CycleCounts:
    """Cycle type of an n-permutation: ``counts[j]`` = number of j-cycles.

    Absent keys mean multiplicity zero; sum of j * counts[j] equals n.
    """

    n: int
    counts: dict[int, int]

    def __post_init__(self):
        if sum(j * a for j, a in self.counts.items()) != self.n:
            raise ValueError("cycle lengths must sum to n")
        if any(a < 0 for a in self.counts.values()):
            raise ValueError("multiplicities must be non-negative")

    def total_cycles(self) -> int:
        return sum(self.counts.values())

    def as_array(self) -> np.ndarray:
        """Dense vector [a_1, ..., a_n]."""
        out = np.zeros(self.n, dtype=np.int64)
        for j, a in self.counts.items():
            out[j - 1] = a
        return out


@dataclass
class CoupledSample:
    """One Feller-coupled draw: cycle counts plus truncated Poisson counts.

    ``poisson_counts[j-1]`` counts the j-spacings of the word whose both
    endpoints lie within the materialised horizon; ``tail_bound`` is the
    closed-form upper bound on the expected number of spacings (summed over
    j <= n) lost to the truncation.
    """

    cycle_counts: CycleCounts
    poisson_counts: np.ndarray
    horizon: int
    tail_bound: float


@dataclass
class AgeOrderedCycles:
    """Cycle lengths in order of appearance (lowest element of each cycle)."""

    n: int
    lengths: list[int] = field(default_factory=list)

    def __post_init__(self):
        if sum(self.lengths) != self.n or any(l < 1 for l in self.lengths):
            raise ValueError("lengths must be positive and sum to n")


# ---------------------------------------------------------------------------
# word sampling
# ---------------------------------------------------------------------------


def sample_bernoulli_word(
    n: int, params: EwensParams, rng: np.random.Generator
) -> BernoulliWord:
    """Draw the first n bits of the word; P(xi_k = 1) = theta/(theta+k-1)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    k = np.arange(1, n + 1, dtype=np.float64)
    bits = (rng.random(n) < params.theta / (params.theta + k - 1.0)).astype(np.uint8)
    bits[0] = 1  # probability theta/theta = 1; forced for exactness
    return BernoulliWord(n=n, bits=bits, horizon=n)


def _log_gap_survival(k: int, t: int, theta: float) -> float:
    """log P(no 1 at positions k+1 .. k+t) = log prod_{i=1..t} (k+i-1)/(theta+k+i-1).

    Exact for every integer t >= 0 via log-gamma; decreasing in t.
    """
    return (
        math.lgamma(k + t)
        - math.lgamma(k)
        + math.lgamma(theta + k)
        - math.lgamma(theta + k + t)
    )


def _next_one_position(k: int, limit: int, theta: float, rng: np.random.Generator):
    """Position of the first 1 after position k, or None if it lies beyond limit.

    Inverts the gap survival function by bisection: the gap T satisfies
    P(T > t) = prod_{i=1..t} (k+i-1)/(theta+k+i-1), so T = min{t : S(t) < U}
    for a uniform U in (0, 1].
    """
    hi = limit - k
    if hi <= 0:
        return None
    log_u = math.log(1.0 - rng.random())  # uniform in (0, 1]
    if _log_gap_survival(k, hi, theta) >= log_u:
        return None  # gap exceeds the remaining horizon
    lo = 0  # invariant: S(lo) >= U > S(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _log_gap_survival(k, mid, theta) < log_u:
            hi = mid
        else:
            lo = mid
    return k + hi


def _ones_positions_sparse(
    n: int, theta: float, rng: np.random.Generator
) -> np.ndarray:
    """Positions of ones in (xi_1, ..., xi_n) sampled by gap skipping."""
    ones = [1]
    pos = 1
    while True:
        pos = _next_one_position(pos, n, theta, rng)
        if pos is None:
            break
        ones.append(pos)
    return np.asarray(ones, dtype=np.int64)


def _ones_positions(n: int, theta: float, rng: np.random.Generator) -> np.ndarray:
    """Positions of ones among the first n bits.

    Dense and sparse routes realise the same law; which one runs is a pure
    function of n, so reproducibility with a fixed generator is preserved.
    """
    if n <= _SPARSE_THRESHOLD:
        k = np.arange(1, n + 1, dtype=np.float64)
        hits = rng.random(n) < theta / (theta + k - 1.0)
        hits[0] = True
        return np.flatnonzero(hits).astype(np.int64) + 1
    return _ones_positions_sparse(n, theta, rng)


def _counts_dict_from_spacings(spacings: np.ndarray, n: int) -> CycleCounts:
    lengths, mult = np.unique(spacings, return_counts=True)
    counts = {int(j): int(a) for j, a in zip(lengths, mult)}
    return CycleCounts(n=n, counts=counts)


def cycle_counts_from_word(word: BernoulliWord) -> CycleCounts:
    """Cycle counts read off the word: j-spacings of (1, xi_2, .., xi_n, 1).

    The closing sentinel 1 at position n+1 turns the run after the last one
    into a final spacing, which is what makes the lengths sum to n.
    """
    ones = np.flatnonzero(word.bits[: word.n]).astype(np.int64) + 1
    spacings = np.diff(np.append(ones, word.n + 1))
    return _counts_dict_from_spacings(spacings, word.n)


def sample_cycle_counts(
    n: int, params: EwensParams, rng: np.random.Generator
) -> CycleCounts:
    """Draw the cycle type of an Ewens(theta) n-permutation."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ones = _ones_positions(n, params.theta, rng)
    spacings = np.diff(np.append(ones, n + 1))
    return _counts_dict_from_spacings(spacings, n)


# ---------------------------------------------------------------------------
# Feller coupling with certified truncation
# ---------------------------------------------------------------------------


def coupling_tail_expectation(n: int, theta: float, horizon: int) -> float:
    """sum_{j<=n} E(number of j-spacings with an endpoint beyond the horizon).

    For a single j the tail expectation is
    theta * (1/j - psi(H, j) (1/j - 1/H)) with H the horizon; summing over
    j <= n gives the certified loss bound used by :func:`sample_coupled`.
    """
    if horizon < n:
        raise ValueError("horizon must be at least n")
    i = np.arange(n, dtype=np.float64)
    psi_h = np.cumprod((horizon - i) / (theta + horizon - 1.0 - i))  # psi(H, j), j<=n
    j = np.arange(1, n + 1, dtype=np.float64)
    return float(theta * np.sum(1.0 / j - psi_h * (1.0 / j - 1.0 / horizon)))


@lru_cache(maxsize=128)
def coupling_horizon(n: int, theta: float, epsilon_tail: float) -> tuple[int, float]:
    """Smallest doubling horizon whose tail bound is <= epsilon_tail.

    Returns (horizon, achieved_tail_bound); raises if the cap would be hit.
    """
    horizon = 2 * n
    while True:
        tail = coupling_tail_expectation(n, theta, horizon)
        if tail <= epsilon_tail:
            return horizon, tail
        horizon *= 2
        if horizon > HORIZON_HARD_CAP:
            raise ValueError(
                f"epsilon_tail={epsilon_tail} unreachable below the horizon cap "
                f"{HORIZON_HARD_CAP} for n={n}, theta={theta}"
            )


def sample_coupled(
    n: int,
    params: EwensParams,
    rng: np.random.Generator,
    epsilon_tail: float = 1e-3,
) -> CoupledSample:
    """Cycle counts and coupled (truncated) Poisson spacing counts.

    Both families are read from one realisation of the word: a_{n,j} from
    the first n bits closed by the sentinel, W_j from all spacings whose two
    endpoints fall inside an adaptively chosen horizon.  The horizon is the
    smallest one whose closed-form tail expectation is below epsilon_tail.
    """
    if epsilon_tail <= 0:
        raise ValueError("epsilon_tail must be positive")
    theta = params.theta
    horizon, tail_bound = coupling_horizon(n, theta, epsilon_tail)

    prefix_ones = _ones_positions(n, theta, rng)
    a_spacings = np.diff(np.append(prefix_ones, n + 1))
    cycle_counts = _counts_dict_from_spacings(a_spacings, n)

    # ones in (n, horizon]: gaps depend only on the current position,
    # so the chain continues from position n regardless of xi_n itself
    tail_ones = []
    pos = n
    while True:
        pos = _next_one_position(pos, horizon, theta, rng)
        if pos is None:
            break
        tail_ones.append(pos)
    all_ones = np.concatenate([prefix_ones, np.asarray(tail_ones, dtype=np.int64)])

    w_spacings = np.diff(all_ones)
    w_spacings = w_spacings[w_spacings <= n]
    poisson_counts = np.bincount(w_spacings, minlength=n + 1)[1:].astype(np.int64)

    return CoupledSample(
        cycle_counts=cycle_counts,
        poisson_counts=poisson_counts,
        horizon=horizon,
        tail_bound=tail_bound,
    )


def coupling_distance(sample: CoupledSample) -> int:
    """sum_j |a_{n,j} - W_j| for one coupled draw."""
    a = sample.cycle_counts.as_array()
    return int(np.abs(a - sample.poisson_counts).sum())


# ---------------------------------------------------------------------------
# age order, exact probabilities, GEM
# ---------------------------------------------------------------------------


def sample_age_ordered(
    n: int, params: EwensParams, rng: np.random.Generator
) -> AgeOrderedCycles:
    """Cycle lengths in order of appearance via the Chinese-restaurant scheme.

    Element i starts a new cycle with probability theta/(theta+i-1) and
    otherwise joins the cycle of a uniformly chosen earlier element (which is
    the same as joining an existing cycle with probability proportional to
    its size).  Creation order of cycles is the order of their lowest
    elements, so the lengths come out age-ordered.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    theta = params.theta
    cycle_of = np.empty(n, dtype=np.int64)
    lengths: list[int] = []
    new_thresholds = theta / (theta + np.arange(n, dtype=np.float64))
    uniforms = rng.random(n)
    for i in range(n):
        if uniforms[i] < new_thresholds[i]:
            cycle_of[i] = len(lengths)
            lengths.append(1)
        else:
            c = cycle_of[rng.integers(0, i)]
            cycle_of[i] = c
            lengths[c] += 1
    return AgeOrderedCycles(n=n, lengths=lengths)


def _sample_age_ordered_batch(
    n: int, theta: float, trials: int, rng: np.random.Generator
) -> np.ndarray:
    """Cycle labels for many restaurant runs at once; rows are trials.

    Returns an array of shape (trials, n) whose entry [t, i] is the index of
    the cycle element i joined in trial t.  Used by statistical tests that
    need large batches quickly; the law per row matches sample_age_ordered.
    """
    labels = np.zeros((trials, n), dtype=np.int64)
    n_cycles = np.ones(trials, dtype=np.int64)
    for i in range(1, n):
        new = rng.random(trials) < theta / (theta + i)
        join_src = rng.integers(0, i, size=trials)
        joined = labels[np.arange(trials), join_src]
        labels[:, i] = np.where(new, n_cycles, joined)
        n_cycles += new
    return labels


def cycle_type_probability(counts: CycleCounts, params: EwensParams) -> float:
    """Exact Ewens probability of a cycle type.

    P(type) = [n! / prod_j j^{a_j} a_j!] * theta^K / (theta (theta+1) ... (theta+n-1)),
    evaluated in log space to survive n well beyond factorial overflow.
    """
    n = counts.n
    theta = params.theta
    k_total = counts.total_cycles()
    log_p = math.lgamma(n + 1) + k_total * math.log(theta)
    for j, a in counts.counts.items():
        if a == 0:
            continue
        log_p -= a * math.log(j) + math.lgamma(a + 1)
    log_p -= math.lgamma(theta + n) - math.lgamma(theta)
    return math.exp(log_p)


def sample_gem(params: EwensParams, m: int, rng: np.random.Generator) -> np.ndarray:
    """First m coordinates of a GEM(theta) vector by stick breaking.

    G_1 = B_1 and G_k = B_k prod_{i<k} (1 - B_i) with B_i iid Beta(1, theta);
    this is the limit law of age-ordered cycle lengths divided by n.
    """
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    betas = rng.beta(1.0, params.theta, size=m)
    remaining = np.concatenate([[1.0], np.cumprod(1.0 - betas[:-1])])
    return betas * remaining


def expected_total_cycles(n: int, theta: float) -> float:
    """E K_n = sum_{k=0}^{n-1} theta/(theta+k)."""
    k = np.arange(n, dtype=np.float64)
    return float(np.sum(theta / (theta + k)))


def iter_cycle_types(n: int):
    """All cycle types of n-permutations (integer partitions as count dicts).

    Yields CycleCounts in a deterministic order; intended for exhaustive
    small-n oracles, so no attempt is made to be clever.
    """

    def partitions(remaining: int, max_part: int, acc: dict[int, int]):
        if remaining == 0:
            yield CycleCounts(n=n, counts=dict(acc))
            return
        for part in range(min(remaining, max_part), 0, -1):
            acc[part] = acc.get(part, 0) + 1
            yield from partitions(remaining - part, part, acc)
            acc[part] -= 1
            if acc[part] == 0:
                del acc[part]

    yield from partitions(n, n, {})
