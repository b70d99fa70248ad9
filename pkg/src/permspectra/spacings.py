"""Extremal spacings between consecutive distinct eigenangles.

All spacings are fractions of a turn; multiply by 2*pi for radians.

For a permutation matrix the distinct eigenangles are the union of the
j-th-root grids over the present cycle lengths, so the smallest gap has the
number-theoretic closed form

    smallest = 1 / max{ lcm(k, l) : k, l present cycle lengths }

(k = l allowed: a single grid of step 1/j realises 1/lcm(j, j)).  The
largest gap has no such shortcut and is read off the sorted union.  Both
extremes are computed in exact rational arithmetic: distinct reduced
fractions with denominators up to n are farther apart than float64 noise,
so a float sort orders them correctly, after which candidate gaps are
compared exactly.

For the phase-modified ensemble the n eigenangles are almost surely
distinct floats and both extremes come from a plain sort.  Rotating each
grid can only tighten the closest approach between two grids, which is why
the modified smallest spacing never exceeds the unmodified one on the same
cycle structure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .ewens import CycleCounts
from .spectral import ModifiedSpectrum, _perm_angle_arrays, enumerate_angles_mod

__all__ = [
    "SpacingStats",
    "NormalizedSpacings",
    "spacings_perm",
    "spacings_mod",
    "two_cycle_min_spacing",
    "normalized_spacings",
    "max_pairwise_lcm",
]


@dataclass
class SpacingStats:
    """Largest and smallest circular gaps between consecutive distinct angles.

    ``largest_exact``/``smallest_exact`` carry exact values when the angles
    were rational (the unmodified ensemble); they are None for the modified
    ensemble, whose angles are continuous.
    """

    n: int
    largest: float
    smallest: float
    largest_exact: Optional[Fraction] = None
    smallest_exact: Optional[Fraction] = None

    def __post_init__(self):
        if not 0 < self.smallest <= self.largest <= 1:
            raise ValueError("need 0 < smallest <= largest <= 1")


@dataclass(frozen=True)
class NormalizedSpacings:
    """Largest spacing scaled by n, smallest by n^2 (the tight normalisations)."""

    nD: float
    n2d: float


def max_pairwise_lcm(counts: CycleCounts) -> int:
    """max lcm(k, l) over present cycle lengths, k = l allowed."""
    lengths = np.array(sorted(j for j, a in counts.counts.items() if a > 0), dtype=np.int64)
    g = np.gcd.outer(lengths, lengths)
    return int((np.outer(lengths, lengths) // g).max())


def _circular_gaps_exact(num: np.ndarray, den: np.ndarray):
    """Exact consecutive gaps of sorted reduced fractions on the circle.

    Returns integer arrays (gap_num, gap_den); the wrap-around gap closes the
    circle.  int64 is safe: cross products are bounded by n^2 * n^2.
    """
    nxt_num = np.roll(num, -1).copy()
    nxt_den = np.roll(den, -1).copy()
    nxt_num[-1] += nxt_den[-1]  # wrap: last gap runs to first angle + 1
    gap_num = nxt_num * den - num * nxt_den
    gap_den = den * nxt_den
    return gap_num, gap_den


def _extreme_fraction(gap_num, gap_den, want_max: bool) -> Fraction:
    """Exact max or min of an array of positive fractions.

    Float quotients select near-extremal candidates (each quotient is exact
    to one rounding, so a 1e-12 relative window cannot miss the true
    extreme); candidates are then compared by integer cross-multiplication,
    which stays cheap even when thousands of gaps tie.
    """
    approx = gap_num / gap_den
    if want_max:
        idx = np.flatnonzero(approx >= approx.max() * (1.0 - 1e-12))
    else:
        idx = np.flatnonzero(approx <= approx.min() * (1.0 + 1e-12))
    nums, dens = gap_num[idx], gap_den[idx]
    g = np.gcd(nums, dens)
    nums, dens = nums // g, dens // g
    span = int(dens.max()) + 1
    if int(nums.max()) < 2**63 // span:
        keys = nums * np.int64(span) + dens
        distinct = np.unique(keys, return_index=True)[1]  # ties collapse here
    else:
        distinct = np.arange(len(nums))  # key would overflow; compare all
    best_num, best_den = int(nums[distinct[0]]), int(dens[distinct[0]])
    for i in distinct[1:]:
        num, den = int(nums[i]), int(dens[i])
        better = num * best_den > best_num * den
        if better == want_max and num * best_den != best_num * den:
            best_num, best_den = num, den
    return Fraction(best_num, best_den)


def enumerated_gap_range(counts: CycleCounts) -> tuple[Fraction, Fraction]:
    """(smallest, largest) circular gap by full enumeration, exact.

    Independent oracle for the lcm shortcut; also the only route to the
    largest gap.
    """
    num, den, _ = _perm_angle_arrays(counts)
    if len(num) == 1:
        return Fraction(1), Fraction(1)
    gap_num, gap_den = _circular_gaps_exact(num, den)
    return (
        _extreme_fraction(gap_num, gap_den, want_max=False),
        _extreme_fraction(gap_num, gap_den, want_max=True),
    )


def spacings_perm(counts: CycleCounts) -> SpacingStats:
    """Extremal spacings of the unmodified spectrum.

    Smallest comes from the lcm formula, largest from enumeration; the two
    routes are checked against each other in the test suite, not here.
    """
    smallest = Fraction(1, max_pairwise_lcm(counts))
    num, den, _ = _perm_angle_arrays(counts)
    if len(num) == 1:
        largest = Fraction(1)
    else:
        gap_num, gap_den = _circular_gaps_exact(num, den)
        largest = _extreme_fraction(gap_num, gap_den, want_max=True)
    return SpacingStats(
        n=counts.n,
        largest=float(largest),
        smallest=float(smallest),
        largest_exact=largest,
        smallest_exact=smallest,
    )


def spacings_mod(spectrum: ModifiedSpectrum) -> SpacingStats:
    """Extremal spacings of the modified spectrum (n angles, a.s. distinct)."""
    angles = enumerate_angles_mod(spectrum)
    if len(angles) == 1:
        return SpacingStats(n=spectrum.n, largest=1.0, smallest=1.0)
    gaps = np.diff(angles)
    wrap = 1.0 - angles[-1] + angles[0]
    largest = max(float(gaps.max()), wrap)
    smallest = min(float(gaps.min()), wrap)
    return SpacingStats(n=spectrum.n, largest=largest, smallest=smallest)


def two_cycle_min_spacing(p: int, q: int, shift: float) -> float:
    """Closest approach of a p-th-root grid and a shifted q-th-root grid.

    For coprime p, q and relative rotation ``shift`` in (0, 1) the minimum of
    |l/q + shift - k/p| over integers k, l equals
    min({shift p q}, 1 - {shift p q}) / (p q): the lattice of differences
    l/q - k/p is exactly (1/pq) Z.
    """
    if math.gcd(p, q) != 1:
        raise ValueError(f"p and q must be coprime, got p={p}, q={q}")
    if not 0 < shift < 1:
        raise ValueError(f"shift must lie in (0, 1), got {shift}")
    f = (shift * p * q) % 1.0
    return min(f, 1.0 - f) / (p * q)


def normalized_spacings(stats: SpacingStats) -> NormalizedSpacings:
    """n * largest and n^2 * smallest; n*largest >= 1 always (pigeonhole)."""
    return NormalizedSpacings(
        nD=stats.n * stats.largest, n2d=stats.n**2 * stats.smallest
    )
