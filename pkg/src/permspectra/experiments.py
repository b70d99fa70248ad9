"""Monte Carlo harness: Gaussian-limit checks, coupling bound, spacings.

Every experiment is driven by a master seed; trial ``i`` draws from the
generator ``trial_rng(master_seed, i)``, so results are bit-identical for
any worker count.  Aggregations run over the trial-ordered arrays, never
over per-worker partial sums.

The normality checks standardise integer counts with their *exact* finite-n
moments (the asymptotic ones converge like 1/log n, far too slowly to be
usable at desk scale) and compare against the standard normal law with a
one-sample Kolmogorov-Smirnov test whose p-value comes from the asymptotic
Kolmogorov series.  Counts are integer-valued, so the KS comparison with a
continuous law is biased conservative; see the acceptance suite for the
quantitative consequences at log-scale variances.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy.special import ndtr

from .cesaro import psi_values
from .ewens import (
    EwensParams,
    coupling_distance,
    coupling_horizon,
    sample_coupled,
    sample_cycle_counts,
)
from .limits import DeclaredIrrational, c2_meso, covariance_D, covariance_Dtilde
from .rng import trial_rng
from .spacings import max_pairwise_lcm, normalized_spacings, spacings_mod, spacings_perm
from .spectral import (
    Arc,
    attach_phases,
    count_arc_mod,
    count_arc_perm,
    exact_moments_mod,
    exact_moments_perm,
    frac_parts,
)

__all__ = [
    "EULER_GAMMA",
    "ExperimentConfig",
    "NormalityReport",
    "CltFixedResult",
    "MesoscopicRow",
    "MesoscopicResult",
    "CouplingReport",
    "SpacingsRow",
    "SpacingsResult",
    "digamma",
    "ks_test",
    "coupling_bound",
    "run_clt_fixed",
    "run_mesoscopic",
    "run_coupling_check",
    "run_spacings",
]

EULER_GAMMA = 0.5772156649015328606


# ---------------------------------------------------------------------------
# special functions and the KS test (self-contained; cross-checked against
# scipy in the test suite, which stays the independent route)
# ---------------------------------------------------------------------------


def digamma(x: float) -> float:
    """Digamma function psi(x) for x > 0, to absolute accuracy ~1e-12.

    Uses the recurrence psi(x+1) = psi(x) + 1/x to shift the argument to
    x >= 10, then the asymptotic series
    psi(x) ~ ln x - 1/(2x) - sum B_{2k}/(2k x^{2k}).
    """
    if not x > 0:
        raise ValueError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = inv2 * (
        1.0 / 12.0
        - inv2
        * (
            1.0 / 120.0
            - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))
        )
    )
    return acc + math.log(x) - 0.5 / x - series


def coupling_bound(theta: float) -> float:
    """Upper bound 2 + theta (gamma + psi(theta)) on E sum_j |a_{n,j} - W_j|."""
    return 2.0 + theta * (EULER_GAMMA + digamma(theta))


def _kolmogorov_sf(lam: float) -> float:
    """Asymptotic Kolmogorov survival 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lam^2),
    truncated once terms drop below 1e-10."""
    if lam <= 0.05:
        return 1.0  # the series is useless here and the answer is 1 to 1e-10
    total = 0.0
    sign = 1.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * lam * lam)
        total += sign * term
        if term < 1e-10 or k > 10_000:
            break
        sign = -sign
        k += 1
    return min(max(2.0 * total, 0.0), 1.0)


def ks_test(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> tuple[float, float]:
    """One-sample two-sided Kolmogorov-Smirnov test.

    ``samples`` must be sorted ascending (rejected otherwise) with at least
    8 entries.  Returns (statistic, p_value) where the statistic is
    sup |F_emp - F| and the p-value uses the asymptotic Kolmogorov law at
    sqrt(n) * statistic.
    """
    samples = np.asarray(samples, dtype=np.float64)
    n = len(samples)
    if n < 8:
        raise ValueError(f"need at least 8 samples, got {n}")
    if np.any(np.diff(samples) < 0):
        raise ValueError("samples must be sorted ascending")
    f = np.asarray(cdf(samples), dtype=np.float64)
    i = np.arange(1, n + 1, dtype=np.float64)
    d_plus = float(np.max(i / n - f))
    d_minus = float(np.max(f - (i - 1.0) / n))
    stat = max(d_plus, d_minus, 0.0)
    return stat, _kolmogorov_sf(math.sqrt(n) * stat)


@dataclass
class NormalityReport:
    """KS comparison of standardised counts against the standard normal law.

    Empirical and reference mean/variance are on the raw count scale; the KS
    statistic and p-value refer to the standardised sample.
    """

    sample_size: int
    ks_statistic: float
    ks_p_value: float
    empirical_mean: float
    empirical_variance: float
    reference_mean: float
    reference_variance: float

    def __post_init__(self):
        if not 0 <= self.ks_statistic <= 1 or not 0 <= self.ks_p_value <= 1:
            raise ValueError("KS statistic and p-value must lie in [0, 1]")


def _normality_report(
    counts: np.ndarray, reference_mean: float, reference_variance: float
) -> NormalityReport:
    standardized = np.sort((counts - reference_mean) / math.sqrt(reference_variance))
    stat, p = ks_test(standardized, ndtr)
    # compensated, trial-order-fixed sums: the report is bit-identical no
    # matter how the trials were batched across workers
    m = len(counts)
    mean = math.fsum(counts.tolist()) / m
    variance = math.fsum(((counts - mean) ** 2).tolist()) / (m - 1)
    return NormalityReport(
        sample_size=m,
        ks_statistic=stat,
        ks_p_value=p,
        empirical_mean=mean,
        empirical_variance=variance,
        reference_mean=reference_mean,
        reference_variance=reference_variance,
    )


# ---------------------------------------------------------------------------
# configuration and the chunked trial runner
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    """Shared configuration for the Monte Carlo drivers.

    ``n`` is the fixed matrix size (fixed-arc experiments); mesoscopic runs
    use ``n_schedule`` with arc width n**(-gamma) anchored at ``meso_alpha``.
    """

    theta: float
    trials: int
    master_seed: int
    model: str  # "perm" | "mod"
    n: Optional[int] = None
    arcs: tuple[Arc, ...] = field(default_factory=tuple)
    n_schedule: tuple[int, ...] = field(default_factory=tuple)
    gamma: Optional[float] = None
    meso_alpha: Union[Fraction, DeclaredIrrational, None] = None

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        if self.trials < 2:
            raise ValueError("need at least 2 trials")
        if self.model not in ("perm", "mod"):
            raise ValueError(f"model must be 'perm' or 'mod', got {self.model!r}")
        if self.gamma is not None and not 0 < self.gamma < 1:
            raise ValueError(
                "gamma must lie in (0, 1): the arc must shrink while n*width grows"
            )


def _chunk_ranges(trials: int, jobs: int) -> list[tuple[int, int]]:
    per = max(1, math.ceil(trials / max(jobs, 1) / 4))
    return [(lo, min(lo + per, trials)) for lo in range(0, trials, per)]


def _run_chunks(worker, payloads: list, jobs: int) -> list:
    if jobs <= 1:
        return [worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, payloads))


# ---------------------------------------------------------------------------
# fixed-arc central limit experiment
# ---------------------------------------------------------------------------


def _clt_counts_chunk(args) -> np.ndarray:
    lo, hi, seed, n, theta, arcs, model = args
    params = EwensParams(theta)
    out = np.empty((hi - lo, len(arcs)), dtype=np.int64)
    for t in range(lo, hi):
        rng = trial_rng(seed, t)
        counts = sample_cycle_counts(n, params, rng)
        if model == "mod":
            spectrum = attach_phases(counts, rng)
            out[t - lo] = [count_arc_mod(spectrum, a) for a in arcs]
        else:
            out[t - lo] = [count_arc_perm(counts, a) for a in arcs]
    return out


@dataclass
class CltFixedResult:
    counts: np.ndarray  # trials x arcs, raw integer counts
    standardized: np.ndarray  # trials x arcs
    reports: list[NormalityReport]
    empirical_correlation: np.ndarray
    reference_correlation: np.ndarray
    moments: list[tuple[float, float]]  # exact (mean, variance) per arc


def run_clt_fixed(
    config: ExperimentConfig, jobs: int = 1, n_numeric: int = 10**6
) -> CltFixedResult:
    """Sample counts over fixed arcs, standardise by exact moments, test normality.

    Returns per-arc KS reports plus the empirical correlation matrix next to
    the limiting one.  Arcs whose exact count variance vanishes (e.g. the
    full circle) are rejected up front: there is nothing to standardise.
    """
    if config.n is None or not config.arcs:
        raise ValueError("run_clt_fixed needs n and at least one arc")
    n, theta, model = config.n, config.theta, config.model
    if model == "mod":
        moments = [exact_moments_mod(n, theta, a) for a in config.arcs]
    else:
        moments = [exact_moments_perm(n, theta, a) for a in config.arcs]
    for arc, m in zip(config.arcs, moments):
        if m.variance < 1e-12:
            raise ValueError(
                f"degenerate arc {arc}: exact count variance {m.variance} is zero; "
                "standardisation is impossible"
            )

    payloads = [
        (lo, hi, config.master_seed, n, theta, config.arcs, model)
        for lo, hi in _chunk_ranges(config.trials, jobs)
    ]
    counts = np.concatenate(_run_chunks(_clt_counts_chunk, payloads, jobs), axis=0)

    means = np.array([m.mean for m in moments])
    sds = np.sqrt([m.variance for m in moments])
    standardized = (counts - means) / sds
    reports = [
        _normality_report(counts[:, k], moments[k].mean, moments[k].variance)
        for k in range(len(config.arcs))
    ]
    if len(config.arcs) > 1:
        empirical = np.corrcoef(standardized, rowvar=False)
    else:
        empirical = np.ones((1, 1))
    reference = (
        covariance_Dtilde(config.arcs, n_numeric)
        if model == "mod"
        else covariance_D(config.arcs, n_numeric)
    ).entries
    return CltFixedResult(
        counts=counts,
        standardized=standardized,
        reports=reports,
        empirical_correlation=empirical,
        reference_correlation=reference,
        moments=[(m.mean, m.variance) for m in moments],
    )


# ---------------------------------------------------------------------------
# mesoscopic experiment
# ---------------------------------------------------------------------------


def _meso_endpoint(alpha: Union[Fraction, DeclaredIrrational, None]):
    if alpha is None:
        return Fraction(0)
    if isinstance(alpha, DeclaredIrrational):
        return alpha.value
    return alpha


def _meso_arc(alpha_endpoint, delta: float) -> Arc:
    return Arc(alpha=alpha_endpoint, beta=float(alpha_endpoint) + delta)


def _meso_counts_chunk(args) -> np.ndarray:
    lo, hi, seed, n, theta, arc, model = args
    params = EwensParams(theta)
    out = np.empty(hi - lo, dtype=np.int64)
    for t in range(lo, hi):
        rng = trial_rng(seed, t)
        counts = sample_cycle_counts(n, params, rng)
        if model == "mod":
            out[t - lo] = count_arc_mod(attach_phases(counts, rng), arc)
        else:
            out[t - lo] = count_arc_perm(counts, arc)
    return out


@dataclass
class MesoscopicRow:
    n: int
    delta: float
    log_n_delta: float
    variance: float  # exact formula (mod) or MC estimate (perm)
    variance_is_exact: bool
    target: float  # first-order asymptotic constant * theta * log(n delta)
    ratio: float


@dataclass
class MesoscopicResult:
    rows: list[MesoscopicRow]
    report: Optional[NormalityReport]
    constant: float  # the theory constant multiplying theta log(n delta)


def _perm_exact_mean(n: int, theta: float, arc: Arc) -> float:
    omega = frac_parts(arc.beta, n) - frac_parts(arc.alpha, n)
    j = np.arange(1, n + 1, dtype=np.float64)
    return n * float(arc.width) - theta * float((psi_values(n, theta) * omega / j).sum())


def run_mesoscopic(config: ExperimentConfig, jobs: int = 1) -> MesoscopicResult:
    """Variance growth and normality on arcs shrinking like n**(-gamma).

    For the modified model the variance is evaluated by the exact formula at
    every n in the schedule; for the plain model it is a Monte Carlo
    estimate (its exact cross term is an O(n^2) sum, out of reach at these
    sizes).  Each variance is set against the first-order asymptote
    constant * theta * log(n * delta_n); the KS report is computed at the
    largest n from ``trials`` standardised counts.
    """
    if not config.n_schedule or config.gamma is None:
        raise ValueError("run_mesoscopic needs n_schedule and gamma")
    theta, model = config.theta, config.model
    alpha_endpoint = _meso_endpoint(config.meso_alpha)
    if isinstance(alpha_endpoint, Fraction):
        constant = c2_meso(alpha_endpoint) if model == "perm" else 1.0 / 6.0
    else:
        constant = 1.0 / 6.0  # declared irrational anchor

    rows: list[MesoscopicRow] = []
    report: Optional[NormalityReport] = None
    largest = max(config.n_schedule)
    for n in config.n_schedule:
        delta = float(n) ** (-config.gamma)
        arc = _meso_arc(alpha_endpoint, delta)
        log_nd = math.log(n * delta)
        if log_nd <= 0:
            raise ValueError(
                f"n * delta must exceed 1 for a mesoscopic window, got n={n}"
            )
        target = constant * theta * log_nd

        need_counts = model == "perm" or n == largest
        counts = None
        if need_counts:
            payloads = [
                (lo, hi, config.master_seed, n, theta, arc, model)
                for lo, hi in _chunk_ranges(config.trials, jobs)
            ]
            counts = np.concatenate(_run_chunks(_meso_counts_chunk, payloads, jobs))

        if model == "mod":
            variance = exact_moments_mod(n, theta, arc).variance
            exact = True
            mean = n * delta
        else:
            variance = float(np.var(counts, ddof=1))
            exact = False
            mean = _perm_exact_mean(n, theta, arc)
        rows.append(
            MesoscopicRow(
                n=n,
                delta=delta,
                log_n_delta=log_nd,
                variance=variance,
                variance_is_exact=exact,
                target=target,
                ratio=variance / target,
            )
        )
        if n == largest:
            report = _normality_report(counts, mean, variance)
    return MesoscopicResult(rows=rows, report=report, constant=constant)


# ---------------------------------------------------------------------------
# Feller-coupling distance experiment
# ---------------------------------------------------------------------------


def _coupling_chunk(args) -> np.ndarray:
    lo, hi, seed, n, theta, epsilon_tail = args
    params = EwensParams(theta)
    out = np.empty(hi - lo, dtype=np.int64)
    for t in range(lo, hi):
        sample = sample_coupled(n, params, trial_rng(seed, t), epsilon_tail)
        out[t - lo] = coupling_distance(sample)
    return out


@dataclass
class CouplingReport:
    n: int
    theta: float
    trials: int
    empirical_mean: float  # mean of sum_j |a_{n,j} - W_j| over trials
    std_error: float
    tail_bound: float  # certified expected loss from horizon truncation
    bound: float  # 2 + theta (gamma + psi(theta))
    horizon: int


def run_coupling_check(
    n: int,
    theta: float,
    trials: int,
    master_seed: int,
    epsilon_tail: float = 1e-3,
    jobs: int = 1,
) -> CouplingReport:
    """Empirical coupling distance against the closed-form bound."""
    payloads = [
        (lo, hi, master_seed, n, theta, epsilon_tail)
        for lo, hi in _chunk_ranges(trials, jobs)
    ]
    distances = np.concatenate(_run_chunks(_coupling_chunk, payloads, jobs))
    horizon, tail_bound = coupling_horizon(n, theta, epsilon_tail)
    return CouplingReport(
        n=n,
        theta=theta,
        trials=trials,
        empirical_mean=float(np.mean(distances)),
        std_error=float(np.std(distances, ddof=1) / math.sqrt(trials)),
        tail_bound=tail_bound,
        bound=coupling_bound(theta),
        horizon=horizon,
    )


# ---------------------------------------------------------------------------
# spacing tightness experiment
# ---------------------------------------------------------------------------

_QUANTILE_LEVELS = (0.05, 0.25, 0.50, 0.75, 0.95)


def _spacings_chunk(args) -> np.ndarray:
    """Per trial: nD, n2d, nD~, n2d~, viol_nD, viol_n2d, viol_dtilde (as floats)."""
    lo, hi, seed, n, theta = args
    params = EwensParams(theta)
    out = np.empty((hi - lo, 7), dtype=np.float64)
    for t in range(lo, hi):
        rng = trial_rng(seed, t)
        counts = sample_cycle_counts(n, params, rng)
        perm = spacings_perm(counts)
        mod = spacings_mod(attach_phases(counts, rng))
        norm_p = normalized_spacings(perm)
        norm_m = normalized_spacings(mod)
        # exact bound checks on the rational side: n*D >= 1 and n^2*d >= 1
        viol_nd = (
            n * perm.largest_exact.numerator < perm.largest_exact.denominator
        )
        viol_n2d = n * n < max_pairwise_lcm(counts)
        viol_dtilde = mod.smallest > perm.smallest + 1e-12
        out[t - lo] = (
            norm_p.nD,
            norm_p.n2d,
            norm_m.nD,
            norm_m.n2d,
            float(viol_nd),
            float(viol_n2d),
            float(viol_dtilde),
        )
    return out


@dataclass
class SpacingsRow:
    n: int
    quantile_levels: tuple[float, ...]
    nD: list[float]
    n2d: list[float]
    nD_mod: list[float]
    n2d_mod: list[float]
    violations_nD: int
    violations_n2d: int
    violations_dtilde: int


@dataclass
class SpacingsResult:
    rows: list[SpacingsRow]


def run_spacings(
    n_schedule: Sequence[int],
    theta: float,
    trials: int,
    master_seed: int,
    jobs: int = 1,
) -> SpacingsResult:
    """Quantile tables of normalised extremal spacings across a size schedule.

    Per size: quantiles of n*D, n^2*d for the plain ensemble and of the
    modified counterparts on the same cycle structures, plus counters for
    the samplewise bounds (n*D >= 1, n^2*d >= 1, modified d <= plain d),
    which are theorems and must come out zero.
    """
    rows = []
    for idx, n in enumerate(n_schedule):
        payloads = [
            (lo, hi, master_seed + idx, n, theta)
            for lo, hi in _chunk_ranges(trials, jobs)
        ]
        data = np.concatenate(_run_chunks(_spacings_chunk, payloads, jobs), axis=0)
        qs = [np.quantile(data[:, c], _QUANTILE_LEVELS).tolist() for c in range(4)]
        rows.append(
            SpacingsRow(
                n=n,
                quantile_levels=_QUANTILE_LEVELS,
                nD=qs[0],
                n2d=qs[1],
                nD_mod=qs[2],
                n2d_mod=qs[3],
                violations_nD=int(data[:, 4].sum()),
                violations_n2d=int(data[:, 5].sum()),
                violations_dtilde=int(data[:, 6].sum()),
            )
        )
    return SpacingsResult(rows=rows)
