"""Limit constants for counting-statistic variances and covariances.

Everything here is about Cesàro averages of products of fractional parts:

    c(s, t, u, v)  = lim (1/N) sum_j ({j s} - {j t})({j u} - {j v})
    c~(s, t, u, v) = lim (1/2N) sum_j (h_j(t-u) + h_j(s-v) - h_j(s-u) - h_j(t-v))

with h_j(x) = {j x}(1 - {j x}).  For an arc (alpha, beta], the diagonal
values c(alpha, beta, alpha, beta) and c~(alpha, beta, alpha, beta) are the
constants multiplying theta log N in the variance of the eigenvalue counts
of the plain and phase-modified ensembles, and the full matrices normalise
the joint Gaussian limit over several arcs.

The closed-form values are discontinuous in the arithmetic of the
endpoints (rational versus irrational, and rational affine relations
between them), and rationality is undecidable from a float.  Callers must
therefore *declare* the arithmetic class of the endpoints through the
``ArcClass`` variants below; the named irrational constants ship with the
package and are declared pairwise linearly independent over the rationals
(together with 1), a fact used but not verified.

Numeric oracles (``c_numeric``, ``ctilde_numeric``,
``equidistribution_average``) evaluate the partial averages directly and
are exact — rational arithmetic throughout — whenever the endpoints are
``fractions.Fraction``; one full period then reproduces the limit exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .spectral import Arc, Endpoint, frac_parts

__all__ = [
    "DeclaredIrrational",
    "NAMED_IRRATIONALS",
    "BothIrrationalIndependent",
    "RationalAlpha",
    "RationalBeta",
    "BothRational",
    "AffineRelated",
    "ArcClass",
    "CovarianceMatrix",
    "c_numeric",
    "ctilde_numeric",
    "c2_closed",
    "s3_closed",
    "ell_closed",
    "c2_meso",
    "l1_limit",
    "l2_limit",
    "covariance_D",
    "covariance_Dtilde",
    "equidistribution_average",
]


@dataclass(frozen=True)
class DeclaredIrrational:
    """A float carrying the caller's declaration that it is irrational."""

    value: float
    name: str = ""

    def __float__(self) -> float:
        return self.value


#: fractional parts of well-known irrationals (angles live in [0, 1)).
#: golden is 1/phi = phi - 1; the set {1, sqrt2, sqrt3, golden, e, pi} is
#: declared linearly independent over the rationals.
NAMED_IRRATIONALS: dict[str, DeclaredIrrational] = {
    "golden": DeclaredIrrational((1.0 + math.sqrt(5.0)) / 2.0 - 1.0, "golden"),
    "sqrt2": DeclaredIrrational(math.sqrt(2.0) - 1.0, "sqrt2"),
    "sqrt3": DeclaredIrrational(math.sqrt(3.0) - 1.0, "sqrt3"),
    "e": DeclaredIrrational(math.e - 2.0, "e"),
    "pi": DeclaredIrrational(math.pi - 3.0, "pi"),
}


def _check_coprime(a: int, b: int, what: str) -> None:
    if b < 1:
        raise ValueError(f"{what}: denominator must be >= 1, got {b}")
    if math.gcd(a, b) != 1:
        raise ValueError(f"{what}: {a}/{b} is not in lowest terms")


@dataclass(frozen=True)
class BothIrrationalIndependent:
    """alpha, beta irrational, linearly independent over Q together with 1."""

    alpha_value: float
    beta_value: float


@dataclass(frozen=True)
class RationalAlpha:
    """alpha = p/q in lowest terms, beta irrational."""

    p: int
    q: int
    beta_value: float

    def __post_init__(self):
        _check_coprime(self.p, self.q, "alpha")


@dataclass(frozen=True)
class RationalBeta:
    """alpha irrational, beta = r/s in lowest terms."""

    alpha_value: float
    r: int
    s: int

    def __post_init__(self):
        _check_coprime(self.r, self.s, "beta")


@dataclass(frozen=True)
class BothRational:
    """alpha = p/q and beta = r/s, both in lowest terms."""

    p: int
    q: int
    r: int
    s: int

    def __post_init__(self):
        _check_coprime(self.p, self.q, "alpha")
        _check_coprime(self.r, self.s, "beta")


@dataclass(frozen=True)
class AffineRelated:
    """alpha irrational and beta = p/q + (r/s) alpha with r != 0.

    ``alpha_value`` is optional and only needed to realise a numeric arc for
    oracle comparisons; the constant itself depends on (p, q, r, s) alone.
    """

    p: int
    q: int
    r: int
    s: int
    alpha_value: Optional[float] = None

    def __post_init__(self):
        _check_coprime(self.p, self.q, "p/q")
        if self.r == 0:
            raise ValueError("r must be non-zero (beta would be rational)")
        _check_coprime(self.r, self.s, "r/s")

    def beta_value_from(self, alpha: float) -> float:
        return self.p / self.q + self.r / self.s * alpha


ArcClass = Union[
    BothIrrationalIndependent, RationalAlpha, RationalBeta, BothRational, AffineRelated
]


def arc_of_class(cls: ArcClass) -> Arc:
    """Realise a concrete Arc for a declared class (numeric-oracle side).

    Rational endpoints become Fractions (exact); endpoints may be shifted by
    integers to satisfy the arc conventions, which changes no constant.
    """
    if isinstance(cls, BothIrrationalIndependent):
        alpha, beta = cls.alpha_value, cls.beta_value
    elif isinstance(cls, RationalAlpha):
        alpha, beta = Fraction(cls.p, cls.q), cls.beta_value
    elif isinstance(cls, RationalBeta):
        alpha, beta = cls.alpha_value, Fraction(cls.r, cls.s)
    elif isinstance(cls, BothRational):
        alpha, beta = Fraction(cls.p, cls.q), Fraction(cls.r, cls.s)
    elif isinstance(cls, AffineRelated):
        if cls.alpha_value is None:
            raise ValueError("AffineRelated needs alpha_value to build an arc")
        alpha = cls.alpha_value
        beta = cls.beta_value_from(cls.alpha_value)
    else:
        raise TypeError(f"not an ArcClass: {cls!r}")
    alpha = alpha - math.floor(float(alpha))
    beta = beta - math.floor(float(beta))
    if float(beta) <= float(alpha):
        beta = beta + 1  # wrap; beta == alpha mod 1 yields the full circle
    return Arc(alpha=alpha, beta=beta)


# ---------------------------------------------------------------------------
# numeric oracles
# ---------------------------------------------------------------------------


def _exact_mode(*xs: Endpoint) -> bool:
    return all(isinstance(x, (Fraction, int)) for x in xs)


def _frac_seq_exact(x: Fraction, n: int) -> list[Fraction]:
    q, p = x.denominator, x.numerator % x.denominator
    return [Fraction((j * p) % q, q) for j in range(1, n + 1)]


def c_numeric(s: Endpoint, t: Endpoint, u: Endpoint, v: Endpoint, n: int) -> float:
    """Partial Cesàro average (1/n) sum_{j<=n} ({js}-{jt})({ju}-{jv}).

    Float endpoints: vectorised double precision.  All-Fraction endpoints:
    exact rational arithmetic, so summing over one full period returns the
    limit with no rounding beyond the final float conversion.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if _exact_mode(s, t, u, v):
        fs, ft, fu, fv = (_frac_seq_exact(Fraction(x), n) for x in (s, t, u, v))
        total = sum((a - b) * (c - d) for a, b, c, d in zip(fs, ft, fu, fv))
        return float(total / n)
    left = frac_parts(s, n) - frac_parts(t, n)
    right = frac_parts(u, n) - frac_parts(v, n)
    return float(left @ right) / n


def _h_mean_exact(x: Fraction, n: int) -> Fraction:
    return sum(f * (1 - f) for f in _frac_seq_exact(x, n)) / n


def _h_mean_float(x: float, n: int) -> float:
    f = frac_parts(x, n)
    return float(np.mean(f * (1.0 - f)))


def ctilde_numeric(s: Endpoint, t: Endpoint, u: Endpoint, v: Endpoint, n: int) -> float:
    """Partial average (1/2n) sum_{j<=n} (h_j(t-u) + h_j(s-v) - h_j(s-u) - h_j(t-v)),
    with h_j(x) = {jx}(1-{jx}).  Exact in the all-Fraction case."""
    if n < 1:
        raise ValueError("n must be >= 1")
    diffs = (t - u, s - v, s - u, t - v)
    signs = (1, 1, -1, -1)
    if _exact_mode(s, t, u, v):
        total = Fraction(0)
        for d, sign in zip(diffs, signs):
            total += sign * _h_mean_exact(Fraction(d), n)
        return float(total / 2)
    total = 0.0
    for d, sign in zip(diffs, signs):
        total += sign * _h_mean_float(float(d), n)
    return total / 2.0


def equidistribution_average(f, t: float, b: float, n: int) -> float:
    """(1/n) sum_{j<=n} f({j t + b}) for a vectorised f on [0, 1].

    For irrational t this tends to the integral of f; it is the generic
    numeric oracle behind every irrational-case constant.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    j = np.arange(1, n + 1, dtype=np.float64)
    x = j * t + b
    return float(np.mean(f(x - np.floor(x))))


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def l1_limit(x: Union[Fraction, DeclaredIrrational]) -> float:
    """lim (1/n) sum {j x}: 1/2 for irrational x, (q-1)/(2q) for x = p/q."""
    if isinstance(x, Fraction):
        q = x.denominator
        return float(Fraction(q - 1, 2 * q))
    return 0.5


def l2_limit(x: Union[Fraction, DeclaredIrrational]) -> float:
    """lim (1/n) sum {j x}^2: 1/3 for irrational x, (2q-1)(q-1)/(6q^2) for p/q."""
    if isinstance(x, Fraction):
        q = x.denominator
        return float(Fraction((2 * q - 1) * (q - 1), 6 * q * q))
    return 1.0 / 3.0


def _s3_both_rational_exact(p: int, q: int, r: int, s: int) -> Fraction:
    """Exact lim (1/n) sum {j p/q}{j r/s} via one period of length q*s."""
    period = q * s
    total = Fraction(0)
    pp, rr = p % q, r % s
    for j in range(1, period + 1):
        total += Fraction((j * pp) % q, q) * Fraction((j * rr) % s, s)
    return total / period


def s3_closed(cls: ArcClass) -> float:
    """Closed-form limit of (1/n) sum {j alpha}{j beta} for a declared class.

    The affine case beta = p/q + (r/s) alpha gives 1/4 + d^2/(12 s r q^2)
    with d = gcd(s, q) (r may be negative); rational-vs-irrational mixes
    give 1/4 - 1/(4q) style values, and the fully rational case is an exact
    one-period sum.
    """
    if isinstance(cls, BothIrrationalIndependent):
        return 0.25
    if isinstance(cls, RationalAlpha):
        return float(Fraction(1, 4) - Fraction(1, 4 * cls.q))
    if isinstance(cls, RationalBeta):
        return float(Fraction(1, 4) - Fraction(1, 4 * cls.s))
    if isinstance(cls, BothRational):
        return float(_s3_both_rational_exact(cls.p, cls.q, cls.r, cls.s))
    if isinstance(cls, AffineRelated):
        d = math.gcd(cls.s, cls.q)
        return float(Fraction(1, 4) + Fraction(d * d, 12 * cls.s * cls.r * cls.q**2))
    raise TypeError(f"not an ArcClass: {cls!r}")


def c2_closed(cls: ArcClass) -> float:
    """Closed-form limit of (1/n) sum ({j beta} - {j alpha})^2.

    Case table:
        independent irrationals           1/6
        alpha = p/q, beta irrational      1/6 + 1/(6 q^2)
        alpha irrational, beta = r/s      1/6 + 1/(6 s^2)
        alpha = p/q, beta = r/s           exact one-period double sum
        beta = p/q + (r/s) alpha          1/6 - gcd(s,q)^2/(6 s r q^2)
    """
    if isinstance(cls, BothIrrationalIndependent):
        return float(Fraction(1, 6))
    if isinstance(cls, RationalAlpha):
        return float(Fraction(1, 6) + Fraction(1, 6 * cls.q**2))
    if isinstance(cls, RationalBeta):
        return float(Fraction(1, 6) + Fraction(1, 6 * cls.s**2))
    if isinstance(cls, BothRational):
        la = Fraction((2 * cls.q - 1) * (cls.q - 1), 6 * cls.q**2)
        lb = Fraction((2 * cls.s - 1) * (cls.s - 1), 6 * cls.s**2)
        return float(la + lb - 2 * _s3_both_rational_exact(cls.p, cls.q, cls.r, cls.s))
    if isinstance(cls, AffineRelated):
        d = math.gcd(cls.s, cls.q)
        return float(Fraction(1, 6) - Fraction(d * d, 6 * cls.s * cls.r * cls.q**2))
    raise TypeError(f"not an ArcClass: {cls!r}")


def ell_closed(delta: Union[Fraction, DeclaredIrrational]) -> float:
    """Variance constant of the modified ensemble as a function of the width.

    lim (1/n) sum h_j(delta) = 1/6 for irrational delta and
    1/6 - 1/(6 q^2) for delta = p/q in lowest terms (zero when delta is an
    integer, i.e. q = 1: the count is then deterministic).
    """
    if isinstance(delta, Fraction):
        q = delta.denominator
        return float(Fraction(1, 6) - Fraction(1, 6 * q * q))
    return float(Fraction(1, 6))


def c2_meso(alpha: Union[Fraction, DeclaredIrrational]) -> float:
    """Variance constant of the plain ensemble for a shrinking arc anchored at alpha:
    1/6 for irrational alpha, 1/6 + 1/(6 q^2) for alpha = p/q (1/3 at q = 1)."""
    if isinstance(alpha, Fraction):
        q = alpha.denominator
        return float(Fraction(1, 6) + Fraction(1, 6 * q * q))
    return float(Fraction(1, 6))


# ---------------------------------------------------------------------------
# covariance matrices
# ---------------------------------------------------------------------------


@dataclass
class CovarianceMatrix:
    """Symmetric unit-diagonal matrix, positive semidefinite up to 1e-6."""

    entries: np.ndarray

    def __post_init__(self):
        m = self.entries
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("entries must be square")
        if not np.allclose(m, m.T, atol=1e-12):
            raise ValueError("entries must be symmetric")
        if not np.allclose(np.diag(m), 1.0, atol=1e-9):
            raise ValueError("diagonal must be 1")
        if np.linalg.eigvalsh(m).min() < -1e-6:
            raise ValueError("matrix is not positive semidefinite within tolerance")

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def covariance_D(arcs: Sequence[Arc], n_numeric: int = 10**6) -> CovarianceMatrix:
    """Normalised limit covariance of plain-ensemble counts over several arcs.

    Entry (k, l) is the Cesàro average of omega_{j,k} omega_{j,l} at
    n_numeric, normalised by the diagonal averages (a correlation-shaped
    Gram matrix, hence positive semidefinite by construction).  A degenerate
    arc whose diagonal average vanishes is rejected.
    """
    if len(arcs) < 1:
        raise ValueError("need at least one arc")
    omegas = np.column_stack(
        [frac_parts(a.beta, n_numeric) - frac_parts(a.alpha, n_numeric) for a in arcs]
    )
    gram = omegas.T @ omegas / n_numeric
    diag = np.diag(gram)
    if np.any(diag <= 1e-12):
        raise ValueError("degenerate arc: vanishing count variance constant")
    d = gram / np.sqrt(np.outer(diag, diag))
    return CovarianceMatrix(entries=d)


def covariance_Dtilde(arcs: Sequence[Arc], n_numeric: int = 10**6) -> CovarianceMatrix:
    """Normalised limit covariance of modified-ensemble counts over several arcs.

    Entry (k, l) averages H_{j,k,l} = (h_j(beta_k - alpha_l) + h_j(alpha_k - beta_l)
    - h_j(alpha_k - alpha_l) - h_j(beta_k - beta_l))/2; for k = l this is
    h_j(delta_k), the variance constant of arc k.  For each j the matrix
    (H_{j,k,l}) is a covariance of indicator differences, so the average is
    positive semidefinite by construction.
    """
    if len(arcs) < 1:
        raise ValueError("need at least one arc")
    m = len(arcs)
    j = np.arange(1, n_numeric + 1, dtype=np.float64)

    cache: dict[float, float] = {}

    def h_mean(x: float) -> float:
        key = round(x, 15)
        if key not in cache:
            f = j * x
            f = f - np.floor(f)
            cache[key] = float(np.mean(f * (1.0 - f)))
        return cache[key]

    gram = np.empty((m, m))
    for k in range(m):
        ak, bk = float(arcs[k].alpha), float(arcs[k].beta)
        for l in range(k, m):
            al, bl = float(arcs[l].alpha), float(arcs[l].beta)
            val = 0.5 * (
                h_mean(bk - al) + h_mean(ak - bl) - h_mean(ak - al) - h_mean(bk - bl)
            )
            gram[k, l] = gram[l, k] = val
    diag = np.diag(gram)
    if np.any(diag <= 1e-12):
        raise ValueError("degenerate arc: vanishing count variance constant")
    d = gram / np.sqrt(np.outer(diag, diag))
    return CovarianceMatrix(entries=d)
