"""Cesàro means of fractional order and the cycle-count weight function.

The central object is the weight

    psi(n, j) = n (n-1) ... (n-j+1) / ((theta+n-1) (theta+n-2) ... (theta+n-j)),

a product of ``j`` ratios close to one.  Under the Ewens measure of parameter
``theta`` the expected number of j-cycles of an n-permutation equals
``theta/j * psi(n, j)``, and the same weights are (up to normalisation) the
kernel of Cesàro averaging of order ``theta``.  All the variance formulas in
:mod:`permspectra.spectral` are weighted sums against this table, so this
module provides a stable evaluator plus explicit two-sided checks of the
summation identities those formulas rely on:

* mean identity       (1/n) sum_j psi(n, j)            = 1/theta
* harmonic identity   sum_j psi(n, j)/j                = sum_j 1/(theta+j-1)
* quadratic identity  sum_{j,k} (psi(n,j)psi(n,k) - psi(n,j+k) [j+k<=n])/(jk)
                                                        = sum_{k<n} 1/(theta+k)^2
* telescoping sum     sum_{p=j}^{n-1} A_{p-j}^{theta-1}/(p A_p^theta)
                                                        = psi(n, j) (1/j - 1/n)

where ``A_n^delta`` are the Cesàro (binomial) numbers.  Each ``verify_*``
function returns the two sides; callers assert the gap at their tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

__all__ = [
    "PsiTable",
    "psi",
    "psi_values",
    "psi_table",
    "cesaro_number",
    "cesaro_mean",
    "verify_mean_identity",
    "verify_harmonic_identity",
    "verify_quadratic_identity",
    "absolute_quadratic_sum",
    "verify_telescoping",
    "log_weighted_ratio",
]

#: default size cap for the O(n^2) double sums
QUADRATIC_CAP = 2000


def _check_theta(theta: float) -> None:
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")


def psi_values(n: int, theta: float) -> np.ndarray:
    """Table ``[psi(n, 1), ..., psi(n, n)]`` as one cumulative product.

    Each factor ``(n-i)/(theta+n-1-i)`` is bounded, so the running product
    never overflows even though numerator and denominator of the closed form
    are astronomically large for n beyond ~170.
    """
    _check_theta(theta)
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    i = np.arange(n, dtype=np.float64)
    return np.cumprod((n - i) / (theta + n - 1.0 - i))


def psi(n: int, j: int, theta: float) -> float:
    """The weight psi(n, j) for a single index ``1 <= j <= n``."""
    _check_theta(theta)
    if not 1 <= j <= n:
        raise ValueError(f"j must lie in [1, n] = [1, {n}], got {j}")
    i = np.arange(j, dtype=np.float64)
    return float(np.prod((n - i) / (theta + n - 1.0 - i)))


@dataclass(frozen=True)
class PsiTable:
    """All weights psi(n, j), j = 1..n, for one (n, theta).

    ``values[j-1]`` holds psi(n, j).  The table is monotone in j: constant 1
    at theta = 1, decreasing for theta > 1, increasing for theta < 1.
    """

    n: int
    theta: float
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != self.n:
            raise ValueError("values must have length n")
        if np.any(self.values <= 0):
            raise ValueError("psi values must be positive")


def psi_table(n: int, theta: float) -> PsiTable:
    return PsiTable(n=n, theta=theta, values=psi_values(n, theta))


def cesaro_number(n: int, delta: float) -> float:
    """Cesàro number A_n^delta = C(n+delta, n) = prod_{k=1..n} (k+delta)/k.

    Defined for any real ``delta`` outside {-1, -2, ...}; A_0^delta = 1.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if delta < 0 and float(delta).is_integer():
        raise ValueError(f"delta must not be a negative integer, got {delta}")
    if n == 0:
        return 1.0
    k = np.arange(1, n + 1, dtype=np.float64)
    return float(np.prod((k + delta) / k))


def cesaro_mean(w, theta: float) -> float:
    """Cesàro mean of order theta of the sequence ``w = (w_0, ..., w_n)``.

    Requires ``w_0 = 0``, in which case the A-number form collapses to
    ``theta/(theta+n) * sum_j psi(n, j) w_j``.
    """
    _check_theta(theta)
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or len(w) < 2:
        raise ValueError("w must be a 1-d sequence (w_0, ..., w_n) with n >= 1")
    if w[0] != 0:
        raise ValueError("cesaro_mean requires w_0 = 0")
    n = len(w) - 1
    return theta / (theta + n) * float(psi_values(n, theta) @ w[1:])


def cesaro_mean_binomial(w, theta: float) -> float:
    """Same mean evaluated directly from A-numbers (cross-check route).

    Computes sum_j A_{n-j}^{theta-1}/A_n^theta * w_j via log-gamma; kept
    independent from :func:`cesaro_mean` on purpose.
    """
    _check_theta(theta)
    w = np.asarray(w, dtype=np.float64)
    n = len(w) - 1
    j = np.arange(0, n + 1, dtype=np.float64)
    log_a_nj = gammaln(n - j + theta) - gammaln(theta) - gammaln(n - j + 1)
    log_a_n = gammaln(n + theta + 1) - gammaln(theta + 1) - gammaln(n + 1)
    return float(np.exp(log_a_nj - log_a_n) @ w)


def verify_mean_identity(n: int, theta: float) -> tuple[float, float]:
    """Both sides of (1/n) sum_j psi(n, j) = 1/theta."""
    lhs = math.fsum(psi_values(n, theta).tolist()) / n
    return lhs, 1.0 / theta


def verify_harmonic_identity(n: int, theta: float) -> tuple[float, float]:
    """Both sides of sum_j psi(n, j)/j = sum_{j=1..n} 1/(theta+j-1)."""
    j = np.arange(1, n + 1, dtype=np.float64)
    lhs = math.fsum((psi_values(n, theta) / j).tolist())
    rhs = math.fsum((1.0 / (theta + j - 1.0)).tolist())
    return lhs, rhs


def _quadratic_double_sum(n: int, theta: float, absolute: bool) -> float:
    """sum over 1 <= j,k <= n of (psi(j)psi(k) - psi(j+k) [j+k<=n]) / (jk),
    optionally with absolute values taken termwise.  Chunked O(n^2)."""
    values = psi_values(n, theta)
    j = np.arange(1, n + 1, dtype=np.float64)
    u = values / j
    partials = []
    block = 256
    for start in range(0, n, block):
        stop = min(start + block, n)
        rows = np.arange(start + 1, stop + 1)  # j values in this block
        prod = np.outer(u[start:stop], u)
        m = rows[:, None] + np.arange(1, n + 1)[None, :]
        cross = np.zeros_like(prod)
        inside = m <= n
        cross[inside] = values[m[inside] - 1]
        cross /= rows[:, None] * j[None, :]
        terms = prod - cross
        if absolute:
            np.abs(terms, out=terms)
        partials.append(float(terms.sum()))
    return math.fsum(partials)


def verify_quadratic_identity(
    n: int, theta: float, cap: int = QUADRATIC_CAP
) -> tuple[float, float]:
    """Both sides of the quadratic identity (an O(n^2) double sum).

    Refuses n above ``cap`` so the identity suite stays fast; raise the cap
    explicitly if you really want a bigger run.
    """
    if n > cap:
        raise ValueError(f"n = {n} exceeds the O(n^2) cap {cap}")
    lhs = _quadratic_double_sum(n, theta, absolute=False)
    k = np.arange(n, dtype=np.float64)
    rhs = math.fsum((1.0 / (theta + k) ** 2).tolist())
    return lhs, rhs


def absolute_quadratic_sum(n: int, theta: float, cap: int = QUADRATIC_CAP) -> float:
    """Termwise-absolute version of the quadratic double sum.

    Stays bounded in n for fixed theta; monitored in tests as a boundedness
    proxy.  For theta >= 1 every term already has one sign, so this equals
    the signed sum.
    """
    if n > cap:
        raise ValueError(f"n = {n} exceeds the O(n^2) cap {cap}")
    return _quadratic_double_sum(n, theta, absolute=True)


def verify_telescoping(n: int, j: int, theta: float) -> tuple[float, float]:
    """Both sides of sum_{p=j}^{n-1} A_{p-j}^{theta-1}/(p A_p^theta)
    = psi(n, j) (1/j - 1/n), for 1 <= j <= n-1."""
    _check_theta(theta)
    if not 1 <= j <= n - 1:
        raise ValueError(f"j must lie in [1, n-1] = [1, {n - 1}], got {j}")
    p = np.arange(j, n, dtype=np.float64)
    log_num = gammaln(p - j + theta) - gammaln(theta) - gammaln(p - j + 1)
    log_den = gammaln(p + theta + 1) - gammaln(theta + 1) - gammaln(p + 1)
    lhs = math.fsum((np.exp(log_num - log_den) / p).tolist())
    rhs = psi(n, j, theta) * (1.0 / j - 1.0 / n)
    return lhs, rhs


def log_weighted_ratio(w, n: int, theta: float) -> float:
    """(sum_j psi(n, j) w_j / j) / (theta log n) for a bounded w >= 0.

    If (w_j) is Cesàro-convergent with limit L, this ratio tends to
    L / theta; with w = 1 and theta = 1 it is H_n / log n.  Exposed as a
    convergence diagnostic, not an identity.
    """
    _check_theta(theta)
    w = np.asarray(w, dtype=np.float64)
    if len(w) < n:
        raise ValueError("need w_1..w_n")
    if np.any(w[:n] < 0):
        raise ValueError("w must be non-negative")
    if n < 2:
        raise ValueError("n must be >= 2 so that log n > 0")
    j = np.arange(1, n + 1, dtype=np.float64)
    return float((psi_values(n, theta) / j) @ w[:n]) / (theta * math.log(n))
