#!/usr/bin/env python3
"""Two structural facts behind the counting theory, measured directly.

First, the coupling: cycle counts a_{n,j} and independent Poisson(theta/j)
variables W_j can be built from one Bernoulli word so that the expected
total discrepancy stays below 2 + theta (gamma + psi(theta)) for every n.
Second, the extremal spacings: the largest gap between distinct eigenangles
scales like 1/n and the smallest like 1/n^2, with stable quantiles.
"""

from permspectra import run_coupling_check, run_spacings


def coupling_story():
    print("=== Feller coupling distance vs the digamma bound (n = 500, M = 4000) ===")
    print(f"{'theta':>6} {'E sum|a-W|':>12} {'tail':>9} {'bound':>8} {'margin':>8} {'se':>8}")
    for theta in (0.01, 0.5, 1.0, 2.0, 4.0):
        rep = run_coupling_check(500, theta, trials=4000, master_seed=97, epsilon_tail=1e-3)
        margin = rep.bound - rep.empirical_mean - rep.tail_bound
        print(
            f"{theta:6.2f} {rep.empirical_mean:12.4f} {rep.tail_bound:9.5f} "
            f"{rep.bound:8.4f} {margin:+8.4f} {rep.std_error:8.4f}"
        )
    print("(the bound is nearly saturated: margins sit within a few standard errors of zero)")
    print()


def spacing_story():
    print("=== normalised extremal spacings across sizes (theta = 1, M = 2000) ===")
    res = run_spacings([500, 2000, 8000], theta=1.0, trials=2000, master_seed=98)
    levels = res.rows[0].quantile_levels
    header = "  ".join(f"q{int(100 * q):02d}" for q in levels)
    for name, attr in (
        ("n * largest (plain)", "nD"),
        ("n^2 * smallest (plain)", "n2d"),
        ("n * largest (modified)", "nD_mod"),
        ("n^2 * smallest (modified)", "n2d_mod"),
    ):
        print(f"--- {name}: {header}")
        for row in res.rows:
            cells = "  ".join(f"{v:7.3f}" for v in getattr(row, attr))
            print(f"    n={row.n:5d}  {cells}")
    total_viol = sum(
        r.violations_nD + r.violations_n2d + r.violations_dtilde for r in res.rows
    )
    print(f"samplewise bound violations across all runs: {total_viol}")
    print("(n*largest >= 1 and n^2*smallest >= 1 are theorems; quantiles barely move with n)")


if __name__ == "__main__":
    coupling_story()
    spacing_story()
