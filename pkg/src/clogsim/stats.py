"""Small statistics helpers shared by the harness and the validator."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats as sps

# Fixed 97.5% normal quantile so intervals never depend on scipy version.
Z975 = 1.959963984540054


def wilson_interval(successes: int, trials: int, z: float = Z975) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion (well behaved at 0/n)."""
    if trials <= 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1.0 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials))
    return (max(0.0, centre - half), min(1.0, centre + half))


def tv_distance(counts_a: Dict, counts_b: Dict) -> float:
    """Total-variation distance between two empirical distributions given
    as category -> count maps."""
    total_a = sum(counts_a.values())
    total_b = sum(counts_b.values())
    if total_a == 0 or total_b == 0:
        raise ValueError("empty sample")
    keys = set(counts_a) | set(counts_b)
    return 0.5 * sum(
        abs(counts_a.get(k, 0) / total_a - counts_b.get(k, 0) / total_b) for k in keys
    )


def two_sample_chisquare(
    counts_a: Dict, counts_b: Dict, min_expected: float = 5.0
) -> Tuple[float, int, float]:
    """Two-sample chi-square homogeneity test on category counts.

    Cells whose pooled expectation falls under ``min_expected`` are merged
    into a single overflow cell (standard practice for sparse tables).
    Returns (statistic, dof, p).  A table with fewer than two usable
    cells gives p = 1.0 (nothing to distinguish).
    """
    keys = sorted(set(counts_a) | set(counts_b), key=repr)
    a = np.array([counts_a.get(k, 0) for k in keys], dtype=float)
    b = np.array([counts_b.get(k, 0) for k in keys], dtype=float)
    na, nb = a.sum(), b.sum()
    if na == 0 or nb == 0:
        raise ValueError("empty sample")
    grand = na + nb
    pooled = (a + b) / grand

    # Merge sparse cells (expected count under min_expected in the smaller
    # sample) into one overflow cell, scanning lightest first.
    order = np.argsort(pooled)
    merged_a: list = []
    merged_b: list = []
    tail_a = tail_b = 0.0
    for idx in order:
        if pooled[idx] * min(na, nb) < min_expected:
            tail_a += a[idx]
            tail_b += b[idx]
        else:
            merged_a.append(a[idx])
            merged_b.append(b[idx])
    if tail_a + tail_b > 0:
        merged_a.append(tail_a)
        merged_b.append(tail_b)
    a = np.array(merged_a)
    b = np.array(merged_b)
    if len(a) < 2:
        return 0.0, 0, 1.0

    col = a + b
    ea = col * (na / grand)
    eb = col * (nb / grand)
    stat = float(np.sum((a - ea) ** 2 / ea) + np.sum((b - eb) ** 2 / eb))
    dof = len(a) - 1
    p = float(sps.chi2.sf(stat, dof))
    return stat, dof, p


@dataclass(frozen=True)
class FitResult:
    """Least-squares slope of log(median) against n, with a 95% CI."""

    slope: float
    intercept: float
    stderr: float
    ci_low: Optional[float]
    ci_high: Optional[float]
    points: int

    def to_dict(self) -> Dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "points": self.points,
        }


def log_median_fit(ns: Sequence[int], medians: Sequence[float]) -> Optional[FitResult]:
    """OLS fit of ln(median) vs n.  Needs >= 2 positive medians; the CI
    additionally needs >= 3 points (one residual degree of freedom)."""
    xs = [float(n) for n, m in zip(ns, medians) if m is not None and m > 0 and math.isfinite(m)]
    ys = [math.log(m) for m in medians if m is not None and m > 0 and math.isfinite(m)]
    if len(xs) < 2:
        return None
    res = sps.linregress(xs, ys)
    slope = float(res.slope)
    stderr = float(res.stderr)
    if len(xs) >= 3:
        tcrit = float(sps.t.ppf(0.975, len(xs) - 2))
        ci: Tuple[Optional[float], Optional[float]] = (
            slope - tcrit * stderr,
            slope + tcrit * stderr,
        )
    else:
        ci = (None, None)
    return FitResult(
        slope=slope,
        intercept=float(res.intercept),
        stderr=stderr,
        ci_low=ci[0],
        ci_high=ci[1],
        points=len(xs),
    )
