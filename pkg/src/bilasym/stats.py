"""Two-group tests: univariate tests on composite scores and the max-t union-intersection test."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .config import TwoGroupDataset
from .distributions import norm_sf, t_sf
from .scores import ScoreSpec, score_dataset

SIDEDNESS = ("greater", "two-sided")
EXACT_MAX_N = 20
BOOT_BLOCK = 256


class ZeroVariance(ArithmeticError):
    """Both samples are constant, so no t statistic exists."""

    def __init__(self, message, mean_difference=0.0):
        super().__init__(message)
        self.mean_difference = mean_difference


class InsufficientReplicates(ValueError):
    pass


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    sidedness: str
    method: str
    df: float | None = None

    __test__ = False  # not a pytest class


def _check_sided(sidedness):
    if sidedness not in SIDEDNESS:
        raise ValueError(f"sidedness must be one of {SIDEDNESS}, not {sidedness!r}")


def _t_pvalue(t, df, sidedness):
    if sidedness == "greater":
        return t_sf(t, df)
    return min(1.0, 2.0 * t_sf(abs(t), df))


def _negligible(var, *samples):
    scale = max(float(np.max(np.abs(s))) for s in samples)
    return var <= max(1e-300, (1e-13 * scale) ** 2)


def pooled_t_test(u1, u2, sidedness="greater") -> TestResult:
    """Equal-variance two-sample t test of ``mean(u2) - mean(u1)``.

    One-sided p-values are for the alternative that group 2 is larger.
    """
    _check_sided(sidedness)
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    n1, n2 = u1.size, u2.size
    if n1 < 2 or n2 < 2:
        raise ValueError("each group needs at least two observations")
    df = n1 + n2 - 2
    sp2 = ((n1 - 1) * u1.var(ddof=1) + (n2 - 1) * u2.var(ddof=1)) / df
    diff = u2.mean() - u1.mean()
    if _negligible(sp2, u1, u2):
        raise ZeroVariance("pooled variance is zero", diff)
    t = diff / math.sqrt(sp2 * (1.0 / n1 + 1.0 / n2))
    return TestResult(float(t), _t_pvalue(t, df, sidedness), sidedness, "pooled-t", float(df))


def welch_t_test(u1, u2, sidedness="greater") -> TestResult:
    """Unequal-variance t test with Welch-Satterthwaite degrees of freedom."""
    _check_sided(sidedness)
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    n1, n2 = u1.size, u2.size
    if n1 < 2 or n2 < 2:
        raise ValueError("each group needs at least two observations")
    q1 = u1.var(ddof=1) / n1
    q2 = u2.var(ddof=1) / n2
    diff = u2.mean() - u1.mean()
    if _negligible(q1 + q2, u1, u2):
        raise ZeroVariance("both groups have zero variance", diff)
    t = diff / math.sqrt(q1 + q2)
    df = (q1 + q2) ** 2 / (q1**2 / (n1 - 1) + q2**2 / (n2 - 1))
    return TestResult(float(t), _t_pvalue(t, df, sidedness), sidedness, "welch-t", float(df))


def mann_whitney_statistic(u1, u2) -> float:
    """Number of (group 1, group 2) pairs where the group-2 value is larger, ties counting one half."""
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    diff = u2[None, :] - u1[:, None]
    return float(np.sum(diff > 0) + 0.5 * np.sum(diff == 0))


def exact_u_distribution(n1: int, n2: int) -> list[int]:
    """Counts of each U value ``0..n1*n2`` over all ``C(n1+n2, n2)`` tie-free group assignments."""
    N = n1 + n2
    # ways[k][s]: subsets of k ranks among those seen so far with rank sum s
    max_sum = N * (N + 1) // 2
    ways = [[0] * (max_sum + 1) for _ in range(n2 + 1)]
    ways[0][0] = 1
    for r in range(1, N + 1):
        for k in range(min(r, n2), 0, -1):
            row, prev = ways[k], ways[k - 1]
            for s in range(max_sum, r - 1, -1):
                if prev[s - r]:
                    row[s] += prev[s - r]
    base = n2 * (n2 + 1) // 2
    return ways[n2][base : base + n1 * n2 + 1]


def mann_whitney_u(u1, u2, sidedness="greater", exact: bool | None = None) -> TestResult:
    """Mann-Whitney U test; one-sided alternative is that group 2 is stochastically larger.

    The exact null distribution is used when ``N <= 20`` and there are no
    ties (unless ``exact`` forces a choice); otherwise the normal
    approximation with tie-corrected variance and continuity correction.
    """
    _check_sided(sidedness)
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    n1, n2 = u1.size, u2.size
    if n1 < 1 or n2 < 1:
        raise ValueError("each group needs at least one observation")
    N = n1 + n2
    U = mann_whitney_statistic(u1, u2)
    pooled = np.concatenate([u1, u2])
    ties = np.unique(pooled).size < N
    use_exact = (N <= EXACT_MAX_N and not ties) if exact is None else exact
    if use_exact and ties:
        raise ValueError("exact Mann-Whitney distribution is only available without ties")

    if use_exact:
        counts = exact_u_distribution(n1, n2)
        total = comb(N, n1)
        k = int(round(U))
        upper = sum(counts[k:]) / total
        if sidedness == "greater":
            p = upper
        else:
            lower = sum(counts[: k + 1]) / total
            p = min(1.0, 2.0 * min(upper, lower))
        return TestResult(U, p, sidedness, "mann-whitney-exact")

    _, tie_counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(tie_counts**3 - tie_counts))
    mu = n1 * n2 / 2.0
    var = n1 * n2 / 12.0 * ((N + 1) - tie_term / (N * (N - 1))) if N > 1 else 0.0
    if var <= 0:
        return TestResult(U, 1.0 if sidedness == "two-sided" else 0.5, sidedness, "mann-whitney-approx")
    sd = math.sqrt(var)
    if sidedness == "greater":
        p = norm_sf((U - mu - 0.5) / sd)
    else:
        z = (abs(U - mu) - 0.5) / sd
        p = min(1.0, 2.0 * norm_sf(z))
    return TestResult(U, min(1.0, p), sidedness, "mann-whitney-approx")


TESTS = {
    "pooled-t": pooled_t_test,
    "welch-t": welch_t_test,
    "mann-whitney": mann_whitney_u,
}


def _column_t(g1: np.ndarray, g2: np.ndarray):
    """Pooled two-sample t statistics along the last axis; groups on axis -2.

    Returns ``(v, diff, se_unit, degenerate)`` where ``se_unit`` is the
    pooled SD times ``sqrt(1/n1 + 1/n2)``.
    """
    n1, n2 = g1.shape[-2], g2.shape[-2]
    m1 = g1.mean(axis=-2)
    m2 = g2.mean(axis=-2)
    ss = ((g1 - m1[..., None, :]) ** 2).sum(axis=-2) + ((g2 - m2[..., None, :]) ** 2).sum(axis=-2)
    s = np.sqrt(ss / (n1 + n2 - 2))
    scale = np.maximum(np.abs(g1).max(axis=-2), np.abs(g2).max(axis=-2))
    degenerate = s <= np.maximum(1e-300, 1e-13 * scale)
    se = s * math.sqrt(1.0 / n1 + 1.0 / n2)
    diff = m2 - m1
    with np.errstate(divide="ignore", invalid="ignore"):
        v = np.where(degenerate, 0.0, diff / np.where(degenerate, 1.0, se))
    return v, diff, se, degenerate


def feature_t_stats(dataset: TwoGroupDataset) -> np.ndarray:
    """Per-feature pooled t statistics; positive when group 2 has the larger mean.

    Features with zero pooled variance get 0 and trigger a warning.
    """
    dataset.require_testable()
    v, _, _, degenerate = _column_t(dataset.group1, dataset.group2)
    if np.any(degenerate):
        warnings.warn(
            f"{int(degenerate.sum())} feature(s) have zero pooled variance; their statistic is set to 0",
            RuntimeWarning,
            stacklevel=2,
        )
    return v


def uit_max(v) -> float:
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        raise ValueError("empty statistic vector")
    return float(np.max(v))


@dataclass(frozen=True)
class UitResult:
    v: np.ndarray
    V: float
    V_crit: float
    alpha: float
    B: int
    seed: int
    selected: tuple[int, ...]
    lower_bounds: np.ndarray
    p_value: float
    mean_difference: np.ndarray
    degenerate: np.ndarray
    scheme: str = "pooled"
    null_max: np.ndarray = field(default=None, repr=False)


def _block_max(pool: np.ndarray, n1: int, seed: int, block: int, count: int, scheme: str) -> np.ndarray:
    rng = np.random.default_rng([seed, block])
    N = pool.shape[0]
    if scheme == "pooled":
        idx = rng.integers(0, N, size=(count, N))
    else:
        idx = rng.permuted(np.tile(np.arange(N), (count, 1)), axis=1)
    sample = pool[idx]
    v, _, _, _ = _column_t(sample[:, :n1], sample[:, n1:])
    return v.max(axis=1)


def bootstrap_null_max(
    pool: np.ndarray, n1: int, B: int, seed: int, scheme: str = "pooled", workers: int = 1
) -> np.ndarray:
    """Max-t statistics of ``B`` resampled datasets.

    Replicates come in fixed blocks of 256; block ``i`` draws from a
    generator seeded by ``(seed, i)``, so the result does not depend on
    ``workers``.
    """
    if scheme not in ("pooled", "permutation"):
        raise ValueError(f"unknown resampling scheme {scheme!r}")
    blocks = [(i, min(BOOT_BLOCK, B - i * BOOT_BLOCK)) for i in range(-(-B // BOOT_BLOCK))]
    job = lambda ib: _block_max(pool, n1, seed, ib[0], ib[1], scheme)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(job, blocks))
    else:
        parts = [job(b) for b in blocks]
    return np.concatenate(parts)


def bootstrap_critical(
    dataset: TwoGroupDataset,
    B: int = 10000,
    alpha: float = 0.05,
    seed: int = 0,
    scheme: str = "pooled",
    workers: int = 1,
    min_replicates: int = 1000,
) -> UitResult:
    """Bootstrap critical value of the max-t statistic and simultaneous feature selection.

    ``scheme="pooled"`` draws all ``N`` subjects with replacement from the
    pooled sample and labels the first ``N1`` as group 1;
    ``scheme="permutation"`` reshuffles the group labels instead.
    Features with ``v_j > V_crit`` are selected and their one-sided lower
    confidence bounds for ``mean2 - mean1`` are positive.
    """
    if B < min_replicates:
        raise InsufficientReplicates(f"B={B} is below the minimum of {min_replicates} replicates")
    if not 0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    dataset.require_testable()
    v, diff, se, degenerate = _column_t(dataset.group1, dataset.group2)
    V = uit_max(v)
    null = bootstrap_null_max(dataset.pooled(), dataset.n1, B, seed, scheme, workers)
    V_crit = float(np.quantile(null, 1.0 - alpha, method="inverted_cdf"))
    lower = np.where(degenerate, np.nan, diff - V_crit * se)
    selected = tuple(int(j) for j in np.flatnonzero(v > V_crit))
    p = float((1 + np.sum(null >= V)) / (B + 1))
    return UitResult(v, V, V_crit, alpha, B, seed, selected, lower, p, diff, degenerate, scheme, null)


def stars(p: float) -> str:
    """Significance marks at the 5%, 1% and 0.1% levels."""
    if p is None or not p == p:
        return ""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def _degenerate_result(err: ZeroVariance, method: str, sidedness: str) -> TestResult:
    d = err.mean_difference
    if d == 0:
        return TestResult(math.nan, math.nan, sidedness, method)
    t = math.copysign(math.inf, d)
    p = 0.0 if (d > 0 or sidedness == "two-sided") else 1.0
    return TestResult(t, p, sidedness, method)


def run_comparison(
    dataset: TwoGroupDataset,
    specs: Sequence[ScoreSpec],
    tests: Sequence[str] = ("pooled-t",),
    sidedness: str = "greater",
    frame: str | None = None,
) -> list[dict]:
    """One report row per (score, test) pair: group summaries, statistic, p-value and stars.

    A zero-variance t test is reported as a degenerate separation with an
    infinite statistic.
    """
    dataset.require_testable()
    rows = []
    for spec in specs:
        u1, u2 = score_dataset(dataset, spec)
        for name in tests:
            if name not in TESTS:
                raise ValueError(f"unknown test {name!r}; choose from {sorted(TESTS)}")
            try:
                res = TESTS[name](u1, u2, sidedness)
            except ZeroVariance as err:
                res = _degenerate_result(err, name, sidedness)
            rows.append(
                {
                    "frame": frame or "",
                    "score": spec.name,
                    "method": res.method,
                    "sided": sidedness,
                    "n1": int(u1.size),
                    "mean1": float(u1.mean()),
                    "sd1": float(u1.std(ddof=1)),
                    "n2": int(u2.size),
                    "mean2": float(u2.mean()),
                    "sd2": float(u2.std(ddof=1)),
                    "statistic": res.statistic,
                    "df": res.df,
                    "p_value": res.p_value,
                    "stars": stars(res.p_value),
                }
            )
    return rows
