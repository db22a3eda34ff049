"""Monte Carlo verification of the normal limit.

Draws seeded permutations, standardizes the occurrence count with the
exact mean and variance whenever the exact machinery covers the pattern,
and summarizes the sample by its Kolmogorov distance to the standard
normal and its first four sample cumulants.  A least-squares fit of
log d_K against log n estimates the convergence-rate exponent.

The empirical d_K of m samples cannot drop below ~0.43/sqrt(m) (the
noise floor of the empirical distribution function itself), so rate fits
should stop increasing n once d_K approaches that floor.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import ndtr

from . import config
from .errors import DegenerateInput, EmptySample, PatternTooSmall, TooFewSamples
from .moments import exact_variance_at, expectation, variance_polynomial
from .patterns import VincularPattern, format_pattern
from .positions import count_occurrences_batch, position_matrix
from .sampling import BOOTSTRAP_STREAM, sample_uniform_batch, substream

__all__ = [
    "CumulantEstimates",
    "MonteCarloReport",
    "RateFit",
    "empirical_kolmogorov",
    "sample_cumulants",
    "run_experiment",
    "fit_rate",
]

_CHUNK = 4096  # samples per generation/counting chunk; fixed so results
               # never depend on worker count


def empirical_kolmogorov(xs: np.ndarray) -> float:
    """Kolmogorov distance between the empirical distribution of xs and
    the standard normal."""
    xs = np.asarray(xs, dtype=np.float64).ravel()
    m = xs.size
    if m == 0:
        raise EmptySample("empirical distance of an empty sample")
    sorted_xs = np.sort(xs)
    cdf = ndtr(sorted_xs)
    upper = np.arange(1, m + 1) / m - cdf
    lower = cdf - np.arange(0, m) / m
    return float(max(upper.max(), lower.max()))


@dataclass(frozen=True)
class CumulantEstimates:
    k1: float
    k2: float
    k3: float
    k4: float
    se1: float
    se2: float
    se3: float
    se4: float


def _cumulants_of(xs: np.ndarray) -> tuple[float, float, float, float]:
    mean = xs.mean()
    xc = xs - mean
    m2 = float(np.mean(xc * xc))
    m3 = float(np.mean(xc**3))
    m4 = float(np.mean(xc**4))
    return float(mean), m2, m3, m4 - 3 * m2 * m2


def sample_cumulants(xs: np.ndarray, resamples: int = 200, seed: int = 0) -> CumulantEstimates:
    """Plug-in estimates of the first four cumulants, with bootstrap
    standard errors.

    The estimators are the central-moment plug-ins (k4 = m4 - 3 m2^2);
    their O(1/m) bias is far below the Monte Carlo tolerances used here.
    Standard errors come from `resamples` bootstrap resamples drawn from
    a dedicated substream of `seed`, so repeated calls agree exactly.
    """
    xs = np.asarray(xs, dtype=np.float64).ravel()
    m = xs.size
    if m < 5:
        raise TooFewSamples(f"need at least 5 observations, got {m}")
    k1, k2, k3, k4 = _cumulants_of(xs)
    gen = substream(seed, 0, BOOTSTRAP_STREAM)
    boot = np.empty((resamples, 4))
    for r in range(resamples):
        idx = gen.integers(0, m, m)
        boot[r] = _cumulants_of(xs[idx])
    ses = boot.std(axis=0, ddof=1)
    return CumulantEstimates(k1, k2, k3, k4, *(float(s) for s in ses))


@dataclass(frozen=True)
class MonteCarloReport:
    pattern: str
    n: int
    samples: int
    seed: int
    d_K: float
    cumulants: CumulantEstimates
    used_exact_moments: bool


def _exact_moments(pattern: VincularPattern, n: int) -> tuple[Fraction, Fraction]:
    mean = expectation(pattern, n)
    # The interpolated polynomial is exact for n >= valid_from and cheap
    # at any size; below its validity threshold fall back to the direct
    # pair sum (only possible for small n anyway).
    poly = variance_polynomial(pattern)
    if n >= poly.valid_from:
        var = poly.evaluate(n)
    else:
        var = exact_variance_at(pattern, n)
    return mean, var


def _count_chunk(args) -> np.ndarray:
    pattern, n, seed, start, count, posmat = args
    perms = sample_uniform_batch(n, seed, count, start)
    return count_occurrences_batch(perms, pattern, posmat)


def run_experiment(
    pattern: VincularPattern,
    n: int,
    m: int,
    seed: int,
    threads: int | None = None,
) -> MonteCarloReport:
    """Draw m permutations of size n, count pattern occurrences,
    standardize, and summarize.

    Standardization uses the exact mean and variance when the pattern is
    within the exact-moment limit, otherwise sample moments (recorded in
    the report).  Output is identical for every thread count.
    """
    if pattern.size < 2:
        raise PatternTooSmall("the normal limit concerns patterns of size k >= 2")
    if n < pattern.size:
        raise DegenerateInput(f"n={n} is below the pattern size {pattern.size}")
    if m < 100:
        raise DegenerateInput(f"need at least 100 samples, got {m}")

    posmat = position_matrix(n, pattern)
    tasks = [
        (pattern, n, seed, start, min(_CHUNK, m - start), posmat)
        for start in range(0, m, _CHUNK)
    ]
    if threads and threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            pieces = list(pool.map(_count_chunk, tasks, chunksize=4))
    else:
        pieces = [_count_chunk(t) for t in tasks]
    counts = np.concatenate(pieces).astype(np.float64)

    use_exact = pattern.size <= config.max_exact_k()
    if use_exact:
        mean_q, var_q = _exact_moments(pattern, n)
        mean, var = float(mean_q), float(var_q)
        if var <= 0:
            raise DegenerateInput(f"exact variance is {var_q} at n={n}; nothing to standardize")
    else:
        mean = float(counts.mean())
        var = float(counts.var())
        if var <= 0:
            raise DegenerateInput("sample variance is zero; nothing to standardize")
    xs = (counts - mean) / np.sqrt(var)

    return MonteCarloReport(
        pattern=format_pattern(pattern),
        n=n,
        samples=m,
        seed=seed,
        d_K=empirical_kolmogorov(xs),
        cumulants=sample_cumulants(xs, seed=seed),
        used_exact_moments=use_exact,
    )


@dataclass(frozen=True)
class RateFit:
    points: tuple[tuple[float, float], ...]
    slope: float
    intercept: float
    residual: float


def fit_rate(points) -> RateFit:
    """Least-squares slope of log d_K against log n.

    residual is the root-mean-square residual of the fit in log space.
    """
    pts = tuple((float(n), float(d)) for n, d in points)
    if len(pts) < 3:
        raise DegenerateInput(f"need at least 3 points, got {len(pts)}")
    if any(n <= 0 or d <= 0 for n, d in pts):
        raise DegenerateInput("all n and d_K must be positive")
    log_n = np.log([n for n, _ in pts])
    log_d = np.log([d for _, d in pts])
    slope, intercept = np.polyfit(log_n, log_d, 1)
    fitted = slope * log_n + intercept
    residual = float(np.sqrt(np.mean((log_d - fitted) ** 2)))
    return RateFit(pts, float(slope), float(intercept), residual)
