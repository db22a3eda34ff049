"""Runtime limits, overridable through environment variables.

The limits are read at call time so test harnesses can adjust them with
plain environment manipulation; nothing is cached at import.
"""

from __future__ import annotations

import os

# Exact-moment machinery enumerates S_t for overlap classes with
# t <= 2k - 1, so the k limit also caps the joint-probability table size.
DEFAULT_MAX_EXACT_K = 5
UNSAFE_MAX_EXACT_K = 6

# Brute-force oracles enumerate all n! permutations.
DEFAULT_ORACLE_MAX_N = 9

# Cap on materialized position listings / position matrices.
DEFAULT_LISTING_CAP = 10**6

# Cap on dependency-graph vertex counts for exact edge counting (and for
# the per-vertex degree scan in the general case).
DEFAULT_VERTEX_CAP = 10**7


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        return default


def max_exact_k(unsafe: bool = False) -> int:
    """Largest pattern size accepted by the exact-moment routines."""
    if unsafe:
        return UNSAFE_MAX_EXACT_K
    return _env_int("VINCSTAT_MAX_K", DEFAULT_MAX_EXACT_K)


def max_joint_t(unsafe: bool = False) -> int:
    """Largest union size for exhaustive joint-probability enumeration."""
    return 2 * max_exact_k(unsafe) - 1


def oracle_max_n() -> int:
    """Largest host size n for full-S_n brute-force enumeration."""
    return _env_int("VINCSTAT_ORACLE_MAX_N", DEFAULT_ORACLE_MAX_N)


def listing_cap() -> int:
    """Largest position listing / position matrix that may be materialized."""
    return _env_int("VINCSTAT_LISTING_CAP", DEFAULT_LISTING_CAP)


def vertex_cap() -> int:
    """Largest dependency-graph vertex count for exact edge counting."""
    return _env_int("VINCSTAT_VERTEX_CAP", DEFAULT_VERTEX_CAP)
