"""Exact moments of the occurrence statistic.

Everything here is exact rational arithmetic.  The mean is immediate
(each admissible indicator has mean 1/k! by exchangeability of the host
values).  The variance is a sum of indicator covariances over
intersecting pairs of position sets; a pair's covariance depends only on
how the two sets interleave inside their union — the *overlap class* —
so covariances are memoized per class and each class is evaluated by
exhaustive enumeration of the t! relative orders of the union values.

The variance, as a function of the host size n, agrees with a polynomial
of degree at most 2j-1 for all n >= 2(k-j) (j = number of blocks).  We
recover that polynomial by exact Lagrange interpolation through 2j
consecutive integer nodes and then re-verify it at one extra node, which
certifies that the degree bound (and hence the node count) was enough.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations as _all_perms
from math import comb, factorial
from typing import Sequence

import numpy as np

from . import config
from .errors import (
    BadWindow,
    DegreeCertificateFailed,
    PatternTooSmall,
    SizeLimitExceeded,
)
from .patterns import Permutation, VincularPattern, reduce_sequence
from .positions import enumerate_position_sets, position_count

__all__ = [
    "OverlapClass",
    "VariancePolynomial",
    "expectation",
    "joint_probability",
    "covariance",
    "exact_variance_at",
    "variance_polynomial",
    "leading_coefficient",
    "conditional_block_expectation",
]


def expectation(pattern: VincularPattern, n: int) -> Fraction:
    """Exact mean of the occurrence count: position_count / k!."""
    return Fraction(position_count(n, pattern), factorial(pattern.size))


@dataclass(frozen=True)
class OverlapClass:
    """How two intersecting position sets sit inside their union.

    t is the union size; i_mask and j_mask are the ranks (1-based, within
    the sorted union) occupied by the first and second set.  Two concrete
    pairs with the same class have identical indicator covariance,
    because a uniform host induces a uniform relative order on the union
    values.
    """

    t: int
    i_mask: tuple[int, ...]
    j_mask: tuple[int, ...]

    def __post_init__(self) -> None:
        union = set(self.i_mask) | set(self.j_mask)
        if union != set(range(1, self.t + 1)):
            raise ValueError(f"masks {self.i_mask}/{self.j_mask} do not cover 1..{self.t}")
        if not set(self.i_mask) & set(self.j_mask):
            raise ValueError("overlap class requires intersecting sets")

    @staticmethod
    def from_pair(I: Sequence[int], J: Sequence[int]) -> "OverlapClass":
        union = sorted(set(I) | set(J))
        rank = {pos: r for r, pos in enumerate(union, start=1)}
        return OverlapClass(
            len(union),
            tuple(rank[p] for p in sorted(I)),
            tuple(rank[p] for p in sorted(J)),
        )

    def canonical(self) -> "OverlapClass":
        """Swap-symmetric representative (covariance is symmetric in the
        two sets)."""
        a, b = sorted((self.i_mask, self.j_mask))
        return OverlapClass(self.t, a, b)

    def swapped(self) -> "OverlapClass":
        return OverlapClass(self.t, self.j_mask, self.i_mask)


_PERM_TABLE_CACHE: dict[int, np.ndarray] = {}
_TABLE_LIMIT = 9  # largest t! table held in memory at once


def _perm_table(t: int) -> np.ndarray:
    """All t! permutations of {1..t} as a (t!, t) int8 array."""
    table = _PERM_TABLE_CACHE.get(t)
    if table is None:
        table = np.array(list(_all_perms(range(1, t + 1))), dtype=np.int8)
        table = table.reshape(factorial(t), max(t, 1) if t else 0)
        _PERM_TABLE_CACHE[t] = table
    return table


def _iter_union_orders(t: int):
    """Yield chunks of the (t!, t) table of relative orders; chunked by a
    fixed prefix when t is too large for one table."""
    if t <= _TABLE_LIMIT:
        yield _perm_table(t)
        return
    fixed = t - _TABLE_LIMIT
    tail_table = _perm_table(_TABLE_LIMIT)
    for prefix in _all_perms(range(1, t + 1), fixed):
        remaining = np.array(
            sorted(set(range(1, t + 1)) - set(prefix)), dtype=np.int8
        )
        chunk = np.empty((tail_table.shape[0], t), dtype=np.int8)
        chunk[:, :fixed] = prefix
        chunk[:, fixed:] = remaining[tail_table - 1]
        yield chunk


def _mask_matches(table: np.ndarray, mask: Sequence[int], pi: tuple[int, ...]) -> np.ndarray:
    """Boolean vector: rows whose values at the mask ranks realize pi."""
    cols = np.array([p - 1 for p in mask])
    sub = table[:, cols]
    ok = np.ones(table.shape[0], dtype=bool)
    k = len(pi)
    for a in range(k):
        for b in range(a + 1, k):
            if pi[a] < pi[b]:
                ok &= sub[:, a] < sub[:, b]
            else:
                ok &= sub[:, a] > sub[:, b]
    return ok


_JOINT_CACHE: dict[tuple, Fraction] = {}


def joint_probability(cls: OverlapClass, pi: Permutation, unsafe: bool = False) -> Fraction:
    """P(both indicators are 1) for a pair in this overlap class, by
    counting the relative orders of the union values that realize the
    pattern on both masks."""
    k = pi.size
    if len(cls.i_mask) != k or len(cls.j_mask) != k:
        raise ValueError(f"class masks have size {len(cls.i_mask)}, pattern has size {k}")
    limit = config.max_joint_t(unsafe)
    if cls.t > limit:
        raise SizeLimitExceeded(
            f"union size {cls.t} exceeds the joint-enumeration limit {limit}"
        )
    canon = cls.canonical()
    key = (pi.values, canon.t, canon.i_mask, canon.j_mask)
    hit = _JOINT_CACHE.get(key)
    if hit is not None:
        return hit
    matches = 0
    for table in _iter_union_orders(cls.t):
        both = _mask_matches(table, canon.i_mask, pi.values)
        both &= _mask_matches(table, canon.j_mask, pi.values)
        matches += int(np.count_nonzero(both))
    result = Fraction(matches, factorial(cls.t))
    _JOINT_CACHE[key] = result
    return result


def covariance(cls: OverlapClass, pi: Permutation, unsafe: bool = False) -> Fraction:
    """Cov of the two indicators: joint probability minus (1/k!)^2."""
    return joint_probability(cls, pi, unsafe) - Fraction(1, factorial(pi.size) ** 2)


def exact_variance_at(pattern: VincularPattern, n: int, unsafe: bool = False) -> Fraction:
    """Exact variance of the occurrence count at host size n, summing
    covariances over all intersecting pairs of admissible sets."""
    k = pattern.size
    limit = config.max_exact_k(unsafe)
    if k > limit:
        raise SizeLimitExceeded(f"pattern size {k} exceeds the exact-moment limit {limit}")
    sets = [I.positions for I in enumerate_position_sets(n, pattern)]
    num = len(sets)
    if num == 0:
        return Fraction(0)
    kfact = factorial(k)
    total = num * (Fraction(1, kfact) - Fraction(1, kfact * kfact))

    by_element: dict[int, list[int]] = {}
    for idx, positions in enumerate(sets):
        for p in positions:
            by_element.setdefault(p, []).append(idx)

    pi = pattern.order
    for idx, positions in enumerate(sets):
        partners = set()
        for p in positions:
            partners.update(by_element[p])
        for other in partners:
            if other <= idx:
                continue
            cls = OverlapClass.from_pair(positions, sets[other])
            total += 2 * covariance(cls, pi, unsafe)
    return total


@dataclass(frozen=True)
class VariancePolynomial:
    """Variance of the occurrence count as an exact polynomial in n.

    coefficients are ascending (constant term first); evaluation agrees
    with exact_variance_at for every integer n >= valid_from.
    """

    coefficients: tuple[Fraction, ...]
    valid_from: int

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading_coefficient(self) -> Fraction:
        return self.coefficients[-1]

    def evaluate(self, n: int) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * n + c
        return acc


def _interpolate(xs: Sequence[int], ys: Sequence[Fraction]) -> list[Fraction]:
    """Exact Lagrange interpolation; ascending coefficients."""
    degree = len(xs) - 1
    coeffs = [Fraction(0)] * (degree + 1)
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for m, xm in enumerate(xs):
            if m == i:
                continue
            # multiply basis by (x - xm)
            shifted = [Fraction(0)] + basis
            basis = [s - xm * b for s, b in zip(shifted, basis + [Fraction(0)])]
            denom *= xi - xm
        scale = yi / denom
        for p, c in enumerate(basis):
            coeffs[p] += c * scale
    return coeffs


def variance_polynomial(pattern: VincularPattern, unsafe: bool = False) -> VariancePolynomial:
    """Interpolate the exact variance polynomial and certify it.

    Nodes are the 2j consecutive integers starting at
    n0 = max(2(k-j), k); one extra node checks that 2j points sufficed.
    The result must have degree exactly 2j-1 with a positive leading
    coefficient — a violation means a bug, not a property of the pattern.
    """
    k = pattern.size
    if k < 2:
        raise PatternTooSmall("variance polynomial requires pattern size k >= 2")
    j = pattern.block_count
    n0 = max(2 * (k - j), k)
    nodes = list(range(n0, n0 + 2 * j))
    values = [exact_variance_at(pattern, n, unsafe) for n in nodes]
    coeffs = _interpolate(nodes, values)
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    certificate_n = n0 + 2 * j
    expected = exact_variance_at(pattern, certificate_n, unsafe)
    poly = VariancePolynomial(tuple(coeffs), valid_from=2 * (k - j))
    if poly.evaluate(certificate_n) != expected:
        raise DegreeCertificateFailed(
            f"interpolant for {pattern} misses the certificate node n={certificate_n}"
        )
    if poly.degree != 2 * j - 1 or poly.leading_coefficient <= 0:
        raise DegreeCertificateFailed(
            f"interpolant for {pattern} has degree {poly.degree} and leading "
            f"coefficient {poly.leading_coefficient}; expected degree {2 * j - 1} "
            "with a positive lead"
        )
    return poly


def leading_coefficient(poly: VariancePolynomial) -> Fraction:
    """Coefficient of n^(2j-1)."""
    return poly.leading_coefficient


def conditional_block_expectation(
    pattern: VincularPattern, n: int, m: int, i: int, u: Sequence[float]
) -> float:
    """Expected number of occurrences ending at position n-m, given the
    uniform values at positions n-i..n-m.

    The pinned vector u lists the values in decreasing position order:
    u = (value at n-m, ..., value at n-i).  The answer factors into a
    placement count for the earlier blocks, binom(n-m-k+j-1, j-1), times
    the probability that the free values complete the pattern: the pinned
    values must already realize the tail of the pattern, and each
    remaining pattern entry must land in the right gap between pinned
    values, in the right relative order — gap width^c / c! per gap.
    """
    k = pattern.size
    j = pattern.block_count
    b_last = pattern.last_block_size
    if not 0 <= m <= i <= b_last - 1:
        raise BadWindow(f"need 0 <= m <= i <= {b_last - 1}, got m={m}, i={i}")
    u = tuple(float(x) for x in u)
    if len(u) != i - m + 1:
        raise BadWindow(f"pinned vector has length {len(u)}, expected {i - m + 1}")
    if any(not 0.0 <= x <= 1.0 for x in u):
        raise BadWindow("pinned values must lie in [0, 1]")
    if len(set(u)) != len(u):
        raise BadWindow("pinned values must be distinct")

    tail = pattern.order.values[k - len(u) :]
    in_position_order = tuple(reversed(u))
    if reduce_sequence(in_position_order).values != reduce_sequence(tail).values:
        return 0.0

    top = n - m - k + j - 1
    placements = comb(top, j - 1) if top >= 0 else 0

    anchors = sorted(tail)
    pinned_sorted = sorted(u)
    free = [v for v in pattern.order.values if v not in set(tail)]
    prob = 1.0
    for g in range(len(anchors) + 1):
        lo_anchor = anchors[g - 1] if g > 0 else 0
        hi_anchor = anchors[g] if g < len(anchors) else k + 1
        c = sum(1 for v in free if lo_anchor < v < hi_anchor)
        lo = pinned_sorted[g - 1] if g > 0 else 0.0
        hi = pinned_sorted[g] if g < len(pinned_sorted) else 1.0
        prob *= (hi - lo) ** c / factorial(c)
    return placements * prob
