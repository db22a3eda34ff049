"""Admissible position sets and occurrence counting.

An admissible position set for a pattern of size k with adjacency set A
is a strictly increasing k-tuple of host positions in which the a-th and
(a+1)-th entries are consecutive whenever a is in A.  Equivalently, each
of the j blocks occupies a contiguous run of positions, so a position set
is determined by its j block starts.  Sliding every block flush against
its predecessor turns the starts into a j-subset of {1..n-k+j}; that
shift is a bijection, which gives the count binom(n-k+j, j) and a handy
odometer for enumeration (choose the subset, shift back).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Iterator

import numpy as np

from . import config
from .errors import NotAdmissible, SizeLimitExceeded, SizeMismatch
from .patterns import Permutation, VincularPattern, reduce_sequence

__all__ = [
    "PositionSet",
    "enumerate_position_sets",
    "position_count",
    "shift_bijection",
    "shift_bijection_inverse",
    "occurs_at",
    "count_occurrences",
    "position_matrix",
    "count_occurrences_batch",
]


@dataclass(frozen=True)
class PositionSet:
    """A sorted k-tuple of host positions (1-based), with its host size."""

    positions: tuple[int, ...]
    host_size: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", tuple(self.positions))

    def __iter__(self):
        return iter(self.positions)

    def __len__(self) -> int:
        return len(self.positions)


def _block_start_offsets(blocks: tuple[int, ...]) -> list[int]:
    # Offset between the t-th block start and the t-th element of the
    # shifted j-subset: the total slack (b_1-1) + ... + (b_{t-1}-1)
    # consumed by the earlier blocks.
    offsets = []
    acc = 0
    for b in blocks:
        offsets.append(acc)
        acc += b - 1
    return offsets


def _positions_from_subset(subset, blocks, offsets) -> tuple[int, ...]:
    out = []
    for m, b, off in zip(subset, blocks, offsets):
        start = m + off
        out.extend(range(start, start + b))
    return tuple(out)


def position_count(n: int, pattern: VincularPattern) -> int:
    """Number of admissible position sets: binom(n-k+j, j), and 0 when the
    pattern does not fit (n < k)."""
    j = pattern.block_count
    m = n - pattern.size + j
    return comb(m, j) if m >= 0 else 0


def enumerate_position_sets(n: int, pattern: VincularPattern) -> Iterator[PositionSet]:
    """Yield every admissible position set once, lexicographically by block
    starts.  Lazy: memory stays O(k) however large the count is."""
    blocks = pattern.blocks
    offsets = _block_start_offsets(blocks)
    j = pattern.block_count
    for subset in combinations(range(1, n - pattern.size + j + 1), j):
        yield PositionSet(_positions_from_subset(subset, blocks, offsets), n)


def _check_admissible(I: PositionSet, pattern: VincularPattern) -> None:
    pos = I.positions
    if len(pos) != pattern.size:
        raise NotAdmissible(
            f"position set has {len(pos)} entries, pattern has size {pattern.size}"
        )
    if pos and (pos[0] < 1 or pos[-1] > I.host_size):
        raise NotAdmissible(f"positions {pos} outside 1..{I.host_size}")
    for a, b in zip(pos, pos[1:]):
        if b <= a:
            raise NotAdmissible(f"positions {pos} not strictly increasing")
    for a in pattern.adjacencies:
        if pos[a] != pos[a - 1] + 1:
            raise NotAdmissible(
                f"positions {pos} break the adjacency at pattern index {a}"
            )


def shift_bijection(I: PositionSet, pattern: VincularPattern) -> frozenset[int]:
    """Map an admissible position set to a j-subset of {1..n-k+j} by
    closing the slack inside each block: the t-th block start, minus the
    slack consumed by earlier blocks, is the t-th subset element."""
    _check_admissible(I, pattern)
    offsets = _block_start_offsets(pattern.blocks)
    starts = []
    pos_index = 0
    for b in pattern.blocks:
        starts.append(I.positions[pos_index])
        pos_index += b
    return frozenset(s - off for s, off in zip(starts, offsets))


def shift_bijection_inverse(
    subset: frozenset[int] | set[int], n: int, pattern: VincularPattern
) -> PositionSet:
    """Inverse of :func:`shift_bijection`."""
    j = pattern.block_count
    elems = sorted(subset)
    if len(elems) != j or elems and (elems[0] < 1 or elems[-1] > n - pattern.size + j):
        raise NotAdmissible(
            f"{sorted(subset)} is not a {j}-subset of {{1..{n - pattern.size + j}}}"
        )
    offsets = _block_start_offsets(pattern.blocks)
    return PositionSet(_positions_from_subset(elems, pattern.blocks, offsets), n)


def occurs_at(sigma: Permutation, pi: Permutation, I: PositionSet) -> bool:
    """Whether sigma restricted to the positions of I reduces to pi."""
    if len(I) != pi.size:
        raise SizeMismatch(f"|I| = {len(I)} but pattern size is {pi.size}")
    if I.positions and (I.positions[0] < 1 or I.positions[-1] > sigma.size):
        raise SizeMismatch(f"positions {I.positions} outside 1..{sigma.size}")
    window = [sigma.values[p - 1] for p in I.positions]
    return reduce_sequence(window).values == pi.values


def count_occurrences(sigma: Permutation, pattern: VincularPattern) -> int:
    """Total number of admissible occurrences of the pattern in sigma."""
    values = sigma.values
    pi = pattern.order.values
    k = pattern.size
    # Orientation of each pattern pair; an occurrence must agree on all.
    rising = [(a, b) for a in range(k) for b in range(a + 1, k) if pi[a] < pi[b]]
    falling = [(a, b) for a in range(k) for b in range(a + 1, k) if pi[a] > pi[b]]
    total = 0
    for I in enumerate_position_sets(sigma.size, pattern):
        window = [values[p - 1] for p in I.positions]
        if all(window[a] < window[b] for a, b in rising) and all(
            window[a] > window[b] for a, b in falling
        ):
            total += 1
    return total


def position_matrix(n: int, pattern: VincularPattern) -> np.ndarray:
    """All admissible position sets as a (count, k) array of 0-based
    indices, in enumeration order.  Materialized, so guarded by the
    listing cap."""
    count = position_count(n, pattern)
    cap = config.listing_cap()
    if count > cap:
        raise SizeLimitExceeded(
            f"{count} position sets exceed the listing cap of {cap}"
        )
    k = pattern.size
    mat = np.empty((count, k), dtype=np.int64)
    for row, I in enumerate(enumerate_position_sets(n, pattern)):
        mat[row] = I.positions
    return mat - 1


def count_occurrences_batch(
    perms: np.ndarray, pattern: VincularPattern, posmat: np.ndarray | None = None
) -> np.ndarray:
    """Occurrence counts for many permutations at once.

    perms is an (m, n) integer array, one permutation of {1..n} per row.
    The position matrix is built once (or passed in) and the pattern
    comparisons run vectorized over samples x position sets, chunked to
    bound memory.
    """
    perms = np.asarray(perms)
    m, n = perms.shape
    if posmat is None:
        posmat = position_matrix(n, pattern)
    num_sets, k = posmat.shape
    counts = np.zeros(m, dtype=np.int64)
    if num_sets == 0:
        return counts
    pi = pattern.order.values
    pairs = [(a, b, pi[a] < pi[b]) for a in range(k) for b in range(a + 1, k)]
    # Keep each gathered chunk around 8M cells.
    chunk = max(1, int(8_000_000 // max(1, num_sets * k)))
    for lo in range(0, m, chunk):
        sub = perms[lo : lo + chunk][:, posmat]  # (chunk, num_sets, k)
        ok = np.ones(sub.shape[:2], dtype=bool)
        for a, b, up in pairs:
            if up:
                ok &= sub[:, :, a] < sub[:, :, b]
            else:
                ok &= sub[:, :, a] > sub[:, :, b]
        counts[lo : lo + chunk] = ok.sum(axis=1)
    return counts
