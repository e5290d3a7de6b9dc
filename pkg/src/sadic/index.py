"""Distinct-factor index over one finite word.

Prefix doubling assigns every position a dense rank per level ``k`` that
identifies the block of length ``2**k`` starting there (blocks running past
the end rank by their truncated content).  From the top level we get the
suffix array and the LCP array, hence ``p(n)`` for every ``n`` at once, and
two overlapping level-``k`` ranks identify any block of length ``g`` with
``2**k <= g < 2**(k+1)`` in constant time.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .words import Word


def _dense_rank(keys: np.ndarray) -> tuple[np.ndarray, int]:
    uniq, inverse = np.unique(keys, return_inverse=True)
    return inverse.astype(np.int64), len(uniq)


class FactorIndex:
    """Read-only index answering factor counts and block-identity queries."""

    def __init__(self, w: Word):
        self.word = w
        self.size = len(w)
        self.alphabet_size = w.alphabet_size
        self.array = np.frombuffer(w.letters, dtype=np.uint8).astype(np.int64)
        self.levels: list[np.ndarray] = []
        if self.size:
            self._build()

    def _build(self):
        n = self.size
        rank, distinct = _dense_rank(self.array)
        self.levels.append(rank)
        step = 1
        while distinct < n and step < n:
            shifted = np.full(n, 0, dtype=np.int64)
            shifted[: n - step] = rank[step:] + 1
            rank, distinct = _dense_rank(rank * (distinct + 1) + shifted)
            self.levels.append(rank)
            step *= 2

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    @cached_property
    def suffix_array(self) -> np.ndarray:
        return np.argsort(self.levels[-1], kind="stable")

    @cached_property
    def lcp(self) -> np.ndarray:
        """``lcp[j]`` = common prefix of suffixes ``sa[j-1]`` and ``sa[j]`` (``lcp[0] = 0``)."""
        sa = self.suffix_array
        n = self.size
        lcp = np.zeros(n, dtype=np.int64)
        if n < 2:
            return lcp
        a, b = sa[:-1].copy(), sa[1:].copy()
        common = np.zeros(n - 1, dtype=np.int64)
        for k in range(self.top, -1, -1):
            width = 1 << k
            pa, pb = a + common, b + common
            ok = (pa + width <= n) & (pb + width <= n)
            idx = np.flatnonzero(ok)
            rank = self.levels[k]
            same = rank[pa[idx]] == rank[pb[idx]]
            common[idx[same]] += width
        lcp[1:] = common
        return lcp

    @cached_property
    def counts(self) -> np.ndarray:
        """``counts[n]`` = number of distinct factors of length ``n``, for ``n = 0..size``."""
        n = self.size
        hist = np.bincount(self.lcp[1:], minlength=n + 2) if n > 1 else np.zeros(n + 2, dtype=np.int64)
        at_least = np.cumsum(hist[::-1])[::-1]  # at_least[m] = #{j : lcp[j] >= m}
        lengths = np.arange(n + 1)
        out = (n - lengths + 1) - at_least[: n + 1]
        out[0] = 1
        return out

    def count(self, n: int) -> int:
        return int(self.counts[n])

    def factor_ids(self, n: int) -> tuple[np.ndarray, int]:
        """Per-position id of the length-``n`` factor starting there (``-1`` if too short).

        For ``n = 0`` there are ``size + 1`` positions, all holding the empty word.

        Ids are dense, numbered in lexicographic order of the factors.
        """
        size = self.size
        if n == 0:
            return np.zeros(size + 1, dtype=np.int64), 1
        sa = self.suffix_array
        valid = sa <= size - n
        sa_valid = sa[valid]
        lcp_valid = self.lcp[valid]
        new = lcp_valid < n
        new[:1] = True
        ids_sorted = np.cumsum(new) - 1
        ids = np.full(size, -1, dtype=np.int64)
        ids[sa_valid] = ids_sorted
        return ids, int(ids_sorted[-1]) + 1 if len(ids_sorted) else 0

    def representatives(self, n: int) -> np.ndarray:
        """One starting position for each length-``n`` factor id."""
        if n == 0:
            return np.zeros(1, dtype=np.int64)
        sa = self.suffix_array
        valid = sa <= self.size - n
        sa_valid = sa[valid]
        new = self.lcp[valid] < n
        new[:1] = True
        return sa_valid[new]

    def block_keys(self, starts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
        """Canonical ``(length, rank, rank)`` rows identifying ``w[s : s + g]``.

        Equal rows mean equal blocks; lengths must be at least 1.
        """
        starts = np.asarray(starts, dtype=np.int64)
        lengths = np.asarray(lengths, dtype=np.int64)
        out = np.empty((len(starts), 3), dtype=np.int64)
        out[:, 0] = lengths
        if not len(starts):
            return out
        # log2 is exact at powers of two, and safely below k elsewhere
        level = np.minimum(np.floor(np.log2(lengths)).astype(np.int64), self.top)
        for k in np.unique(level):
            sel = np.flatnonzero(level == k)
            width = 1 << int(k)
            rank = self.levels[int(k)]
            s, g = starts[sel], lengths[sel]
            out[sel, 1] = rank[s]
            # past twice the top width every top-level block is unique
            out[sel, 2] = np.where(g <= 2 * width, rank[s + g - width], -1)
        return out

    def factor_word(self, start: int, n: int) -> Word:
        return self.word[start : start + n]
