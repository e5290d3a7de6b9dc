"""Return words, recurrence gaps, exponent sets and the power-richness test."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .complexity import complexity_profile
from .errors import (
    EmptyWindowError,
    HorizonError,
    InsufficientOccurrencesError,
    PreconditionError,
    UndefinedInputError,
)
from .index import FactorIndex
from .words import Word, as_word, is_primitive_word, occurrences


@dataclass(frozen=True)
class ReturnWordReport:
    factor: Word
    returns: tuple[Word, ...]
    occurrences: int
    stable: bool

    @property
    def count(self) -> int:
        return len(self.returns)

    def row(self) -> dict:
        return {
            "factor": self.factor.to_text(),
            "count": self.count,
            "returns": ";".join(r.to_text() for r in self.returns),
            "stable": int(self.stable),
        }


def _gap_words(w: Word, positions: Sequence[int]) -> set[bytes]:
    data = w.letters
    return {data[i:j] for i, j in zip(positions, positions[1:])}


def return_words(w: Word, u) -> ReturnWordReport:
    """Words between consecutive occurrences of ``u``.

    ``stable`` records whether the first half of ``w`` already shows the
    same set.
    """
    u = as_word(u, w.alphabet_size) if not isinstance(u, Word) else u
    if len(u) == 0:
        raise UndefinedInputError("return words to the empty word are not defined")
    pos = occurrences(w, u)
    if len(pos) < 2:
        raise InsufficientOccurrencesError(f"{u} occurs {len(pos)} time(s); two are needed")
    full = _gap_words(w, pos)
    half_end = len(w) // 2
    half_pos = [i for i in pos if i + len(u) <= half_end]
    stable = _gap_words(w, half_pos) == full
    returns = tuple(Word(r, w.alphabet_size) for r in sorted(full, key=lambda r: (len(r), r)))
    return ReturnWordReport(u, returns, len(pos), stable)


@dataclass(frozen=True)
class ReturnProfile:
    """Per-factor return data for all factors of one length."""

    length: int
    positions: np.ndarray
    occurrences: np.ndarray
    counts: np.ndarray  # distinct return words; 0 below two occurrences
    max_gaps: np.ndarray  # 0 below two occurrences

    def factor(self, w: Word, fid: int) -> Word:
        start = int(self.positions[fid])
        return w[start : start + self.length]


def return_profile(w: Word, n: int, index: FactorIndex | None = None) -> ReturnProfile:
    """Return-word counts and largest gaps of every length-``n`` factor at once."""
    if n < 1:
        raise UndefinedInputError("return words need a nonempty factor")
    if n > len(w):
        raise EmptyWindowError(f"no factor of length {n} in a word of length {len(w)}")
    index = index or FactorIndex(w)
    ids_all, count = index.factor_ids(n)
    ids = ids_all[: len(w) - n + 1]
    order = np.argsort(ids, kind="stable")  # positions grouped by factor, increasing
    grouped = ids[order]
    occ = np.bincount(grouped, minlength=count)
    same = grouped[1:] == grouped[:-1]
    starts = order[:-1][same]
    gaps = (order[1:] - order[:-1])[same]
    owners = grouped[1:][same]
    max_gaps = np.zeros(count, dtype=np.int64)
    np.maximum.at(max_gaps, owners, gaps)
    if len(starts):
        keys = index.block_keys(starts, gaps)
        radix = index.size + 2
        # fold (rank, rank, length, owner) into one int64 in two dense steps
        pair = np.unique(keys[:, 1] * radix + (keys[:, 2] + 1), return_inverse=True)[1]
        block = np.unique(pair * radix + keys[:, 0], return_inverse=True)[1]
        distinct = np.unique(owners * (int(block.max()) + 1) + block)
        counts = np.bincount(distinct // (int(block.max()) + 1), minlength=count)
    else:
        counts = np.zeros(count, dtype=np.int64)
    return ReturnProfile(n, index.representatives(n), occ, counts, max_gaps)


@dataclass(frozen=True)
class MinReturn:
    length: int
    count: int
    factor: Word
    stable: bool


def min_return_count(w: Word, length: int, index: FactorIndex | None = None) -> MinReturn:
    """Fewest return words over the length-``length`` factors of ``w``.

    The length must be certified, and every factor must occur at least
    twice; ``stable`` compares all counts with those from the first half.
    """
    index = index or FactorIndex(w)
    profile = complexity_profile(w, min(length, len(w)), index)
    if length > profile.validity_horizon:
        raise HorizonError(f"length {length} lies beyond the certified horizon {profile.validity_horizon}")
    full = return_profile(w, length, index)
    if (full.occurrences < 2).any():
        raise InsufficientOccurrencesError(f"some factor of length {length} occurs only once")
    half_word = w[: len(w) // 2]
    half = return_profile(half_word, length)
    by_word = {full.factor(w, f).letters: int(full.counts[f]) for f in range(len(full.counts))}
    stable = all(
        by_word.get(half.factor(half_word, f).letters) == int(half.counts[f]) for f in range(len(half.counts))
    )
    fid = int(np.argmin(full.counts))
    return MinReturn(length, int(full.counts[fid]), full.factor(w, fid), stable)


def recurrence_constant(w: Word, max_length: int, index: FactorIndex | None = None) -> tuple[float, Word | None]:
    """Largest ``gap / |u|`` over certified factors ``u`` with ``|u| <= max_length``.

    Gaps are distances between consecutive occurrences; factors seen once
    are skipped.  Returns the ratio and the factor attaining it.
    """
    index = index or FactorIndex(w)
    horizon = complexity_profile(w, min(max_length, len(w)), index).validity_horizon
    best, witness = 0.0, None
    for n in range(1, min(max_length, horizon) + 1):
        prof = return_profile(w, n, index)
        fid = int(np.argmax(prof.max_gaps))
        ratio = prof.max_gaps[fid] / n
        if ratio > best:
            best, witness = float(ratio), prof.factor(w, fid)
    return best, witness


# -- exponent sets --------------------------------------------------------

@dataclass(frozen=True)
class PowSet:
    factor: Word
    exponents: tuple[int, ...]
    cap: int

    def to_json(self) -> dict:
        return {"u": self.factor.to_text(), "pow": list(self.exponents), "cap": self.cap}


def _blocked(w: bytes, u: bytes, start: int, end: int) -> bool:
    """Is ``w[start:end]`` flanked by a non-suffix of ``u`` and a non-prefix of ``u``?

    A short left block is a suffix of ``u`` whenever the longest available
    one is, so only the longest candidates on each side need checking.
    """
    left_len = min(len(u), start)
    right_len = min(len(u), len(w) - end)
    if left_len == 0 or right_len == 0:
        return False
    if u.endswith(w[start - left_len : start]):
        return False
    return not u.startswith(w[end : end + right_len])


def _exponent_occurs(data: bytes, u: bytes, i: int) -> bool:
    block = u * i
    if i == 0:
        return any(_blocked(data, u, t, t) for t in range(len(data) + 1))
    t = data.find(block)
    while t != -1:
        if _blocked(data, u, t, t + len(block)):
            return True
        t = data.find(block, t + 1)
    return False


def pow_set(w: Word, u, i_cap: int, include_zero: bool = False) -> PowSet:
    """Exponents ``1 <= i <= i_cap`` such that some ``p u**i s`` is a factor of ``w``.

    Here ``1 <= |p|, |s| <= |u|``, ``p`` is not a suffix of ``u`` and ``s``
    is not a prefix of ``u``; the empty word counts as both, so neither
    flank may be empty.  ``u**0`` says nothing about ``u`` and is only
    tested on request.
    """
    u = as_word(u, w.alphabet_size) if not isinstance(u, Word) else u
    if len(u) == 0:
        raise UndefinedInputError("Pow of the empty word is not defined")
    if i_cap < 0:
        raise ValueError("the cap must be non-negative")
    if i_cap * len(u) > len(w):
        raise EmptyWindowError(f"cap {i_cap} needs {i_cap * len(u)} letters, the word has {len(w)}")
    data, pattern = w.letters, u.letters
    found = []
    for i in range(0 if include_zero else 1, i_cap + 1):
        if i > 0 and data.find(pattern * i) == -1:
            break
        if _exponent_occurs(data, pattern, i):
            found.append(i)
    return PowSet(u, tuple(found), i_cap)


def max_exponent(w: Word, u: Word) -> int:
    """Largest ``i`` with ``u**i`` a factor of ``w``."""
    i = 0
    while w.letters.find(u.letters * (i + 1)) != -1 and (i + 1) * len(u) <= len(w):
        i += 1
    return i


# -- power richness -------------------------------------------------------

@dataclass(frozen=True)
class RichnessWitness:
    factor: Word
    k: int
    exponents: tuple[int, ...]
    covered: bool
    lower_bound: Fraction


@dataclass(frozen=True)
class RichnessVerdict:
    C: Fraction
    witnesses: tuple[RichnessWitness, ...]
    flag: bool


def richness_lower_bound(u_length: int, k: int, C: Fraction) -> Fraction:
    """``(|u|/2) x (x - 1)`` with ``x = (C - 1) k / C``: the implied bound on ``p(k |u|)``."""
    x = (C - 1) / C * k
    return Fraction(u_length, 2) * x * (x - 1)


def power_richness(w: Word, C, candidates: Sequence[Word]) -> RichnessVerdict:
    """Check whether ``candidates`` witness a non-sub-linear complexity.

    For each primitive candidate ``u`` with largest Pow element ``k``, every
    integer in ``[k/C, k]`` must be an exponent.  The flag needs at least two
    candidates, all covered, with strictly increasing lengths and ``k``.
    """
    C = Fraction(C)
    if C <= 1:
        raise ValueError("C must exceed 1")
    witnesses = []
    for u in candidates:
        if len(u) == 0 or not is_primitive_word(u):
            raise PreconditionError(f"candidate {u} is not a primitive word")
        exps = pow_set(w, u, max_exponent(w, u)).exponents
        k = max(exps, default=0)
        lo = math.ceil(Fraction(k) / C)
        covered = k >= 1 and all(i in exps for i in range(max(lo, 0), k + 1))
        witnesses.append(RichnessWitness(u, k, exps, covered, richness_lower_bound(len(u), k, C)))
    lengths = [len(x.factor) for x in witnesses]
    ks = [x.k for x in witnesses]
    flag = (
        len(witnesses) >= 2
        and all(x.covered for x in witnesses)
        and all(a < b for a, b in zip(lengths, lengths[1:]))
        and all(a < b for a, b in zip(ks, ks[1:]))
    )
    return RichnessVerdict(C, tuple(witnesses), flag)
