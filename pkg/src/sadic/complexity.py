"""Factor complexity, special and bispecial factors, and asymptotic fits.

All counts are taken over one finite prefix.  A length ``n`` is certified when
the prefix and its first half already agree on ``p(1..n)``; analyses report
this horizon so that truncation effects stay visible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import EmptyWindowError, InsufficientRangeError, RangeMismatchError
from .index import FactorIndex
from .words import Word, occurrences

MIN_FIT_RANGE = 32
FIT_MARGIN = 1.2


@dataclass(frozen=True)
class ComplexityProfile:
    p: tuple[int, ...]
    validity_horizon: int
    prefix_length: int

    @property
    def s(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.p, self.p[1:]))

    @property
    def n_max(self) -> int:
        return len(self.p) - 1

    def certified(self, n: int) -> bool:
        return n <= self.validity_horizon

    def rows(self) -> list[dict]:
        s = self.s
        return [
            {"n": n, "p": self.p[n], "s": s[n] if n < len(s) else "", "valid": int(self.certified(n))}
            for n in range(len(self.p))
        ]


def _horizon(full: np.ndarray, half: np.ndarray, n_max: int) -> int:
    upto = min(n_max, len(half) - 1)
    mismatch = np.flatnonzero(full[: upto + 1] != half[: upto + 1])
    if len(mismatch):
        return int(mismatch[0]) - 1
    return upto


def complexity_profile(w: Word, n_max: int, index: FactorIndex | None = None) -> ComplexityProfile:
    """``p(0..n_max)`` of ``w`` with the half-prefix certification horizon."""
    if n_max > len(w):
        raise EmptyWindowError(f"n_max = {n_max} exceeds the word length {len(w)}")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    index = index or FactorIndex(w)
    full = index.counts if len(w) else np.ones(1, dtype=np.int64)
    half_word = w[: len(w) // 2]
    half = FactorIndex(half_word).counts if len(half_word) else np.ones(1, dtype=np.int64)
    p = tuple(int(x) for x in full[: n_max + 1])
    return ComplexityProfile(p, _horizon(full, half, n_max), len(w))


@dataclass(frozen=True)
class ExtensionTable:
    """Extension counts for every factor of one length, indexed by dense factor id."""

    length: int
    positions: np.ndarray  # a starting position of each factor
    left: np.ndarray
    right: np.ndarray
    both: np.ndarray
    left_letters: np.ndarray  # bit masks of observed extensions
    right_letters: np.ndarray

    @property
    def bilateral(self) -> np.ndarray:
        return self.both - self.left - self.right + 1


def _distinct_per_group(group: np.ndarray, value: np.ndarray, groups: int, values: int) -> np.ndarray:
    if groups * values <= 50_000_000:
        seen = np.bincount(group * values + value, minlength=groups * values) > 0
        return seen.reshape(groups, values).sum(axis=1)
    pairs = np.unique(group * values + value)
    return np.bincount(pairs // values, minlength=groups)


def _letter_masks(group: np.ndarray, value: np.ndarray, groups: int) -> np.ndarray:
    masks = np.zeros(groups, dtype=object)
    pairs = np.unique(group * 256 + value)
    for g, v in zip((pairs // 256).tolist(), (pairs % 256).tolist()):
        masks[g] |= 1 << v
    return masks


def extension_table(index: FactorIndex, n: int, with_letters: bool = False) -> ExtensionTable:
    """Left, right and two-sided extension counts of every length-``n`` factor.

    Only occurrences whose extension letters lie inside the word count.
    """
    size = index.size
    if n > size:
        raise EmptyWindowError(f"no factor of length {n} in a word of length {size}")
    ids_all, count = index.factor_ids(n)
    ids = ids_all[: size - n + 1]
    letters = index.array
    A = max(index.alphabet_size, 1)
    positions = index.representatives(n)

    lpos = np.arange(1, size - n + 1)
    left = _distinct_per_group(ids[lpos], letters[lpos - 1], count, A)
    rpos = np.arange(0, size - n)
    right = _distinct_per_group(ids[rpos], letters[rpos + n], count, A)
    bpos = np.arange(1, size - n)
    both = _distinct_per_group(ids[bpos], letters[bpos - 1] * A + letters[bpos + n], count, A * A)
    if with_letters:
        lmask = _letter_masks(ids[lpos], letters[lpos - 1], count)
        rmask = _letter_masks(ids[rpos], letters[rpos + n], count)
    else:
        lmask = rmask = np.zeros(0, dtype=object)
    return ExtensionTable(n, positions, left, right, both, lmask, rmask)


@dataclass(frozen=True)
class SpecialFactor:
    word: Word
    extensions: tuple[int, ...]


def _mask_letters(mask: int) -> tuple[int, ...]:
    return tuple(i for i in range(mask.bit_length()) if mask >> i & 1)


def special_factors(
    w: Word, n: int, side: str = "right", index: FactorIndex | None = None
) -> list[SpecialFactor]:
    """Length-``n`` factors with at least two extensions on ``side``, sorted."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    if n >= len(w):
        return []
    index = index or FactorIndex(w)
    table = extension_table(index, n, with_letters=True)
    counts = table.right if side == "right" else table.left
    masks = table.right_letters if side == "right" else table.left_letters
    out = []
    for fid in np.flatnonzero(counts >= 2):
        start = int(table.positions[fid])
        out.append(SpecialFactor(w[start : start + n], _mask_letters(int(masks[fid]))))
    return sorted(out, key=lambda sf: sf.word.letters)


def special_counts(w: Word, n_max: int, side: str = "right", index: FactorIndex | None = None) -> list[int]:
    """Number of special factors for each length ``0..n_max``."""
    index = index or FactorIndex(w)
    A = max(index.alphabet_size, 1)
    out = []
    for n in range(n_max + 1):
        if n >= len(w):
            out.append(0)
            continue
        ids_all, count = index.factor_ids(n)
        letters = index.array
        if side == "right":
            pos = np.arange(0, len(w) - n)
            counts = _distinct_per_group(ids_all[pos], letters[pos + n], count, A)
        else:
            pos = np.arange(1, len(w) - n + 1)
            counts = _distinct_per_group(ids_all[pos], letters[pos - 1], count, A)
        out.append(int((counts >= 2).sum()))
    return out


@dataclass(frozen=True)
class BispecialEntry:
    word: Word
    left: int
    right: int
    both: int

    @property
    def m(self) -> int:
        return self.both - self.left - self.right + 1

    @property
    def bispecial(self) -> bool:
        return self.left >= 2 and self.right >= 2

    @property
    def kind(self) -> str:
        return "strong" if self.m > 0 else "weak" if self.m < 0 else "neutral"


@dataclass(frozen=True)
class BispecialReport:
    """Bispecial factors up to ``n_max`` plus every other factor with ``m(u) != 0``.

    Non-bispecial factors only get a nonzero bilateral order from the two
    ends of a finite word; keeping them makes the order sums exact.
    """

    entries: tuple[BispecialEntry, ...]
    n_max: int
    prefix_length: int
    source: Word | None = field(default=None, repr=False, compare=False)

    def of_length(self, n: int) -> list[BispecialEntry]:
        return [e for e in self.entries if len(e.word) == n]

    def order_sum(self, n: int) -> int:
        return sum(e.m for e in self.entries if len(e.word) == n)

    @property
    def bispecials(self) -> list[BispecialEntry]:
        return [e for e in self.entries if e.bispecial]

    @property
    def strong(self) -> list[BispecialEntry]:
        return [e for e in self.bispecials if e.m > 0]

    @property
    def weak(self) -> list[BispecialEntry]:
        return [e for e in self.bispecials if e.m < 0]

    def find(self, u: Word | str) -> BispecialEntry | None:
        key = u.letters if isinstance(u, Word) else Word.parse(u).letters
        for e in self.entries:
            if e.word.letters == key:
                return e
        return None

    def entry(self, u: Word | str) -> BispecialEntry | None:
        """Extension counts of any factor ``u``; None if ``u`` does not occur."""
        found = self.find(u)
        if found is not None or self.source is None:
            return found
        w = self.source
        u = u if isinstance(u, Word) else Word.parse(u, w.alphabet_size)
        data, n = w.letters, len(u)
        pos = occurrences(w, u) if n else list(range(len(data) + 1))
        if not pos:
            return None
        left = {data[i - 1] for i in pos if i > 0}
        right = {data[i + n] for i in pos if i + n < len(data)}
        both = {(data[i - 1], data[i + n]) for i in pos if i > 0 and i + n < len(data)}
        return BispecialEntry(u, len(left), len(right), len(both))

    def rows(self) -> list[dict]:
        return [
            {"length": len(e.word), "factor": e.word.to_text(), "m": e.m, "class": e.kind}
            for e in self.entries
            if e.bispecial
        ]


def bispecial_report(w: Word, n_max: int, index: FactorIndex | None = None) -> BispecialReport:
    index = index or FactorIndex(w)
    entries = []
    for n in range(min(n_max, len(w)) + 1):
        table = extension_table(index, n)
        m = table.bilateral
        keep = np.flatnonzero(((table.left >= 2) & (table.right >= 2)) | (m != 0))
        batch = []
        for fid in keep:
            start = int(table.positions[fid])
            batch.append(
                BispecialEntry(
                    w[start : start + n], int(table.left[fid]), int(table.right[fid]), int(table.both[fid])
                )
            )
        entries.extend(sorted(batch, key=lambda e: e.word.letters))
    return BispecialReport(tuple(entries), n_max, len(w), w)


def cassaigne_identity_check(profile: ComplexityProfile, report: BispecialReport) -> dict[int, int]:
    """Residuals ``s(n+1) - s(n) - sum of m(u)`` over certified ``n``."""
    if profile.prefix_length != report.prefix_length:
        raise RangeMismatchError("profile and report come from different prefixes")
    s = profile.s
    last = min(profile.validity_horizon, report.n_max, len(s) - 2)
    if last < 0:
        raise RangeMismatchError("no common certified range")
    return {n: (s[n + 1] - s[n]) - report.order_sum(n) for n in range(last + 1)}


def entropy_estimate(profile: ComplexityProfile) -> float:
    """Least-squares slope of ``log p(n)`` over the top half of the certified range."""
    h = min(profile.validity_horizon, profile.n_max)
    if h < 1:
        raise InsufficientRangeError("entropy needs a certified range")
    ns = np.arange(max(1, h // 2), h + 1)
    if len(ns) < 2:
        return 0.0
    logs = np.log(np.array([profile.p[n] for n in ns], dtype=float))
    return float(np.polyfit(ns, logs, 1)[0])


def sublinear_constant(profile: ComplexityProfile) -> float:
    """``max p(n)/n`` over the certified range, the smallest ``C`` with ``p(n) <= C n``."""
    h = min(profile.validity_horizon, profile.n_max)
    if h < 1:
        raise InsufficientRangeError("no certified length")
    return max(profile.p[n] / n for n in range(1, h + 1))


def _loglog(n: np.ndarray) -> np.ndarray:
    return n * np.log(np.log(n))


GROWTH_MODELS: Mapping[str, object] = {
    "constant": lambda n: np.zeros_like(n),
    "linear": lambda n: n,
    "n-log-log-n": _loglog,
    "n-log-n": lambda n: n * np.log(n),
    "n^3/2": lambda n: n**1.5,
    "quadratic": lambda n: n**2,
}


@dataclass(frozen=True)
class GrowthFit:
    label: str
    best_model: str
    residuals: dict[str, float]
    margin: float
    fit_range: tuple[int, int]
    coefficients: dict[str, tuple[float, ...]] = field(default_factory=dict)
    threshold: float = FIT_MARGIN

    def rejects(self, model: str) -> bool:
        """True when ``model`` fits at least ``threshold`` times worse than the best model."""
        best = self.residuals[self.best_model]
        return model != self.best_model and self.residuals[model] >= self.threshold * max(best, 1e-300)


def growth_fit(
    profile: ComplexityProfile,
    margin: float = FIT_MARGIN,
    min_range: int = MIN_FIT_RANGE,
    models: Iterable[str] | None = None,
) -> GrowthFit:
    """Pick the model ``a f(n) + b n + c`` with the smallest relative residual.

    Every model carries a free linear and constant term, so the comparison
    is decided by the leading term alone.  Residuals are relative to ``p(n)``
    so that the whole range weighs in.  The label is the best model if the
    runner-up's residual is at least ``margin`` times larger, else
    ``inconclusive``.
    """
    h = min(profile.validity_horizon, profile.n_max)
    if h < min_range:
        raise InsufficientRangeError(f"certified range {h} is shorter than {min_range}")
    lo = 3
    n = np.arange(lo, h + 1, dtype=float)
    p = np.array(profile.p[lo : h + 1], dtype=float)
    weight = 1.0 / p
    residuals, coefficients = {}, {}
    for name in models or GROWTH_MODELS:
        lead = GROWTH_MODELS[name](n)
        columns = [n, np.ones_like(n)] if name in ("constant", "linear") else [lead, n, np.ones_like(n)]
        if name == "constant":
            columns = [np.ones_like(n)]
        X = np.column_stack(columns) * weight[:, None]
        coef, *_ = np.linalg.lstsq(X, p * weight, rcond=None)
        residuals[name] = float(np.sum((X @ coef - p * weight) ** 2))
        coefficients[name] = tuple(float(c) for c in coef)
    # Nested models tie on data one of them fits exactly; keep the simplest.
    tol = 1e-12 * float(np.sum((p * weight) ** 2))
    floor = min(residuals.values())
    tied = [m for m in residuals if residuals[m] <= floor + tol]
    best = tied[0]
    others = [residuals[m] for m in residuals if m not in tied]
    runner = min(others) if others else residuals[best]
    gap = runner / residuals[best] if residuals[best] > tol else math.inf
    label = best if gap >= margin else "inconclusive"
    return GrowthFit(label, best, residuals, gap, (lo, h), coefficients, margin)
