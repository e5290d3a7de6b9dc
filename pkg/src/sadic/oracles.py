"""Quadratic brute-force references for the indexed algorithms.

Every function here works from explicit substring sets and character
comparisons, sharing no code with the suffix-array machinery, so agreement
between the two is meaningful evidence.
"""

from __future__ import annotations

import random
from typing import Iterator

from .words import Word


def brute_counts(w: Word, n_max: int) -> list[int]:
    """``p(0..n_max)`` of the finite word ``w`` by enumerating substrings."""
    data = w.letters
    return [len({data[i : i + n] for i in range(len(data) - n + 1)}) for n in range(n_max + 1)]


def brute_profile(w: Word, n_max: int) -> tuple[list[int], int]:
    """Counts with the half-prefix certification horizon, computed naively."""
    full = brute_counts(w, n_max)
    half_word = w[: len(w) // 2]
    upto = min(n_max, len(half_word))
    half = brute_counts(half_word, upto)
    horizon = upto
    for n in range(upto + 1):
        if full[n] != half[n]:
            horizon = n - 1
            break
    return full, horizon


def brute_special(w: Word, n: int, side: str) -> dict[bytes, tuple[int, ...]]:
    """Length-``n`` factors with two or more extension letters on ``side``."""
    data = w.letters
    ext: dict[bytes, set[int]] = {}
    for i in range(len(data) - n + 1):
        if side == "right" and i + n < len(data):
            ext.setdefault(data[i : i + n], set()).add(data[i + n])
        elif side == "left" and i > 0:
            ext.setdefault(data[i : i + n], set()).add(data[i - 1])
    return {u: tuple(sorted(e)) for u, e in ext.items() if len(e) >= 2}


def brute_occurrences(data: bytes, pattern: bytes) -> list[int]:
    m = len(pattern)
    return [i for i in range(len(data) - m + 1) if all(data[i + j] == pattern[j] for j in range(m))]


def brute_return_words(w: Word, u: Word) -> set[bytes]:
    pos = brute_occurrences(w.letters, u.letters)
    return {w.letters[i:j] for i, j in zip(pos, pos[1:])}


def brute_pow_set(w: Word, u: Word, i_cap: int, include_zero: bool = False) -> tuple[int, ...]:
    """Try every ``p u**i s`` with ``1 <= |p|, |s| <= |u|`` at every position."""
    data, pattern = w.letters, u.letters
    m = len(pattern)
    found = []
    for i in range(0 if include_zero else 1, i_cap + 1):
        block = pattern * i
        hit = False
        for t in range(len(data)):
            for lp in range(1, m + 1):
                p = data[t : t + lp]
                if len(p) < lp or pattern.endswith(p):
                    continue
                mid = t + lp
                if data[mid : mid + len(block)] != block:
                    continue
                for ls in range(1, m + 1):
                    s = data[mid + len(block) : mid + len(block) + ls]
                    if len(s) == ls and not pattern.startswith(s):
                        hit = True
                        break
                if hit:
                    break
            if hit:
                break
        if hit:
            found.append(i)
    return tuple(found)


def random_corpus(count: int, max_length: int, seed: int) -> Iterator[Word]:
    """Seeded mix of uniform random words and morphic prefixes with repetition structure."""
    rng = random.Random(seed)
    for j in range(count):
        length = rng.randint(1, max_length)
        size = rng.choice((2, 2, 3, 4))
        if j % 2 == 0:
            yield Word(bytes(rng.randrange(size) for _ in range(length)), size)
            continue
        images = [bytes(rng.randrange(size) for _ in range(rng.randint(1, 3))) for _ in range(size)]
        images[0] = bytes([0]) + images[0]
        data = b"\x00"
        while len(data) < length:  # images[0] starts with 0 and is longer than one letter
            data = b"".join(images[c] for c in data)
        yield Word(data[:length], size)
