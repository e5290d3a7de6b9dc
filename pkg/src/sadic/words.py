"""Letters, finite words and the elementary scans built on them.

Letters are dense integer indices ``0 .. alphabet_size - 1``.  A :class:`Word`
stores them in a ``bytes`` object, so slicing, hashing and substring search
run at C speed; alphabets are therefore limited to 256 letters, far above the
desk-scale fixtures this package deals with.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import EmptyWindowError, FormatError, UndefinedInputError

Letter = int

MAX_ALPHABET = 256


@dataclass(frozen=True)
class Word:
    """An immutable finite word over ``range(alphabet_size)``."""

    letters: bytes
    alphabet_size: int

    def __post_init__(self):
        if not 1 <= self.alphabet_size <= MAX_ALPHABET:
            raise ValueError(f"alphabet size must lie in 1..{MAX_ALPHABET}, got {self.alphabet_size}")
        if self.letters and max(self.letters) >= self.alphabet_size:
            raise ValueError(
                f"letter {max(self.letters)} outside alphabet of size {self.alphabet_size}"
            )

    @classmethod
    def from_letters(cls, letters: Iterable[int], alphabet_size: int | None = None) -> Word:
        data = bytes(letters)
        if alphabet_size is None:
            alphabet_size = max(data) + 1 if data else 1
        return cls(data, alphabet_size)

    @classmethod
    def parse(cls, text: str, alphabet_size: int | None = None) -> Word:
        """Read the text format: a digit string, or comma-separated integers."""
        text = text.strip()
        if not text:
            return cls(b"", alphabet_size or 1)
        try:
            if "," in text:
                letters = [int(tok) for tok in text.split(",")]
            else:
                letters = [int(ch) for ch in text]
        except ValueError as exc:
            raise FormatError(f"cannot parse word {text!r}") from exc
        if min(letters) < 0 or max(letters) >= MAX_ALPHABET:
            raise FormatError(f"letters of {text!r} out of range")
        try:
            return cls.from_letters(letters, alphabet_size)
        except ValueError as exc:
            raise FormatError(str(exc)) from exc

    def to_text(self) -> str:
        if self.alphabet_size <= 10:
            return "".join(map(str, self.letters))
        return ",".join(map(str, self.letters))

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Word({self.to_text()!r})"

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, key: Union[int, slice]):
        if isinstance(key, slice):
            return Word(self.letters[key], self.alphabet_size)
        return self.letters[key]

    def __add__(self, other: Word) -> Word:
        return Word(self.letters + other.letters, max(self.alphabet_size, other.alphabet_size))

    def __mul__(self, k: int) -> Word:
        return Word(self.letters * k, self.alphabet_size)

    def startswith(self, prefix: Word) -> bool:
        return self.letters.startswith(prefix.letters)

    def endswith(self, suffix: Word) -> bool:
        return self.letters.endswith(suffix.letters)

    def count(self, letter: Letter) -> int:
        """Number of occurrences of ``letter`` (the ``|w|_a`` of the literature)."""
        return self.letters.count(bytes([letter]))

    def letter_set(self) -> frozenset[int]:
        return frozenset(self.letters)


def as_word(value: Union[Word, str, bytes, Iterable[int]], alphabet_size: int | None = None) -> Word:
    """Coerce text, bytes or a letter sequence into a :class:`Word`."""
    if isinstance(value, Word):
        if alphabet_size is not None and alphabet_size != value.alphabet_size:
            return Word(value.letters, alphabet_size)
        return value
    if isinstance(value, str):
        return Word.parse(value, alphabet_size)
    return Word.from_letters(value, alphabet_size)


@dataclass(frozen=True)
class FactorSet:
    length: int
    members: frozenset[Word]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, item) -> bool:
        return item in self.members

    def __iter__(self) -> Iterator[Word]:
        return iter(sorted(self.members, key=lambda u: u.letters))


def factors(w: Word, n: int) -> FactorSet:
    """Distinct length-``n`` blocks of ``w``.

    The cardinality is the finite-prefix lower bound of the complexity p(n).
    """
    if n < 0:
        raise ValueError("factor length must be non-negative")
    if n > len(w):
        raise EmptyWindowError(f"no window of length {n} in a word of length {len(w)}")
    data = w.letters
    blocks = {data[i : i + n] for i in range(len(data) - n + 1)}
    return FactorSet(n, frozenset(Word(b, w.alphabet_size) for b in blocks))


def occurrences(w: Word, u: Word) -> list[int]:
    """Start positions of ``u`` in ``w``, overlapping occurrences included."""
    if len(u) == 0:
        raise UndefinedInputError("occurrences of the empty word are not defined")
    data, pattern = w.letters, u.letters
    found = []
    i = data.find(pattern)
    while i != -1:
        found.append(i)
        i = data.find(pattern, i + 1)
    return found


def failure_function(data: bytes) -> list[int]:
    """KMP border table: ``table[i]`` is the longest proper border of ``data[:i+1]``."""
    table = [0] * len(data)
    k = 0
    for i in range(1, len(data)):
        while k and data[i] != data[k]:
            k = table[k - 1]
        if data[i] == data[k]:
            k += 1
        table[i] = k
    return table


def least_period(w: Word) -> int:
    if len(w) == 0:
        return 0
    return len(w) - failure_function(w.letters)[-1]


def is_primitive_word(u: Word) -> bool:
    """True iff ``u`` is not ``v**k`` for a shorter word ``v`` and some ``k >= 2``."""
    if len(u) == 0:
        raise UndefinedInputError("primitivity of the empty word is undefined")
    n = len(u)
    p = least_period(u)
    return p == n or n % p != 0


def is_primitive_by_rotation(u: Word) -> bool:
    """Independent check: ``u`` is a power iff it occurs inside ``uu`` at a proper shift.

    This is the commutation argument ``xy = yx`` applied to rotations of ``u``.
    """
    if len(u) == 0:
        raise UndefinedInputError("primitivity of the empty word is undefined")
    doubled = u.letters + u.letters
    return doubled.find(u.letters, 1) == len(u)


def max_run(w: Word, a: Letter) -> int:
    """Length of the longest block ``a**k`` in ``w`` (0 if ``a`` is absent)."""
    return max_block(w, (a,))


def max_block(w: Word, letters: Iterable[int]) -> int:
    """Longest factor of ``w`` using only ``letters``."""
    table = bytearray(MAX_ALPHABET)
    for a in letters:
        table[a] = 1
    marked = w.letters.translate(bytes(table))
    return max((len(chunk) for chunk in marked.split(b"\x00")), default=0)


def read_words(text: str, alphabet_size: int | None = None) -> list[Word]:
    """Parse a newline-separated list of words."""
    return [Word.parse(line, alphabet_size) for line in text.splitlines() if line.strip()]
