"""Directive words, their expansion into morphism sequences, and prefix generation.

A directive word is a list of blocks ``(morphism, schedule)`` repeated in
rounds: round ``r`` contributes ``schedule(r)`` copies of each block's
morphism, in block order.  The expanded sequence ``s0, s1, ...`` defines the
limit ``lim s0 s1 ... sn(a a a ...)``; round ends (or every ``cut_every``-th
round end) are the truncation points used when generating prefixes.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Protocol, Sequence

import numpy as np

from .errors import (
    AlphabetMismatchError,
    DegenerateDirectiveError,
    ExhaustedScheduleError,
    FormatError,
    MemoryCapError,
    NonConvergentDirectiveError,
)
from .morphisms import (
    Matrix,
    Morphism,
    incidence_matrix,
    is_positive,
    mat_mul,
    morphism_from_json,
    morphism_to_json,
)
from .words import Word

DEFAULT_MEM_CAP = 10_000_000
MAX_EMPTY_ROUNDS = 10_000
MAX_STALLED_CUTS = 256


def memory_cap() -> int:
    """Prefix materialization cap, overridable through ``SADIC_MEM_CAP``."""
    raw = os.environ.get("SADIC_MEM_CAP")
    if raw is None:
        return DEFAULT_MEM_CAP
    try:
        return int(float(raw))
    except ValueError as exc:
        raise FormatError(f"SADIC_MEM_CAP must be a number, got {raw!r}") from exc


@dataclass(frozen=True)
class PowerSchedule:
    """Exponent ``k_r`` of a block in round ``r``.

    ``kind`` is ``constant`` (value ``c``), ``cycle`` (value list, repeated),
    ``identity`` (``k_r = r + value``) or ``list`` (value list, finite).  An
    optional ``head`` overrides the first rounds.
    """

    kind: str
    value: object = 0
    head: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in ("constant", "cycle", "identity", "list"):
            raise FormatError(f"unknown schedule kind {self.kind!r}")
        if self.kind in ("cycle", "list"):
            values = tuple(int(v) for v in self.value)
            if self.kind == "cycle" and not values:
                raise FormatError("a cycle schedule needs at least one value")
            object.__setattr__(self, "value", values)
        else:
            object.__setattr__(self, "value", int(self.value))
        object.__setattr__(self, "head", tuple(int(v) for v in self.head))
        values = list(self.head)
        values += list(self.value) if isinstance(self.value, tuple) else [self.value]
        if any(v < 0 for v in values):
            raise FormatError("schedule values must be non-negative")

    @classmethod
    def constant(cls, c: int) -> PowerSchedule:
        return cls("constant", c)

    @classmethod
    def identity(cls, offset: int = 0) -> PowerSchedule:
        return cls("identity", offset)

    @classmethod
    def cycle(cls, values: Sequence[int]) -> PowerSchedule:
        return cls("cycle", tuple(values))

    @classmethod
    def explicit(cls, values: Sequence[int]) -> PowerSchedule:
        return cls("list", tuple(values))

    def __call__(self, r: int) -> int:
        if r < len(self.head):
            return self.head[r]
        if self.kind == "constant":
            return self.value
        if self.kind == "identity":
            return r + self.value
        if self.kind == "cycle":
            return self.value[r % len(self.value)]
        if r >= len(self.value):
            raise ExhaustedScheduleError(f"explicit schedule has only {len(self.value)} values")
        return self.value[r]

    def to_json(self) -> dict:
        out = {"kind": self.kind, "value": list(self.value) if isinstance(self.value, tuple) else self.value}
        if self.head:
            out["head"] = list(self.head)
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> PowerSchedule:
        try:
            return cls(obj["kind"], obj.get("value", 0), tuple(obj.get("head", ())))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed power schedule {obj!r}") from exc


@dataclass(frozen=True)
class Block:
    morphism: str
    power: PowerSchedule


@dataclass(frozen=True)
class Step:
    """One morphism of the expanded directive; ``cut`` marks a round end."""

    name: str
    morphism: Morphism
    cut: bool


class Directive(Protocol):
    seed: int

    def steps(self) -> Iterator[Step]: ...


@dataclass(frozen=True)
class DirectiveWord:
    morphisms: Mapping[str, Morphism]
    blocks: tuple[Block, ...]
    seed: int = 0
    start_round: int = 0
    name: str = ""
    cut_every: int = 1

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        if self.cut_every < 1:
            raise FormatError("cut_every must be positive")
        if not self.blocks:
            raise FormatError("a directive word needs at least one block")
        for block in self.blocks:
            if block.morphism not in self.morphisms:
                raise FormatError(f"block refers to unknown morphism {block.morphism!r}")

    def round_morphisms(self, r: int) -> list[str]:
        names = []
        for block in self.blocks:
            names.extend([block.morphism] * block.power(r))
        return names

    def steps(self) -> Iterator[Step]:
        empty = 0
        for r in itertools.count(self.start_round):
            names = self.round_morphisms(r)
            if not names:
                empty += 1
                if empty > MAX_EMPTY_ROUNDS:
                    raise DegenerateDirectiveError("schedule produces only empty rounds")
                continue
            empty = 0
            cut_round = (r + 1) % self.cut_every == 0
            for i, name in enumerate(names):
                yield Step(name, self.morphisms[name], cut_round and i == len(names) - 1)

    def shifted(self, rounds: int) -> DirectiveWord:
        """The tail directive starting ``rounds`` rounds later."""
        return DirectiveWord(
            self.morphisms, self.blocks, self.seed, self.start_round + rounds, self.name, self.cut_every
        )

    def to_json(self) -> dict:
        return {
            "morphisms": {name: morphism_to_json(m)["images"] for name, m in self.morphisms.items()},
            "codomains": {name: m.codomain_size for name, m in self.morphisms.items()},
            "blocks": [{"morphism": b.morphism, "power": b.power.to_json()} for b in self.blocks],
            "seed": self.seed,
            "start_round": self.start_round,
            "cut_every": self.cut_every,
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> DirectiveWord:
        try:
            codomains = obj.get("codomains", {})
            table = {
                name: morphism_from_json({"images": images, "codomain": codomains.get(name)}, name)
                for name, images in obj["morphisms"].items()
            }
            blocks = tuple(
                Block(b["morphism"], PowerSchedule.from_json(b["power"])) for b in obj["blocks"]
            )
            return cls(
                table,
                blocks,
                int(obj.get("seed", 0)),
                int(obj.get("start_round", 0)),
                cut_every=int(obj.get("cut_every", 1)),
            )
        except (KeyError, TypeError, AttributeError) as exc:
            raise FormatError(f"malformed directive: {exc}") from exc


def load_directive(text: str) -> DirectiveWord:
    try:
        return DirectiveWord.from_json(json.loads(text))
    except json.JSONDecodeError as exc:
        raise FormatError(f"directive is not valid JSON: {exc}") from exc


def widen(sigma: Morphism, codomain_size: int) -> Morphism:
    """Same images, read over a larger codomain alphabet."""
    if codomain_size == sigma.codomain_size:
        return sigma
    if codomain_size < sigma.codomain_size:
        raise AlphabetMismatchError("cannot shrink a codomain")
    return Morphism(
        tuple(Word(img.letters, codomain_size) for img in sigma.images), codomain_size, sigma.name
    )


def _check_link(outer: Morphism, inner: Morphism):
    if inner.codomain_size > outer.domain_size:
        raise AlphabetMismatchError(
            f"{inner.name or 'inner morphism'} produces {inner.codomain_size} letters but "
            f"{outer.name or 'outer morphism'} reads only {outer.domain_size}"
        )


def chain_compose(outer: Morphism, inner: Morphism) -> Morphism:
    """``outer o inner`` where ``inner`` may use a sub-alphabet of ``outer``'s domain."""
    _check_link(outer, inner)
    images = []
    table = [img.letters for img in outer.images]
    for img in inner.images:
        images.append(Word(b"".join(table[c] for c in img.letters), outer.codomain_size))
    name = f"{outer.name}{inner.name}" if outer.name and inner.name else ""
    return Morphism(tuple(images), outer.codomain_size, name)


@dataclass(frozen=True)
class ContractedDirective:
    """Groups of consecutive base morphisms composed into single morphisms.

    After the last group the base sequence continues ungrouped.  A group end
    is a truncation point exactly when the base has one there.
    """

    base: Directive
    grouping: tuple[int, ...]

    @property
    def seed(self) -> int:
        return self.base.seed

    def steps(self) -> Iterator[Step]:
        stream = self.base.steps()
        for size in self.grouping:
            if size < 1:
                raise ValueError("group sizes must be positive")
            group = [next(stream) for _ in range(size)]
            composite = group[-1].morphism
            for step in reversed(group[:-1]):
                composite = chain_compose(step.morphism, composite)
            name = "".join(s.name for s in group)
            yield Step(name, composite.renamed(name), group[-1].cut)
        yield from stream


def contract(d: Directive, grouping: Sequence[int]) -> ContractedDirective:
    return ContractedDirective(d, tuple(grouping))


def group_rounds(d: DirectiveWord, rounds: int) -> ContractedDirective:
    """Contraction whose ``n``-th morphism is the composite of round ``n``."""
    sizes = [len(d.round_morphisms(r)) for r in range(d.start_round, d.start_round + rounds)]
    return contract(d, [s for s in sizes if s])


def directive_morphism(d: Directive, n: int) -> Morphism:
    """The ``n``-th morphism of the expanded directive word."""
    if n < 0:
        raise IndexError("negative index")
    return next(itertools.islice(d.steps(), n, None)).morphism


def expand(d: Directive, count: int) -> list[Step]:
    return list(itertools.islice(d.steps(), count))


def _checked_steps(d: Directive) -> Iterator[Step]:
    previous = None
    for step in d.steps():
        if previous is not None:
            _check_link(previous.morphism, step.morphism)
        yield step
        previous = step


def _lengths_after(vec: Sequence[int], sigma: Morphism) -> list[int]:
    """Row vector of ``|P sigma(b)|`` given ``vec[a] = |P(a)|``."""
    return [sum(vec[c] for c in img.letters) for img in sigma.images]


def telescope_vectors(d: Directive, depth: int) -> list[list[int]]:
    """``[|s0 ... sj(b)| for b]`` at each of the first ``depth`` round ends (exact integers)."""
    out: list[list[int]] = []
    if depth <= 0:
        return out
    vec = None
    for step in _checked_steps(d):
        if vec is None:
            vec = [1] * step.morphism.codomain_size
        vec = _lengths_after(vec, step.morphism)
        if step.cut:
            out.append(list(vec))
            if len(out) == depth:
                return out
    return out  # pragma: no cover - steps() is infinite


def telescope_lengths(d: Directive, depth: int, letter: int | None = None) -> list[int]:
    """Image lengths of ``letter`` (default: the seed) at the first ``depth`` round ends."""
    a = d.seed if letter is None else letter
    return [vec[a] for vec in telescope_vectors(d, depth)]


def window_primitive(d: Directive, r: int, width: int) -> tuple[bool, Matrix]:
    """Positivity of ``M(s_r) ... M(s_{r+width-1})`` over the expanded sequence."""
    if width < 1:
        raise ValueError("window width must be positive")
    steps = list(itertools.islice(d.steps(), r, r + width))
    product = incidence_matrix(steps[0].morphism)
    for step in steps[1:]:
        inner = step.morphism
        outer_domain = len(product[0])
        if inner.codomain_size > outer_domain:
            raise AlphabetMismatchError("window morphisms are not composable")
        factor = incidence_matrix(widen(inner, outer_domain))
        product = mat_mul(product, factor)
    return is_positive(product), product


@dataclass(frozen=True)
class GeneratedPrefix:
    word: Word
    depth_used: int
    rounds_used: int
    telescoped_lengths: tuple[int, ...]
    stability_checked: bool
    provenance: dict = field(default_factory=dict)

    def sidecar(self) -> dict:
        return {
            "length": len(self.word),
            "depth_used": self.depth_used,
            "rounds_used": self.rounds_used,
            "telescoped_lengths": [str(x) for x in self.telescoped_lengths],
            "stability_checked": self.stability_checked,
            **self.provenance,
        }


def _materialize(morphs: Sequence[Morphism], vectors: Sequence[Sequence[int]], seed: int, target: int) -> bytes:
    """First ``target`` letters of ``m0 ... mk(seed)``.

    ``vectors[j][b]`` is ``|m0 ... mj(b)|``; before each application only the
    shortest prefix whose image reaches ``target`` letters is kept.
    """
    x = bytes([seed])
    for j in range(len(morphs) - 1, -1, -1):
        lengths = np.array([min(v, target + 1) for v in vectors[j]], dtype=np.int64)
        cum = np.cumsum(lengths[np.frombuffer(x, dtype=np.uint8)])
        x = x[: int(np.searchsorted(cum, target)) + 1]
        table = [img.letters for img in morphs[j].images]
        x = b"".join(map(table.__getitem__, x))
    return x[:target]


def generate_prefix(d: Directive, length: int, mem_cap: int | None = None) -> GeneratedPrefix:
    """Prefix of length ``length`` of the limit word, checked for stability.

    The first round end whose seed image covers ``length`` letters is
    materialized, together with the round ends just before and after it;
    the three must agree on their common prefix.
    """
    cap = memory_cap() if mem_cap is None else mem_cap
    if length > cap:
        raise MemoryCapError(f"prefix of {length} letters exceeds the memory cap {cap}")
    if length < 0:
        raise ValueError("negative length")
    a = d.seed
    morphs: list[Morphism] = []
    vectors: list[list[int]] = []
    cut_depths: list[int] = []
    exact: list[int] = []
    stalled, best = 0, 0
    reached = None
    vec = None
    for step in _checked_steps(d):
        m = step.morphism
        if vec is None:
            if a >= m.codomain_size:
                raise AlphabetMismatchError(f"seed {a} is outside the first alphabet")
            vec = [1] * m.codomain_size
        vec = _lengths_after(vec, m)
        morphs.append(m)
        vectors.append(vec)
        if not step.cut:
            continue
        if a >= m.domain_size:
            raise AlphabetMismatchError(f"seed {a} is outside the alphabet at depth {len(morphs)}")
        cut_depths.append(len(morphs))
        exact.append(vec[a])
        if reached is not None:
            break
        if vec[a] >= max(length, 1):
            reached = len(cut_depths) - 1
            continue
        if vec[a] > best:
            best, stalled = vec[a], 0
        else:
            stalled += 1
            if stalled > MAX_STALLED_CUTS:
                raise DegenerateDirectiveError(
                    f"image lengths of the seed stop growing at {best} letters"
                )
    candidates = [i for i in (reached - 1, reached, reached + 1) if i >= 0]
    words = []
    for i in candidates:
        depth = cut_depths[i]
        target = min(length, exact[i])
        words.append(_materialize(morphs[:depth], vectors[:depth], a, target))
    for shorter, longer in zip(words, words[1:]):
        common = min(len(shorter), len(longer))
        if shorter[:common] != longer[:common]:
            raise NonConvergentDirectiveError(
                "successive truncations disagree on their common prefix"
            )
    alphabet = morphs[0].codomain_size
    return GeneratedPrefix(
        word=Word(words[candidates.index(reached)], alphabet),
        depth_used=cut_depths[reached],
        rounds_used=reached + 1,
        telescoped_lengths=tuple(exact[: reached + 1]),
        stability_checked=True,
    )


def level_images(d: Directive, letter: int, levels: int, mem_cap: int | None = None) -> list[Word]:
    """``s0 ... sj(letter)`` at each of the first ``levels`` round ends."""
    cap = memory_cap() if mem_cap is None else mem_cap
    morphs: list[Morphism] = []
    vectors: list[list[int]] = []
    out: list[Word] = []
    vec = None
    for step in _checked_steps(d):
        if len(out) == levels:
            break
        m = step.morphism
        vec = _lengths_after(vec if vec is not None else [1] * m.codomain_size, m)
        morphs.append(m)
        vectors.append(vec)
        if step.cut:
            if vec[letter] > cap:
                raise MemoryCapError(f"level image of {vec[letter]} letters exceeds the cap {cap}")
            data = _materialize(morphs, vectors, letter, vec[letter])
            out.append(Word(data, morphs[0].codomain_size))
    return out
