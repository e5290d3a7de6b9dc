"""Morphism algebra, growth data and the purely morphic classifiers.

A morphism ``[u0, u1, ...]`` sends letter ``i`` to the word ``ui``.  Incidence
matrices use exact Python integers: ``M[a][b]`` counts the letter ``a`` in the
image of ``b``, so each column sums to an image length.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import networkx as nx
import numpy as np

from .errors import (
    AlphabetMismatchError,
    DomainMismatchError,
    ErasingMorphismError,
    FormatError,
    NoGrowthError,
    NotProlongableError,
)
from .words import MAX_ALPHABET, Word, as_word, least_period, max_block

Matrix = tuple[tuple[int, ...], ...]

BETA_TOL = 1e-6
POWER_ITER_TOL = 1e-9
POWER_ITER_CAP = 100_000


@dataclass(frozen=True)
class Morphism:
    images: tuple[Word, ...]
    codomain_size: int
    name: str = ""

    def __post_init__(self):
        if not self.images:
            raise ValueError("a morphism needs at least one letter")
        for b, img in enumerate(self.images):
            if img.letters and max(img.letters) >= self.codomain_size:
                raise ValueError(f"image of {b} leaves the codomain of size {self.codomain_size}")

    @classmethod
    def from_images(
        cls,
        images: Iterable[Union[str, Word, Sequence[int]]],
        codomain_size: int | None = None,
        name: str = "",
    ) -> Morphism:
        words = [as_word(img) for img in images]
        if codomain_size is None:
            codomain_size = max((max(w.letters) + 1 for w in words if len(w)), default=1)
        return cls(tuple(Word(w.letters, codomain_size) for w in words), codomain_size, name)

    @property
    def domain_size(self) -> int:
        return len(self.images)

    def __call__(self, w) -> Word:
        return apply(self, as_word(w))

    def __repr__(self) -> str:
        label = f"{self.name} = " if self.name else ""
        return f"Morphism({label}{format_images(self)})"

    def image_lengths(self) -> list[int]:
        return [len(img) for img in self.images]

    def is_erasing(self) -> bool:
        return any(len(img) == 0 for img in self.images)

    def renamed(self, name: str) -> Morphism:
        return Morphism(self.images, self.codomain_size, name)


def identity(size: int) -> Morphism:
    return Morphism(tuple(Word(bytes([a]), size) for a in range(size)), size, "id")


def apply(sigma: Morphism, w: Word) -> Word:
    """The image ``sigma(w[0]) sigma(w[1]) ...``."""
    if len(w) and max(w.letters) >= sigma.domain_size:
        raise DomainMismatchError(
            f"letter {max(w.letters)} is outside the domain of size {sigma.domain_size}"
        )
    table = [img.letters for img in sigma.images]
    return Word(b"".join(map(table.__getitem__, w.letters)), sigma.codomain_size)


def compose(sigma: Morphism, tau: Morphism) -> Morphism:
    """``sigma o tau``: first ``tau``, then ``sigma``."""
    if tau.codomain_size != sigma.domain_size:
        raise AlphabetMismatchError(
            f"cannot compose: inner codomain {tau.codomain_size} != outer domain {sigma.domain_size}"
        )
    name = f"{sigma.name}{tau.name}" if sigma.name and tau.name else ""
    return Morphism(tuple(apply(sigma, img) for img in tau.images), sigma.codomain_size, name)


def compose_all(morphisms: Sequence[Morphism]) -> Morphism:
    """Left-to-right product ``m0 m1 ... mk`` (``mk`` applied first)."""
    if not morphisms:
        raise ValueError("empty product")
    result = morphisms[-1]
    for m in reversed(morphisms[:-1]):
        result = compose(m, result)
    return result


def power(sigma: Morphism, k: int) -> Morphism:
    if k < 0:
        raise ValueError("negative power")
    if sigma.domain_size != sigma.codomain_size:
        raise AlphabetMismatchError("only endomorphisms have powers")
    result = identity(sigma.domain_size)
    for _ in range(k):
        result = compose(sigma, result)
    return result.renamed(f"{sigma.name}^{k}" if sigma.name else "")


# -- text formats ---------------------------------------------------------

def format_images(sigma: Morphism) -> str:
    parts = []
    for img in sigma.images:
        if sigma.codomain_size <= 10:
            parts.append(img.to_text())
        else:
            parts.append("(" + ",".join(map(str, img.letters)) + ")")
    return "[" + ", ".join(parts) + "]"


def format_morphism(sigma: Morphism) -> str:
    return f"{sigma.name or 'sigma'} = {format_images(sigma)}"


_MORPHISM_RE = re.compile(r"^\s*([^=\s]+)\s*=\s*\[(.*)\]\s*$")


def _split_images(body: str) -> list[str]:
    parts, depth, current = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
        else:
            current.append(ch)
    parts.append("".join(current).strip())
    return parts


def parse_morphism(text: str, codomain_size: int | None = None) -> Morphism:
    """Read ``name = [img0, img1, ...]``.

    Images are digit strings; over alphabets larger than ten an image is a
    parenthesised comma-separated list such as ``(10,3)``.
    """
    match = _MORPHISM_RE.match(text)
    if not match:
        raise FormatError(f"not a morphism: {text!r}")
    name, body = match.groups()
    images = []
    for token in _split_images(body):
        if token.startswith("(") and token.endswith(")"):
            inner = token[1:-1].strip()
            images.append([int(t) for t in inner.split(",")] if inner else [])
        elif token == "" or token.isdigit():
            images.append([int(ch) for ch in token])
        else:
            raise FormatError(f"bad image {token!r} in {text!r}")
    try:
        return Morphism.from_images([bytes(img) for img in images], codomain_size, name)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def morphism_from_json(obj: Mapping, name: str | None = None) -> Morphism:
    images = obj["images"]
    words = []
    for img in images:
        if isinstance(img, str):
            words.append(Word.parse(img, MAX_ALPHABET).letters)
        else:
            words.append(bytes(img))
    try:
        return Morphism.from_images(words, obj.get("codomain"), name or obj.get("name", ""))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def morphism_to_json(sigma: Morphism) -> dict:
    if sigma.codomain_size <= 10:
        images = [img.to_text() for img in sigma.images]
    else:
        images = [list(img.letters) for img in sigma.images]
    return {"name": sigma.name, "images": images, "codomain": sigma.codomain_size}


def load_morphism(text: str) -> Morphism:
    """Accept either the bracket text format or its JSON equivalent."""
    stripped = text.strip()
    if stripped.startswith("{"):
        try:
            return morphism_from_json(json.loads(stripped))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FormatError(f"malformed morphism JSON: {exc}") from exc
    return parse_morphism(stripped)


# -- incidence matrices ---------------------------------------------------

def incidence_matrix(sigma: Morphism) -> Matrix:
    rows = [[0] * sigma.domain_size for _ in range(sigma.codomain_size)]
    for b, img in enumerate(sigma.images):
        for a in img.letters:
            rows[a][b] += 1
    return tuple(tuple(r) for r in rows)


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    if A and len(A[0]) != len(B):
        raise AlphabetMismatchError("matrix dimensions do not match")
    cols = list(zip(*B))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in cols) for row in A)


def row_vec_mul(v: Sequence[int], A: Matrix) -> tuple[int, ...]:
    """``v @ A`` for a row vector ``v``."""
    return tuple(sum(v[a] * A[a][b] for a in range(len(v))) for b in range(len(A[0])))


def is_positive(A: Matrix) -> bool:
    return all(x > 0 for row in A for x in row)


def _occurrence_graph(sigma: Morphism) -> nx.DiGraph:
    """Edge ``b -> a`` whenever ``a`` occurs in ``sigma(b)``; multiplicity as weight."""
    g = nx.DiGraph()
    g.add_nodes_from(range(sigma.domain_size))
    for b, img in enumerate(sigma.images):
        for a in set(img.letters):
            g.add_edge(b, a, weight=img.count(a))
    return g


def _require_endomorphism(sigma: Morphism):
    if sigma.domain_size != sigma.codomain_size:
        raise AlphabetMismatchError("this operation needs domain = codomain")


def _require_non_erasing(sigma: Morphism):
    if sigma.is_erasing():
        raise ErasingMorphismError(f"morphism {sigma.name or sigma!r} is erasing")


def reachable_letters(sigma: Morphism, a: int) -> set[int]:
    """Letters occurring in some ``sigma^k(a)``, ``k >= 0``."""
    _require_endomorphism(sigma)
    g = _occurrence_graph(sigma)
    return {a} | nx.descendants(g, a)


def restrict(sigma: Morphism, letters: Iterable[int]) -> tuple[Morphism, list[int]]:
    """Restriction to a closed set of letters, relabelled densely.

    Returns the restricted morphism and the list mapping new labels to old ones.
    """
    old = sorted(set(letters))
    new_of = {b: i for i, b in enumerate(old)}
    images = []
    for b in old:
        img = sigma.images[b].letters
        if any(c not in new_of for c in img):
            raise ValueError("letter set is not closed under the morphism")
        images.append(bytes(new_of[c] for c in img))
    return Morphism.from_images(images, len(old), sigma.name), old


# -- predicates -----------------------------------------------------------

@dataclass(frozen=True)
class MorphismPredicates:
    non_erasing: bool
    uniform: bool
    expansive: bool
    proper: bool
    primitive: bool
    primitivity_exponent: int | None
    strongly_primitive: bool


def primitivity_exponent(sigma: Morphism) -> int | None:
    """Least ``k <= (d-1)**2 + 1`` with ``M**k`` strictly positive, else ``None``."""
    _require_endomorphism(sigma)
    d = sigma.domain_size
    M = incidence_matrix(sigma)
    boolean = tuple(tuple(min(x, 1) for x in row) for row in M)
    P = boolean
    for k in range(1, (d - 1) ** 2 + 2):
        if is_positive(P):
            return k
        P = tuple(tuple(min(x, 1) for x in row) for row in mat_mul(P, boolean))
    return None


def is_strongly_primitive(sigma: Morphism) -> bool:
    """Every letter used by some image occurs in every image."""
    used = set().union(*(img.letter_set() for img in sigma.images))
    return bool(used) and all(used <= img.letter_set() for img in sigma.images)


def predicates(sigma: Morphism) -> MorphismPredicates:
    lengths = sigma.image_lengths()
    non_erasing = min(lengths) > 0
    firsts = {img.letters[:1] for img in sigma.images}
    lasts = {img.letters[-1:] for img in sigma.images}
    proper = non_erasing and len(firsts) == 1 and len(lasts) == 1
    if sigma.domain_size == sigma.codomain_size:
        exponent = primitivity_exponent(sigma)
    else:
        exponent = None
    return MorphismPredicates(
        non_erasing=non_erasing,
        uniform=len(set(lengths)) == 1,
        expansive=min(lengths) >= 2,
        proper=proper,
        primitive=exponent is not None,
        primitivity_exponent=exponent,
        strongly_primitive=is_strongly_primitive(sigma),
    )


# -- bounded letters and growth -------------------------------------------

def bounded_letters(sigma: Morphism) -> frozenset[int]:
    """Letters ``b`` with ``|sigma^n(b)|`` bounded.

    ``b`` grows iff it reaches a letter that lies on a cycle of the
    occurrence graph and whose image has length at least two.
    """
    _require_endomorphism(sigma)
    _require_non_erasing(sigma)
    g = _occurrence_graph(sigma)
    on_cycle = set()
    for comp in nx.strongly_connected_components(g):
        if len(comp) > 1 or any(g.has_edge(c, c) for c in comp):
            on_cycle |= comp
    branching = {c for c in on_cycle if len(sigma.images[c]) >= 2}
    bounded = set()
    for b in range(sigma.domain_size):
        if not (({b} | nx.descendants(g, b)) & branching):
            bounded.add(b)
    return frozenset(bounded)


def spectral_radius(A: Sequence[Sequence[int]]) -> float:
    """Perron root of an irreducible non-negative matrix by power iteration.

    Iterates on ``I + A``, which is primitive, so convergence does not depend
    on the period of ``A``; stops when the Collatz-Wielandt bounds meet.
    """
    B = np.asarray(A, dtype=float)
    n = B.shape[0]
    if n == 1:
        return float(B[0, 0])
    if not B.any():
        return 0.0
    B = B + np.eye(n)
    v = np.ones(n)
    lo = hi = 0.0
    for _ in range(POWER_ITER_CAP):
        u = B @ v
        ratios = u / v
        lo, hi = ratios.min(), ratios.max()
        if hi - lo < POWER_ITER_TOL * max(1.0, hi):
            break
        v = u / u.max()
    return float((lo + hi) / 2 - 1.0)


class Growth(str, enum.Enum):
    NOT_EVERYWHERE_GROWING = "not-everywhere-growing"
    QUASI_UNIFORM = "quasi-uniform"
    POLYNOMIALLY_DIVERGING = "polynomially-diverging"
    EXPONENTIALLY_DIVERGING = "exponentially-diverging"


@dataclass(frozen=True)
class GrowthClass:
    """Per-letter growth ``|sigma^n(a)| = Theta(n**alpha[a] * beta[a]**n)`` and its class."""

    kind: Growth
    alpha: dict[int, int]
    beta: dict[int, float]
    bounded_letters: frozenset[int] = frozenset()

    @property
    def common_beta(self) -> float | None:
        values = list(self.beta.values())
        if values and max(values) - min(values) < BETA_TOL:
            return max(values)
        return None


def growth_data(sigma: Morphism) -> tuple[dict[int, int], dict[int, float]]:
    """Exponents ``alpha`` and bases ``beta`` for every letter, from the SCC condensation."""
    _require_endomorphism(sigma)
    _require_non_erasing(sigma)
    g = _occurrence_graph(sigma)
    M = incidence_matrix(sigma)
    cond = nx.condensation(g)
    radius = {}
    for node, data in cond.nodes(data=True):
        members = sorted(data["members"])
        if len(members) == 1 and not g.has_edge(members[0], members[0]):
            radius[node] = 0.0
        else:
            sub = [[M[a][b] for b in members] for a in members]
            radius[node] = spectral_radius(sub)
    order = list(reversed(list(nx.topological_sort(cond))))
    best = {}
    for node in order:
        best[node] = max([radius[node]] + [best[s] for s in cond.successors(node)])

    def chain(node, beta, memo):
        if node not in memo:
            here = 1 if abs(radius[node] - beta) < BETA_TOL else 0
            memo[node] = here + max([0] + [chain(s, beta, memo) for s in cond.successors(node)])
        return memo[node]

    alpha, beta = {}, {}
    memos: dict[float, dict] = {}
    for a in range(sigma.domain_size):
        node = cond.graph["mapping"][a]
        b = best[node]
        memo = memos.setdefault(round(b / BETA_TOL), {})
        alpha[a] = chain(node, b, memo) - 1
        beta[a] = b
    return alpha, beta


def growth_classify(sigma: Morphism) -> GrowthClass:
    bounded = bounded_letters(sigma)
    alpha, beta = growth_data(sigma)
    if bounded:
        return GrowthClass(Growth.NOT_EVERYWHERE_GROWING, alpha, beta, bounded)
    values = list(beta.values())
    if max(values) - min(values) >= BETA_TOL:
        kind = Growth.EXPONENTIALLY_DIVERGING
    elif any(alpha.values()):
        kind = Growth.POLYNOMIALLY_DIVERGING
    else:
        kind = Growth.QUASI_UNIFORM
    return GrowthClass(kind, alpha, beta)


def iterate_lengths(sigma: Morphism, n: int) -> list[tuple[int, ...]]:
    """``[|sigma^k(b)| for b]`` for ``k = 0..n`` using exact integer vectors."""
    _require_endomorphism(sigma)
    M = incidence_matrix(sigma)
    vec = tuple([1] * sigma.domain_size)
    out = [vec]
    for _ in range(n):
        vec = row_vec_mul(vec, M)
        out.append(vec)
    return out


# -- fixed points ---------------------------------------------------------

def fixed_point_prefix(sigma: Morphism, a: int, length: int) -> Word:
    """First ``length`` letters of the fixed point ``sigma^omega(a)``."""
    _require_endomorphism(sigma)
    _require_non_erasing(sigma)
    if not sigma.images[a].letters.startswith(bytes([a])):
        raise NotProlongableError(f"image of {a} does not start with {a}")
    if a in bounded_letters(sigma):
        raise NoGrowthError(f"letter {a} is bounded; sigma^omega({a}) is finite")
    table = [img.letters for img in sigma.images]
    out = bytearray(table[a])
    done = 1
    while len(out) < length:
        todo = len(out)
        out += b"".join(map(table.__getitem__, out[done:todo]))
        done = todo
    return Word(bytes(out[:length]), sigma.codomain_size)


def iterate_word(sigma: Morphism, w: Word, n: int) -> Word:
    for _ in range(n):
        w = apply(sigma, w)
    return w


# -- purely morphic classifiers ------------------------------------------

class PansiotLabel(str, enum.Enum):
    ULTIMATELY_PERIODIC = "ultimately-periodic"
    LINEAR = "linear"
    N_LOG_LOG_N = "n-log-log-n"
    N_LOG_N = "n-log-n"
    QUADRATIC = "quadratic"
    CASE3_DEFERRED = "case3-deferred"


@dataclass(frozen=True)
class PansiotClass:
    label: PansiotLabel
    growth: GrowthClass
    empirical: bool
    evidence: dict = field(default_factory=dict)


def looks_ultimately_periodic(w: Word) -> tuple[bool, int]:
    """Heuristic: the second half of ``w`` repeats a period at least three times.

    The same period must also cover the last three quarters, which keeps
    words with bounded but large critical exponents (Sturmian words reach
    about 3.6) from being reported.
    """
    n = len(w)
    tail = w[n // 2 :]
    if len(tail) < 6:
        return False, 0
    p = least_period(tail)
    if 3 * p > len(tail):
        return False, p
    longer = w.letters[n // 4 :]
    ok = all(longer[i] == longer[i + p] for i in range(len(longer) - p))
    return ok, p


def _prefix_of_iterate(sigma: Morphism, a: int, budget: int) -> tuple[int, list[int]]:
    """Largest ``n`` with ``|sigma^n(a)| <= budget`` and the lengths up to it."""
    lengths = [1]
    M = incidence_matrix(sigma)
    vec = [1] * sigma.domain_size
    while True:
        vec = list(row_vec_mul(vec, M))
        if vec[a] > budget or len(lengths) > 200:
            break
        lengths.append(vec[a])
    return len(lengths) - 1, lengths


def pansiot_classify(sigma: Morphism, a: int, prefix_budget: int = 100_000) -> PansiotClass:
    """Complexity class of ``sigma^omega(a)`` following Pansiot's case analysis.

    Only letters occurring in the fixed point are taken into account.  For
    morphisms that are not everywhere growing, the factors over bounded
    letters are judged infinite when the longest bounded block grows
    between two iterate-aligned prefixes; that verdict is flagged empirical.
    """
    _require_endomorphism(sigma)
    _require_non_erasing(sigma)
    w = fixed_point_prefix(sigma, a, prefix_budget)
    sub, old = restrict(sigma, reachable_letters(sigma, a))
    growth = growth_classify(sub)
    periodic, period = looks_ultimately_periodic(w)
    evidence: dict = {"letters": old, "prefix": len(w)}
    if periodic:
        evidence["period"] = period
        return PansiotClass(PansiotLabel.ULTIMATELY_PERIODIC, growth, True, evidence)
    if growth.kind is not Growth.NOT_EVERYWHERE_GROWING:
        label = {
            Growth.QUASI_UNIFORM: PansiotLabel.LINEAR,
            Growth.POLYNOMIALLY_DIVERGING: PansiotLabel.N_LOG_LOG_N,
            Growth.EXPONENTIALLY_DIVERGING: PansiotLabel.N_LOG_N,
        }[growth.kind]
        return PansiotClass(label, growth, False, evidence)
    bounded = [old[b] for b in growth.bounded_letters]
    n, lengths = _prefix_of_iterate(sigma, a, prefix_budget)
    m = max(1, n - sub.domain_size)
    small, large = lengths[m], lengths[n]
    block_small = max_block(w[:small], bounded)
    block_large = max_block(w[:large], bounded)
    evidence.update(
        bounded_letters=bounded,
        scales=(small, large),
        bounded_blocks=(block_small, block_large),
    )
    if block_large > block_small:
        return PansiotClass(PansiotLabel.QUADRATIC, growth, True, evidence)
    return PansiotClass(PansiotLabel.CASE3_DEFERRED, growth, True, evidence)


@dataclass(frozen=True)
class RecurrenceVerdict:
    verdict: str  # "uniformly-recurrent" | "not-uniformly-recurrent" | "inconclusive"
    witness: int | None
    gap_bound: int | None
    empirical: bool
    evidence: dict = field(default_factory=dict)


def max_gap(w: Word, letter: int) -> int | None:
    """Largest distance between consecutive occurrences of ``letter``; None if it occurs < 2 times."""
    pos = np.flatnonzero(np.frombuffer(w.letters, dtype=np.uint8) == letter)
    if len(pos) < 2:
        return None
    return int(np.diff(pos).max())


def uniform_recurrence_check(
    sigma: Morphism, a: int, prefix_budget: int = 100_000
) -> RecurrenceVerdict:
    """Damanik-Lenz test on ``sigma^omega(a)``.

    Looks for a growing letter whose iterates reach every letter of the
    fixed point and whose gaps agree on the half prefix and the full prefix.
    """
    _require_endomorphism(sigma)
    _require_non_erasing(sigma)
    w = fixed_point_prefix(sigma, a, prefix_budget)
    half = w[: len(w) // 2]
    alphabet = reachable_letters(sigma, a)
    bounded = bounded_letters(sigma)
    growing = sorted(alphabet - bounded)
    g = _occurrence_graph(sigma)
    evidence = {}
    candidates = []
    for b in growing:
        covers = alphabet <= ({b} | nx.descendants(g, b))
        gaps = (max_gap(half, b), max_gap(w, b))
        evidence[b] = {"reaches_all": covers, "gaps": gaps}
        if covers:
            candidates.append(b)
    if not candidates:
        return RecurrenceVerdict("not-uniformly-recurrent", None, None, False, evidence)
    undecided = False
    for b in candidates:
        g_half, g_full = evidence[b]["gaps"]
        if g_half is None or g_full is None:
            undecided = True
        elif g_half == g_full:
            return RecurrenceVerdict("uniformly-recurrent", b, g_full, True, evidence)
    if undecided:
        return RecurrenceVerdict("inconclusive", None, None, True, evidence)
    return RecurrenceVerdict("not-uniformly-recurrent", None, None, True, evidence)
