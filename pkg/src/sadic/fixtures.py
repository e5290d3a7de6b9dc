"""Catalog of named morphisms and directive words."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .directive import Block, DirectiveWord, PowerSchedule, generate_prefix
from .errors import UnknownFixtureError
from .morphisms import Morphism, compose_all, fixed_point_prefix
from .words import Word


def _m(name: str, images: Sequence[str], codomain: int | None = None) -> Morphism:
    return Morphism.from_images(images, codomain, name)


MORPHISMS: dict[str, Morphism] = {
    m.name: m
    for m in [
        _m("R0", ["0", "10"]),
        _m("R1", ["01", "1"]),
        _m("L0", ["0", "01"]),
        _m("L1", ["10", "1"]),
        _m("mu", ["01", "10"]),
        _m("gamma", ["001", "1"]),
        _m("E", ["1", "0"]),
        _m("phi", ["01", "0"]),
        _m("rho", ["0010", "1"]),
        _m("theta", ["0120", "11", "222"]),
        _m("beta", ["010", "1112", "2"]),
        _m("M", ["0", "1", "1"]),
        _m("dev_sigma", ["01", "12", "23", "3"]),
        _m("dev_tau", ["0", "1", "2", "2"]),
        _m("ex_sigma", ["021", "101", "212"]),
        _m("ex_tau", ["012", "021", "002"]),
        # letters a1 a2 b1 b2 are 0 1 2 3
        _m("pi_p", ["0", "1", "1", "0"]),
        _m("pi_sigma", ["010", "111", "232", "333"]),
        _m("pi_s", ["0", "2"], codomain=4),
    ]
}


def episturmian_morphisms(size: int, reversed_right: bool = True) -> dict[str, Morphism]:
    """``L_a`` and ``R_a`` over ``size`` letters.

    ``L_a(b) = ab`` for ``b != a``; ``R_a(b)`` is ``ba`` when
    ``reversed_right`` and ``ab`` (identical to ``L_a``) otherwise.
    """
    out = {}
    for a in range(size):
        left = [bytes([a]) if b == a else bytes([a, b]) for b in range(size)]
        right = [bytes([a]) if b == a else (bytes([b, a]) if reversed_right else bytes([a, b])) for b in range(size)]
        out[f"L{a}"] = Morphism.from_images(left, size, f"L{a}")
        out[f"R{a}"] = Morphism.from_images(right, size, f"R{a}")
    return out


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    morphisms: Mapping[str, Morphism]
    directive: DirectiveWord | None = None
    fixed_point: tuple[str, int] | None = None
    params: dict = field(default_factory=dict)

    def generate(self, length: int, mem_cap: int | None = None) -> Word:
        if self.directive is not None:
            return generate_prefix(self.directive, length, mem_cap).word
        name, letter = self.fixed_point
        return fixed_point_prefix(self.morphisms[name], letter, length)


def _table(*names: str) -> dict[str, Morphism]:
    return {n: MORPHISMS[n] for n in names}


def _periodic(name: str, morph: str, description: str) -> Fixture:
    d = DirectiveWord(_table(morph), (Block(morph, PowerSchedule.constant(1)),), name=name)
    return Fixture(name, description, _table(morph), d, (morph, 0))


def _cycle_split(ks: Sequence[int], slots: int, slot: int) -> PowerSchedule:
    """Values ``k[slots*r + slot]`` of the periodic sequence ``ks``, as a cycle in ``r``."""
    ks = list(ks)
    period = len(ks) // math.gcd(len(ks), slots)
    return PowerSchedule.cycle([ks[(slots * r + slot) % len(ks)] for r in range(period)])


def sturmian(ks: Sequence[int] = (1,)) -> Fixture:
    """``L0^k0 R0^k1 L1^k2 R1^k3 L0^k4 ...`` with ``k`` repeating ``ks``."""
    if not ks or min(ks) < 0 or max(ks) == 0:
        raise ValueError("the k-sequence needs non-negative entries, not all zero")
    names = ("L0", "R0", "L1", "R1")
    blocks = tuple(Block(n, _cycle_split(ks, 4, j)) for j, n in enumerate(names))
    d = DirectiveWord(_table(*names), blocks, name="sturmian")
    return Fixture("sturmian", "Sturmian directive over R0, R1, L0, L1", _table(*names), d, params={"k": list(ks)})


def sturmian_random(seed: int, rounds: int = 40, k_max: int = 3) -> Fixture:
    """Sturmian directive with a pseudo-random bounded k-sequence."""
    rng = random.Random(seed)
    names = ("L0", "R0", "L1", "R1")
    ks = [[rng.randint(1, k_max) for _ in range(rounds)] for _ in names]
    blocks = tuple(Block(n, PowerSchedule.cycle(ks[j])) for j, n in enumerate(names))
    d = DirectiveWord(_table(*names), blocks, name="sturmian-random")
    return Fixture("sturmian", "Sturmian directive, random bounded k", _table(*names), d, params={"seed": seed})


def gamma_mu(schedule: PowerSchedule | None = None) -> Fixture:
    """``gamma^k0 mu gamma^k1 mu ...``; the default schedule is ``k_n = n``."""
    schedule = schedule or PowerSchedule.identity()
    blocks = (Block("gamma", schedule), Block("mu", PowerSchedule.constant(1)))
    d = DirectiveWord(_table("gamma", "mu"), blocks, name="gamma-mu")
    return Fixture("gamma-mu", "gamma^k_n mu rounds", _table("gamma", "mu"), d, params={"schedule": schedule.to_json()})


def boshernitzan() -> Fixture:
    """``gamma E gamma^2 E gamma^3 ...``, truncated after even gamma-powers.

    Consecutive truncations start with different letters, so only every
    second one is a prefix of the next.
    """
    blocks = (Block("E", PowerSchedule("constant", 1, (0,))), Block("gamma", PowerSchedule.identity(1)))
    table = _table("gamma", "E")
    table["gammaE"] = compose_all([MORPHISMS["gamma"], MORPHISMS["E"]]).renamed("gammaE")
    table["Egamma"] = compose_all([MORPHISMS["E"], MORPHISMS["gamma"]]).renamed("Egamma")
    d = DirectiveWord(table, blocks, name="boshernitzan", cut_every=2)
    return Fixture("boshernitzan", "gamma E gamma^2 E ... (not sub-linear)", table, d)


def beta_m(schedule: PowerSchedule | None = None) -> Fixture:
    """``M beta M beta^2 M beta^3 ...``."""
    schedule = schedule or PowerSchedule.identity(1)
    blocks = (Block("M", PowerSchedule.constant(1)), Block("beta", schedule))
    d = DirectiveWord(_table("M", "beta"), blocks, name="beta-M")
    return Fixture("beta-M", "M beta^n rounds (s(n) in {1, 2})", _table("M", "beta"), d)


def pi_family() -> Fixture:
    """Rounds ``p sigma^n s`` for ``n = 1, 2, ...``."""
    blocks = (
        Block("pi_p", PowerSchedule.constant(1)),
        Block("pi_sigma", PowerSchedule.identity(1)),
        Block("pi_s", PowerSchedule.constant(1)),
    )
    table = _table("pi_p", "pi_sigma", "pi_s")
    d = DirectiveWord(table, blocks, name="pi-family")
    return Fixture("pi-family", "products p sigma^n s (growing return counts)", table, d)


def primitive_not_lr() -> Fixture:
    """``sigma tau sigma^2 tau sigma^3 tau ...``: primitive but not linearly recurrent."""
    blocks = (Block("ex_sigma", PowerSchedule.identity(1)), Block("ex_tau", PowerSchedule.constant(1)))
    table = _table("ex_sigma", "ex_tau")
    d = DirectiveWord(table, blocks, name="primitive-not-lr")
    return Fixture("primitive-not-lr", "sigma^n tau rounds", table, d)


def deviatov() -> Fixture:
    """``tau(sigma^omega(0))``: a letter-to-letter image of a fixed point."""
    blocks = (Block("dev_tau", PowerSchedule("constant", 0, (1,))), Block("dev_sigma", PowerSchedule.constant(1)))
    table = _table("dev_sigma", "dev_tau")
    d = DirectiveWord(table, blocks, name="deviatov")
    return Fixture("deviatov", "tau applied to the fixed point of sigma", table, d)


def phi_mu_random(seed: int, rounds: int = 24, max_power: int = 3) -> Fixture:
    """A pseudo-random directive over ``{phi, mu}``; every round is nonempty."""
    rng = random.Random(seed)
    phis, mus = [], []
    for _ in range(rounds):
        a, b = rng.randint(0, max_power), rng.randint(0, max_power)
        if a + b == 0:
            a = 1
        phis.append(a)
        mus.append(b)
    blocks = (Block("phi", PowerSchedule.cycle(phis)), Block("mu", PowerSchedule.cycle(mus)))
    d = DirectiveWord(_table("phi", "mu"), blocks, name="phi-mu")
    return Fixture("phi-mu", "random {phi, mu} directive", _table("phi", "mu"), d, params={"seed": seed})


def episturmian(reversed_right: bool = True, size: int = 3) -> Fixture:
    table = episturmian_morphisms(size, reversed_right)
    blocks = tuple(Block(f"L{a}", PowerSchedule.constant(1)) for a in range(size))
    name = "episturmian" if reversed_right else "episturmian-printed"
    d = DirectiveWord(table, blocks, name=name)
    return Fixture(name, "L_a / R_a morphisms; directive cycles L_0 L_1 ...", table, d)


FIXTURES: dict[str, Callable[..., Fixture]] = {
    "thue-morse": lambda: _periodic("thue-morse", "mu", "fixed point of mu = [01, 10]"),
    "fibonacci": lambda: _periodic("fibonacci", "phi", "fixed point of phi = [01, 0]"),
    "chacon": lambda: _periodic("chacon", "rho", "fixed point of rho = [0010, 1]"),
    "theta": lambda: _periodic("theta", "theta", "fixed point of [0120, 11, 222]"),
    "gamma": lambda: _periodic("gamma", "gamma", "fixed point of gamma = [001, 1]"),
    "beta": lambda: _periodic("beta", "beta", "fixed point of [010, 1112, 2]"),
    "sturmian": sturmian,
    "gamma-mu": gamma_mu,
    "boshernitzan": boshernitzan,
    "beta-M": beta_m,
    "pi-family": pi_family,
    "primitive-not-lr": primitive_not_lr,
    "deviatov": deviatov,
    "phi-mu": phi_mu_random,
    "episturmian": lambda: episturmian(True),
    "episturmian-printed": lambda: episturmian(False),
}


def fixture(name: str, **params) -> Fixture:
    try:
        builder = FIXTURES[name]
    except KeyError:
        raise UnknownFixtureError(name) from None
    if name == "phi-mu" and "seed" not in params:
        params["seed"] = 0
    return builder(**params)


def lookup_morphism(name: str) -> Morphism:
    try:
        return MORPHISMS[name]
    except KeyError:
        raise UnknownFixtureError(name) from None
