"""Desk-scale verification suites, one per named target.

Each suite measures the quantities behind one claim about a fixture and
returns a :class:`SuiteResult` listing every check with its measured value.
A suite passes when all checks pass and it ran within its time budget.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .complexity import (
    bispecial_report,
    cassaigne_identity_check,
    complexity_profile,
    growth_fit,
    special_counts,
    special_factors,
    sublinear_constant,
)
from .directive import PowerSchedule, generate_prefix, level_images, telescope_lengths, window_primitive
from .errors import InsufficientRangeError, SadicError, UnknownFixtureError
from .fixtures import (
    MORPHISMS,
    beta_m,
    boshernitzan,
    fixture,
    gamma_mu,
    phi_mu_random,
    pi_family,
    primitive_not_lr,
    sturmian,
)
from .index import FactorIndex
from .morphisms import Growth, PansiotLabel, growth_classify, pansiot_classify
from .oracles import brute_pow_set, brute_profile, brute_return_words, brute_special, random_corpus
from .returns import (
    min_return_count,
    pow_set,
    power_richness,
    recurrence_constant,
    return_profile,
    return_words,
    richness_lower_bound,
)
from .words import Word, occurrences

# Common bound for the recurrence constant of {phi, mu} directive words.
PHI_MU_RECURRENCE_BOUND = 16.0


@dataclass(frozen=True)
class Check:
    name: str
    claim: str
    measured: object
    passed: bool

    def row(self) -> dict:
        return {"check": self.name, "claim": self.claim, "measured": _render(self.measured), "passed": int(self.passed)}


@dataclass
class SuiteResult:
    target: str
    criterion: int
    title: str
    time_limit: float
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def in_time(self) -> bool:
        return self.seconds <= self.time_limit

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks) and self.in_time

    def add(self, name: str, claim: str, measured, passed: bool) -> None:
        self.checks.append(Check(name, claim, measured, bool(passed)))

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        failed = [c.name for c in self.checks if not c.passed]
        extra = f" failed: {', '.join(failed)}" if failed else ""
        slow = "" if self.in_time else f" over budget {self.time_limit:g}s"
        return f"[{status}] {self.criterion:2d} {self.target}: {self.title} ({self.seconds:.1f}s){extra}{slow}"


def _render(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, (list, tuple)) and len(value) > 12:
        return f"{list(value[:12])}... ({len(value)} items)"
    return str(value)


def _mismatches(profile, expected: Callable[[int], int], upto: int) -> list[int]:
    top = min(upto, profile.validity_horizon, profile.n_max)
    return [n for n in range(top + 1) if profile.p[n] != expected(n)]


# -- suites ----------------------------------------------------------------

def verify_sturmian(res: SuiteResult, k: Sequence[int] = (1,)) -> None:
    w = sturmian(k).generate(100_000)
    index = FactorIndex(w)
    profile = complexity_profile(w, 200, index)
    bad = _mismatches(profile, lambda n: n + 1, 200)
    res.add("horizon", "certified horizon reported", profile.validity_horizon, profile.validity_horizon >= 40)
    res.add("p=n+1", "p(n) = n+1 for certified n <= 200", bad[:10] or "no mismatch", not bad)
    wrong = []
    for n in range(1, min(40, profile.validity_horizon) + 1):
        prof = return_profile(w, n, index)
        if (prof.occurrences < 2).any() or (prof.counts != 2).any():
            wrong.append((n, sorted(set(prof.counts.tolist()))))
    res.add("two-returns", "every certified factor of length <= 40 has 2 return words", wrong or "all 2", not wrong)


def verify_chacon(res: SuiteResult) -> None:
    w = fixture("chacon").generate(100_000)
    profile = complexity_profile(w, 200)
    bad = _mismatches(profile, lambda n: 2 * n + 1, 200)
    measured = {"horizon": profile.validity_horizon, "p(0..6)": list(profile.p[:7]), "mismatched n": bad[:8]}
    res.add("p=2n+1", "p(n) = 2n+1 for certified n <= 200", measured, not bad)


def verify_thue_morse(res: SuiteResult) -> None:
    expected = [2, 4, 6, 10, 12, 16, 20, 22]
    w = fixture("thue-morse").generate(100_000)
    index = FactorIndex(w)
    profile = complexity_profile(w, 300, index)
    got = list(profile.p[1:9])
    oracle, _ = brute_profile(w[:4096], 8)
    res.add("p(1..8)", f"p(1..8) = {expected}", got, got == expected and profile.validity_horizon >= 8)
    res.add("oracle", "brute-force counts agree", oracle[1:9], oracle[1:9] == got)
    report = bispecial_report(w, profile.validity_horizon, index)
    residuals = cassaigne_identity_check(profile, report)
    nonzero = {n: r for n, r in residuals.items() if r}
    res.add("cassaigne", "s(n+1) - s(n) = sum of m(u) over |u| = n on the certified range", nonzero or 0, not nonzero)


def verify_gamma_mu(res: SuiteResult) -> None:
    fx = gamma_mu()
    ells = telescope_lengths(fx.directive, 4)
    w = fx.generate(1_000_000)
    index = FactorIndex(w)
    profile = complexity_profile(w, 5000, index)
    rows = []
    ok = True
    for ell in ells:
        certified = ell <= profile.validity_horizon
        value = profile.p[ell] if ell <= profile.n_max else None
        rows.append((ell, value, 4 * ell - 2, certified))
        ok &= certified and value is not None and value <= 4 * ell - 2
    res.add("p(l_n)", "p(l_n) <= 4 l_n - 2 for n = 0..3 (identity schedule)", rows, ok)

    w0 = gamma_mu(PowerSchedule.constant(0)).generate(1_000_000)
    profile0 = complexity_profile(w0, 5000)
    C = sublinear_constant(profile0)
    res.add("sublinear k=0", "p(n) <= C n on the certified range with C < 8 (k = 0)",
            {"C": C, "horizon": profile0.validity_horizon}, C < 8)

    upto = min(profile.validity_horizon, 300)
    counts = special_counts(w, upto, "right", index)
    peak = int(np.argmax(counts))
    res.add("right specials", "right-special count exceeds 3 at some certified length",
            {"max": counts[peak], "at n": peak}, counts[peak] > 3)


def _b_family(k: int) -> list:
    beta, M = MORPHISMS["beta"], MORPHISMS["M"]
    seq = []
    for j in range(1, k + 1):
        seq += [M] + [beta] * j
    return seq


def _apply_until(seq: Sequence, w: Word, limit: int) -> Word | None:
    """``seq[0] ... seq[-1](w)``, or None once the word exceeds ``limit`` letters."""
    for sigma in reversed(seq):
        w = sigma(w)
        if len(w) > limit:  # every morphism here is non-erasing
            return None
    return w


def beta_m_families(max_length: int) -> tuple[set[bytes], set[bytes]]:
    """Words ``B_k M beta^i(1)`` and ``B_k M beta^i(101)`` (``0 <= i <= k``) up to ``max_length``."""
    beta, M = MORPHISMS["beta"], MORPHISMS["M"]
    strong, weak = set(), set()
    k = 0
    while True:
        grew = False
        for i in range(k + 1):
            seq = _b_family(k) + [M] + [beta] * i
            for target, seed in ((strong, "1"), (weak, "101")):
                u = _apply_until(seq, Word.parse(seed, 3), max_length)
                if u is not None:
                    target.add(u.letters)
                    grew = True
        if not grew:
            return strong, weak
        k += 1


def verify_beta_m(res: SuiteResult) -> None:
    fx = beta_m(PowerSchedule("constant", 6, (1, 2, 3, 4, 5)))
    w = fx.generate(1_000_000)
    index = FactorIndex(w)
    profile = complexity_profile(w, 500, index)
    top = min(500, profile.validity_horizon)
    values = sorted(set(profile.s[:top]))
    res.add("horizon", "n <= 500 certified", profile.validity_horizon, profile.validity_horizon >= 500)
    res.add("s(n)", "s(n) in {1, 2} for certified n <= 500", values, set(values) <= {1, 2})
    report = bispecial_report(w, 50, index)
    one, onezeroone = report.find("1"), report.find("101")
    res.add("m(1)", "m(1) = +1", one.m if one else None, one is not None and one.m == 1)
    res.add("m(101)", "m(101) = -1", onezeroone.m if onezeroone else None, onezeroone is not None and onezeroone.m == -1)
    strong, weak = beta_m_families(50)
    seen_strong = {e.word.letters for e in report.strong}
    seen_weak = {e.word.letters for e in report.weak}
    res.add("strong family", "strong bispecials up to length 50 are the words B_k M beta^i(1)",
            sorted(len(u) for u in seen_strong), seen_strong == strong)
    res.add("weak family", "weak bispecials up to length 50 are the words B_k M beta^i(101)",
            sorted(len(u) for u in seen_weak), seen_weak == weak)


def verify_boshernitzan(res: SuiteResult) -> None:
    w = boshernitzan().generate(1_000_000)
    index = FactorIndex(w)
    profile = complexity_profile(w, len(w) // 4, index)
    top = min(profile.validity_horizon, profile.n_max - 1)
    s = np.array(profile.s[: top])
    peak = int(np.argmax(s))
    specials = len(special_factors(w, peak, "right", index))
    res.add("right specials", "right-special count reaches 4 at some certified length",
            {"count": specials, "at n": peak, "horizon": profile.validity_horizon}, specials >= 4)
    fit = growth_fit(profile)
    res.add("not linear", "growth fit rejects the linear model",
            {"best": fit.best_model, "linear/best residual": fit.residuals["linear"] / fit.residuals[fit.best_model]},
            fit.rejects("linear"))


def verify_phi_mu(res: SuiteResult, runs: int = 20, seed: int = 2024) -> None:
    rng = random.Random(seed)
    forbidden, constants = [], []
    for _ in range(runs):
        run_seed = rng.randrange(2**31)
        w = phi_mu_random(run_seed).generate(100_000)
        index = FactorIndex(w)
        profile = complexity_profile(w, 30, index)
        for u in (b"\x01\x01\x01", b"\x00\x00\x00\x00"):
            if len(u) <= profile.validity_horizon and w.letters.find(u) != -1:
                forbidden.append((run_seed, Word(u, 2).to_text()))
        constants.append(recurrence_constant(w, 30, index)[0])
    res.add("forbidden", "no certified factor 111 or 0000", forbidden or "none", not forbidden)
    res.add("recurrence", f"recurrence constant <= {PHI_MU_RECURRENCE_BOUND:g} in every run",
            {"max": max(constants), "min": min(constants)}, max(constants) <= PHI_MU_RECURRENCE_BOUND)


def verify_pansiot(res: SuiteResult) -> None:
    expected = {
        "gamma": PansiotLabel.QUADRATIC,
        "beta": PansiotLabel.QUADRATIC,
        "theta": PansiotLabel.N_LOG_N,
        "phi": PansiotLabel.LINEAR,
        "mu": PansiotLabel.LINEAR,
    }
    for name, label in expected.items():
        got = pansiot_classify(MORPHISMS[name], 0).label
        res.add(f"label {name}", f"{name} is {label.value}", got.value, got is label)
    gc = growth_classify(MORPHISMS["theta"])
    betas = sorted(set(round(b, 6) for b in gc.beta.values()))
    close = len(betas) == 2 and abs(betas[0] - 2) < 1e-6 and abs(betas[1] - 3) < 1e-6
    res.add("theta growth", "theta exponentially diverging with beta values 2 and 3",
            {"kind": gc.kind.value, "betas": betas}, gc.kind is Growth.EXPONENTIALLY_DIVERGING and close)
    for name, model in (("gamma", "quadratic"), ("theta", "n-log-n")):
        w = fixture(name).generate(1_000_000)
        profile = complexity_profile(w, 5000)
        try:
            fit = growth_fit(profile)
        except InsufficientRangeError as exc:
            res.add(f"fit {name}", f"growth fit picks {model} with margin >= 1.2", str(exc), False)
            continue
        res.add(f"fit {name}", f"growth fit picks {model} with margin >= 1.2",
                {"label": fit.label, "margin": fit.margin, "range": fit.fit_range}, fit.label == model)


def verify_pi_family(res: SuiteResult) -> None:
    fx = pi_family()
    lengths = telescope_lengths(fx.directive, 6)
    expected = [3 ** (k * (k + 1) // 2) for k in range(1, 7)]
    res.add("lengths", "telescoped lengths are 3^(k(k+1)/2) for k = 1..6", lengths, lengths == expected)
    w = fx.generate(1_000_000)
    index = FactorIndex(w)
    found = min_return_count(w, 27, index)
    baseline = min_return_count(sturmian((1,)).generate(100_000), 27)
    res.add("returns", "min return count at length 27 is >= 2 and above the Sturmian baseline",
            {"pi": found.count, "sturmian": baseline.count}, found.count >= 2 and found.count > baseline.count)
    u = level_images(fx.directive, 0, 1)[0]
    cap = min(27, len(w) // len(u))
    got = pow_set(w, u, cap).exponents
    oracle = brute_pow_set(w[:20_000], u, cap)
    res.add("Pow", f"Pow({u.to_text()}) = {{3}}", {"scan": list(got), "oracle on 2e4 letters": list(oracle)},
            got == (3,))


def verify_power_richness(res: SuiteResult) -> None:
    C = Fraction(2)
    fx = gamma_mu()
    w = fx.generate(1_000_000)
    candidates = level_images(fx.directive, 1, 4)
    verdict = power_richness(w, C, candidates)
    res.add("gamma-mu flagged", "level images of 1 witness non-sub-linear complexity",
            [(len(x.factor), x.k, x.covered) for x in verdict.witnesses], verdict.flag)
    formula_ok = all(
        x.lower_bound == Fraction(len(x.factor), 2) * ((C - 1) / C * x.k) * ((C - 1) / C * x.k - 1)
        for x in verdict.witnesses
    )
    res.add("bounds", "lower bounds equal (|u|/2) x (x - 1) with x = (C-1) k / C",
            [str(x.lower_bound) for x in verdict.witnesses], formula_ok)
    fib = fixture("fibonacci")
    wf = fib.generate(1_000_000)
    fib_candidates = level_images(fib.directive, 0, 12)[2:]
    fib_verdict = power_richness(wf, C, fib_candidates)
    res.add("fibonacci clear", "Fibonacci is not flagged",
            [(len(x.factor), x.k) for x in fib_verdict.witnesses], not fib_verdict.flag)


def verify_oracles(res: SuiteResult, count: int = 200, max_length: int = 2000, seed: int = 7) -> None:
    rng = random.Random(seed)
    failures = {"profile": [], "special": [], "returns": [], "pow": []}
    for j, w in enumerate(random_corpus(count, max_length, seed)):
        index = FactorIndex(w)
        n_max = min(len(w), 48)
        profile = complexity_profile(w, n_max, index)
        p, horizon = brute_profile(w, n_max)
        if list(profile.p) != p or profile.validity_horizon != horizon:
            failures["profile"].append(j)
        for n in rng.sample(range(0, min(len(w), 12) + 1), k=min(3, min(len(w), 12) + 1)):
            for side in ("left", "right"):
                fast = {sf.word.letters: sf.extensions for sf in special_factors(w, n, side, index)}
                if fast != brute_special(w, n, side):
                    failures["special"].append((j, n, side))
        for _ in range(3):
            n = rng.randint(1, min(len(w), 6))
            start = rng.randrange(len(w) - n + 1)
            u = w[start : start + n]
            if len(occurrences(w, u)) < 2:
                continue
            if {r.letters for r in return_words(w, u).returns} != brute_return_words(w, u):
                failures["returns"].append((j, u.to_text()))
        n = rng.randint(1, min(len(w), 3))
        start = rng.randrange(len(w) - n + 1)
        u = w[start : start + n]
        cap = min(6, len(w) // n)
        if pow_set(w, u, cap).exponents != brute_pow_set(w, u, cap):
            failures["pow"].append((j, u.to_text()))
    for name, bad in failures.items():
        res.add(name, f"{name} agrees with the brute-force oracle on {count} words", bad or "all agree", not bad)


def verify_primitive_not_lr(res: SuiteResult) -> None:
    d = primitive_not_lr().directive
    windows = [window_primitive(d, r, 2)[0] for r in range(12)]
    res.add("windows", "every width-2 window of the first 12 is primitive", windows, all(windows))
    constants = []
    for depth in (3, 4, 5):
        w = generate_prefix(d.shifted(depth), 500_000).word
        constants.append(recurrence_constant(w, 30)[0])
    increasing = all(a < b for a, b in zip(constants, constants[1:]))
    res.add("growing constant", "recurrence constant grows strictly over depths 3, 4, 5", constants, increasing)


@dataclass(frozen=True)
class Target:
    criterion: int
    title: str
    time_limit: float
    run: Callable[..., None]


TARGETS: dict[str, Target] = {
    "sturmian": Target(1, "Sturmian complexity and return words", 5, verify_sturmian),
    "chacon": Target(2, "Chacon complexity", 5, verify_chacon),
    "thue-morse": Target(3, "Thue-Morse complexity and bilateral orders", 5, verify_thue_morse),
    "gamma-mu": Target(4, "gamma/mu directive: sub-linear bounds", 60, verify_gamma_mu),
    "beta-M": Target(5, "beta/M directive: first difference and bispecials", 60, verify_beta_m),
    "boshernitzan": Target(6, "gamma/E directive: not sub-linear", 60, verify_boshernitzan),
    "phi-mu": Target(7, "{phi, mu} directives: bounded recurrence", 120, verify_phi_mu),
    "pansiot": Target(8, "purely morphic classification", 60, verify_pansiot),
    "pi-family": Target(9, "pi directive: many return words", 120, verify_pi_family),
    "power-richness": Target(10, "power-richness detector", 60, verify_power_richness),
    "oracles": Target(11, "fast algorithms against brute force", 120, verify_oracles),
    "primitive-not-lr": Target(12, "primitive directive, not linearly recurrent", 60, verify_primitive_not_lr),
}


def run_target(name: str, **options) -> SuiteResult:
    try:
        target = TARGETS[name]
    except KeyError:
        raise UnknownFixtureError(f"unknown verification target {name!r}") from None
    res = SuiteResult(name, target.criterion, target.title, target.time_limit)
    start = time.perf_counter()
    try:
        target.run(res, **options)
    except SadicError as exc:
        res.add("error", "suite runs to completion", f"{type(exc).__name__}: {exc}", False)
    res.seconds = time.perf_counter() - start
    return res
