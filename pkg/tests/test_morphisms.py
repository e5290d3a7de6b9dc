import itertools

import pytest
from hypothesis import given, settings, strategies as st

from sadic.errors import (
    AlphabetMismatchError,
    DomainMismatchError,
    ErasingMorphismError,
    FormatError,
    NoGrowthError,
    NotProlongableError,
)
from sadic.fixtures import MORPHISMS
from sadic.morphisms import (
    Growth,
    Morphism,
    PansiotLabel,
    apply,
    bounded_letters,
    compose,
    compose_all,
    fixed_point_prefix,
    format_morphism,
    growth_classify,
    identity,
    incidence_matrix,
    iterate_lengths,
    load_morphism,
    mat_mul,
    morphism_from_json,
    morphism_to_json,
    pansiot_classify,
    parse_morphism,
    power,
    predicates,
    restrict,
    spectral_radius,
    uniform_recurrence_check,
)
from sadic.words import Word


def M(*images, codomain=None):
    return Morphism.from_images(images, codomain)


mu, gamma, E, phi, rho = (MORPHISMS[n] for n in ("mu", "gamma", "E", "phi", "rho"))
beta, theta = MORPHISMS["beta"], MORPHISMS["theta"]


@st.composite
def endomorphisms(draw, max_size=4, max_len=4, non_erasing=True):
    size = draw(st.integers(1, max_size))
    lo = 1 if non_erasing else 0
    images = [bytes(draw(st.lists(st.integers(0, size - 1), min_size=lo, max_size=max_len))) for _ in range(size)]
    return Morphism.from_images(images, size)


# -- application and composition ----------------------------------------------

@pytest.mark.parametrize(
    "sigma, word, expected", [(mu, "01", "0110"), (gamma, "01", "0011"), (E, "110", "001")]
)
def test_apply_examples(sigma, word, expected):
    assert apply(sigma, Word.parse(word, 2)).to_text() == expected


def test_apply_outside_domain():
    with pytest.raises(DomainMismatchError):
        apply(mu, Word.parse("2"))


def test_compose_examples():
    assert [w.to_text() for w in compose(gamma, E).images] == ["1", "001"]
    assert [w.to_text() for w in compose(E, gamma).images] == ["110", "0"]
    assert compose(identity(2), mu).images == mu.images


def test_compose_mismatch():
    with pytest.raises(AlphabetMismatchError):
        compose(mu, theta)


def test_compose_all_and_power():
    gEg = compose_all([gamma, E, gamma])
    assert [w.to_text() for w in gEg.images] == ["11001", "001"]
    assert power(mu, 3).images == (Word.parse("01101001"), Word.parse("10010110"))
    assert power(mu, 0).images == identity(2).images


@given(endomorphisms(), st.data())
def test_incidence_matrix_is_multiplicative(sigma, data):
    size = sigma.domain_size
    tau = data.draw(endomorphisms(max_size=size).filter(lambda t: t.domain_size == size))
    assert incidence_matrix(compose(sigma, tau)) == mat_mul(incidence_matrix(sigma), incidence_matrix(tau))


@given(endomorphisms(non_erasing=False), st.data())
def test_image_length_is_weighted_letter_count(sigma, data):
    letters = data.draw(st.lists(st.integers(0, sigma.domain_size - 1), max_size=20))
    w = Word(bytes(letters), sigma.domain_size)
    lengths = sigma.image_lengths()
    assert len(apply(sigma, w)) == sum(w.count(b) * lengths[b] for b in range(sigma.domain_size))


# -- formats ------------------------------------------------------------------

def test_text_format_round_trip():
    text = format_morphism(gamma)
    assert text == "gamma = [001, 1]"
    assert parse_morphism(text) == gamma


def test_large_alphabet_format():
    sigma = Morphism.from_images([bytes([10, 3]), bytes([0])] + [bytes([i]) for i in range(2, 11)], 11, "big")
    assert parse_morphism(format_morphism(sigma)) == sigma


def test_json_round_trip():
    obj = morphism_to_json(theta)
    assert obj["images"] == ["0120", "11", "222"]
    assert morphism_from_json(obj) == theta
    assert load_morphism('{"name": "gamma", "images": ["001", "1"]}') == gamma
    assert load_morphism("gamma = [001, 1]") == gamma


def test_malformed_morphism_text():
    with pytest.raises(FormatError):
        parse_morphism("gamma = 001, 1")


# -- fixed points -----------------------------------------------------------

@pytest.mark.parametrize(
    "sigma, n, expected",
    [(mu, 8, "01101001"), (gamma, 15, "001001100100111"), (rho, 13, "0010001010010")],
)
def test_fixed_point_examples(sigma, n, expected):
    assert fixed_point_prefix(sigma, 0, n).to_text() == expected


def test_fixed_point_errors():
    with pytest.raises(NotProlongableError):
        fixed_point_prefix(E, 0, 5)
    with pytest.raises(NoGrowthError):
        fixed_point_prefix(gamma, 1, 5)


@given(st.integers(0, 300), st.integers(0, 300))
def test_fixed_point_prefixes_nest(a, b):
    short, long_ = sorted((a, b))
    assert fixed_point_prefix(phi, 0, long_).startswith(fixed_point_prefix(phi, 0, short))


# -- predicates -------------------------------------------------------------

def test_predicates_mu():
    p = predicates(mu)
    assert p.non_erasing and p.uniform and p.expansive and not p.proper
    assert p.primitive and p.primitivity_exponent == 1 and p.strongly_primitive


def test_predicates_L0():
    p = predicates(MORPHISMS["L0"])
    assert not p.uniform and not p.expansive and not p.primitive


def test_predicates_gamma_E_gamma():
    assert predicates(compose_all([gamma, E, gamma])).strongly_primitive


def test_predicates_proper():
    assert predicates(M("010", "0110")).proper
    assert not predicates(M("", "1")).non_erasing


@given(endomorphisms(max_size=4, max_len=3))
def test_primitivity_matches_matrix_powers(sigma):
    d = sigma.domain_size
    A = incidence_matrix(sigma)
    P, positive = A, False
    for _ in range((d - 1) ** 2 + 1):
        if all(x > 0 for row in P for x in row):
            positive = True
            break
        P = mat_mul(P, A)
    assert predicates(sigma).primitive == positive


# -- bounded letters and growth -------------------------------------------------

def test_bounded_letters_examples():
    assert bounded_letters(beta) == {2}
    assert bounded_letters(gamma) == {1}
    assert bounded_letters(mu) == frozenset()


def test_bounded_letters_erasing():
    with pytest.raises(ErasingMorphismError):
        bounded_letters(M("0", "", codomain=2))


def _saturation_oracle(sigma):
    d = sigma.domain_size
    rows = iterate_lengths(sigma, 4 * d)
    return {b for b in range(d) if rows[2 * d][b] == rows[4 * d][b]}


def _all_morphisms(size, max_len):
    words = [bytes(w) for n in range(1, max_len + 1) for w in itertools.product(range(size), repeat=n)]
    for images in itertools.product(words, repeat=size):
        yield Morphism.from_images(images, size)


@pytest.mark.parametrize("size, max_len", [(1, 4), (2, 3), (3, 2)])
def test_bounded_letters_exhaustive(size, max_len):
    for sigma in _all_morphisms(size, max_len):
        assert bounded_letters(sigma) == _saturation_oracle(sigma), sigma


@settings(max_examples=300)
@given(endomorphisms(max_size=6, max_len=4))
def test_bounded_letters_random(sigma):
    assert bounded_letters(sigma) == _saturation_oracle(sigma)


def test_growth_examples():
    g = growth_classify(mu)
    assert g.kind is Growth.QUASI_UNIFORM and g.common_beta == pytest.approx(2)
    t = growth_classify(theta)
    assert t.kind is Growth.EXPONENTIALLY_DIVERGING
    assert t.beta[1] == pytest.approx(2, abs=1e-6) and t.beta[2] == pytest.approx(3, abs=1e-6)
    b = growth_classify(beta)
    assert b.kind is Growth.NOT_EVERYWHERE_GROWING and b.bounded_letters == {2}


def test_polynomial_divergence():
    g = growth_classify(M("001", "11"))
    assert g.kind is Growth.POLYNOMIALLY_DIVERGING
    assert g.alpha == {0: 1, 1: 0}


def test_spectral_radius():
    assert spectral_radius([[1, 1], [1, 0]]) == pytest.approx((1 + 5**0.5) / 2, abs=1e-9)
    assert spectral_radius([[0]]) == 0


def _endomorphism_fixtures():
    for name, sigma in MORPHISMS.items():
        if sigma.domain_size == sigma.codomain_size and not sigma.is_erasing():
            g = growth_classify(sigma)
            if g.kind is not Growth.NOT_EVERYWHERE_GROWING:
                yield name, sigma, g


@pytest.mark.parametrize("name, sigma, g", list(_endomorphism_fixtures()), ids=lambda x: x if isinstance(x, str) else "")
def test_letter_growth_ratio_converges(name, sigma, g):
    rows = iterate_lengths(sigma, 41)
    for a in range(sigma.domain_size):
        if g.alpha[a] == 0:
            assert rows[41][a] / rows[40][a] == pytest.approx(g.beta[a], abs=1e-4)


def test_restrict_keeps_reachable_letters():
    sub, old = restrict(MORPHISMS["pi_sigma"], {0, 1})
    assert old == [0, 1] and sub.domain_size == 2


# -- fixed-point classifiers --------------------------------------------------

@pytest.mark.parametrize(
    "name, label",
    [
        ("gamma", PansiotLabel.QUADRATIC),
        ("beta", PansiotLabel.QUADRATIC),
        ("theta", PansiotLabel.N_LOG_N),
        ("phi", PansiotLabel.LINEAR),
        ("mu", PansiotLabel.LINEAR),
        ("dev_sigma", PansiotLabel.QUADRATIC),
    ],
)
def test_pansiot_labels(name, label):
    assert pansiot_classify(MORPHISMS[name], 0).label is label


def test_pansiot_polynomial_and_periodic():
    assert pansiot_classify(M("001", "11"), 0).label is PansiotLabel.N_LOG_LOG_N
    assert pansiot_classify(M("01", "11"), 0).label is PansiotLabel.ULTIMATELY_PERIODIC


def test_uniform_recurrence_examples():
    assert uniform_recurrence_check(gamma, 0).verdict == "not-uniformly-recurrent"
    tm = uniform_recurrence_check(mu, 0)
    assert tm.verdict == "uniformly-recurrent" and tm.gap_bound <= 4
    ch = uniform_recurrence_check(rho, 0)
    assert ch.verdict == "uniformly-recurrent" and ch.witness == 0 and ch.gap_bound <= 3
