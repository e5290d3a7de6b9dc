import pytest

from sadic.complexity import complexity_profile
from sadic.errors import UnknownFixtureError
from sadic.fixtures import FIXTURES, MORPHISMS, episturmian_morphisms, fixture, lookup_morphism, sturmian
from sadic.morphisms import primitivity_exponent
from sadic.words import Word


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_every_fixture_generates(name):
    w = fixture(name).generate(2000)
    assert len(w) == 2000
    assert fixture(name).generate(500) == w[:500]


def test_unknown_names():
    with pytest.raises(UnknownFixtureError):
        fixture("no-such-word")
    with pytest.raises(UnknownFixtureError):
        lookup_morphism("no-such-morphism")


@pytest.mark.parametrize(
    "name, prefix",
    [
        ("thue-morse", "0110100110010110"),
        ("fibonacci", "0100101001001"),
        ("chacon", "0010001010010"),
        ("gamma", "00100110010011"),
    ],
)
def test_fixed_point_prefixes(name, prefix):
    assert fixture(name).generate(len(prefix)).to_text() == prefix


def test_morphism_catalog_names_match_keys():
    assert all(m.name == key for key, m in MORPHISMS.items())


@pytest.mark.parametrize("name", ["mu", "phi", "ex_sigma", "ex_tau"])
def test_primitive_catalog_morphisms(name):
    assert primitivity_exponent(lookup_morphism(name)) is not None


def test_episturmian_morphism_images():
    table = episturmian_morphisms(3)
    assert [u.to_text() for u in table["L0"].images] == ["0", "01", "02"]
    assert [u.to_text() for u in table["R0"].images] == ["0", "10", "20"]
    assert episturmian_morphisms(3, reversed_right=False)["R0"].images == table["L0"].images


def test_sturmian_rejects_bad_sequences():
    with pytest.raises(ValueError):
        sturmian(())
    with pytest.raises(ValueError):
        sturmian((0, 0))


def test_sturmian_fixture_is_sturmian():
    w = fixture("sturmian", ks=(2, 1, 3)).generate(50_000)
    prof = complexity_profile(w, 40)
    assert all(prof.p[n] == n + 1 for n in range(prof.validity_horizon + 1))


def test_fixture_words_are_words():
    assert isinstance(fixture("beta-M").generate(10), Word)
