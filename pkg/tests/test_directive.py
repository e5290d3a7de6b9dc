import pytest
from hypothesis import given, settings, strategies as st

from sadic.directive import (
    Block,
    DirectiveWord,
    PowerSchedule,
    contract,
    directive_morphism,
    expand,
    generate_prefix,
    group_rounds,
    level_images,
    load_directive,
    memory_cap,
    telescope_lengths,
    telescope_vectors,
    window_primitive,
)
from sadic.errors import (
    DegenerateDirectiveError,
    ExhaustedScheduleError,
    FormatError,
    MemoryCapError,
    NonConvergentDirectiveError,
)
from sadic.fixtures import MORPHISMS, gamma_mu, phi_mu_random, pi_family, primitive_not_lr, sturmian, sturmian_random
from sadic.morphisms import compose_all, incidence_matrix, mat_mul


def single(name, schedule=None):
    return DirectiveWord({name: MORPHISMS[name]}, (Block(name, schedule or PowerSchedule.constant(1)),), name=name)


# -- schedules --------------------------------------------------------------

def test_schedule_kinds():
    assert [PowerSchedule.constant(2)(r) for r in range(3)] == [2, 2, 2]
    assert [PowerSchedule.identity(1)(r) for r in range(3)] == [1, 2, 3]
    assert [PowerSchedule.cycle([1, 0])(r) for r in range(4)] == [1, 0, 1, 0]
    assert [PowerSchedule("constant", 0, (1,))(r) for r in range(3)] == [1, 0, 0]
    with pytest.raises(ExhaustedScheduleError):
        PowerSchedule.explicit([1, 2])(2)


def test_schedule_validation():
    with pytest.raises(FormatError):
        PowerSchedule("geometric", 2)
    with pytest.raises(FormatError):
        PowerSchedule.constant(-1)


@pytest.mark.parametrize(
    "schedule",
    [PowerSchedule.constant(3), PowerSchedule.identity(2), PowerSchedule.cycle([1, 2]), PowerSchedule("list", [4], (1,))],
)
def test_schedule_json_round_trip(schedule):
    assert PowerSchedule.from_json(schedule.to_json()) == schedule


# -- expansion --------------------------------------------------------------

def test_expand_examples():
    assert directive_morphism(gamma_mu().directive, 0).name == "mu"
    assert [s.name for s in expand(sturmian().directive, 4)] == ["L0", "R0", "L1", "R1"]
    assert [s.name for s in expand(single("gamma", PowerSchedule.constant(2)), 2)] == ["gamma", "gamma"]


def test_gamma_mu_round_structure():
    names = [s.name for s in expand(gamma_mu().directive, 7)]
    assert names == ["mu", "gamma", "mu", "gamma", "gamma", "mu", "gamma"]


def test_cuts_at_round_ends():
    steps = expand(gamma_mu().directive, 6)
    assert [s.cut for s in steps] == [True, False, True, False, False, True]


# -- contraction ------------------------------------------------------------

def test_contract_gamma_mu_pairs():
    d = gamma_mu(PowerSchedule.constant(1)).directive
    taus = expand(contract(d, [2, 2, 2]), 3)
    expected = mat_mul(incidence_matrix(MORPHISMS["gamma"]), incidence_matrix(MORPHISMS["mu"]))
    assert all(incidence_matrix(t.morphism) == expected for t in taus)
    assert [w.to_text() for w in taus[0].morphism.images] == ["0011", "1001"]


def test_contract_sturmian_group_of_three():
    d = sturmian([2, 1]).directive
    tau = expand(contract(d, [3]), 1)[0].morphism
    L0, R0 = MORPHISMS["L0"], MORPHISMS["R0"]
    assert tau.images == compose_all([L0, L0, R0]).images


def test_contract_groups_of_one():
    d = sturmian([1]).directive
    assert [s.morphism for s in expand(contract(d, [1] * 8), 8)] == [s.morphism for s in expand(d, 8)]


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=10), st.integers(0, 5))
def test_contraction_preserves_prefix(grouping, seed):
    d = sturmian_random(seed, rounds=8).directive
    base = generate_prefix(d, 3000).word
    assert generate_prefix(contract(d, grouping), 3000).word == base


def test_group_rounds_preserves_prefix():
    d = gamma_mu().directive
    assert generate_prefix(group_rounds(d, 5), 5000).word == generate_prefix(d, 5000).word


# -- generation -------------------------------------------------------------

def test_generate_examples():
    assert generate_prefix(single("mu"), 16).word.to_text() == "0110100110010110"
    assert generate_prefix(single("rho"), 13).word.to_text() == "0010001010010"
    with pytest.raises(DegenerateDirectiveError):
        generate_prefix(single("E"), 4)


def test_generate_zero_length():
    assert len(generate_prefix(single("mu"), 0).word) == 0


def test_alternating_truncations_do_not_converge():
    blocks = (Block("E", PowerSchedule("constant", 1, (0,))), Block("gamma", PowerSchedule.identity(1)))
    d = DirectiveWord({"E": MORPHISMS["E"], "gamma": MORPHISMS["gamma"]}, blocks)
    with pytest.raises(NonConvergentDirectiveError):
        generate_prefix(d, 1000)


def test_memory_cap(monkeypatch):
    with pytest.raises(MemoryCapError):
        generate_prefix(single("mu"), 100, mem_cap=50)
    monkeypatch.setenv("SADIC_MEM_CAP", "64")
    assert memory_cap() == 64
    with pytest.raises(MemoryCapError):
        generate_prefix(single("mu"), 100)


def test_sidecar_records_provenance():
    g = generate_prefix(gamma_mu().directive, 1000)
    side = g.sidecar()
    assert side["length"] == 1000 and side["stability_checked"]
    assert [int(x) for x in side["telescoped_lengths"]] == list(g.telescoped_lengths)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 1000))
def test_generation_is_deterministic(seed):
    d = phi_mu_random(seed).directive
    assert generate_prefix(d, 2000).word == generate_prefix(d, 2000).word


def test_directive_json_round_trip():
    for d in (gamma_mu().directive, pi_family().directive, sturmian([1, 2]).directive):
        again = load_directive(__import__("json").dumps(d.to_json()))
        assert generate_prefix(again, 5000).word == generate_prefix(d, 5000).word


def test_malformed_directive_json():
    with pytest.raises(FormatError):
        load_directive("{not json")
    with pytest.raises(FormatError):
        load_directive('{"morphisms": {"a": ["0"]}, "blocks": [{"morphism": "b", "power": {"kind": "constant"}}]}')


# -- telescoped lengths -----------------------------------------------------

def test_telescope_examples():
    assert telescope_lengths(pi_family().directive, 3) == [3, 27, 729]
    assert telescope_lengths(gamma_mu(PowerSchedule.constant(0)).directive, 2) == [2, 4]
    assert telescope_lengths(single("mu"), 6) == [2**n for n in range(1, 7)]


def test_pi_lengths_up_to_six():
    assert telescope_lengths(pi_family().directive, 6) == [3 ** (k * (k + 1) // 2) for k in range(1, 7)]


def test_gamma_mu_letters_have_equal_lengths():
    for vec in telescope_vectors(gamma_mu().directive, 20):
        assert vec[0] == vec[1]


@pytest.mark.parametrize("make", [gamma_mu, pi_family, lambda: sturmian([2, 1, 3])])
def test_telescope_matches_materialization(make):
    d = make().directive
    lengths = [x for x in telescope_lengths(d, 12) if x <= 100_000]
    images = level_images(d, d.seed, len(lengths))
    assert [len(w) for w in images] == lengths


def test_level_images_are_prefixes():
    d = gamma_mu().directive
    w = generate_prefix(d, 5000).word
    for img in level_images(d, 0, 4):
        assert w.startswith(img[:5000])


# -- windows ------------------------------------------------------------------

def test_window_examples():
    d = phi_mu_random(0).directive
    steps = expand(d, 40)
    first_phi = next(i for i, s in enumerate(steps) if s.name == "phi" and steps[i + 1].name == "phi")
    assert not window_primitive(d, first_phi, 1)[0]
    assert window_primitive(d, first_phi, 2)[0]
    ex = primitive_not_lr().directive
    assert not window_primitive(ex, 0, 1)[0]
    assert window_primitive(ex, 1, 2)[0]
    gm = gamma_mu().directive
    ends = [i for i, s in enumerate(expand(gm, 30)) if s.name == "mu"]
    starts = [0] + [e + 1 for e in ends[:-1]]
    assert all(window_primitive(gm, a, b - a + 1)[0] for a, b in zip(starts, ends))
