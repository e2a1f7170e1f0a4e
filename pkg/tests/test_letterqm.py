import pytest
from hypothesis import given, strategies as st

from sclgap.errors import SclError
from sclgap.letterqm import LetterQM, sign_compress, stabilize, verify_axioms
from sclgap.words import NONDEGENERATE, Word, alternates, free_reduce, inv, power, split_triangle

import oracles

words = st.text(alphabet="aAbB", max_size=16).map(free_reduce)


def sign_table(radius, flip=None):
    table = {g or "1": oracles.sign_compress(g) or "1" for g in oracles.words(radius)}
    if flip is not None:
        table[flip] = inv(table[flip])
    return table


def test_sign_compress_examples():
    assert sign_compress("aaaBB") == "aB"
    assert sign_compress("abAB") == "abAB"
    assert sign_compress("").is_empty()


def test_sign_compress_matches_reference():
    phi = LetterQM.sign()
    for g in oracles.words(6):
        assert phi(g).s == oracles.sign_compress(g)


def test_sign_map_passes_radius_3():
    rep = verify_axioms(LetterQM.sign(), 3)
    assert rep.passed
    assert rep.elements == 53
    assert rep.pairs == 53 * 53
    assert rep.degenerate == rep.degenerate_with_trivial_leg
    assert rep.degenerate + rep.nondegenerate == rep.pairs


def test_radius_zero_is_vacuous():
    rep = verify_axioms(LetterQM.sign(), 0)
    assert rep.passed and rep.elements == 1


def test_constant_map_fails_inverse_condition():
    phi = LetterQM.from_function(lambda s: "a" if s else "", "ab")
    rep = verify_axioms(phi, 1)
    assert not rep.passed
    bad = {v.g for v in rep.violations if v.kind == "inverse"}
    assert "A" in bad


def test_integer_map_on_one_generator():
    def rule(s):
        e = s.count("t") - s.count("T")
        return "a" if e > 0 else ("A" if e < 0 else "")
    phi = LetterQM.from_function(rule, "t")
    rep = verify_axioms(phi, 2)
    assert rep.passed
    assert split_triangle(phi.image("t"), phi.image("t"), inv(phi.image("tt"))) == \
        (NONDEGENERATE, 0, 0, 0)


def test_table_map_round_trip(tmp_path):
    path = tmp_path / "sign.txt"
    path.write_text("".join("%s %s\n" % kv for kv in sign_table(2).items()))
    phi = LetterQM.load_table(path)
    assert verify_axioms(phi, 1).passed


def test_table_needs_twice_the_radius():
    phi = LetterQM.from_table(sign_table(2))
    with pytest.raises(SclError) as e:
        verify_axioms(phi, 2)
    assert e.value.code == "DOMAIN_NOT_ENUMERABLE"


def test_table_with_inverted_entry_fails_at_that_entry():
    phi = LetterQM.from_table(sign_table(2, flip="ab"))
    rep = verify_axioms(phi, 1)
    assert not rep.passed
    touched = {"ab", "BA"}
    for v in rep.violations:
        if v.kind == "inverse":
            assert v.g in touched
        else:
            assert free_reduce(v.g + v.h) in touched
    # "ab" lies outside the radius-1 ball, so it is only reached as a product
    assert any(v.kind == "triangle" and (v.g, v.h) == ("a", "b") for v in rep.violations)


def test_table_with_inverted_generator_fails_at_that_entry():
    phi = LetterQM.from_table(sign_table(2, flip="a"))
    rep = verify_axioms(phi, 1)
    assert any(v.kind == "inverse" and v.g == "a" for v in rep.violations)
    for v in rep.violations:
        involved = {v.g, inv(v.g)} if v.h is None else {v.g, v.h, free_reduce(v.g + v.h)}
        assert involved & {"a", "A"}


def test_table_rejects_bad_images():
    with pytest.raises(SclError) as e:
        LetterQM.from_table({"a": "aa", "A": "AA"})
    assert e.value.code == "PARSE_ERROR"
    with pytest.raises(SclError):
        LetterQM.from_table({"a": "a"})


def test_stabilize_commutator():
    st_ = stabilize(LetterQM.sign(), Word("abAB"), 4)
    assert st_.ell == 2
    assert tuple(map(str, st_.letters)) == ("a", "b", "A", "B")
    assert not st_.swapped
    assert [st_.index(i) for i in range(8)] == [1, 1, 2, 2, 1, 1, 2, 2]


def test_stabilize_generator_is_power_incompatible():
    with pytest.raises(SclError) as e:
        stabilize(LetterQM.sign(), Word("a"), 2)
    assert e.value.code in ("POWER_INCOMPATIBLE", "INVALID_STABLE_IMAGE")


def test_stabilize_swaps_roles():
    st_ = stabilize(LetterQM.sign(), Word("baBA"), 2)
    assert st_.ell == 2 and st_.swapped and st_.a_role == "b"


def test_stabilize_trivial():
    with pytest.raises(SclError) as e:
        stabilize(LetterQM.sign(), Word(""), 2)
    assert e.value.code == "TRIVIAL_IMAGE"


def test_alphabet_mismatch():
    with pytest.raises(SclError) as e:
        LetterQM.sign()(Word("t", "t"))
    assert e.value.code == "ALPHABET_MISMATCH"


@given(words)
def test_sign_compress_alternating_and_odd(g):
    phi = LetterQM.sign()
    assert alternates(phi(g).s)
    assert phi(inv(g)).s == inv(phi(g).s)


@given(words, words)
def test_sign_map_triangle_condition(g, h):
    phi = LetterQM.sign()
    got = split_triangle(phi(g).s, phi(h).s, inv(phi(free_reduce(g + h)).s))
    assert got is not None
    if got[0] != NONDEGENERATE:
        assert 0 in got[1:]


@given(words)
def test_stable_powers_stay_alternating(g):
    phi = LetterQM.sign()
    try:
        st_ = stabilize(phi, Word(g), 4)
    except SclError:
        return
    for k in range(1, 5):
        w = power(st_.phi_g.s, k)
        assert len(w) == k * len(st_.phi_g) and alternates(w)
