import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from workbench.errors import DepthError, InputError
from workbench.fsigma import (
    CodeWord,
    cd,
    cd_inverse,
    check_representation,
    codeGen,
    code_entry,
    decode,
    decode_element,
    pair,
    parse_codeword,
    represent,
    separation_length,
    unpair,
)
from workbench.shygroup import Branch, BranchTuple, GroupElement, XGen, YGen, bit_strings, parse_element

ETA = Branch("", 0)
ONE = Branch("1", 0)


def test_cd_values():
    assert cd(()) == 0
    assert cd((0,)) == 1
    assert cd((1, 2)) == 18
    assert cd_inverse(18) == [1, 2]
    with pytest.raises(InputError):
        cd((-1,))


@pytest.mark.property_based
@given(st.lists(st.integers(0, 60), max_size=6))
@settings(max_examples=100)
def test_cd_inverts(seq):
    assert cd_inverse(cd(seq)) == seq


@pytest.mark.property_based
@given(st.integers(0, 10 ** 6))
@settings(max_examples=100)
def test_unpair_inverts_pair(z):
    assert pair(*unpair(z)) == z


def _generators(kstar, max_level):
    universe = [ETA, ONE]
    for entries in itertools.product(universe, repeat=kstar + 1):
        for n in range(max_level + 1):
            yield YGen(BranchTuple(entries), n)
    for m in range(kstar + 1):
        for entries in itertools.product(universe, repeat=kstar):
            for nu in bit_strings(3):
                yield XGen(m, BranchTuple(entries, m), nu)


@pytest.mark.parametrize("kstar", [0, 1])
def test_decode_inverts_code(kstar):
    for g in _generators(kstar, 5):
        assert decode(codeGen(g, 4)) == g, str(g)


def test_decode_rejects_bad_prefixes():
    with pytest.raises(InputError):
        decode(CodeWord("z", (1,), 1))
    with pytest.raises(InputError):
        decode(CodeWord("y", (), 0))
    mixed = CodeWord("y", (codeGen(YGen(BranchTuple((ETA,)), 0), 1).entries[0],
                           codeGen(YGen(BranchTuple((ETA,)), 1), 1).entries[0]), 2)
    with pytest.raises(InputError):
        decode(mixed)


def test_codeword_text_form():
    w = codeGen(YGen(BranchTuple((ONE,)), 2), 3)
    assert parse_codeword(str(w)) == w
    with pytest.raises(InputError):
        parse_codeword("y 1,2")


def test_separation_is_least_distinguishing_length():
    far = Branch("000", 1)
    e = parse_element("1 y[*0;0] 1 y[00001*0;0]", 0)
    rep = represent(e, 8)
    assert rep.separation == 5
    assert separation_length([YGen(BranchTuple((ETA,)), 0), YGen(BranchTuple((far,)), 0)], 8) == 4
    with pytest.raises(DepthError):
        represent(e, 4)


def test_represent_negative_coefficient():
    g = XGen(0, BranchTuple((), 0), "01")
    e = GroupElement.of(g, -3)
    rep = represent(e, 4)
    assert rep.terms == [(g, -3)]
    assert rep.signs == [0]
    assert rep.separation == 0
    assert [cd_inverse(entry)[:4] for entry in rep.word.entries] == [[1, 0, 3, 0]] * 4
    assert decode_element(rep.word) == e
    assert check_representation(rep, e, 4) == []


def test_single_y_keeps_its_level():
    g = YGen(BranchTuple((ETA,)), 2)
    e = GroupElement.of(g, -3)
    rep = represent(e, 3)
    assert rep.level == 2
    assert rep.terms == [(g, -3)]
    assert rep.signs == [0]
    assert code_entry(g, 0) == 22
    assert [cd_inverse(entry) for entry in rep.word.entries] == [[1, 0, 3, 1, 22]] * 3
    assert decode(rep.word) == e
    lowered = represent(e, 3, level=0)
    assert lowered.level == 0 and lowered.size == 3
    assert check_representation(lowered, e, 3) == []
    with pytest.raises(InputError):
        represent(GroupElement.of(g, Fraction(1, 2)), 3)


def test_zero_element_representation():
    rep = represent(GroupElement.zero(1), 3)
    assert rep.size == 0
    assert rep.word.entries == (1, 1, 1)
    assert str(rep.word) == "element[k=1]:1,1,1@3"
    assert parse_codeword(str(rep.word)) == rep.word
    assert rep.clauses()["f"] == "n = 0 forces m = 0"
    assert decode(rep.word) == GroupElement.zero(1)


def test_element_words_reject_bad_headers():
    rep = represent(parse_element("1 y[*0;0] -1 y[1*0;0]", 0), 3)
    with pytest.raises(InputError):
        decode(CodeWord("element", rep.word.entries, 3))
    shuffled = CodeWord("element", (rep.word.entries[0], cd((1, 2, 1, 1, 5))), 2, 0)
    with pytest.raises(InputError):
        decode(shuffled)
    with pytest.raises(DepthError):
        represent(parse_element("1 y[*0;0]", 0), 0)


def test_representation_round_trip_and_clauses():
    e = parse_element("2 y[*0;0] -1 y[1*0;0] 1 x[0;;1]", 0)
    rep = represent(e, 6)
    assert check_representation(rep, e, 6) == []
    assert decode(rep.word) == e
    assert set(rep.clauses()) == set("abcdefgh")


def test_misordered_representation_fails_order_clause():
    e = parse_element("1 y[*0;0] 1 y[1*0;0]", 0)
    rep = represent(e, 6)
    rep.terms.reverse()
    assert "g" in check_representation(rep, e, 6)


def test_distinct_elements_get_distinct_words():
    literals = ["1 y[*0;0]", "2 y[*0;0]", "-1 y[*0;0]", "1 y[1*0;0]", "1 x[0;;0]", "1 x[0;;00]",
                "1 y[*0;0] 1 y[1*0;0]", "1 y[*0;0] -1 y[1*0;0]", "1 y[0001*0;0]"]
    words = {represent(parse_element(text, 0), 12).word for text in literals}
    assert len(words) == len(literals)
