import random

import pytest

from workbench.freeness import random_element
from workbench.shygroup import Branch, BranchSet, BranchTuple, full_tuples, parse_element, relation
from workbench.specker import (
    embed,
    embedding_spec,
    fnHat,
    format_vector,
    hTrunc,
    injectivity_level,
    kernel_rank_check,
    truncate_prefix,
    vector_frame,
)

ETA = Branch("", 0)
ONE = Branch("1", 0)
POOL = [ETA, ONE, Branch("01", 0)]


def test_h_trunc_examples():
    assert hTrunc(ONE, 0) == ETA
    assert hTrunc(Branch("01", 0), 5) == Branch("01", 0)
    assert hTrunc(Branch("", 1), 2) == Branch("11", 0)
    assert truncate_prefix("0111", 2) == "0100"
    assert truncate_prefix("01", 4) == "01"


@pytest.mark.parametrize("kstar", [0, 1])
def test_relators_vanish_under_fn_hat(kstar):
    for t in full_tuples(POOL + [Branch("", 1)], kstar):
        for n in range(4):
            for level in range(4):
                assert fnHat(relation(t, n), level).is_zero(), (str(t), n, level)


def test_fn_hat_is_identity_far_out():
    e = parse_element("2 y[*0,01*0;1] -1 x[0;1*0;011] 1 x[1;*0;]", 1)
    assert fnHat(e, 5) == e
    assert fnHat(e, 0) != e


@pytest.mark.property_based
def test_fn_hat_is_linear():
    rng = random.Random(21)
    for _ in range(100):
        kstar = rng.randint(0, 1)
        a = random_element(rng, POOL, kstar, 3)
        b = random_element(rng, POOL, kstar, 3)
        n = rng.randint(0, 4)
        assert fnHat(a + b, n) == fnHat(a, n) + fnHat(b, n)


def test_rank_two_example():
    elements = [parse_element("1 y[*0;0]", 0), parse_element("1 y[1*0;0]", 0)]
    level = injectivity_level(elements)
    assert level == 2
    specs = {level: embedding_spec(BranchSet.of(ETA, ONE), 0, level, 4)}
    assert kernel_rank_check(elements, [level], specs) == (2, 2)
    dependent = elements + [elements[0] + elements[1]]
    assert kernel_rank_check(dependent, [level], specs) == (2, 2)


def test_rank_two_example_is_injective_from_level_one():
    elements = [parse_element("1 y[*0;0]", 0), parse_element("1 y[1*0;0]", 0)]
    for n in (1, 2, 3):
        specs = {n: embedding_spec(BranchSet.of(ETA, ONE), 0, n, 4)}
        assert kernel_rank_check(elements, [n], specs) == (2, 2), n


def test_truncation_below_split_collapses_branches():
    elements = [parse_element("1 y[*0;0]", 0), parse_element("1 y[1*0;0]", 0)]
    specs = {0: embedding_spec(BranchSet.of(ETA, ONE), 0, 0, 4)}
    embedded, source = kernel_rank_check(elements, [0], specs)
    assert source == 2
    assert embedded == 1


@pytest.mark.property_based
@pytest.mark.parametrize("seed", range(30))
def test_embedding_is_injective_from_the_safe_level(seed):
    rng = random.Random(seed)
    elements = [random_element(rng, POOL, 0, 2, terms=3) for _ in range(rng.randint(2, 4))]
    level = injectivity_level(elements)
    specs = {level: embedding_spec(BranchSet(frozenset(POOL)), 0, level, level + 3)}
    embedded, source = kernel_rank_check(elements, [level], specs)
    assert embedded == source


def test_vector_output():
    e = parse_element("1 y[*0;0]", 0)
    specs = {n: embedding_spec(BranchSet.of(ETA), 0, n, 3) for n in (1, 2)}
    vector = embed(e, [1, 2], specs)
    assert {n for n, _ in vector} == {1, 2}
    assert format_vector({}) == "0"
    frame = vector_frame(vector)
    assert list(frame.columns) == ["level", "index", "value"]
    assert len(frame) == len(vector)
