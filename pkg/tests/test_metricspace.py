import random
from fractions import Fraction

import pytest

from workbench.errors import DepthError, InputError
from workbench.metricspace import (
    DyadicDist,
    OmegaRep,
    PartialAut,
    Structure,
    ball_member,
    dAut,
    deriveRep,
    dmax,
    dRep,
    dRepPrime,
    norm121,
    powers_of_two,
    preserves,
)
from workbench.shygroup import Branch, parse_branch

DEPTH = 64


def swap(depth, i, j):
    return PartialAut.from_mapping(depth, {i: j, j: i})


def random_aut(rng, depth=DEPTH, moved=6):
    points = rng.sample(range(depth), moved)
    images = points[:]
    rng.shuffle(images)
    return PartialAut.from_mapping(depth, dict(zip(points, images)))


def test_dyadic_order_and_format():
    assert DyadicDist.zero() < DyadicDist.pow(5) < DyadicDist.one() < DyadicDist.two()
    assert str(DyadicDist.pow(3)) == "2^-3"
    assert dmax(DyadicDist.pow(2), DyadicDist.pow(4)) == DyadicDist.pow(2)
    with pytest.raises(InputError):
        DyadicDist(-2)


def test_partial_aut_tables_must_agree():
    with pytest.raises(InputError):
        PartialAut(2, (1, 0), (0, 1))
    with pytest.raises(InputError):
        PartialAut.from_mapping(4, {0: 1})


def test_daut_examples():
    identity = PartialAut.identity(8)
    assert dAut(identity, identity) == DyadicDist.zero()
    assert dAut(identity, swap(8, 0, 1)) == DyadicDist.one()
    assert dAut(identity, swap(8, 5, 6)) == DyadicDist.pow(5)


def test_daut_needs_a_window_that_separates():
    f = PartialAut(2, (0, 1), (0, 1), total=False)
    g = PartialAut(2, (0, 1), (0, 1), total=False)
    h = PartialAut(3, (0, 1, 2), (0, 1, 2), total=False)
    assert dAut(f, g) == DyadicDist.zero()
    with pytest.raises(DepthError):
        dAut(f, h)
    assert dAut(f, h, upper_bound=True) == DyadicDist.pow(2)


def test_endomorphism_distance_ignores_inverse_table():
    f = PartialAut(3, (0, 5, 1), (0, 2, 7), total=False)
    g = PartialAut(3, (0, 5, 1), (0, 2, 9), total=False)
    assert dAut(f, g, upper_bound=True) == DyadicDist.pow(2)
    assert dAut(f, g, endomorphism=True, upper_bound=True) == DyadicDist.pow(3)


def test_drep_examples():
    rep = powers_of_two(4)
    identity = PartialAut.identity(16)
    assert dRep(identity, identity, rep) == DyadicDist.zero()
    assert dRep(identity, swap(16, 0, 7), rep) == DyadicDist.one()
    assert dRep(identity, swap(16, 2, 3), rep) == DyadicDist.pow(2)


def test_drep_prime_examples():
    identity = PartialAut.identity(16)
    assert dRepPrime(identity, swap(16, 2, 3), powers_of_two(4)) == DyadicDist.pow(2)
    assert dRepPrime(identity, swap(16, 0, 1), OmegaRep.from_cutoffs([1, 2, 3, 4])) == DyadicDist.one()


def test_omega_rep_levels():
    rep = OmegaRep.from_cutoffs([1, 2, 4])
    assert rep.cutoffs == [1, 2, 4]
    assert rep.level_of(3) == 2
    assert rep.level_of(9) is None
    assert rep.covered_levels(3) == 2
    with pytest.raises(InputError):
        OmegaRep.from_cutoffs([2, 2])


def test_derive_rep_constant_sequence():
    f = swap(4, 0, 2)
    derived = deriveRep([f, f, f], 4)
    for n in range(3):
        assert derived.rep.levels[n] == frozenset(range(n + 1))


def test_derive_rep_waits_for_tail():
    moving = swap(4, 0, 1)
    identity = PartialAut.identity(4)
    derived = deriveRep([moving] * 3 + [identity] * 3, 4)
    assert derived.stable_from == (3, 3, 0, 0)
    assert 0 not in derived.rep.levels[2]
    assert derived.rep.levels[3] == frozenset(range(4))


def test_derive_rep_rejects_moving_points():
    fs = [swap(4, k, k + 1) for k in range(4)]
    with pytest.raises(DepthError, match="not weakly convergent"):
        deriveRep(fs, 4)


def test_norm_examples():
    star0, _ = parse_branch("*0")
    one0, _ = parse_branch("1*0")
    assert norm121({}) == DyadicDist.zero()
    assert norm121({star0: Fraction(1)}) == DyadicDist.one()
    assert norm121({star0: Fraction(1), one0: Fraction(-1)}) == DyadicDist.pow(1)


@pytest.mark.property_based
def test_daut_metric_properties():
    rng = random.Random(11)
    for _ in range(1000):
        f, g, h = (random_aut(rng) for _ in range(3))
        assert dAut(f, h) <= dmax(dAut(f, g), dAut(g, h))
        assert dAut(f, g) == dAut(g, f)
        assert dAut(f, g) == dAut(f.inverse(), g.inverse())


@pytest.mark.property_based
def test_drep_metric_properties():
    rng = random.Random(12)
    rep = powers_of_two(7)
    for _ in range(1000):
        f, g, h = (random_aut(rng) for _ in range(3))
        for measure in (dRep, dRepPrime):
            assert measure(f, h, rep) <= dmax(measure(f, g, rep), measure(g, h, rep))
            assert measure(f, g, rep) == measure(f.inverse(), g.inverse(), rep)


@pytest.mark.property_based
def test_balls_are_subgroups():
    rng = random.Random(13)
    for _ in range(1000):
        n = rng.randrange(8)
        # moved points above n keep both automorphisms in the ball of radius 2^-n
        f = PartialAut.from_mapping(DEPTH, dict(zip(*_shuffled_block(rng, n))))
        g = PartialAut.from_mapping(DEPTH, dict(zip(*_shuffled_block(rng, n))))
        assert ball_member(f, n) and ball_member(g, n)
        assert ball_member(f.compose(g), n)
        assert ball_member(f.inverse(), n)


def _shuffled_block(rng, n):
    points = rng.sample(range(n + 1, DEPTH), 5)
    images = points[:]
    rng.shuffle(images)
    return points, images


@pytest.mark.property_based
def test_norm_is_ultrametric():
    rng = random.Random(14)
    pool = [Branch.make(p, 0) for p in ("", "1", "01", "11", "101")] + [Branch.make("0", 1)]
    for _ in range(1000):
        v = {rng.choice(pool): Fraction(rng.randint(-2, 2)) for _ in range(3)}
        w = {rng.choice(pool): Fraction(rng.randint(-2, 2)) for _ in range(3)}
        total = {b: v.get(b, 0) + w.get(b, 0) for b in set(v) | set(w)}
        assert norm121(total) <= dmax(norm121(v), norm121(w))


def test_preserves_structure():
    order = Structure({"<": frozenset((a, b) for a in range(4) for b in range(4) if a < b)})
    assert preserves(PartialAut.identity(4), order)
    assert not preserves(swap(4, 0, 1), order)
