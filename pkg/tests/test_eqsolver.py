import random

import pandas as pd
import pytest
from pandas.testing import assert_frame_equal
from sympy.combinatorics import Permutation

from workbench.eqsolver import (
    AffineTerm,
    BlockPermutationOracle,
    EquationChain,
    FreeRootOracle,
    Level,
    StageTable,
    TwoAdicOracle,
    ball_violations,
    buildAntiRetractChain,
    chain_terms,
    check_cauchy,
    check_perturbations,
    choose_exponent,
    parse_affine,
    solveChain,
    stageApprox,
    tolerance,
)
from workbench.errors import CertificateError, DepthError, InputError
from workbench.freewords import parse_word
from workbench.loaders import load_chain, parse_chain
from workbench.metricspace import DyadicDist


def test_parse_affine():
    assert parse_affine("2*x1+1") == AffineTerm((("x1", 2),), 1)
    assert parse_affine("x - 3") == AffineTerm((("x", 1),), -3)
    assert parse_affine("-y+2*z") == AffineTerm((("y", -1), ("z", 2)), 0)
    assert str(parse_affine("2*x1+1")) == "2*x1+1"
    for bad in ("", "2**x", "x*y"):
        with pytest.raises(InputError):
            parse_affine(bad)


def test_two_adic_distance():
    oracle = TwoAdicOracle(32)
    assert oracle.distance(5, 77) == DyadicDist.pow(3)
    assert oracle.distance(oracle.parse("-1"), 2 ** 32 - 1) == DyadicDist.pow(32)
    with pytest.raises(InputError):
        TwoAdicOracle(0)


def test_stage_zero_is_the_targets():
    chain, oracle = load_chain("data/two_adic_chain.txt")
    table = stageApprox(chain, 0, oracle)
    assert table[0] == chain.targets(0)
    table = stageApprox(chain, 5, oracle)
    for n in range(5, 6):
        assert table[n] == chain.targets(n)


def test_two_adic_fixture_matches_expected_frame():
    chain, oracle = load_chain("data/two_adic_chain.txt")
    solution = solveChain(chain, oracle, 8, 8)
    assert solution.stage == 8
    frame = StageTable(solution.stage, solution.values).to_frame(oracle)
    expected = pd.read_csv("data/two_adic_expected.csv", dtype={"value": str})
    assert_frame_equal(frame, expected)


def test_every_stage_stays_in_the_balls():
    chain, oracle = load_chain("data/two_adic_chain.txt")
    for k in range(chain.length):
        assert ball_violations(stageApprox(chain, k, oracle), chain, oracle) == []


def test_two_adic_fixture_is_stable_and_cauchy():
    chain, oracle = load_chain("data/two_adic_chain.txt")
    check_perturbations(chain, oracle, random.Random(1))
    check_cauchy(chain, oracle, 8, 8, random.Random(2))


def _fixed_point_chain(levels=20):
    oracle = TwoAdicOracle(32)
    rows = [
        Level(n, [f"x{n}"], {f"x{n}": parse_affine(f"2*x{n + 1}+1")}, {f"x{n}": oracle.parse("-1")},
              DyadicDist.pow(n + 1))
        for n in range(levels)
    ]
    return EquationChain(rows), oracle


def test_fixed_point_minus_one():
    chain, oracle = _fixed_point_chain()
    solution = solveChain(chain, oracle, 10, 4)
    for n in range(4):
        assert solution.values[n][f"x{n}"] == 2 ** 32 - 1


def test_solver_reports_depth_problems():
    chain, oracle = load_chain("data/two_adic_chain.txt")
    with pytest.raises(DepthError, match="modulus exhausted"):
        solveChain(chain, oracle, 8, 16)
    with pytest.raises(DepthError, match="insufficient depth"):
        solveChain(chain, oracle, 33, 2)


def test_bad_target_breaks_the_ball_check():
    chain, oracle = load_chain("data/two_adic_chain.txt")
    chain.levels[1].targets["x1"] = 7
    with pytest.raises(CertificateError) as exc:
        solveChain(chain, oracle, 8, 8)
    assert exc.value.clause == "ball"


def test_chain_validation():
    oracle = TwoAdicOracle(8)
    term = {"x0": parse_affine("x1")}
    with pytest.raises(InputError):
        EquationChain([Level(1, ["x0"], term, {"x0": 0}, DyadicDist.pow(1))])
    with pytest.raises(InputError):
        EquationChain([Level(0, ["x0"], term, {"x0": 0}, DyadicDist.zero())])
    with pytest.raises(InputError):
        parse_chain("level 0: x0; x1; 0; 1\n")
    assert oracle.format(oracle.parse("258")) == "2"


def test_identity_chain_over_blocks():
    text = "oracle: blocks 4\n" + "".join(f"level {n}: x{n}; x{n + 1}; e; {n}\n" for n in range(6))
    chain, oracle = parse_chain(text)
    solution = solveChain(chain, oracle, 3, 2)
    assert solution.stage == 4
    for n in range(2):
        assert solution.values[n][f"x{n}"] == oracle.identity()


def test_levels_finer_than_the_oracle_accept_equal_values():
    text = "oracle: blocks 2\n" + "".join(f"level {n}: x{n}; x{n + 1}; e; {n}\n" for n in range(6))
    chain, oracle = parse_chain(text)
    assert tolerance(chain.level(5), oracle) == DyadicDist.pow(2)
    assert tolerance(chain.level(1), oracle) == DyadicDist.pow(1)
    assert ball_violations(stageApprox(chain, 5, oracle), chain, oracle) == []
    check_perturbations(chain, oracle, random.Random(0), samples=4)
    twoadic = TwoAdicOracle(4)
    level = Level(0, ["x0"], {"x0": parse_affine("x1")}, {"x0": 5}, DyadicDist.pow(8))
    assert tolerance(level, twoadic) == DyadicDist.pow(4)


def _expected_block(j, n):
    if j == 0 or j - 1 < n:
        return Permutation(list(range(j + 1)))
    cycle = [0, 1] if j == 1 else [0, 1, 2]
    return Permutation([cycle], size=j + 1) ** (2 ** (j - 1 - n))


def test_block_chain_solution_blockwise():
    chain, oracle = load_chain("data/block_chain.txt")
    solution = solveChain(chain, oracle, 9, 4)
    assert solution.stage == 10
    for n in range(4):
        value = solution.values[n][f"x{n}"]
        for j in range(9):
            assert value[j] == _expected_block(j, n), (n, j)
    check_perturbations(chain, oracle, random.Random(3), samples=8)


def test_block_oracle_literals():
    oracle = BlockPermutationOracle(4)
    assert oracle.format(oracle.parse("(3 4 5)")) == "(3 4 5)"
    assert oracle.format(oracle.identity()) == "e"
    with pytest.raises(InputError):
        oracle.parse("(1 3)")
    assert oracle.distance(oracle.identity(), oracle.parse("(6 7)")) == DyadicDist.pow(3)


def test_anti_retract_chain():
    a, b, c, d = (parse_word(s) for s in "abcd")
    stages = buildAntiRetractChain([a, parse_word("a^4c")], [c, d])
    assert [s.exponent for s in stages] == [2, 2]
    assert stages[0].obstruction == [a]
    assert stages[1].obstruction == [parse_word("a^2")]
    oracle = FreeRootOracle()
    assert oracle.root(oracle.multiply(a, oracle.inverse(c)), 2) is None
    term, params = chain_terms(stages)[1]
    assert str(term) == str(parse_word("x^2*b1"))
    assert params == {"b1": d}


def test_anti_retract_rejects_bad_input():
    a, c = parse_word("a"), parse_word("c")
    with pytest.raises(DepthError, match="root oracle undecided"):
        choose_exponent([c], c, FreeRootOracle())
    with pytest.raises(InputError):
        buildAntiRetractChain([a, a], [c])
    with pytest.raises(InputError):
        buildAntiRetractChain([a, a], [c, c])
