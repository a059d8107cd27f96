from fractions import Fraction

import pytest

from workbench.errors import InputError
from workbench.loaders import (
    loadPresentation,
    load_model,
    parse_branch_vector,
    parse_chain,
    parse_cutoffs,
    parse_delta,
    parse_model,
    parse_partial_aut,
    parse_points,
    parse_presentation,
    parse_witness_config,
)
from workbench.metricspace import DyadicDist, PartialAut, dAut, powers_of_two
from workbench.shygroup import Branch, BranchSet

ETA = Branch("", 0)
ONE = Branch("1", 0)


def test_presentation_fixture():
    p = loadPresentation("data/presentation.txt")
    assert p.kstar == 1
    assert p.branches == BranchSet.of(ETA, ONE)
    assert len(p.elements) == 2
    assert p.warnings == []


def test_quotient_fixture():
    p = loadPresentation("data/quotient.txt")
    assert p.branches.branches == frozenset({ETA})
    assert p.branches.excluded == frozenset({ONE})


def test_presentation_warnings_and_errors():
    p = parse_presentation("branches: 0*0, 1*0\n")
    assert p.warnings == ["branch 0*0 canonicalized to *0"]
    with pytest.raises(InputError) as exc:
        parse_presentation("kstar: 1\n\nbogus: 3\n")
    assert exc.value.line == 3
    with pytest.raises(InputError) as exc:
        parse_presentation("kstar: 1\nelement: 2 y[*0;0]\n")
    assert exc.value.line == 2
    with pytest.raises(InputError):
        parse_presentation("element: 1 y[*0;0]\n")
    with pytest.raises(InputError):
        parse_presentation("branches: *0\nexcluded: *0\n")


def test_missing_file():
    with pytest.raises(InputError, match="cannot read"):
        loadPresentation("data/no_such_file.txt")


def test_witness_config_errors():
    cfg, _ = parse_witness_config("kstar: 0\nstar: *0\npart 0: 1*0\n")
    assert cfg.parts == [BranchSet.of(ONE)]
    with pytest.raises(InputError):
        parse_witness_config("kstar: 1\nstar: *0, 1*0\npart 0: 1*0\n")
    with pytest.raises(InputError) as exc:
        parse_witness_config("kstar: 0\npart 0: 1*0\npart 0: *0\n")
    assert exc.value.line == 3


def test_chain_errors():
    with pytest.raises(InputError) as exc:
        parse_chain("oracle: 3adic 4\n")
    assert exc.value.line == 1
    with pytest.raises(InputError) as exc:
        parse_chain("oracle: 2adic 8\nlevel 0: x0; x1; 0\n")
    assert exc.value.line == 2
    with pytest.raises(InputError):
        parse_chain("oracle: blocks 3\nlevel 0: x0; x1; e; 0\nparam 4 b = (1 2)\n")


def test_model_format():
    M = parse_model("size: 3\nrelation < 2: (0,1) (1,2)\nfunction f 1: (0)->1 (1)->2 (2)->0\n")
    assert M.relations["<"] == frozenset({(0, 1), (1, 2)})
    assert M.functions["f"][(2,)] == 0
    with pytest.raises(InputError) as exc:
        parse_model("size: 3\nrelation < 2: (0,1,2)\n")
    assert exc.value.line == 2
    with pytest.raises(InputError):
        parse_model("relation < 2: (0,1)\n")
    assert load_model("data/complete4.model").size == 4


def test_points_and_formulas():
    assert parse_points("0 1; 1 2", 2, 3) == [(0, 1), (1, 2)]
    assert parse_points("0,1,2", 1, 3) == [(0,), (1,), (2,)]
    with pytest.raises(InputError):
        parse_points("0,5", 1, 3)
    with pytest.raises(InputError, match="formula 2"):
        parse_delta(["x<y", "x <"])


def test_automorphism_and_cutoff_literals():
    f = parse_partial_aut("8; 5->6, 6->5")
    assert dAut(PartialAut.identity(8), f) == DyadicDist.pow(5)
    with pytest.raises(InputError):
        parse_partial_aut("x; 1->2")
    assert parse_cutoffs("pow2 3").cutoffs == powers_of_two(3).cutoffs
    assert parse_cutoffs("1,2,4").cutoffs == [1, 2, 4]
    with pytest.raises(InputError):
        parse_cutoffs("a,b")


def test_branch_vector():
    warnings = []
    vector = parse_branch_vector("0*0=1, 1*0=-1/2", warnings)
    assert vector == {ETA: Fraction(1), ONE: Fraction(-1, 2)}
    assert warnings == ["branch 0*0 canonicalized to *0"]
    with pytest.raises(InputError):
        parse_branch_vector("*0=x", [])
