import math
import random
from fractions import Fraction

import pytest

from workbench.errors import CertificateError, DepthError, InputError
from workbench.freeness import (
    WitnessConfig,
    buildBasisCountable,
    buildBasisQuotient,
    check_quotient_chain,
    check_quotient_isomorphism,
    combination_element,
    expressInBasis,
    nonFreeWitness,
    scope_sample,
    verify_basis_cert,
    verify_witness,
)
from workbench.loaders import load_witness_config
from workbench.shygroup import (
    Branch,
    BranchSet,
    BranchTuple,
    GroupElement,
    XGen,
    YGen,
    memberSum,
)

ETA = Branch("", 0)
ONE = Branch("1", 0)
FAR = Branch("0001", 0)


def yg(branches, n):
    return YGen(BranchTuple(tuple(branches)), n)


def test_single_branch_basis_counts():
    depth = 4
    cert = buildBasisCountable(BranchSet.of(ETA), 0, depth)
    assert cert.separators == [0]
    assert cert.y1 == []
    assert len(cert.y2) == (2 ** (depth + 1) - 1) - (depth + 1)
    assert cert.y3 == [yg([ETA], n) for n in range(depth + 2)]


def test_separators_follow_split_depths():
    assert buildBasisCountable(BranchSet.of(ETA, ONE), 0, 3).separators == [0, 1]
    cert = buildBasisCountable(BranchSet.of(ETA, ONE), 1, 3)
    assert len(cert.tuples) == 4
    assert cert.separators == [0, 1, 0, 1]


def test_express_in_basis_examples():
    cert = buildBasisCountable(BranchSet.of(ETA), 0, 3)
    assert expressInBasis(XGen(0, BranchTuple((), 0), ""), cert) == {yg([ETA], 1): 1, yg([ETA], 0): -1}
    pair = buildBasisCountable(BranchSet.of(ETA, ONE), 0, 3)
    assert expressInBasis(XGen(0, BranchTuple((), 0), "1"), pair) == {yg([ONE], 2): 1, yg([ONE], 1): -1}
    basis_member = yg([ONE], 3)
    assert expressInBasis(basis_member, pair) == {basis_member: 1}


def test_express_in_basis_rejects_out_of_scope():
    cert = buildBasisCountable(BranchSet.of(ETA), 0, 2)
    with pytest.raises(InputError):
        expressInBasis(yg([ONE], 0), cert)
    with pytest.raises(DepthError):
        expressInBasis(XGen(0, BranchTuple((), 0), "0000"), cert)


def test_basis_needs_split_depth():
    with pytest.raises(DepthError):
        buildBasisCountable(BranchSet.of(ETA, FAR), 0, 1)
    assert buildBasisCountable(BranchSet.of(ETA, FAR), 0, 3).separators == [0, 4]


@pytest.mark.parametrize("kstar,depth", [(0, 5), (1, 2)])
def test_full_scope_certificate_verifies(kstar, depth):
    cert = buildBasisCountable(BranchSet.of(ETA, ONE), kstar, depth)
    verify_basis_cert(cert, cert.basis())


def test_sampled_certificate_for_two_indices():
    cert = buildBasisCountable(BranchSet.of(ETA, ONE), 2, 2)
    verify_basis_cert(cert, scope_sample(cert, random.Random(3), 20))


def test_tampered_rewrite_is_caught():
    cert = buildBasisCountable(BranchSet.of(ETA, ONE), 0, 3)
    cert.rewrite[cert.order[0]] = {}
    with pytest.raises(CertificateError) as exc:
        verify_basis_cert(cert)
    assert exc.value.clause == "soundness"


def test_rewrite_rebuilds_generator_exactly():
    cert = buildBasisCountable(BranchSet.of(ETA, ONE), 1, 2)
    for g in cert.order:
        rebuilt = combination_element(1, expressInBasis(g, cert))
        assert rebuilt == GroupElement.of(g)


def test_quotient_with_empty_u_is_trivial():
    cert = buildBasisQuotient(BranchSet.of(ETA), BranchSet(), 1, 2)
    assert cert.tuples == []
    assert cert.basis() == []


def test_quotient_rejects_bad_input():
    with pytest.raises(InputError):
        buildBasisQuotient(BranchSet(), BranchSet.of(ETA, ONE), 1, 2)
    with pytest.raises(InputError):
        buildBasisQuotient(BranchSet.of(ETA), BranchSet.of(ETA), 1, 2)


def test_quotient_over_empty_set_matches_countable_size():
    depth = 2
    cert = buildBasisQuotient(BranchSet(), BranchSet.of(ETA), 1, depth)
    countable = buildBasisCountable(BranchSet.of(ETA), 1, depth)
    assert cert.separators == [0]
    assert len(cert.basis()) == len(countable.basis())
    verify_basis_cert(cert)


def test_quotient_nonmembers_all_use_u():
    cert = buildBasisQuotient(BranchSet.of(ONE), BranchSet.of(ETA), 1, 2)
    assert yg([ETA, ETA], 0) in cert.ystar
    assert all(ETA in g.tuple.branches for g in cert.ystar)
    for g in cert.ystar[:10]:
        assert not memberSum(GroupElement.of(g), cert.parts(), 4).member
    verify_basis_cert(cert)


ISO_POOL = [ETA, ONE, Branch("01", 0)]


@pytest.mark.property_based
@pytest.mark.parametrize("seed", range(50))
def test_quotient_isomorphism_kernels_agree(seed):
    rng = random.Random(seed)
    kstar = 1 + seed % 2
    u = rng.sample(ISO_POOL, rng.randint(1, kstar))
    rest = [b for b in ISO_POOL if b not in u]
    U = rng.sample(rest, rng.randint(1, len(rest)))
    report = check_quotient_isomorphism(BranchSet(frozenset(U)), BranchSet(frozenset(u)), kstar, 5, rng)
    assert report.checked == 5
    assert report.passed, (str(U), str(u), report.mismatches)


def test_quotient_isomorphism_with_two_small_branches():
    rng = random.Random(11)
    report = check_quotient_isomorphism(BranchSet.of(Branch("01", 0)), BranchSet.of(ETA, ONE), 2, 5, rng)
    assert report.passed, report.mismatches
    with pytest.raises(InputError):
        check_quotient_isomorphism(BranchSet(), BranchSet.of(ETA, ONE), 1, 5, rng)


@pytest.mark.property_based
def test_quotient_basis_at_depth_six():
    cert = buildBasisQuotient(BranchSet.of(ONE), BranchSet.of(ETA), 1, 6)
    assert cert.depth == 6
    verify_basis_cert(cert)


def test_quotient_chain_kernels_agree():
    rng = random.Random(5)
    report = check_quotient_chain(BranchSet.of(ONE), BranchSet(), BranchSet.of(ONE), BranchSet.of(ETA), 2, 3, rng)
    assert report.passed, report.mismatches
    empty_u = check_quotient_chain(BranchSet.of(ETA, ONE), BranchSet.of(ETA), BranchSet.of(ETA, ONE), BranchSet(),
                                   1, 3, rng)
    assert empty_u.passed, empty_u.mismatches


def test_quotient_chain_rejects_bad_chains():
    rng = random.Random(0)
    with pytest.raises(InputError):
        check_quotient_chain(BranchSet.of(ONE), BranchSet.of(ETA), BranchSet.of(ONE), BranchSet(), 1, 3, rng)
    with pytest.raises(InputError):
        check_quotient_chain(BranchSet.of(ONE), BranchSet(), BranchSet.of(ONE), BranchSet.of(ETA), 1, 3, rng)


def test_witness_for_two_parts():
    cfg, warnings = load_witness_config("data/w.txt")
    assert warnings == []
    N = 20
    cert = nonFreeWitness(cfg, N)
    assert len(cert.identities) == N
    assert cert.divisibility == math.prod(math.factorial(j) for j in range(N))
    assert cert.quotient_rank == 2 * N
    assert cert.nonmember.obstruction[0] == YGen(cfg.star, N)
    verify_witness(cert)


def test_witness_for_single_part():
    cfg, _ = load_witness_config("data/w0.txt")
    cert = nonFreeWitness(cfg, 8)
    assert cert.divisibility == math.prod(math.factorial(j) for j in range(8))
    assert cert.quotient_rank == 8
    verify_witness(cert)


def test_tampered_witness_is_caught():
    cfg, _ = load_witness_config("data/w.txt")
    cert = nonFreeWitness(cfg, 6)
    culprit, value = cert.nonmember.obstruction
    cert.nonmember.obstruction = (culprit, value + Fraction(1))
    with pytest.raises(CertificateError):
        verify_witness(cert)


def test_witness_rejects_bad_configuration():
    star = BranchTuple((ETA, ONE))
    cfg = WitnessConfig(1, star, [BranchSet.of(ETA, ONE), BranchSet.of(ETA)])
    assert cfg.violation() == (0, 0)
    with pytest.raises(InputError):
        nonFreeWitness(cfg, 4)
    with pytest.raises(InputError):
        nonFreeWitness(WitnessConfig(1, star, [BranchSet.of(ONE)]), 4)
