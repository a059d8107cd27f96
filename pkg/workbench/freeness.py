# freeness.py
"""Free bases for G_U and for the quotients G_{U+u}/G_{U,u}, with triangular
rewriting of every other generator, and the divisibility witness showing
that a configuration of parts does not generate a free group.

Both builders share one shape. Every tuple t gets an owner index o_t and a
separator s_t. The generators x[o_t; t without o_t; t_{o_t} restricted to l]
for l >= s_t and y[t;n] for n < s_t leave the basis, and each one is
rewritten through the relation of t at the matching level. Separators keep
the excluded x-generators of different tuples apart.
"""
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from workbench.errors import CertificateError, DepthError, InputError
from workbench.lattice import quotient_invariants
from workbench.shygroup import (
    Branch,
    BranchSet,
    BranchTuple,
    Generator,
    GroupElement,
    MembershipCertificate,
    XGen,
    YGen,
    bit_strings,
    branch_key,
    chain_x,
    check_membership,
    full_tuples,
    generator_key,
    memberG,
    memberSum,
    raiseLevel,
    relation,
)

Combination = Dict[Generator, int]


@dataclass
class FreeBasisCert:
    kstar: int
    depth: int
    branches: BranchSet
    tuples: List[BranchTuple]
    separators: List[int]
    owners: List[int]
    y1: List[Generator] = field(default_factory=list)
    y2: List[Generator] = field(default_factory=list)
    y3: List[Generator] = field(default_factory=list)
    rewrite: Dict[Generator, Combination] = field(default_factory=dict)
    equations: Dict[Generator, Tuple[BranchTuple, int]] = field(default_factory=dict)
    order: List[Generator] = field(default_factory=list)
    # quotient certificates only
    quotient: bool = False
    spans: List[List[int]] = field(default_factory=list)
    reps: List[List[int]] = field(default_factory=list)
    ystar: List[Generator] = field(default_factory=list)

    def __post_init__(self):
        self.positions = {t: i for i, t in enumerate(self.tuples)}

    def basis(self) -> List[Generator]:
        return self.y1 + self.y2 + self.y3

    @property
    def universe(self) -> frozenset:
        return self.branches.branches | self.branches.excluded

    def parts(self) -> List[BranchSet]:
        return self.branches.parts()

    def is_live(self, g: Generator) -> bool:
        """False for generators that vanish in the quotient."""
        if not self.quotient:
            return True
        return self.branches.excluded <= frozenset(g.tuple.branches)

    def in_scope(self, g: Generator) -> bool:
        if not all(b in self.universe for b in g.tuple.branches):
            return False
        if isinstance(g, XGen):
            return len(g.nu) <= self.depth
        return g.n <= self.depth + 1

    def in_basis(self, g: Generator) -> bool:
        if not self.in_scope(g) or not self.is_live(g) or g in self.equations:
            return False
        if isinstance(g, YGen):
            return g.tuple in self.positions and g.n >= self.separators[self.positions[g.tuple]]
        return True


def _excluded_shape(cert: FreeBasisCert) -> Dict[Tuple[int, BranchTuple], List[int]]:
    shapes: Dict[Tuple[int, BranchTuple], List[int]] = {}
    for i, t in enumerate(cert.tuples):
        shapes.setdefault((cert.owners[i], t.drop(cert.owners[i])), []).append(i)
    return shapes


def _expand(cert: FreeBasisCert, g: Generator) -> Combination:
    if not cert.is_live(g):
        return {}
    if g in cert.rewrite:
        return cert.rewrite[g]
    if cert.in_basis(g):
        return {g: 1}
    raise CertificateError(f"{g} is used before it is rewritten", clause="triangularity")


def _accumulate(target: Combination, combo: Combination, factor: int) -> None:
    for g, c in combo.items():
        value = target.get(g, 0) + factor * c
        if value:
            target[g] = value
        else:
            target.pop(g, None)


def _rewrite_from_relation(cert: FreeBasisCert, g: Generator, t: BranchTuple, n: int) -> Combination:
    """Solve relation(t, n) for g, whose coefficient in it is -1."""
    out: Combination = {}
    for h, c in relation(t, n).terms.items():
        if h != g:
            _accumulate(out, _expand(cert, h), int(c))
    return out


def _assemble(cert: FreeBasisCert) -> FreeBasisCert:
    excluded: List[Tuple[int, int, Generator]] = []
    low: List[Tuple[int, int, Generator]] = []
    for i, t in enumerate(cert.tuples):
        s = cert.separators[i]
        for level in range(s, cert.depth + 1):
            g = chain_x(t, cert.owners[i], level)
            if g in cert.equations:
                raise CertificateError(f"{g} excluded by two tuples", clause="separators")
            cert.equations[g] = (t, level)
            excluded.append((level, i, g))
        for n in range(s):
            cert.equations[YGen(t, n)] = (t, n)
            low.append((s - n, i, YGen(t, n)))
        cert.y3.extend(YGen(t, n) for n in range(s, cert.depth + 2))
    cert.order = [g for _, _, g in sorted(excluded, key=lambda e: e[:2])]
    cert.order += [g for _, _, g in sorted(low, key=lambda e: e[:2])]
    for g in cert.order:
        t, n = cert.equations[g]
        cert.rewrite[g] = _rewrite_from_relation(cert, g, t, n)
    return cert


def _x_generators(branches: Sequence[Branch], kstar: int, depth: int, indices: Sequence[int]):
    ordered = sorted(branches, key=branch_key)
    for m in indices:
        for entries in itertools.product(ordered, repeat=kstar):
            t = BranchTuple(tuple(entries), m)
            for nu in bit_strings(depth):
                yield XGen(m, t, nu)


def buildBasisCountable(U: BranchSet, kstar: int, depth: int) -> FreeBasisCert:
    """Free basis of G_U for a finite U."""
    branches = U.sorted()
    widest = max((a.split_depth(b) for a, b in itertools.combinations(branches, 2)), default=0)
    if depth < widest:
        raise DepthError(f"depth too small: {depth} is below the split depth {widest} inside U")
    tuples = full_tuples(branches, kstar)
    separators: List[int] = []
    for i, t in enumerate(tuples):
        s = 0
        for r in range(i):
            earlier = tuples[r]
            if earlier.branches[:kstar] != t.branches[:kstar]:
                continue
            d = earlier.branches[kstar].split_depth(t.branches[kstar])
            if separators[r] <= d:
                s = max(s, d + 1)
        separators.append(s)
    cert = FreeBasisCert(kstar, depth, BranchSet(U.branches), tuples, separators, [kstar] * len(tuples))
    _assemble(cert)
    cert.y1 = list(_x_generators(branches, kstar, depth, range(kstar)))
    cert.y2 = [g for g in _x_generators(branches, kstar, depth, [kstar]) if g not in cert.equations]
    return cert


def _covers(entries: Sequence[Branch], u: frozenset) -> bool:
    return u <= frozenset(entries)


def buildBasisQuotient(U: BranchSet, u: BranchSet, kstar: int, depth: int) -> FreeBasisCert:
    """Free basis of G_{U+u}/G_{U,u}; generators not using all of u vanish there."""
    small = u.branches
    if len(small) > kstar:
        raise InputError(f"u larger than k(*): |u| = {len(small)} > {kstar}")
    if U.branches & small:
        raise InputError("U and u must be disjoint")
    universe = sorted(U.branches | small, key=branch_key)
    widest = max((a.split_depth(b) for a, b in itertools.combinations(universe, 2)), default=0)
    if depth < widest:
        raise DepthError(f"depth too small: {depth} is below the split depth {widest} inside U and u")
    frame = BranchSet(U.branches, small)
    if not small:
        return FreeBasisCert(kstar, depth, frame, [], [], [], quotient=True)
    listed = sorted(small, key=branch_key)
    tuples = [t for t in full_tuples(universe, kstar) if _covers(t.branches, small)]
    spans, owners, reps, separators = [], [], [], []
    for i, t in enumerate(tuples):
        span = [m for m in range(kstar + 1) if _covers(t.drop(m).branches, small)]
        owner = span[0]
        spans.append(span)
        owners.append(owner)
        reps.append([min(j for j in range(kstar + 1) if j != owner and t.branches[j] == eta) for eta in listed])
        s = 0
        for r in range(i):
            earlier = tuples[r]
            for m in range(kstar + 1):
                if earlier.drop(m) == t.drop(m):
                    s = max(s, earlier.branches[m].split_depth(t.branches[m]) + 1)
        separators.append(s)
    cert = FreeBasisCert(kstar, depth, frame, tuples, separators, owners, quotient=True,
                         spans=spans, reps=reps)
    _assemble(cert)
    shapes = _excluded_shape(cert)
    parts = frame.parts()
    candidates: List[Generator] = [
        g for g in _x_generators(universe, kstar, depth, range(kstar + 1))
        if any(b in small for b in g.tuple.branches)
    ]
    candidates += [YGen(t, n) for t in full_tuples(universe, kstar) if any(b in small for b in t.branches)
                   for n in range(depth + 2)]
    for g in candidates:
        if not memberSum(GroupElement.of(g), parts, depth + 2).member:
            cert.ystar.append(g)
    for g in cert.ystar:
        if not isinstance(g, XGen) or g in cert.equations:
            continue
        if (g.m, g.tuple) in shapes:
            cert.y2.append(g)
        else:
            cert.y1.append(g)
    return cert


def expressInBasis(g: Generator, cert: FreeBasisCert) -> Combination:
    if not all(b in cert.universe for b in g.tuple.branches):
        raise InputError(f"{g} uses a branch outside {cert.branches}")
    if not cert.in_scope(g):
        raise DepthError(f"depth too small: {g} lies beyond depth {cert.depth}")
    return dict(_expand(cert, g))


def combination_element(kstar: int, combo: Combination) -> GroupElement:
    return GroupElement(kstar, {g: Fraction(c) for g, c in combo.items()})


def _sound(cert: FreeBasisCert, g: Generator) -> bool:
    rebuilt = combination_element(cert.kstar, expressInBasis(g, cert))
    if not cert.quotient:
        return rebuilt == GroupElement.of(g)
    difference = GroupElement.of(g) - rebuilt
    return memberSum(difference, cert.parts(), max(cert.depth + 2, difference.level)).member


def _triangular(cert: FreeBasisCert) -> List[str]:
    problems = []
    seen = set()
    for g in cert.order:
        t, n = cert.equations[g]
        rel = relation(t, n)
        if abs(rel.terms.get(g, 0)) != 1:
            problems.append(f"{g}: coefficient {rel.terms.get(g, 0)} in its equation")
        for h in rel.terms:
            if h != g and h not in seen and cert.is_live(h) and not cert.in_basis(h):
                problems.append(f"{g}: equation uses {h} before it is rewritten")
        seen.add(g)
    return problems


def verify_basis_cert(cert: FreeBasisCert, sample: Optional[Sequence[Generator]] = None) -> None:
    """Re-expand every rewritten generator (and `sample`) and check the triangular order."""
    problems = _triangular(cert)
    if problems:
        raise CertificateError("; ".join(problems[:3]), clause="triangularity")
    for g in list(cert.order) + list(sample or []):
        if not _sound(cert, g):
            raise CertificateError(f"{g} does not re-expand to itself", clause="soundness")


# --- non-freeness witness ---

@dataclass
class WitnessConfig:
    kstar: int
    star: BranchTuple
    parts: List[BranchSet]

    def violation(self) -> Optional[Tuple[int, int]]:
        for l, m in itertools.product(range(self.kstar + 1), repeat=2):
            if (self.star.branches[l] in self.parts[m].branches) != (l != m):
                return l, m
        return None


@dataclass
class Identity:
    n: int
    summands: List[Tuple[int, XGen, MembershipCertificate]]


@dataclass
class WitnessCert:
    config: WitnessConfig
    depth: int
    identities: List[Identity]
    nonmember: MembershipCertificate
    divisibility: int
    quotient_rank: int


def _check_config(cfg: WitnessConfig) -> None:
    if len(cfg.star.branches) != cfg.kstar + 1 or cfg.star.omitted is not None:
        raise InputError(f"the starred tuple needs {cfg.kstar + 1} branches")
    if len(cfg.parts) != cfg.kstar + 1:
        raise InputError(f"expected {cfg.kstar + 1} parts, got {len(cfg.parts)}")
    failing = cfg.violation()
    if failing is not None:
        raise InputError("configuration violates the part-membership condition at (l, m) = (%d, %d)" % failing)


def divisibility_index(star: BranchTuple, parts: Sequence[BranchSet], depth: int) -> Tuple[int, int]:
    """Index of the level-`depth` coordinate lattice of y[star;0] plus the held
    generators, over the lattice of the held generators alone (through sympy)."""
    kstar = star.kstar
    columns: List[Generator] = [chain_x(star, m, j) for j in range(depth) for m in range(kstar + 1)]
    columns.append(YGen(star, depth))
    index = {g: i for i, g in enumerate(columns)}
    held = [[1 if j == index[g] else 0 for j in range(len(columns))]
            for g in columns if any(p.holds(g) for p in parts)]
    target = raiseLevel(GroupElement.of(YGen(star, 0)), depth)
    vector = [int(target.terms.get(g, 0)) for g in columns]
    rank, _ = quotient_invariants(held, len(columns))
    full_rank, factors = quotient_invariants(held + [vector], len(columns))
    if full_rank != len(columns):
        return rank, 0
    return rank, math.prod(factors)


def nonFreeWitness(cfg: WitnessConfig, N: int) -> WitnessCert:
    """y[star;0] is not in the sum of the parts, yet n! divides it modulo that sum for every n < N."""
    _check_config(cfg)
    identities = []
    for n in range(N):
        summands = []
        for m in range(cfg.kstar + 1):
            g = chain_x(cfg.star, m, n)
            cert = memberG(GroupElement.of(g), cfg.parts[m], N)
            if not cert.member:
                raise CertificateError(f"{g} is not in part {m}", clause="summand membership")
            summands.append((m, g, cert))
        if not relation(cfg.star, n).is_zero():
            raise CertificateError(f"identity at level {n} does not hold", clause="divisibility identity")
        identities.append(Identity(n, summands))
    nonmember = memberSum(GroupElement.of(YGen(cfg.star, 0)), cfg.parts, N)
    if nonmember.member:
        raise CertificateError(f"y[{cfg.star};0] lies in the sum of the parts", clause="non-membership")
    rank, index = divisibility_index(cfg.star, cfg.parts, N)
    expected = math.prod(math.factorial(j) for j in range(N))
    if index != expected or rank != (cfg.kstar + 1) * N:
        raise CertificateError(f"coset index {index}, expected {expected}", clause="divisibility")
    return WitnessCert(cfg, N, identities, nonmember, index, rank)


def verify_witness(cert: WitnessCert) -> None:
    cfg = cert.config
    _check_config(cfg)
    for identity in cert.identities:
        for m, g, summand in identity.summands:
            if g != chain_x(cfg.star, m, identity.n) or not check_membership(GroupElement.of(g), summand, [cfg.parts[m]]):
                raise CertificateError(f"summand {g} at level {identity.n}", clause="summand membership")
    if cert.nonmember.member or cert.nonmember.obstruction is None:
        raise CertificateError("missing obstruction row", clause="non-membership")
    culprit, value = cert.nonmember.obstruction
    form = raiseLevel(GroupElement.of(YGen(cfg.star, 0)), cert.nonmember.level)
    blocked = value.denominator != 1 or not any(p.holds(culprit) for p in cfg.parts)
    if form.terms.get(culprit) != value or not blocked:
        raise CertificateError(f"obstruction {culprit} does not block membership", clause="non-membership")


# --- quotient isomorphisms ---

def random_element(rng: random.Random, branches: Sequence[Branch], kstar: int, max_level: int,
                   terms: int = 4, bound: int = 3) -> GroupElement:
    """Random integer combination of generators over `branches` with levels and prefixes below max_level."""
    ordered = sorted(branches, key=branch_key)
    e = GroupElement.zero(kstar)
    if not ordered:
        return e
    for _ in range(terms):
        coeff = rng.choice([c for c in range(-bound, bound + 1) if c])
        entries = tuple(rng.choice(ordered) for _ in range(kstar + 1))
        if rng.random() < 0.5:
            g: Generator = YGen(BranchTuple(entries), rng.randint(0, max_level))
        else:
            m = rng.randint(0, kstar)
            nu = "".join(rng.choice("01") for _ in range(rng.randint(0, max_level)))
            g = XGen(m, BranchTuple(entries).drop(m), nu)
        e = e + GroupElement.of(g, coeff)
    return e


def _decide(e: GroupElement, parts: Sequence[BranchSet], depth: int, attempts: int = 3) -> bool:
    for extra in range(attempts):
        try:
            return memberSum(e, parts, depth + extra).member
        except DepthError:
            if extra == attempts - 1:
                raise
    raise AssertionError("unreachable")


@dataclass
class KernelReport:
    checked: int
    mismatches: List[str]

    @property
    def passed(self) -> bool:
        return not self.mismatches


def _compare_kernels(elements: Sequence[GroupElement], left: Sequence[BranchSet], right: Sequence[BranchSet],
                     depth: int) -> KernelReport:
    mismatches = []
    for e in elements:
        a, b = _decide(e, left, depth), _decide(e, right, depth)
        if a != b:
            mismatches.append(f"{e}: {a} vs {b}")
    return KernelReport(len(elements), mismatches)


def check_quotient_isomorphism(U: BranchSet, u: BranchSet, kstar: int, depth: int, rng: random.Random,
                               samples: int = 5) -> KernelReport:
    """(G_{U,u} + G_u)/G_{U,u} against G_u/G_{0,u}: both kernels on G_u must agree."""
    if len(u.branches) > kstar:
        raise InputError(f"u larger than k(*): |u| = {len(u.branches)} > {kstar}")
    elements = [random_element(rng, u.sorted(), kstar, max(depth - 2, 0)) for _ in range(samples)]
    left = BranchSet(U.branches, u.branches).parts()
    right = BranchSet(frozenset(), u.branches).parts()
    return _compare_kernels(elements, left, right, depth)


def check_quotient_chain(U: BranchSet, U1: BranchSet, U2: BranchSet, u: BranchSet, kstar: int, depth: int,
                         rng: random.Random, samples: int = 5) -> KernelReport:
    """(G_{U,u} + G_{U2+u})/(G_{U,u} + G_{U1+u}) against G_{U1+v}/G_{U1,v}, v = u plus the new branch."""
    added = U2.branches - U1.branches
    if not U1.branches <= U2.branches <= U.branches or len(added) != 1:
        raise InputError("need U1 within U2 within U with exactly one new branch")
    if len(u.branches) >= kstar:
        raise InputError(f"u must have fewer than {kstar} branches")
    v = u.branches | added
    elements = [random_element(rng, sorted(U1.branches | v, key=branch_key), kstar, max(depth - 2, 0))
                for _ in range(samples)]
    # G_{U,u} is the empty sum here when u is empty
    outer = BranchSet(U.branches, u.branches).parts() if u.branches else []
    left = outer + [BranchSet(U1.branches | u.branches)]
    right = BranchSet(U1.branches, v).parts()
    return _compare_kernels(elements, left, right, depth)


def scope_sample(cert: FreeBasisCert, rng: random.Random, count: int) -> List[Generator]:
    """A few in-scope generators, basis members included, for soundness spot checks."""
    pool: List[Generator] = cert.basis() + list(cert.order)
    if not pool:
        return []
    return sorted({rng.choice(pool) for _ in range(count)}, key=generator_key)

