# shygroup.py
"""Presentation of the group G_k: branches, generators x[m;...;nu] and
y[...;n], the defining relations, exact normal forms in the divisible hull,
and membership in the subgroups generated over finite branch sets.

Relation for a full branch tuple t and level n:

    n! * y[t;n+1] = y[t;n] + sum over m of x[m; t without t_m; t_m restricted to n]
"""
import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from workbench.errors import DepthError, InputError
from workbench.lattice import IntegerLattice, hermite_contains

_BITS = re.compile(r"^[01]*$")


@dataclass(frozen=True)
class Branch:
    """Eventually constant 0/1 sequence: `prefix` followed by `tail` forever."""

    prefix: str
    tail: int

    def __post_init__(self):
        if not _BITS.match(self.prefix) or self.tail not in (0, 1):
            raise InputError(f"bad branch {self.prefix!r}*{self.tail!r}")
        if self.prefix.endswith(str(self.tail)):
            raise InputError(f"non-canonical branch {self.prefix}*{self.tail}")

    @classmethod
    def make(cls, prefix: str, tail: int) -> "Branch":
        return cls(prefix.rstrip(str(tail)), tail)

    def bit_at(self, i: int) -> int:
        return int(self.prefix[i]) if i < len(self.prefix) else self.tail

    def restrict(self, n: int) -> str:
        if n <= len(self.prefix):
            return self.prefix[:n]
        return self.prefix + str(self.tail) * (n - len(self.prefix))

    def split_depth(self, other: "Branch") -> int:
        """First position where the two branches differ."""
        if self == other:
            raise ValueError(f"{self} has no split depth with itself")
        bound = max(len(self.prefix), len(other.prefix)) + 1
        for i in range(bound):
            if self.bit_at(i) != other.bit_at(i):
                return i
        raise AssertionError("canonical branches differ before the longer prefix ends")

    def __str__(self) -> str:
        return f"{self.prefix}*{self.tail}"


ZERO_BRANCH = Branch("", 0)


def parse_branch(text: str) -> Tuple[Branch, bool]:
    """Parse `101*0`; the flag is False when the literal had to be canonicalized."""
    literal = text.strip()
    if literal.count("*") != 1:
        raise InputError(f"malformed branch literal {text!r}")
    prefix, tail = literal.split("*")
    if not _BITS.match(prefix) or tail not in ("0", "1"):
        raise InputError(f"malformed branch literal {text!r}")
    branch = Branch.make(prefix, int(tail))
    return branch, branch.prefix == prefix


def branch_key(b: Branch) -> str:
    return str(b)


@dataclass(frozen=True)
class BranchTuple:
    branches: Tuple[Branch, ...]
    omitted: Optional[int] = None

    @property
    def kstar(self) -> int:
        return len(self.branches) - (1 if self.omitted is None else 0)

    def domain(self) -> List[int]:
        return [i for i in range(self.kstar + 1) if i != self.omitted]

    def at(self, index: int) -> Branch:
        if index == self.omitted or not 0 <= index <= self.kstar:
            raise KeyError(index)
        return self.branches[self.domain().index(index)]

    def drop(self, m: int) -> "BranchTuple":
        if self.omitted is not None:
            raise ValueError("only full tuples can drop an index")
        return BranchTuple(self.branches[:m] + self.branches[m + 1:], m)

    def insert(self, branch: Branch) -> "BranchTuple":
        """Fill the omitted index back in."""
        m = self.omitted
        return BranchTuple(self.branches[:m] + (branch,) + self.branches[m:])

    def __str__(self) -> str:
        return ",".join(str(b) for b in self.branches)


@dataclass(frozen=True)
class XGen:
    m: int
    tuple: BranchTuple
    nu: str

    def __post_init__(self):
        if self.tuple.omitted != self.m:
            raise InputError(f"x-generator tuple must omit index {self.m}")
        if not _BITS.match(self.nu):
            raise InputError(f"bad prefix {self.nu!r}")

    @property
    def kind(self) -> str:
        return "x"

    def __str__(self) -> str:
        return f"x[{self.m};{self.tuple};{self.nu}]"


@dataclass(frozen=True)
class YGen:
    tuple: BranchTuple
    n: int

    def __post_init__(self):
        if self.tuple.omitted is not None:
            raise InputError("y-generator needs a full tuple")
        if self.n < 0:
            raise InputError(f"negative level {self.n}")

    @property
    def kind(self) -> str:
        return "y"

    def __str__(self) -> str:
        return f"y[{self.tuple};{self.n}]"


Generator = Union[XGen, YGen]


def generator_key(g: Generator) -> tuple:
    names = tuple(str(b) for b in g.tuple.branches)
    if isinstance(g, XGen):
        return (0, g.m, names, len(g.nu), g.nu)
    return (1, names, g.n)


def generator_branches(g: Generator) -> Tuple[Branch, ...]:
    return g.tuple.branches


def chain_x(t: BranchTuple, m: int, j: int) -> XGen:
    """The x-generator of index m appearing in the relation for (t, j)."""
    return XGen(m, t.drop(m), t.at(m).restrict(j))


def _product(a: int, b: int) -> int:
    """Product of i! for a <= i < b."""
    out = 1
    for i in range(a, b):
        out *= math.factorial(i)
    return out


class GroupElement:
    """A finite rational combination of generators.

    Arithmetic returns elements in normal form, where every y-generator
    sits at the highest level present. `relation` builds the formal
    relator, which compares equal to zero.
    """

    __slots__ = ("kstar", "terms")

    def __init__(self, kstar: int, terms: Optional[Mapping[Generator, Fraction]] = None):
        self.kstar = kstar
        self.terms: Dict[Generator, Fraction] = {}
        for g, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                self._check_kstar(g)
                self.terms[g] = self.terms.get(g, Fraction(0)) + c
        self.terms = {g: c for g, c in self.terms.items() if c}

    def _check_kstar(self, g: Generator) -> None:
        if g.tuple.kstar != self.kstar:
            raise InputError(f"generator {g} does not belong to k={self.kstar}")

    @classmethod
    def zero(cls, kstar: int) -> "GroupElement":
        return cls(kstar)

    @classmethod
    def of(cls, g: Generator, coeff: Union[int, Fraction] = 1) -> "GroupElement":
        return cls(g.tuple.kstar, {g: Fraction(coeff)})

    @property
    def level(self) -> int:
        return max((g.n for g in self.terms if isinstance(g, YGen)), default=0)

    def y_tuples(self) -> List[BranchTuple]:
        return sorted({g.tuple for g in self.terms if isinstance(g, YGen)}, key=str)

    def branches(self) -> FrozenSet[Branch]:
        return frozenset(b for g in self.terms for b in g.tuple.branches)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.terms.values())

    def normal_form(self) -> "GroupElement":
        return raiseLevel(self, self.level)

    def is_zero(self) -> bool:
        return not self.normal_form().terms

    def _merge(self, other: "GroupElement", sign: int) -> "GroupElement":
        if other.kstar != self.kstar:
            raise InputError(f"cannot combine elements of k={self.kstar} and k={other.kstar}")
        terms = dict(self.terms)
        for g, c in other.terms.items():
            terms[g] = terms.get(g, Fraction(0)) + sign * c
        return GroupElement(self.kstar, terms).normal_form()

    def __add__(self, other: "GroupElement") -> "GroupElement":
        return self._merge(other, 1)

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        return self._merge(other, -1)

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.kstar, {g: -c for g, c in self.terms.items()}).normal_form()

    def scale(self, factor: Union[int, Fraction]) -> "GroupElement":
        return GroupElement(self.kstar, {g: c * factor for g, c in self.terms.items()}).normal_form()

    def __rmul__(self, factor: Union[int, Fraction]) -> "GroupElement":
        return self.scale(factor)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return other.kstar == self.kstar and (self - other).is_zero()

    __hash__ = None  # type: ignore[assignment]

    def same_terms(self, other: "GroupElement") -> bool:
        return self.kstar == other.kstar and self.terms == other.terms

    def sorted_terms(self) -> List[Tuple[Generator, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: generator_key(item[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " ".join(f"{_format_coeff(c)} {g}" for g, c in self.sorted_terms())

    def __repr__(self) -> str:
        return f"GroupElement({self.kstar}, {self})"


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def relation(t: BranchTuple, n: int) -> GroupElement:
    """The formal relator n!*y[t;n+1] - y[t;n] - sum_m x[m;...;t_m|n]."""
    terms: Dict[Generator, Fraction] = {
        YGen(t, n + 1): Fraction(math.factorial(n)),
        YGen(t, n): Fraction(-1),
    }
    for m in range(t.kstar + 1):
        terms[chain_x(t, m, n)] = Fraction(-1)
    return GroupElement(t.kstar, terms)


def _add(terms: Dict[Generator, Fraction], g: Generator, c: Fraction) -> None:
    value = terms.get(g, Fraction(0)) + c
    if value:
        terms[g] = value
    else:
        terms.pop(g, None)


def _move_y(terms: Dict[Generator, Fraction], g: YGen, c: Fraction, target: int) -> None:
    t, n = g.tuple, g.n
    if n <= target:
        # y[t;j] = j!*y[t;j+1] - sum_m x(t,m,j)
        for j in range(n, target):
            weight = c * _product(n, j)
            for m in range(t.kstar + 1):
                _add(terms, chain_x(t, m, j), -weight)
        _add(terms, YGen(t, target), c * _product(n, target))
    else:
        # y[t;j+1] = (y[t;j] + sum_m x(t,m,j)) / j!
        for j in range(target, n):
            weight = c / _product(j, n)
            for m in range(t.kstar + 1):
                _add(terms, chain_x(t, m, j), weight)
        _add(terms, YGen(t, target), c / _product(target, n))


def atLevel(e: GroupElement, level: int) -> GroupElement:
    """The same element with every y-generator rewritten to `level`."""
    terms: Dict[Generator, Fraction] = {}
    for g, c in e.terms.items():
        if isinstance(g, YGen):
            _move_y(terms, g, c, level)
        else:
            _add(terms, g, c)
    return GroupElement(e.kstar, terms)


def raiseLevel(e: GroupElement, level: int) -> GroupElement:
    if any(isinstance(g, YGen) and g.n > level for g in e.terms):
        raise InputError(f"cannot raise to level {level} below the element's level {e.level}")
    return atLevel(e, level)


def lowerLevel(e: GroupElement, level: int) -> GroupElement:
    if any(isinstance(g, YGen) and g.n < level for g in e.terms):
        raise InputError(f"cannot lower to level {level} above a y-generator of the element")
    return atLevel(e, level)


def integral_form(e: GroupElement, depth: int) -> GroupElement:
    """Normal form at the least level in 0..depth where every coefficient is an integer."""
    if not any(isinstance(g, YGen) for g in e.terms):
        if not e.is_integral():
            raise InputError(f"{e} is not an integer combination of generators")
        return e
    for level in range(depth + 1):
        candidate = atLevel(e, level)
        if candidate.is_integral():
            return candidate
    raise DepthError(f"depth too small: {e} has no integral normal form up to level {depth}")


# --- branch sets and membership ---

@dataclass(frozen=True)
class BranchSet:
    branches: FrozenSet[Branch] = frozenset()
    excluded: FrozenSet[Branch] = frozenset()

    def __post_init__(self):
        if self.branches & self.excluded:
            raise InputError("excluded branches must be disjoint from the main set")

    @classmethod
    def of(cls, *branches: Branch, excluded: Iterable[Branch] = ()) -> "BranchSet":
        return cls(frozenset(branches), frozenset(excluded))

    def sorted(self) -> List[Branch]:
        return sorted(self.branches, key=branch_key)

    def union(self, other: Iterable[Branch]) -> "BranchSet":
        return BranchSet(self.branches | frozenset(other))

    def holds(self, g: Generator) -> bool:
        return all(b in self.branches for b in g.tuple.branches)

    def parts(self) -> List["BranchSet"]:
        """Parts whose subgroups generate G_{U,u} for U = branches, u = excluded."""
        if len(self.excluded) <= 1:
            return [BranchSet(self.branches)]
        return [BranchSet(self.branches | (self.excluded - {eta})) for eta in sorted(self.excluded, key=branch_key)]

    def split_bound(self) -> int:
        ordered = self.sorted()
        return max((a.split_depth(b) + 1 for a, b in itertools.combinations(ordered, 2)), default=0)

    def __str__(self) -> str:
        body = "{" + ", ".join(str(b) for b in self.sorted()) + "}"
        if self.excluded:
            body += " u {" + ", ".join(str(b) for b in sorted(self.excluded, key=branch_key)) + "}"
        return body


def full_tuples(branches: Sequence[Branch], kstar: int) -> List[BranchTuple]:
    ordered = sorted(branches, key=branch_key)
    return [BranchTuple(p) for p in itertools.product(ordered, repeat=kstar + 1)]


def bit_strings(max_length: int) -> Iterator[str]:
    for length in range(max_length + 1):
        for bits in itertools.product("01", repeat=length):
            yield "".join(bits)


@dataclass
class MembershipCertificate:
    member: bool
    level: int
    combination: Dict[Generator, int] = field(default_factory=dict)
    obstruction: Optional[Tuple[Generator, Fraction]] = None
    row: List[Tuple[Generator, Fraction]] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.member


def _held(g: Generator, parts: Sequence[BranchSet]) -> bool:
    return any(p.holds(g) for p in parts)


def _columns_and_rows(form: GroupElement, parts: Sequence[BranchSet], level: int):
    rows: List[Tuple[Generator, GroupElement]] = []
    for t in form.y_tuples():
        if _held(YGen(t, 0), parts):
            for n in range(level + 1):
                rows.append((YGen(t, n), raiseLevel(GroupElement.of(YGen(t, n)), level)))
    columns = set(form.terms)
    for _, vector in rows:
        columns |= set(vector.terms)
    for g in sorted(columns, key=generator_key):
        if isinstance(g, XGen) and _held(g, parts):
            rows.append((g, GroupElement.of(g)))
    return sorted(columns, key=generator_key), rows


def _is_final(g: Generator, tuples: Sequence[BranchTuple], level: int) -> bool:
    """Whether raising beyond `level` can still repair this coordinate.

    `tuples` are the held y-tuples of the element; an unheld y-coordinate
    only gets rescaled by raising, so it never becomes zero.
    """
    if isinstance(g, YGen):
        return g.tuple not in tuples
    for t in tuples:
        if g.tuple == t.drop(g.m) and len(g.nu) >= level and t.at(g.m).restrict(len(g.nu)) == g.nu:
            return False
    return True


def memberSum(e: GroupElement, parts: Sequence[BranchSet], depth: int) -> MembershipCertificate:
    """Decide e in the subgroup generated by the parts' generators, working at level `depth`."""
    if e.level > depth:
        raise DepthError(f"depth too small: element level {e.level} exceeds depth {depth}")
    form = raiseLevel(e, depth)
    columns, rows = _columns_and_rows(form, parts, depth)
    index = {g: j for j, g in enumerate(columns)}
    lattice = IntegerLattice(len(columns))
    for _, vector in rows:
        dense = [0] * len(columns)
        for g, c in vector.terms.items():
            dense[index[g]] = int(c)
        lattice.add_vector(dense)
    target = [form.terms.get(g, Fraction(0)) for g in columns]
    result = lattice.membership(target)
    if result.member:
        combination = {rows[i][0]: c for i, c in result.combination.items() if c}
        return MembershipCertificate(True, depth, combination)
    tuples = [t for t in form.y_tuples() if _held(YGen(t, 0), parts)]
    bad = [
        g for g in columns
        if form.terms.get(g) and (not _held(g, parts) or form.terms[g].denominator != 1)
    ]
    final = [g for g in bad if _is_final(g, tuples, depth)]
    if not final:
        raise DepthError(f"depth too small: membership of {e} is undecided at level {depth}")
    culprit = final[0]
    return MembershipCertificate(False, depth, obstruction=(culprit, form.terms[culprit]),
                                 row=form.sorted_terms())


def memberG(e: GroupElement, U: BranchSet, depth: int) -> MembershipCertificate:
    return memberSum(e, [U], depth)


def check_membership(e: GroupElement, cert: MembershipCertificate, parts: Sequence[BranchSet]) -> bool:
    """Re-check a positive certificate: its combination must rebuild e from held generators."""
    if not cert.member:
        return cert.obstruction is not None
    rebuilt = GroupElement(e.kstar, {g: Fraction(c) for g, c in cert.combination.items()})
    return all(_held(g, parts) for g in cert.combination) and rebuilt == e


def lattice_oracle_member(e: GroupElement, parts: Sequence[BranchSet], depth: int) -> bool:
    """Membership read off sympy's Hermite form of the truncated generator matrix."""
    form = raiseLevel(e, max(depth, e.level))
    level = max(depth, e.level)
    columns = set(form.terms)
    tuples = [t for t in form.y_tuples() if _held(YGen(t, 0), parts)]
    for t in tuples:
        for m in range(t.kstar + 1):
            columns |= {chain_x(t, m, j) for j in range(level)}
        columns.add(YGen(t, level))
    ordered = sorted(columns, key=generator_key)
    generators: List[GroupElement] = [GroupElement.of(YGen(t, n)) for t in tuples for n in range(level + 1)]
    generators += [GroupElement.of(g) for g in ordered if isinstance(g, XGen) and _held(g, parts)]
    rows = []
    for gen in generators:
        vector = raiseLevel(gen, level)
        rows.append([int(vector.terms.get(g, 0)) for g in ordered])
    return hermite_contains(rows, [form.terms.get(g, Fraction(0)) for g in ordered])


# --- literals ---

_GEN = re.compile(r"([xy])\[([^\]]*)\]")
_TERM = re.compile(r"\s*([+-])?\s*(\d+(?:/\d+)?)?\s*\*?\s*([xy]\[[^\]]*\])")


def _parse_tuple(text: str, warnings: List[str]) -> Tuple[Branch, ...]:
    out = []
    for literal in [p for p in text.split(",") if p.strip()]:
        branch, canonical = parse_branch(literal)
        if not canonical:
            warnings.append(f"branch {literal.strip()} canonicalized to {branch}")
        out.append(branch)
    return tuple(out)


def parse_generator(text: str, kstar: int, warnings: Optional[List[str]] = None) -> Generator:
    warnings = warnings if warnings is not None else []
    match = _GEN.fullmatch(text.strip())
    if match is None:
        raise InputError(f"malformed generator literal {text!r}")
    fields = [f.strip() for f in match.group(2).split(";")]
    try:
        if match.group(1) == "x":
            if len(fields) != 3:
                raise InputError(f"x-generator needs `m; tuple; nu`: {text!r}")
            m = int(fields[0])
            branches = _parse_tuple(fields[1], warnings)
            if len(branches) != kstar or not 0 <= m <= kstar:
                raise InputError(f"x-generator {text!r} does not fit k={kstar}")
            return XGen(m, BranchTuple(branches, m), fields[2])
        if len(fields) != 2:
            raise InputError(f"y-generator needs `tuple; n`: {text!r}")
        branches = _parse_tuple(fields[0], warnings)
        if len(branches) != kstar + 1:
            raise InputError(f"y-generator {text!r} does not fit k={kstar}")
        return YGen(BranchTuple(branches), int(fields[1]))
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed generator literal {text!r}: {exc}")


def parse_element(text: str, kstar: int, warnings: Optional[List[str]] = None) -> GroupElement:
    """Parse `2 y[*0;3] -1 x[0;;01] ...`; `0` or an empty string is the zero element."""
    warnings = warnings if warnings is not None else []
    source = text.strip()
    if source in ("", "0"):
        return GroupElement.zero(kstar)
    terms: Dict[Generator, Fraction] = {}
    pos = 0
    while pos < len(source):
        match = _TERM.match(source, pos)
        if match is None or match.end() == pos:
            raise InputError(f"malformed element near {source[pos:pos + 12]!r}", line=1, column=pos + 1)
        coeff = Fraction(match.group(2) or 1)
        if match.group(1) == "-":
            coeff = -coeff
        g = parse_generator(match.group(3), kstar, warnings)
        terms[g] = terms.get(g, Fraction(0)) + coeff
        pos = match.end()
        while pos < len(source) and source[pos].isspace():
            pos += 1
    return GroupElement(kstar, terms)
