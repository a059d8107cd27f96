# metricspace.py
"""Dyadic ultrametrics on windows of permutations of the natural numbers.

A PartialAut records the first `depth` values of a permutation and of its
inverse. Every distance below returns a value only when that window is
enough to certify it; otherwise it raises DepthError.
"""
import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from workbench.errors import DepthError, InputError
from workbench.shygroup import Branch


@total_ordering
@dataclass(frozen=True)
class DyadicDist:
    # None is the distance 0; otherwise the value is 2^-exponent
    exponent: Optional[int] = None

    def __post_init__(self):
        if self.exponent is not None and self.exponent < -1:
            raise InputError(f"dyadic exponent below -1: {self.exponent}")

    @classmethod
    def zero(cls) -> "DyadicDist":
        return cls(None)

    @classmethod
    def pow(cls, n: int) -> "DyadicDist":
        return cls(n)

    @classmethod
    def one(cls) -> "DyadicDist":
        return cls(0)

    @classmethod
    def two(cls) -> "DyadicDist":
        return cls(-1)

    @property
    def value(self) -> Fraction:
        if self.exponent is None:
            return Fraction(0)
        return Fraction(1, 2 ** self.exponent) if self.exponent >= 0 else Fraction(2)

    def is_zero(self) -> bool:
        return self.exponent is None

    def __lt__(self, other: "DyadicDist") -> bool:
        return self.value < other.value

    def __str__(self) -> str:
        if self.exponent is None:
            return "0"
        if self.exponent == 0:
            return "1"
        if self.exponent == -1:
            return "2"
        return f"2^-{self.exponent}"


def dmax(*dists: DyadicDist) -> DyadicDist:
    return max(dists, key=lambda d: d.value)


@dataclass(frozen=True)
class PartialAut:
    depth: int
    fwd: Tuple[int, ...]
    inv: Tuple[int, ...]
    # identity outside the window
    total: bool = False

    def __post_init__(self):
        if len(self.fwd) != self.depth or len(self.inv) != self.depth:
            raise InputError("tables must have exactly `depth` entries")
        if len(set(self.fwd)) != self.depth or len(set(self.inv)) != self.depth:
            raise InputError("permutation tables are not injective")
        for i, j in enumerate(self.fwd):
            if j < self.depth and self.inv[j] != i:
                raise InputError(f"inverse table disagrees at {j}")
        for j, i in enumerate(self.inv):
            if i < self.depth and self.fwd[i] != j:
                raise InputError(f"forward table disagrees at {i}")

    @classmethod
    def identity(cls, depth: int) -> "PartialAut":
        table = tuple(range(depth))
        return cls(depth, table, table, True)

    @classmethod
    def from_mapping(cls, depth: int, mapping: Mapping[int, int]) -> "PartialAut":
        """A finitely supported permutation given by its moved points."""
        moved = {i: j for i, j in mapping.items() if i != j}
        if set(moved) != set(moved.values()):
            raise InputError(f"mapping is not a permutation of its support: {dict(mapping)}")
        inverse = {j: i for i, j in moved.items()}
        fwd = tuple(moved.get(i, i) for i in range(depth))
        inv = tuple(inverse.get(i, i) for i in range(depth))
        total = all(i < depth for i in moved)
        return cls(depth, fwd, inv, total)

    def __call__(self, a: int) -> int:
        if a < self.depth:
            return self.fwd[a]
        if self.total:
            return a
        raise DepthError(f"insufficient depth: point {a} outside window {self.depth}")

    def inverse(self) -> "PartialAut":
        return PartialAut(self.depth, self.inv, self.fwd, self.total)

    def widen(self, depth: int) -> "PartialAut":
        if depth <= self.depth:
            return self
        if not self.total:
            raise DepthError(f"insufficient depth: cannot widen a window of {self.depth}")
        extra = tuple(range(self.depth, depth))
        return PartialAut(depth, self.fwd + extra, self.inv + extra, True)

    def compose(self, other: "PartialAut") -> "PartialAut":
        """self∘other on the largest window where both tables are known."""
        if self.total and other.total:
            depth = max(self.depth, other.depth)
            f, g = self.widen(depth), other.widen(depth)
            return PartialAut(depth, tuple(f(g(i)) for i in range(depth)),
                              tuple(g.inv[f.inv[i]] for i in range(depth)), True)
        depth = 0
        limit = min(self.depth, other.depth)
        while depth < limit and _known(self, other(depth)) and _known(other.inverse(), self.inv[depth]):
            depth += 1
        fwd = tuple(self(other(i)) for i in range(depth))
        inv = tuple(other.inverse()(self.inv[i]) for i in range(depth))
        return PartialAut(depth, fwd, inv, False)

    def moved_points(self) -> List[int]:
        return [i for i in range(self.depth) if self.fwd[i] != i]

    def __str__(self) -> str:
        pairs = ", ".join(f"{i}->{j}" for i, j in enumerate(self.fwd) if i != j)
        return f"{self.depth}; {pairs}"


def _known(f: PartialAut, a: int) -> bool:
    return a < f.depth or f.total


def _window(f: PartialAut, g: PartialAut) -> Tuple[PartialAut, PartialAut]:
    if f.total and g.total:
        depth = max(f.depth, g.depth)
        return f.widen(depth), g.widen(depth)
    return f, g


def dAut(f: PartialAut, g: PartialAut, endomorphism: bool = False, totals_agree: bool = False,
         upper_bound: bool = False) -> DyadicDist:
    """Distance 2^-n for the first n where f, g (or their inverses) differ.

    With endomorphism=True the inverse tables are ignored, which gives the
    distance on endomorphism monoids.
    """
    if f == g:
        return DyadicDist.zero()
    f, g = _window(f, g)
    depth = min(f.depth, g.depth)
    for n in range(depth):
        if f.fwd[n] != g.fwd[n] or (not endomorphism and f.inv[n] != g.inv[n]):
            return DyadicDist.pow(n)
    if totals_agree or (f.total and g.total):
        return DyadicDist.zero()
    if upper_bound:
        return DyadicDist.pow(depth)
    raise DepthError(f"insufficient depth: f and g agree on the first {depth} points")


@dataclass(frozen=True)
class OmegaRep:
    levels: Tuple[FrozenSet[int], ...]
    _level_of: Dict[int, int] = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        previous: FrozenSet[int] = frozenset()
        for n, level in enumerate(self.levels):
            if not previous <= level:
                raise InputError(f"level {n} does not contain level {n - 1}")
            for a in level - previous:
                self._level_of[a] = n
            previous = level

    @classmethod
    def from_cutoffs(cls, cutoffs: Sequence[int]) -> "OmegaRep":
        if any(c <= 0 for c in cutoffs) or any(b <= a for a, b in zip(cutoffs, cutoffs[1:])):
            raise InputError(f"cutoffs must be strictly increasing positive integers: {list(cutoffs)}")
        return cls(tuple(frozenset(range(c)) for c in cutoffs))

    @classmethod
    def from_levels(cls, levels: Iterable[Iterable[int]]) -> "OmegaRep":
        return cls(tuple(frozenset(level) for level in levels))

    @property
    def cutoffs(self) -> Optional[List[int]]:
        sizes = [len(level) for level in self.levels]
        if all(level == frozenset(range(len(level))) for level in self.levels):
            return sizes
        return None

    def level_of(self, a: int) -> Optional[int]:
        return self._level_of.get(a)

    def covered_levels(self, depth: int) -> int:
        """Number of leading levels lying inside the window {0..depth-1}."""
        count = 0
        for level in self.levels:
            if level and max(level) >= depth:
                break
            count += 1
        return count

    def __str__(self) -> str:
        cutoffs = self.cutoffs
        if cutoffs is not None:
            return ",".join(str(c) for c in cutoffs)
        return "; ".join("{" + ",".join(str(a) for a in sorted(level)) + "}" for level in self.levels)


def powers_of_two(count: int) -> OmegaRep:
    return OmegaRep.from_cutoffs([2 ** n for n in range(count)])


def _rep_scan(f: PartialAut, g: PartialAut, rep: OmegaRep, witness) -> Tuple[Optional[int], int]:
    f, g = _window(f, g)
    depth = min(f.depth, g.depth)
    covered = rep.covered_levels(depth)
    best: Optional[int] = None
    for fp, gp in ((f, g), (f.inverse(), g.inverse())):
        for n in range(covered):
            for a in rep.levels[n]:
                if rep.level_of(a) != n or fp(a) == gp(a):
                    continue
                candidate = witness(rep, n, fp(a), gp(a))
                if candidate is not None and candidate < covered and (best is None or candidate < best):
                    best = candidate
    return best, covered


def _membership_witness(rep: OmegaRep, n: int, u: int, v: int) -> Optional[int]:
    lu, lv = rep.level_of(u), rep.level_of(v)
    if lu is None and lv is None:
        return None
    if lu != lv:
        return n
    return max(n, lu)


def _restriction_witness(rep: OmegaRep, n: int, u: int, v: int) -> Optional[int]:
    return n


def _finish(best: Optional[int], covered: int, f: PartialAut, g: PartialAut, upper_bound: bool) -> DyadicDist:
    if best is not None:
        return DyadicDist.pow(best)
    fw, gw = _window(f, g)
    if f.total and g.total and fw.fwd == gw.fwd:
        return DyadicDist.zero()
    if upper_bound:
        return DyadicDist.pow(covered)
    raise DepthError(f"insufficient depth: no disagreement certified on the first {covered} levels")


def dRep(f: PartialAut, g: PartialAut, rep: OmegaRep, upper_bound: bool = False) -> DyadicDist:
    if f == g:
        return DyadicDist.zero()
    best, covered = _rep_scan(f, g, rep, _membership_witness)
    return _finish(best, covered, f, g, upper_bound)


def dRepPrime(f: PartialAut, g: PartialAut, rep: OmegaRep, upper_bound: bool = False) -> DyadicDist:
    """2^-n for the least level n on which f, g (or the inverses) differ."""
    if f == g:
        return DyadicDist.zero()
    best, covered = _rep_scan(f, g, rep, _restriction_witness)
    return _finish(best, covered, f, g, upper_bound)


@dataclass(frozen=True)
class DerivedRep:
    source: Tuple[PartialAut, ...]
    rep: OmegaRep
    stable_from: Tuple[int, ...]

    @property
    def relabeling(self) -> List[int]:
        # points listed by the first level containing them
        placed = [(self.rep.level_of(a), a) for a in range(len(self.stable_from))]
        return [a for level, a in sorted(p for p in placed if p[0] is not None)]


def _stabilization(values: Sequence[int]) -> int:
    k = len(values) - 1
    while k > 0 and values[k - 1] == values[-1]:
        k -= 1
    return k


def deriveRep(fs: Sequence[PartialAut], depth: int, rep: Optional[OmegaRep] = None,
              settle: int = 1) -> DerivedRep:
    """Sets B_n of points whose images are constant along the tail from n on.

    A point counts as stabilized only if its value is confirmed by at least
    `settle` later members of the (finite) sequence.
    """
    if not fs:
        raise InputError("empty sequence")
    if any(f.depth < depth and not f.total for f in fs):
        raise DepthError(f"insufficient depth: every member must cover a window of {depth}")
    fs = [f.widen(depth) for f in fs]
    rep = rep or OmegaRep.from_cutoffs([n + 1 for n in range(depth)])
    last = len(fs) - 1
    stable_from = []
    for a in range(depth):
        start = max(_stabilization([f.fwd[a] for f in fs]), _stabilization([f.inv[a] for f in fs]))
        if len(fs) > 1 and start > last - settle:
            raise DepthError(f"not weakly convergent on window: point {a} still moves at index {start}")
        stable_from.append(start)
    levels = []
    for n in range(len(fs)):
        level = rep.levels[min(n, len(rep.levels) - 1)]
        levels.append({a for a in level if a < depth and stable_from[a] <= n})
    return DerivedRep(tuple(fs), OmegaRep.from_levels(levels), tuple(stable_from))


def norm121(v: Mapping[Branch, Fraction]) -> DyadicDist:
    support = {b: Fraction(c) for b, c in v.items() if c != 0}
    if not support:
        return DyadicDist.zero()
    branches = list(support)
    bound = max((a.split_depth(b) for a in branches for b in branches if a != b), default=0) + 1
    for n in range(bound + 1):
        sums: Dict[str, Fraction] = {}
        for b, c in support.items():
            key = b.restrict(n)
            sums[key] = sums.get(key, Fraction(0)) + c
        if any(s != 0 for s in sums.values()):
            return DyadicDist.pow(n)
    raise AssertionError("distinct branches separate below their split depth")


# --- ambient structures ---

@dataclass(frozen=True)
class Structure:
    relations: Mapping[str, FrozenSet[Tuple[int, ...]]]


def preserves(f: PartialAut, structure: Structure) -> bool:
    """True when f and f^-1 map every relation tuple inside the window to a relation tuple."""
    for g in (f, f.inverse()):
        for tuples in structure.relations.values():
            for t in tuples:
                if all(_known(g, a) for a in t) and tuple(g(a) for a in t) not in tuples:
                    return False
    return True


def ball_member(f: PartialAut, n: int) -> bool:
    """Whether dAut(f, id) < 2^-n, i.e. f fixes 0..n together with its inverse."""
    if f.depth <= n and not f.total:
        raise DepthError(f"insufficient depth: need the first {n + 1} points")
    return dAut(f, PartialAut.identity(f.depth), upper_bound=True) < DyadicDist.pow(n)
