# eqsolver.py
"""Equation chains d_n = sigma_n(d_{n+1}) over complete metric algebras.

stageApprox(chain, k) sets c^k_n = d_n for n >= k and c^k_n = sigma_n(c^k_{n+1})
below k. For a fixed n these values form a Cauchy sequence in k, and
solveChain reads the limit off a single stage chosen through the chain's
modulus. Two exactly computable oracles are built in: the 2-adic integers
with affine terms, and block-preserving permutations of the naturals with
word terms.
"""
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Protocol, Sequence, Tuple, Union

import pandas as pd
from sympy.combinatorics import Permutation

from workbench.errors import CertificateError, DepthError, InputError
from workbench.freewords import FreeGroupOracle, PermutationOracle, Word, eval_word, nth_root, parse_word
from workbench.metricspace import DyadicDist

Element = Any


# --- terms ---

@dataclass(frozen=True)
class AffineTerm:
    coeffs: Tuple[Tuple[str, int], ...]
    constant: int = 0

    def variables(self) -> List[str]:
        return [name for name, _ in self.coeffs]

    def __str__(self) -> str:
        pieces = [f"{c}*{name}" if c != 1 else name for name, c in self.coeffs]
        if self.constant or not pieces:
            pieces.append(str(self.constant))
        return "+".join(pieces).replace("+-", "-")


@dataclass(frozen=True)
class WordTerm:
    word: Word

    def variables(self) -> List[str]:
        return self.word.symbols()

    def __str__(self) -> str:
        return str(self.word)


Term = Union[AffineTerm, WordTerm]

_AFFINE_PIECE = re.compile(r"^([+-]?)(\d*)\*?([A-Za-z_]\w*)?$")


def parse_affine(text: str) -> AffineTerm:
    """Parse `2*x1+1`, `x - 3`, `-y+2*z`."""
    source = text.replace(" ", "")
    if not source:
        raise InputError("empty affine term")
    coeffs: Dict[str, int] = {}
    constant = 0
    for piece in re.findall(r"[+-]?[^+-]+", source):
        match = _AFFINE_PIECE.match(piece)
        if match is None or (not match.group(2) and not match.group(3)):
            raise InputError(f"malformed affine term {text!r} near {piece!r}")
        sign = -1 if match.group(1) == "-" else 1
        value = sign * int(match.group(2) or 1)
        if match.group(3):
            coeffs[match.group(3)] = coeffs.get(match.group(3), 0) + value
        else:
            constant += value
    return AffineTerm(tuple(sorted(coeffs.items())), constant)


def parse_term(text: str, kind: str) -> Term:
    if kind == "affine":
        return parse_affine(text)
    if kind == "word":
        return WordTerm(parse_word(text))
    raise InputError(f"unknown term kind {kind!r}")


# --- oracles ---

class MetricAlgebraOracle(Protocol):
    parallel_safe: bool
    term_kind: str
    resolution: int

    def identity(self) -> Element: ...

    def evaluate(self, term: Term, args: Dict[str, Element]) -> Element: ...

    def distance(self, a: Element, b: Element) -> DyadicDist: ...

    def perturb(self, center: Element, radius: DyadicDist, rng: random.Random) -> Element: ...

    def parse(self, text: str) -> Element: ...

    def format(self, value: Element) -> str: ...


class TwoAdicOracle:
    """Z_2 computed modulo 2^precision. Congruent values are reported at
    distance 2^-precision, the best certified bound."""

    parallel_safe = True
    term_kind = "affine"

    def __init__(self, precision: int = 32):
        if precision < 1:
            raise InputError("precision must be positive")
        self.precision = precision
        self.modulus = 2 ** precision
        self.resolution = precision

    def identity(self) -> int:
        return 0

    def evaluate(self, term: Term, args: Dict[str, Element]) -> int:
        if not isinstance(term, AffineTerm):
            raise InputError("the 2-adic oracle evaluates affine terms only")
        total = term.constant
        for name, c in term.coeffs:
            if name not in args:
                raise InputError(f"unassigned variable {name!r}")
            total += c * args[name]
        return total % self.modulus

    def distance(self, a: int, b: int) -> DyadicDist:
        diff = (a - b) % self.modulus
        if diff == 0:
            return DyadicDist.pow(self.precision)
        return DyadicDist.pow((diff & -diff).bit_length() - 1)

    def perturb(self, center: int, radius: DyadicDist, rng: random.Random) -> int:
        if radius.is_zero():
            return center
        shift = max(radius.exponent, 0)
        return (center + (rng.randrange(self.modulus) << shift)) % self.modulus

    def parse(self, text: str) -> int:
        try:
            return int(text.strip()) % self.modulus
        except ValueError:
            raise InputError(f"not a 2-adic integer literal: {text!r}")

    def format(self, value: int) -> str:
        return str(value)


def block_range(b: int) -> range:
    start = b * (b + 1) // 2
    return range(start, start + b + 1)


class BlockPermutationOracle:
    """Permutations of the naturals fixing every block {0}, {1,2}, {3,4,5}, ...
    setwise, known on the first `blocks` blocks. The distance is 2^-j for the
    first block j where two elements differ."""

    parallel_safe = True
    term_kind = "word"

    def __init__(self, blocks: int):
        if blocks < 1:
            raise InputError("need at least one block")
        self.blocks = blocks
        self.resolution = blocks
        self.groups = [PermutationOracle(b + 1) for b in range(blocks)]

    def identity(self) -> Tuple[Permutation, ...]:
        return tuple(g.identity() for g in self.groups)

    def evaluate(self, term: Term, args: Dict[str, Element]) -> Tuple[Permutation, ...]:
        if not isinstance(term, WordTerm):
            raise InputError("the block oracle evaluates word terms only")
        out = []
        for j, group in enumerate(self.groups):
            assignment = {name: value[j] for name, value in args.items()}
            out.append(eval_word(term.word, assignment, group))
        return tuple(out)

    def distance(self, a: Sequence[Permutation], b: Sequence[Permutation]) -> DyadicDist:
        for j in range(self.blocks):
            if a[j] != b[j]:
                return DyadicDist.pow(j)
        return DyadicDist.pow(self.blocks)

    def perturb(self, center: Sequence[Permutation], radius: DyadicDist, rng: random.Random):
        if radius.is_zero():
            return tuple(center)
        keep = max(radius.exponent, 0)
        out = list(center)
        for j in range(keep, self.blocks):
            table = list(range(j + 1))
            rng.shuffle(table)
            out[j] = Permutation(table)
        return tuple(out)

    def parse(self, text: str) -> Tuple[Permutation, ...]:
        """Cycles in global numbering, e.g. `(1 2)(3 4 5)`; `e` is the identity."""
        source = text.strip()
        out = [list(range(b + 1)) for b in range(self.blocks)]
        if source in ("e", "1", ""):
            return tuple(Permutation(t) for t in out)
        cycles = re.findall(r"\(([^)]*)\)", source)
        if not cycles or re.sub(r"\([^)]*\)", "", source).strip():
            raise InputError(f"malformed permutation literal {text!r}")
        for cycle in cycles:
            points = [int(p) for p in cycle.replace(",", " ").split()]
            owners = {self._block_of(p) for p in points}
            if len(owners) != 1:
                raise InputError(f"cycle ({cycle}) leaves its block")
            b = owners.pop()
            if b >= self.blocks:
                continue
            base = block_range(b).start
            for p, q in zip(points, points[1:] + points[:1]):
                out[b][p - base] = q - base
        try:
            return tuple(Permutation(t) for t in out)
        except ValueError:
            raise InputError(f"cycles of {text!r} overlap")

    def _block_of(self, point: int) -> int:
        b = 0
        while block_range(b).stop <= point:
            b += 1
        return b

    def format(self, value: Sequence[Permutation]) -> str:
        pieces = []
        for b, perm in enumerate(value):
            base = block_range(b).start
            for cycle in perm.cyclic_form:
                pieces.append("(" + " ".join(str(base + p) for p in cycle) + ")")
        return "".join(pieces) or "e"


# --- chains ---

@dataclass
class Level:
    n: int
    slots: List[str]
    terms: Dict[str, Term]
    targets: Dict[str, Element]
    zeta: DyadicDist
    params: Dict[str, Element] = field(default_factory=dict)


@dataclass
class EquationChain:
    levels: List[Level]
    modulus: Optional[Callable[[int, int], int]] = None

    def __post_init__(self):
        seen = set()
        for i, level in enumerate(self.levels):
            if level.n != i:
                raise InputError(f"levels must be numbered 0, 1, ...; found {level.n} at position {i}")
            if not level.slots:
                raise InputError(f"level {i} has no slots")
            if seen & set(level.slots):
                raise InputError(f"slots of level {i} repeat earlier slots")
            seen |= set(level.slots)
            if level.zeta.is_zero():
                raise InputError(f"tolerance of level {i} must be positive")
            if i and level.zeta > self.levels[i - 1].zeta:
                raise InputError(f"tolerances must not increase (level {i})")

    @property
    def length(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> Level:
        if not 0 <= n < len(self.levels):
            raise DepthError(f"modulus exhausted: the chain is only given to level {len(self.levels) - 1}")
        return self.levels[n]

    def targets(self, n: int) -> Dict[str, Element]:
        return self.level(n).targets

    def apply(self, n: int, values: Dict[str, Element], oracle: MetricAlgebraOracle) -> Dict[str, Element]:
        """sigma_n applied to the next level's values."""
        level = self.level(n)
        args = dict(level.params)
        args.update(values)
        return {t: oracle.evaluate(level.terms[t], args) for t in level.slots}


@dataclass
class StageTable:
    k: int
    values: Dict[int, Dict[str, Element]]

    def __getitem__(self, n: int) -> Dict[str, Element]:
        return self.values[n]

    def to_frame(self, oracle: MetricAlgebraOracle) -> pd.DataFrame:
        rows = [
            {"level": n, "slot": slot, "value": oracle.format(v)}
            for n in sorted(self.values)
            for slot, v in self.values[n].items()
        ]
        return pd.DataFrame(rows, columns=["level", "slot", "value"])


def stageApprox(chain: EquationChain, k: int, oracle: MetricAlgebraOracle,
                window: Optional[int] = None) -> StageTable:
    top = max(k, window or 0)
    chain.level(top)
    values: Dict[int, Dict[str, Element]] = {}
    for n in range(top, k - 1, -1):
        values[n] = dict(chain.targets(n))
    for n in range(k - 1, -1, -1):
        values[n] = chain.apply(n, values[n + 1], oracle)
    return StageTable(k, values)


def tolerance(level: Level, oracle: MetricAlgebraOracle) -> DyadicDist:
    """zeta_n, coarsened to what the oracle can tell apart."""
    return max(level.zeta, DyadicDist.pow(oracle.resolution))


def ball_violations(table: StageTable, chain: EquationChain, oracle: MetricAlgebraOracle) -> List[str]:
    """Entries that leave Ball(d_n, zeta_n)."""
    out = []
    for n, row in sorted(table.values.items()):
        level = chain.level(n)
        radius = tolerance(level, oracle)
        for slot, value in row.items():
            gap = oracle.distance(value, level.targets[slot])
            if gap > radius:
                out.append(f"level {n} slot {slot}: distance {gap} exceeds {radius}")
    return out


# --- moduli ---

def _valuation(c: int, cap: int) -> int:
    if c == 0:
        return cap
    return min((c & -c).bit_length() - 1, cap)


def affine_modulus(chain: EquationChain) -> Callable[[int, int], int]:
    """m(n, p): the least m > n with zeta_m times the contraction of sigma_n..sigma_{m-1} below 2^-p."""

    def contraction(j: int, p: int) -> int:
        level = chain.level(j)
        values = [c for t in level.terms.values() if isinstance(t, AffineTerm) for _, c in t.coeffs]
        return min((_valuation(c, p) for c in values), default=p)

    def modulus(n: int, p: int) -> int:
        shrink = 0
        for m in range(n + 1, chain.length):
            shrink += contraction(m - 1, p)
            zeta = chain.level(m).zeta.exponent
            if zeta is not None and zeta + shrink >= p:
                return m
        raise DepthError(f"modulus exhausted: level {n} needs more than {chain.length} levels for 2^-{p}")

    return modulus


def block_modulus(n: int, p: int) -> int:
    return max(p, n) + 1


def _modulus(chain: EquationChain) -> Callable[[int, int], int]:
    return chain.modulus or affine_modulus(chain)


# --- solving ---

@dataclass
class Solution:
    goal: int
    stage: int
    values: Dict[int, Dict[str, Element]]
    table: StageTable


def solveChain(chain: EquationChain, oracle: MetricAlgebraOracle, goal: int, window: int) -> Solution:
    """Approximate solutions d*_n for n < window, to distance 2^-goal."""
    if goal > oracle.resolution:
        raise DepthError(f"insufficient depth: the oracle resolves distances only down to 2^-{oracle.resolution}")
    modulus = _modulus(chain)
    stage = max(modulus(n, goal) for n in range(window))
    table = stageApprox(chain, stage, oracle, window)
    bound = DyadicDist.pow(goal)
    for n in range(window):
        image = chain.apply(n, table[n + 1], oracle)
        for slot in chain.level(n).slots:
            if oracle.distance(table[n][slot], image[slot]) > bound:
                raise CertificateError(f"level {n} slot {slot} misses its equation", clause="equation")
    violations = ball_violations(StageTable(stage, {n: table[n] for n in range(window)}), chain, oracle)
    if violations:
        raise CertificateError(violations[0], clause="ball")
    return Solution(goal, stage, {n: table[n] for n in range(window)}, table)


def check_perturbations(chain: EquationChain, oracle: MetricAlgebraOracle, rng: random.Random,
                        samples: int = 32, levels: Optional[int] = None) -> None:
    """Sampled check that sigma_n maps Ball(d_{n+1}, zeta_{n+1}) into Ball(d_n, zeta_n)."""
    top = min(levels or chain.length - 1, chain.length - 1)
    for n in range(top):
        upper, lower = chain.level(n + 1), chain.level(n)
        radius = tolerance(lower, oracle)
        for _ in range(samples):
            moved = {t: oracle.perturb(v, upper.zeta, rng) for t, v in upper.targets.items()}
            image = chain.apply(n, moved, oracle)
            for slot, value in image.items():
                gap = oracle.distance(value, lower.targets[slot])
                if gap > radius:
                    raise CertificateError(
                        f"level {n} slot {slot}: perturbed image at distance {gap} > {radius}",
                        clause="perturbation stability",
                    )


def _stage_values(args: Tuple[EquationChain, int, MetricAlgebraOracle, int]) -> Dict[str, Element]:
    chain, k, oracle, n = args
    return stageApprox(chain, k, oracle)[n]


def check_cauchy(chain: EquationChain, oracle: MetricAlgebraOracle, goal: int, window: int,
                 rng: random.Random, samples: int = 4) -> None:
    """Sampled stages k < k' past the modulus agree at each level to 2^-goal."""
    modulus = _modulus(chain)
    jobs = []
    for n in range(window):
        start = modulus(n, goal)
        if start >= chain.length - 1:
            continue
        for _ in range(samples):
            k, k2 = sorted(rng.sample(range(start, chain.length), 2))
            jobs.append((n, k, k2))
    work = [(chain, k, oracle, n) for n, k, _ in jobs] + [(chain, k2, oracle, n) for n, _, k2 in jobs]
    if getattr(oracle, "parallel_safe", False):
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(_stage_values, work))
    else:
        results = [_stage_values(w) for w in work]
    bound = DyadicDist.pow(goal)
    half = len(jobs)
    for i, (n, k, k2) in enumerate(jobs):
        for slot, value in results[i].items():
            if oracle.distance(value, results[half + i][slot]) > bound:
                raise CertificateError(f"stages {k} and {k2} differ at level {n} slot {slot}", clause="cauchy")


# --- anti-retract chains ---

class RootOracle(Protocol):
    def identity(self) -> Element: ...

    def multiply(self, a: Element, b: Element) -> Element: ...

    def inverse(self, a: Element) -> Element: ...

    def root(self, a: Element, n: int) -> Optional[Element]: ...


class FreeRootOracle(FreeGroupOracle):
    def root(self, a: Word, n: int) -> Optional[Word]:
        return nth_root(a, n)


@dataclass
class AntiRetractStage:
    k: int
    exponent: int
    b: Element
    obstruction: List[Element]

    def term(self) -> WordTerm:
        return WordTerm(parse_word(f"x^{self.exponent}*b{self.k}"))


def obstruction_set(a: Element, stages: Sequence[AntiRetractStage], oracle: RootOracle) -> List[Element]:
    """The values c_k reached from c_0 = a through c_m = c_{m+1}^{n_m} b_m; at most one."""
    c = a
    for stage in stages:
        c = oracle.root(oracle.multiply(c, oracle.inverse(stage.b)), stage.exponent)
        if c is None:
            return []
    return [c]


def choose_exponent(obstruction: Iterable[Element], b: Element, oracle: RootOracle, bound: int = 64) -> int:
    """Least n > 1 such that a*b^-1 has no n-th root for every a in the obstruction set."""
    quotients = [oracle.multiply(a, oracle.inverse(b)) for a in obstruction]
    if any(q == oracle.identity() for q in quotients):
        raise DepthError("root oracle undecided: a*b^-1 is the identity, which has every root")
    for n in range(2, bound + 1):
        if all(oracle.root(q, n) is None for q in quotients):
            return n
    raise DepthError(f"root oracle undecided: every exponent up to {bound} admits a root")


def buildAntiRetractChain(enumeration: Sequence[Element], near_identity: Sequence[Element],
                          oracle: Optional[RootOracle] = None, bound: int = 64) -> List[AntiRetractStage]:
    """Stage k uses sigma_k(x) = x^{n_k} b_k, with n_k chosen so that a_k cannot be reached."""
    oracle = oracle or FreeRootOracle()
    if len(near_identity) < len(enumeration):
        raise InputError("need one near-identity element per enumerated element")
    bs = list(near_identity[:len(enumeration)])
    if any(b == oracle.identity() for b in bs) or len(set(map(str, bs))) != len(bs):
        raise InputError("near-identity elements must be pairwise distinct and not the identity")
    stages: List[AntiRetractStage] = []
    for k, a in enumerate(enumeration):
        obstruction = obstruction_set(a, stages, oracle)
        exponent = choose_exponent(obstruction, bs[k], oracle, bound)
        stages.append(AntiRetractStage(k, exponent, bs[k], obstruction))
    return stages


def chain_terms(stages: Sequence[AntiRetractStage]) -> List[Tuple[WordTerm, Dict[str, Element]]]:
    return [(stage.term(), {f"b{stage.k}": stage.b}) for stage in stages]
