# freewords.py
import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Protocol, Sequence, Tuple, TypeVar

from sympy.combinatorics import Permutation

from workbench.errors import InputError

T = TypeVar("T")

_TOKEN = re.compile(r"([A-Za-z][0-9_]*)(?:\^(-?\d+))?")


@dataclass(frozen=True)
class Letter:
    symbol: str
    exponent: int = 1

    def __post_init__(self):
        if self.exponent == 0:
            raise InputError(f"letter {self.symbol} has exponent 0")


@dataclass(frozen=True)
class Word:
    # Always reduced; build through reduce_word or the operators.
    letters: Tuple[Letter, ...] = ()

    def __mul__(self, other: "Word") -> "Word":
        return reduce_word(self.letters + other.letters)

    def __invert__(self) -> "Word":
        return Word(tuple(Letter(let.symbol, -let.exponent) for let in reversed(self.letters)))

    def __pow__(self, n: int) -> "Word":
        if n == 0:
            return Word()
        if n < 0:
            return ~(self ** -n)
        half = self ** (n // 2)
        return half * half * self if n % 2 else half * half

    def __len__(self) -> int:
        return word_length(self)

    def is_identity(self) -> bool:
        return not self.letters

    def symbols(self) -> List[str]:
        return sorted({let.symbol for let in self.letters})

    def __str__(self) -> str:
        return format_word(self)


EPSILON = Word()


def reduce_word(raw: Sequence[Letter]) -> Word:
    stack: List[Letter] = []
    for let in raw:
        if stack and stack[-1].symbol == let.symbol:
            merged = stack[-1].exponent + let.exponent
            stack.pop()
            if merged != 0:
                stack.append(Letter(let.symbol, merged))
        else:
            stack.append(let)
    return Word(tuple(stack))


def word_length(w: Word) -> int:
    return sum(abs(let.exponent) for let in w.letters)


def generator(symbol: str) -> Word:
    return Word((Letter(symbol, 1),))


def parse_word(text: str) -> Word:
    """Parse `a^2*b^-3`, `abab` or `1` (the empty word)."""
    source = text.strip()
    if source in ("", "1", "e"):
        return EPSILON
    raw: List[Letter] = []
    for piece in source.split("*"):
        piece = piece.strip()
        if piece == "1":
            continue
        pos = 0
        while pos < len(piece):
            match = _TOKEN.match(piece, pos)
            if match is None:
                raise InputError(f"malformed word literal {text!r}", line=1, column=pos + 1)
            exponent = int(match.group(2)) if match.group(2) is not None else 1
            if exponent != 0:
                raw.append(Letter(match.group(1), exponent))
            pos = match.end()
    return reduce_word(raw)


def format_word(w: Word) -> str:
    if w.is_identity():
        return "1"
    tokens = [let.symbol if let.exponent == 1 else f"{let.symbol}^{let.exponent}" for let in w.letters]
    joiner = "" if all(len(let.symbol) == 1 for let in w.letters) else "*"
    return joiner.join(tokens)


# --- roots ---

def _units(w: Word) -> List[Tuple[str, int]]:
    out = []
    for let in w.letters:
        step = 1 if let.exponent > 0 else -1
        out.extend([(let.symbol, step)] * abs(let.exponent))
    return out


def _from_units(units: Sequence[Tuple[str, int]]) -> Word:
    return reduce_word([Letter(sym, step) for sym, step in units])


def cyclic_reduction(w: Word) -> Tuple[Word, Word]:
    """Return (c, r) with w = c^-1 r c and r cyclically reduced."""
    units = _units(w)
    i, j = 0, len(units) - 1
    while i < j and units[i][0] == units[j][0] and units[i][1] == -units[j][1]:
        i += 1
        j -= 1
    outer = _from_units(units[:i])
    return ~outer, _from_units(units[i:j + 1])


def nth_root(w: Word, n: int) -> Optional[Word]:
    if n < 1:
        raise InputError(f"root order must be positive, got {n}")
    if w.is_identity() or n == 1:
        return w
    conjugator, core = cyclic_reduction(w)
    units = _units(core)
    if len(units) % n:
        return None
    size = len(units) // n
    period = units[:size]
    if period * n != units:
        return None
    return ~conjugator * _from_units(period) * conjugator


def root_orders(w: Word, bound: int) -> List[int]:
    return [n for n in range(1, bound + 1) if nth_root(w, n) is not None]


def reduced_words(symbols: Sequence[str], max_length: int) -> Iterator[Word]:
    """Every reduced word of length at most max_length, shortest first."""
    steps = [(sym, s) for sym in symbols for s in (1, -1)]
    frontier: List[List[Tuple[str, int]]] = [[]]
    yield EPSILON
    for _ in range(max_length):
        grown = []
        for units in frontier:
            for step in steps:
                if units and units[-1][0] == step[0] and units[-1][1] == -step[1]:
                    continue
                grown.append(units + [step])
        for units in grown:
            yield _from_units(units)
        frontier = grown


# --- evaluation ---

class GroupOracle(Protocol[T]):
    def identity(self) -> T: ...

    def multiply(self, a: T, b: T) -> T: ...

    def inverse(self, a: T) -> T: ...


def _power(oracle: GroupOracle, g, n: int):
    if n < 0:
        return _power(oracle, oracle.inverse(g), -n)
    result = oracle.identity()
    base = g
    while n:
        if n & 1:
            result = oracle.multiply(result, base)
        base = oracle.multiply(base, base)
        n >>= 1
    return result


def eval_word(w: Word, assignment: Mapping[str, T], oracle: GroupOracle) -> T:
    result = oracle.identity()
    for let in w.letters:
        if let.symbol not in assignment:
            raise InputError(f"unassigned variable {let.symbol!r}")
        result = oracle.multiply(result, _power(oracle, assignment[let.symbol], let.exponent))
    return result


class PermutationOracle:
    """Permutations of {0..size-1}; multiply(p, q) is p∘q (q acts first)."""

    parallel_safe = True

    def __init__(self, size: int):
        self.size = size

    def identity(self) -> Permutation:
        return Permutation(list(range(self.size)))

    def multiply(self, a: Permutation, b: Permutation) -> Permutation:
        # sympy's a*b applies a first
        return b * a

    def inverse(self, a: Permutation) -> Permutation:
        return ~a

    def from_table(self, table: Sequence[int]) -> Permutation:
        return Permutation(list(table))


class FreeGroupOracle:
    """The free group itself, so words can be substituted into words."""

    parallel_safe = True

    def identity(self) -> Word:
        return EPSILON

    def multiply(self, a: Word, b: Word) -> Word:
        return a * b

    def inverse(self, a: Word) -> Word:
        return ~a


def substitute(w: Word, assignment: Dict[str, Word]) -> Word:
    full = {sym: assignment.get(sym, generator(sym)) for sym in w.symbols()}
    return eval_word(w, full, FreeGroupOracle())


def all_roots(w: Word, n: int, candidates: Sequence[Word]) -> List[Word]:
    return [v for v in candidates if v ** n == w]

