# fsigma.py
"""Natural-number codes for generators and group elements.

cd codes finite sequences of naturals: cd(()) = 0 and
cd(s + (a,)) = pair(cd(s), a) + 1 with the Cantor pairing. Entry i of a
generator's code packs the generator's indices with bit i of each of its
branches, so a code prefix of length d pins down every branch to depth d.

An element sum a_l z_l with every y at one level is coded entry by entry:
entry i is cd of (n, signs, |a_l|, kinds, code(z_l)(i)).
"""
import math
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from workbench.errors import DepthError, InputError
from workbench.shygroup import (
    Branch,
    BranchTuple,
    Generator,
    GroupElement,
    XGen,
    YGen,
    atLevel,
)

KIND_CODES = {"x": 0, "y": 1}
_CODEWORD = re.compile(r"^\s*(\w+)(?:\[k=(\d+)\])?\s*:\s*([\d,\s]*)@\s*(\d+)\s*$")


def pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def unpair(z: int) -> Tuple[int, int]:
    w = (math.isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def cd(seq: Sequence[int]) -> int:
    code = 0
    for a in seq:
        if a < 0:
            raise InputError(f"cd codes natural numbers only, got {a}")
        code = pair(code, a) + 1
    return code


def cd_inverse(code: int) -> List[int]:
    if code < 0:
        raise InputError(f"not a code: {code}")
    out: List[int] = []
    while code:
        code, a = unpair(code - 1)
        out.append(a)
    out.reverse()
    return out


def _bits(nu: str) -> List[int]:
    return [int(c) for c in nu]


@dataclass(frozen=True)
class CodeWord:
    kind: str
    entries: Tuple[int, ...]
    depth: int
    # element words only
    kstar: Optional[int] = None

    def __str__(self) -> str:
        head = self.kind if self.kstar is None else f"{self.kind}[k={self.kstar}]"
        return f"{head}:" + ",".join(str(e) for e in self.entries) + f"@{self.depth}"


def parse_codeword(text: str) -> CodeWord:
    match = _CODEWORD.match(text)
    if not match:
        raise InputError(f"malformed code word {text!r}")
    kind, kstar, body, depth = match.groups()
    try:
        entries = tuple(int(p) for p in body.split(",") if p.strip())
    except ValueError:
        raise InputError(f"malformed code word {text!r}")
    return CodeWord(kind, entries, int(depth), None if kstar is None else int(kstar))


def code_entry(g: Generator, i: int) -> int:
    if isinstance(g, XGen):
        return cd([g.m, cd(_bits(g.nu))] + [b.bit_at(i) for b in g.tuple.branches])
    return cd([g.n] + [b.bit_at(i) for b in g.tuple.branches])


def codeGen(g: Generator, depth: int) -> CodeWord:
    return CodeWord(g.kind, tuple(code_entry(g, i) for i in range(depth)), depth)


def _generator_from_entries(kind: str, entries: Sequence[int]) -> Generator:
    if kind not in KIND_CODES or not entries:
        raise InputError(f"not a valid code prefix: kind {kind!r} with {len(entries)} entries")
    rows = [cd_inverse(e) for e in entries]
    heads = {tuple(r[:2]) if kind == "x" else (r[0],) if r else () for r in rows}
    lengths = {len(r) for r in rows}
    if len(heads) != 1 or len(lengths) != 1 or lengths.pop() < 2:
        raise InputError("not a valid code prefix: entries disagree on the generator indices")
    offset = 2 if kind == "x" else 1
    columns = list(zip(*[r[offset:] for r in rows]))
    if any(bit not in (0, 1) for column in columns for bit in column):
        raise InputError("not a valid code prefix: branch entries must be bits")
    branches = tuple(Branch.make("".join(map(str, column)), column[-1]) for column in columns)
    kstar = len(rows[0]) - 2
    if kind == "x":
        m = rows[0][0]
        nu = cd_inverse(rows[0][1])
        if m > kstar or any(bit not in (0, 1) for bit in nu):
            raise InputError("not a valid code prefix: bad x indices")
        return XGen(m, BranchTuple(branches, m), "".join(map(str, nu)))
    return YGen(BranchTuple(branches), rows[0][0])


def decode(w: CodeWord) -> Union[Generator, GroupElement]:
    if w.kind == "element":
        return decode_element(w)
    return _generator_from_entries(w.kind, w.entries)


# --- element representations ---

def sign_code(c: int) -> int:
    """0 for negative, 1 for zero, 2 for positive."""
    return 0 if c < 0 else (1 if c == 0 else 2)


@dataclass
class Representation:
    element: GroupElement
    level: int
    terms: List[Tuple[Generator, int]]
    separation: int
    signs: List[int]
    word: CodeWord

    @property
    def size(self) -> int:
        return len(self.terms)

    def clauses(self) -> Dict[str, str]:
        """Human-readable account of the representation, one entry per clause."""
        codes = [str(codeGen(g, self.separation)) for g, _ in self.terms]
        return {
            "a": " + ".join(f"{c} {g}" for g, c in self.terms) or "0",
            "b": ", ".join(g.kind for g, _ in self.terms) or "-",
            "c": f"{self.size} distinct generators, nonzero coefficients, y level {self.level}",
            "d": f"prefixes of length {self.separation}: {'; '.join(codes) or '-'}",
            "e": f"length {self.separation} is the least that separates them",
            "f": "n = 0 forces m = 0" if self.size == 0 else f"n = {self.size}",
            "g": "generators listed in increasing code order",
            "h": str(self.word),
        }


def _prefix_key(g: Generator, m: int) -> Tuple[Tuple[int, ...], int]:
    return codeGen(g, m).entries, KIND_CODES[g.kind]


def separation_length(generators: Sequence[Generator], depth: int) -> int:
    for m in range(depth + 1):
        keys = {_prefix_key(g, m) for g in generators}
        if len(keys) == len(generators):
            return m
    raise DepthError(f"depth too small to separate codes: {len(generators)} generators need more than {depth}")


def element_entry(terms: Sequence[Tuple[Generator, int]], i: int) -> int:
    header = [len(terms)]
    header += [sign_code(c) for _, c in terms]
    header += [abs(c) for _, c in terms]
    header += [KIND_CODES[g.kind] for g, _ in terms]
    return cd(header + [code_entry(g, i) for g, _ in terms])


def represent(e: GroupElement, depth: int, level: Optional[int] = None) -> Representation:
    """Code of e written with every y at `level` (default: the highest y level of e)."""
    target = e.level if level is None else level
    form = atLevel(e, target)
    if not form.is_integral():
        raise InputError(f"{e} is not an integer combination of generators with y at level {target}")
    generators = list(form.terms)
    if generators and depth < 1:
        raise DepthError("depth too small to separate codes: an element word needs at least one entry")
    m = separation_length(generators, depth) if generators else 0
    ordered = sorted(generators, key=lambda g: _prefix_key(g, m))
    terms = [(g, int(form.terms[g])) for g in ordered]
    entries = tuple(element_entry(terms, i) for i in range(depth))
    word = CodeWord("element", entries, depth, e.kstar)
    return Representation(form, target, terms, m, [sign_code(c) for _, c in terms], word)


def decode_element(w: CodeWord) -> GroupElement:
    if w.kstar is None:
        raise InputError("not a valid code prefix: element word without kstar")
    rows = [cd_inverse(entry) for entry in w.entries]
    if not rows:
        return GroupElement.zero(w.kstar)
    n = rows[0][0] if rows[0] else -1
    if n < 0 or any(len(r) != 1 + 4 * n or r[:1 + 3 * n] != rows[0][:1 + 3 * n] for r in rows):
        raise InputError("not a valid code prefix: entries disagree on the element header")
    signs, sizes, kinds = rows[0][1:1 + n], rows[0][1 + n:1 + 2 * n], rows[0][1 + 2 * n:1 + 3 * n]
    if any(s not in (0, 2) for s in signs) or any(k not in (0, 1) for k in kinds) or 0 in sizes:
        raise InputError("not a valid code prefix: bad sign, size or kind block")
    names = {v: k for k, v in KIND_CODES.items()}
    terms: Dict[Generator, int] = {}
    for j in range(n):
        g = _generator_from_entries(names[kinds[j]], [r[1 + 3 * n + j] for r in rows])
        if g.tuple.kstar != w.kstar:
            raise InputError(f"not a valid code prefix: {g} does not belong to k={w.kstar}")
        terms[g] = sizes[j] if signs[j] == 2 else -sizes[j]
    return GroupElement(w.kstar, terms)


def check_representation(rep: Representation, e: GroupElement, depth: int) -> List[str]:
    """Names of the clauses the representation fails; empty when it is valid."""
    failed = []
    generators = [g for g, _ in rep.terms]
    rebuilt = GroupElement(e.kstar, {g: c for g, c in rep.terms})
    if rebuilt != e:
        failed.append("a")
    if any(g.kind not in KIND_CODES for g in generators) or any(
            isinstance(g, YGen) and g.n != rep.level for g in generators):
        failed.append("b")
    if len(set(generators)) != len(generators) or any(c == 0 for _, c in rep.terms):
        failed.append("c")
    keys = [_prefix_key(g, rep.separation) for g in generators]
    if len(set(keys)) != len(keys):
        failed.append("d")
    if rep.separation > 0 and len({_prefix_key(g, rep.separation - 1) for g in generators}) == len(generators):
        failed.append("e")
    if not generators and rep.separation != 0:
        failed.append("f")
    if keys != sorted(keys):
        failed.append("g")
    expected = tuple(element_entry(rep.terms, i) for i in range(depth))
    if rep.word.entries != expected or rep.word.kstar != e.kstar or rep.signs != [sign_code(c) for _, c in rep.terms]:
        failed.append("h")
    return failed
