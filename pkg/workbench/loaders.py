# loaders.py
"""Text formats read by the command layer.

All formats are line based. Blank lines and lines starting with `#` are
skipped; errors carry the 1-based line number. Warnings (for example a
branch literal that had to be canonicalized) are collected and returned
next to the parsed objects, never printed here.
"""
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

from workbench.eqsolver import (
    BlockPermutationOracle,
    EquationChain,
    Level,
    MetricAlgebraOracle,
    TwoAdicOracle,
    block_modulus,
    parse_term,
)
from workbench.errors import InputError
from workbench.freeness import WitnessConfig
from workbench.metricspace import DyadicDist, OmegaRep, PartialAut, powers_of_two
from workbench.shygroup import Branch, BranchSet, BranchTuple, GroupElement, parse_branch, parse_element
from workbench.stability import FinModel, Formula, parse_formula


def numbered_lines(text: str) -> Iterator[Tuple[int, str]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield number, line


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")


def _at_line(number: int, exc: InputError) -> InputError:
    if exc.line is not None:
        return exc
    return InputError(str(exc), line=number, column=exc.column)


def _split_key(line: str) -> Tuple[str, str]:
    key, _, rest = line.partition(":")
    return key.strip().lower(), rest.strip()


def parse_branch_list(text: str, warnings: List[str]) -> List[Branch]:
    out = []
    for literal in [p for p in re.split(r"[,\s]+", text) if p]:
        branch, canonical = parse_branch(literal)
        if not canonical:
            warnings.append(f"branch {literal} canonicalized to {branch}")
        out.append(branch)
    return out


# --- presentations ---

@dataclass
class Presentation:
    kstar: int
    branches: BranchSet
    elements: List[GroupElement] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)


def parse_presentation(text: str, kstar: Optional[int] = None) -> Presentation:
    """`kstar: 1`, `branches: 0*0, 1*0`, `excluded: 01*0` and `element: 2 y[...] ...` lines."""
    warnings: List[str] = []
    main: List[Branch] = []
    excluded: List[Branch] = []
    pending: List[Tuple[int, str]] = []
    for number, line in numbered_lines(text):
        key, rest = _split_key(line)
        try:
            if key == "kstar":
                kstar = int(rest)
            elif key == "branches":
                main.extend(parse_branch_list(rest, warnings))
            elif key == "excluded":
                excluded.extend(parse_branch_list(rest, warnings))
            elif key == "element":
                pending.append((number, rest))
            else:
                raise InputError(f"unknown entry {key!r}", column=1)
        except ValueError as exc:
            raise _at_line(number, exc if isinstance(exc, InputError) else InputError(str(exc)))
    if kstar is None:
        if pending:
            raise InputError("elements need a `kstar:` line")
        kstar = 0
    elements = []
    for number, literal in pending:
        try:
            elements.append(parse_element(literal, kstar, warnings))
        except InputError as exc:
            raise _at_line(number, exc)
    try:
        branches = BranchSet(frozenset(main), frozenset(excluded))
    except InputError as exc:
        raise InputError(f"presentation: {exc}")
    return Presentation(kstar, branches, elements, warnings)


def loadPresentation(path: str, kstar: Optional[int] = None) -> Presentation:
    return parse_presentation(_read(path), kstar)


# --- witness configurations ---

def parse_witness_config(text: str) -> Tuple[WitnessConfig, List[str]]:
    """`kstar: 1`, `star: *0, 1*0` and one `part m: ...` line per index."""
    warnings: List[str] = []
    kstar: Optional[int] = None
    star: List[Branch] = []
    parts: Dict[int, List[Branch]] = {}
    for number, line in numbered_lines(text):
        key, rest = _split_key(line)
        try:
            if key == "kstar":
                kstar = int(rest)
            elif key == "star":
                star = parse_branch_list(rest, warnings)
            elif key.startswith("part"):
                index = int(key[4:])
                if index in parts:
                    raise InputError(f"part {index} given twice")
                parts[index] = parse_branch_list(rest, warnings)
            else:
                raise InputError(f"unknown entry {key!r}", column=1)
        except ValueError as exc:
            raise _at_line(number, exc if isinstance(exc, InputError) else InputError(str(exc)))
    if kstar is None:
        raise InputError("witness configuration needs a `kstar:` line")
    if sorted(parts) != list(range(kstar + 1)):
        raise InputError(f"expected parts 0..{kstar}, got {sorted(parts)}")
    cfg = WitnessConfig(kstar, BranchTuple(tuple(star)), [BranchSet(frozenset(parts[m])) for m in range(kstar + 1)])
    return cfg, warnings


def load_witness_config(path: str) -> Tuple[WitnessConfig, List[str]]:
    return parse_witness_config(_read(path))


# --- equation chains ---

_LEVEL = re.compile(r"^level\s+(\d+)\s*:(.*)$", re.IGNORECASE)
_PARAM = re.compile(r"^param\s+(\d+)\s+([A-Za-z_]\w*)\s*=(.*)$", re.IGNORECASE)


def make_oracle(kind: str, size: int) -> MetricAlgebraOracle:
    if kind == "2adic":
        return TwoAdicOracle(size)
    if kind == "blocks":
        return BlockPermutationOracle(size)
    raise InputError(f"unknown oracle {kind!r}; expected 2adic or blocks")


def parse_chain(text: str) -> Tuple[EquationChain, MetricAlgebraOracle]:
    """Chain files:

        oracle: 2adic 32            (or `oracle: blocks 9`)
        level 0: x0; 2*x1+1; 77; 3  (slots; terms; targets; tolerance exponent)
        param 0 b0 = (1 2)

    Slots, terms and targets are comma separated; the tolerance of a level is 2^-p.
    """
    oracle: Optional[MetricAlgebraOracle] = None
    rows: List[Tuple[int, int, str]] = []
    params: List[Tuple[int, int, str, str]] = []
    for number, line in numbered_lines(text):
        level = _LEVEL.match(line)
        param = _PARAM.match(line)
        try:
            if level:
                rows.append((number, int(level.group(1)), level.group(2)))
            elif param:
                params.append((number, int(param.group(1)), param.group(2), param.group(3).strip()))
            else:
                key, rest = _split_key(line)
                if key != "oracle":
                    raise InputError(f"unknown entry {key!r}", column=1)
                kind, size = rest.split()
                oracle = make_oracle(kind, int(size))
        except ValueError as exc:
            raise _at_line(number, exc if isinstance(exc, InputError) else InputError(str(exc)))
    if oracle is None:
        raise InputError("chain file needs an `oracle:` line")
    levels: List[Level] = []
    for number, n, body in sorted(rows, key=lambda r: r[1]):
        try:
            fields = [f.strip() for f in body.split(";")]
            if len(fields) != 4:
                raise InputError("a level needs `slots; terms; targets; tolerance`")
            slots = [s.strip() for s in fields[0].split(",") if s.strip()]
            terms = [t.strip() for t in fields[1].split(",")]
            targets = [t.strip() for t in fields[2].split(",")]
            if len(terms) != len(slots) or len(targets) != len(slots):
                raise InputError(f"level {n}: {len(slots)} slots need as many terms and targets")
            levels.append(Level(
                n,
                slots,
                {s: parse_term(t, oracle.term_kind) for s, t in zip(slots, terms)},
                {s: oracle.parse(t) for s, t in zip(slots, targets)},
                DyadicDist.pow(int(fields[3])),
            ))
        except ValueError as exc:
            raise _at_line(number, exc if isinstance(exc, InputError) else InputError(str(exc)))
    for number, n, name, literal in params:
        if not 0 <= n < len(levels):
            raise InputError(f"parameter {name} for a missing level {n}", line=number)
        try:
            levels[n].params[name] = oracle.parse(literal)
        except InputError as exc:
            raise _at_line(number, exc)
    try:
        chain = EquationChain(levels)
    except InputError as exc:
        raise InputError(f"chain: {exc}")
    if isinstance(oracle, BlockPermutationOracle):
        chain.modulus = block_modulus
    return chain, oracle


def load_chain(path: str) -> Tuple[EquationChain, MetricAlgebraOracle]:
    return parse_chain(_read(path))


# --- finite models ---

_TUPLE = re.compile(r"\(([^)]*)\)")
_MAP = re.compile(r"\(([^)]*)\)\s*->\s*(\d+)")


def parse_model(text: str) -> FinModel:
    """`size: 3`, `relation < 2: (0,1) (0,2) (1,2)`, `function f 1: (0)->1 (1)->2 (2)->0`."""
    size: Optional[int] = None
    relations: Dict[str, frozenset] = {}
    arities: Dict[str, int] = {}
    functions: Dict[str, Dict[Tuple[int, ...], int]] = {}
    for number, line in numbered_lines(text):
        head, _, rest = line.partition(":")
        words = head.split()
        try:
            if words == ["size"]:
                size = int(rest)
            elif len(words) == 3 and words[0] == "relation":
                name, arity = words[1], int(words[2])
                tuples = [tuple(int(a) for a in re.split(r"[,\s]+", body.strip()) if a)
                          for body in _TUPLE.findall(rest)]
                if any(len(t) != arity for t in tuples):
                    raise InputError(f"relation {name} has tuples of the wrong length")
                relations[name] = frozenset(tuples)
                arities[name] = arity
            elif len(words) == 3 and words[0] == "function":
                name, arity = words[1], int(words[2])
                table = {}
                for body, value in _MAP.findall(rest):
                    args = tuple(int(a) for a in re.split(r"[,\s]+", body.strip()) if a)
                    if len(args) != arity:
                        raise InputError(f"function {name} has entries of the wrong arity")
                    table[args] = int(value)
                functions[name] = table
                arities[name] = arity
            else:
                raise InputError(f"unknown entry {head.strip()!r}", column=1)
        except ValueError as exc:
            raise _at_line(number, exc if isinstance(exc, InputError) else InputError(str(exc)))
    if size is None:
        raise InputError("model file needs a `size:` line")
    return FinModel(size, relations, arities, functions)


def load_model(path: str) -> FinModel:
    return parse_model(_read(path))


def parse_delta(texts: List[str]) -> List[Formula]:
    out = []
    for i, text in enumerate(texts, start=1):
        try:
            out.append(parse_formula(text))
        except InputError as exc:
            raise InputError(f"formula {i}: {exc}")
    return out


def parse_points(text: str, m: int, size: int) -> List[Tuple[int, ...]]:
    """`0,1,2` for m = 1 or `0 1; 1 2` in general."""
    groups = text.split(";") if m > 1 else text.split(",")
    out = []
    for group in groups:
        if not group.strip():
            continue
        point = tuple(int(a) for a in re.split(r"[,\s]+", group.strip()) if a)
        if len(point) != m or any(not 0 <= a < size for a in point):
            raise InputError(f"bad tuple {group.strip()!r} for m = {m} over a model of size {size}")
        out.append(point)
    return out


# --- automorphism windows ---

def parse_partial_aut(text: str) -> PartialAut:
    """`depth; i->j, ...` listing the moved points of a finitely supported permutation."""
    head, _, rest = text.partition(";")
    try:
        depth = int(head)
        mapping = {}
        for pair in [p for p in rest.split(",") if p.strip()]:
            i, j = pair.split("->")
            mapping[int(i)] = int(j)
    except ValueError:
        raise InputError(f"malformed automorphism {text!r}; expected `depth; i->j, ...`")
    return PartialAut.from_mapping(depth, mapping)


def parse_cutoffs(text: str) -> OmegaRep:
    """`1,2,4,8` or `pow2 K` for the first K powers of two."""
    source = text.strip()
    try:
        if source.startswith("pow2"):
            return powers_of_two(int(source[4:]))
        return OmegaRep.from_cutoffs([int(c) for c in source.split(",") if c.strip()])
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed cutoffs {text!r}")


def parse_branch_vector(text: str, warnings: List[str]) -> Dict[Branch, Fraction]:
    """`0*0=1, 1*0=-1/2`."""
    out: Dict[Branch, Fraction] = {}
    for entry in [p for p in text.split(",") if p.strip()]:
        literal, _, value = entry.partition("=")
        branches = parse_branch_list(literal, warnings)
        if len(branches) != 1:
            raise InputError(f"expected one branch before `=` in {entry.strip()!r}")
        branch = branches[0]
        try:
            out[branch] = out.get(branch, Fraction(0)) + Fraction(value.strip())
        except ValueError:
            raise InputError(f"malformed coefficient in {entry.strip()!r}")
    return out
