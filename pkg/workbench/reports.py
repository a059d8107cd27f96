# reports.py
"""Plain-text reports, and re-checking of saved basis and witness reports.

A report is a list of `key: value` lines under a version header, followed by
bracketed sections. Basis and witness reports carry their whole certificate, so `verify_report` can
re-check them from the text alone: rewrite lines are re-expanded through
the relations and identity lines are re-evaluated, without building the
certificate again.
"""
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from workbench import __version__
from workbench.errors import CertificateError, InputError
from workbench.freeness import FreeBasisCert, WitnessCert, combination_element
from workbench.loaders import parse_branch_list
from workbench.shygroup import (
    BranchSet,
    BranchTuple,
    Generator,
    GroupElement,
    YGen,
    chain_x,
    memberSum,
    parse_element,
    parse_generator,
    raiseLevel,
)

HEADER = f"# workbench {__version__}"
_SUMMAND = re.compile(r"(x\[[^\]]*\]) in part (\d+)")


@dataclass
class Outcome:
    report: str
    table: Optional[pd.DataFrame] = None
    passed: bool = True
    warnings: List[str] = field(default_factory=list)


def render(command: str, fields: Sequence[Tuple[str, object]], body: Sequence[str] = (),
           passed: Optional[bool] = None) -> str:
    lines = [HEADER, f"command: {command}"]
    lines += [f"{key}: {value}" for key, value in fields]
    lines += list(body)
    if passed is not None:
        lines.append(f"result: {'PASS' if passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _branches(branches: BranchSet) -> str:
    return ", ".join(str(b) for b in branches.sorted())


# --- basis certificates ---

BASIS_SECTIONS = ("TUPLES", "SEPARATORS", "BASIS-Y1", "BASIS-Y2", "BASIS-Y3", "REWRITES")


def basis_report(command: str, cert: FreeBasisCert) -> str:
    fields = [
        ("kstar", cert.kstar),
        ("depth", cert.depth),
        ("branches", _branches(cert.branches)),
        ("excluded", ", ".join(str(b) for b in BranchSet(cert.branches.excluded).sorted())),
        ("basis", len(cert.basis())),
    ]
    body = ["[TUPLES]"]
    body += [f"{i} {t} owner {cert.owners[i]}" for i, t in enumerate(cert.tuples)]
    body.append("[SEPARATORS]")
    body += [f"{i} {s}" for i, s in enumerate(cert.separators)]
    for label, block in (("BASIS-Y1", cert.y1), ("BASIS-Y2", cert.y2), ("BASIS-Y3", cert.y3)):
        body.append(f"[{label}]")
        body += [str(g) for g in block]
    body.append("[REWRITES]")
    body += [f"{g} = {combination_element(cert.kstar, cert.rewrite[g])}" for g in cert.order]
    return render(command, fields, body, passed=True)


def separator_frame(cert: FreeBasisCert) -> pd.DataFrame:
    rows = [{"tuple": str(t), "owner": cert.owners[i], "separator": cert.separators[i]}
            for i, t in enumerate(cert.tuples)]
    return pd.DataFrame(rows, columns=["tuple", "owner", "separator"])


# --- witness certificates ---

def witness_report(cert: WitnessCert) -> str:
    cfg = cert.config
    fields: List[Tuple[str, object]] = [("kstar", cfg.kstar), ("star", ", ".join(str(b) for b in cfg.star.branches))]
    fields += [(f"part {m}", _branches(p)) for m, p in enumerate(cfg.parts)]
    fields.append(("depth", cert.depth))
    body = ["[divisibility]"]
    for identity in cert.identities:
        summands = ", ".join(f"{g} in part {m}" for m, g, _ in identity.summands)
        body.append(f"identity {identity.n}: {summands}")
    culprit, value = cert.nonmember.obstruction
    body += [
        "[non-membership]",
        f"level: {cert.nonmember.level}",
        f"obstruction: {culprit} = {value}",
        f"coset index: {cert.divisibility}",
        f"quotient rank: {cert.quotient_rank}",
    ]
    return render("witness", fields, body, passed=True)


# --- verification from text ---

def _parse_fields(text: str) -> Tuple[Dict[str, str], List[Tuple[int, str]]]:
    fields: Dict[str, str] = {}
    lines: List[Tuple[int, str]] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        lines.append((number, line))
        key, sep, value = line.partition(":")
        if sep and key.strip() not in fields:
            fields[key.strip()] = value.strip()
    return fields, lines


def _require(fields: Dict[str, str], key: str) -> str:
    if key not in fields:
        raise InputError(f"report has no `{key}:` line")
    return fields[key]


def _branch_set(text: str) -> BranchSet:
    return BranchSet(frozenset(parse_branch_list(text, [])))


def _sections(lines: List[Tuple[int, str]]) -> Dict[str, List[Tuple[int, str]]]:
    """Body lines grouped under their `[NAME]` header; `key: value` lines belong to no section."""
    sections: Dict[str, List[Tuple[int, str]]] = {}
    current: Optional[str] = None
    for number, line in lines:
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections.setdefault(current, [])
        elif ":" not in line and current is not None:
            sections[current].append((number, line))
    return sections


def _indexed(rows: List[Tuple[int, str]], section: str) -> List[Tuple[int, str]]:
    out = []
    for expected, (number, line) in enumerate(rows):
        index, _, rest = line.partition(" ")
        if index != str(expected):
            raise CertificateError(f"line {number}: {section} entry {index} out of order", clause="layout")
        out.append((number, rest))
    return out


def verify_basis_report(text: str) -> int:
    """Re-expand every rewrite line; returns the number of lines checked."""
    fields, lines = _parse_fields(text)
    kstar = int(_require(fields, "kstar"))
    depth = int(_require(fields, "depth"))
    main = _branch_set(_require(fields, "branches"))
    excluded = _branch_set(fields.get("excluded", ""))
    frame = BranchSet(main.branches, excluded.branches)
    quotient = _require(fields, "command") == "basis-quotient" or bool(excluded.branches)
    sections = _sections(lines)
    missing = [name for name in BASIS_SECTIONS if name not in sections]
    if missing:
        raise InputError(f"report has no [{missing[0]}] section")
    tuples = _indexed(sections["TUPLES"], "TUPLES")
    separators = _indexed(sections["SEPARATORS"], "SEPARATORS")
    if len(tuples) != len(separators):
        raise CertificateError(f"{len(tuples)} tuples but {len(separators)} separators", clause="layout")
    for number, value in separators:
        if not value.isdigit():
            raise InputError(f"separator {value!r} is not a natural number", line=number)
    basis = set()
    rewrites: List[Tuple[int, Generator, GroupElement]] = []
    for name in ("BASIS-Y1", "BASIS-Y2", "BASIS-Y3", "REWRITES"):
        for number, line in sections[name]:
            try:
                if name == "REWRITES":
                    head, _, combo = line.partition(" = ")
                    rewrites.append((number, parse_generator(head, kstar), parse_element(combo, kstar)))
                else:
                    basis.add(parse_generator(line, kstar))
            except InputError as exc:
                raise InputError(str(exc), line=number)
    if int(_require(fields, "basis")) != len(basis):
        raise CertificateError(f"basis lists {len(basis)} generators, header says {fields['basis']}", clause="basis size")
    for number, g, combo in rewrites:
        if g in basis:
            raise CertificateError(f"line {number}: {g} is both a basis member and rewritten", clause="triangularity")
        stray = [h for h in combo.terms if h not in basis]
        if stray:
            raise CertificateError(f"line {number}: {stray[0]} is not a basis member", clause="triangularity")
        difference = GroupElement.of(g) - combo
        if quotient:
            sound = memberSum(difference, frame.parts(), max(depth + 2, difference.level)).member
        else:
            sound = difference.is_zero()
        if not sound:
            raise CertificateError(f"line {number}: {g} does not re-expand to itself", clause="soundness")
    return len(rewrites)


def verify_witness_report(text: str) -> int:
    """Re-evaluate the identity and obstruction lines; returns the number of identities."""
    fields, lines = _parse_fields(text)
    kstar = int(_require(fields, "kstar"))
    depth = int(_require(fields, "depth"))
    star = BranchTuple(tuple(parse_branch_list(_require(fields, "star"), [])))
    parts = [_branch_set(_require(fields, f"part {m}")) for m in range(kstar + 1)]
    seen = 0
    for number, line in lines:
        if not line.startswith("identity "):
            continue
        head, _, rest = line.partition(":")
        n = int(head.split()[1])
        summands = _SUMMAND.findall(rest)
        if n != seen or len(summands) != kstar + 1:
            raise CertificateError(f"line {number}: identity {n} out of order or incomplete", clause="divisibility identity")
        for m, (literal, where) in enumerate(summands):
            g = parse_generator(literal, kstar)
            if int(where) != m or g != chain_x(star, m, n) or not parts[m].holds(g):
                raise CertificateError(f"line {number}: {literal} in part {where}", clause="summand membership")
        seen += 1
    if seen != depth:
        raise CertificateError(f"{seen} identities for depth {depth}", clause="divisibility identity")
    level = int(_require(fields, "level"))
    literal, _, value_text = _require(fields, "obstruction").rpartition(" = ")
    culprit = parse_generator(literal, kstar)
    value = Fraction(value_text)
    form = raiseLevel(GroupElement.of(YGen(star, 0)), level)
    blocked = value.denominator != 1 or not any(p.holds(culprit) for p in parts)
    if form.terms.get(culprit) != value or not blocked:
        raise CertificateError(f"obstruction {culprit} does not block membership", clause="non-membership")
    expected = math.prod(math.factorial(j) for j in range(depth))
    if int(_require(fields, "coset index")) != expected:
        raise CertificateError(f"coset index {fields['coset index']}, expected {expected}", clause="divisibility")
    return seen


VERIFIERS = {
    "basis": verify_basis_report,
    "basis-quotient": verify_basis_report,
    "check-free": verify_basis_report,
    "witness": verify_witness_report,
}


def verify_report(text: str) -> Tuple[str, int]:
    fields, _ = _parse_fields(text)
    command = _require(fields, "command")
    if command not in VERIFIERS:
        raise InputError(f"reports of `{command}` carry no certificate to verify")
    if fields.get("result") != "PASS":
        raise CertificateError("the saved report did not pass", clause="result")
    return command, VERIFIERS[command](text)
