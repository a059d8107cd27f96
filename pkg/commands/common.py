# common.py
import argparse
import random
from typing import List, Tuple

from workbench.config import RunConfig
from workbench.errors import InputError
from workbench.loaders import Presentation, loadPresentation, parse_branch_list
from workbench.shygroup import BranchSet, GroupElement, parse_element


def add_presentation_options(parser: argparse.ArgumentParser, excluded: bool = False) -> None:
    parser.add_argument("--input", help="Presentation file (branches, excluded, element lines)")
    parser.add_argument("--branches", help="Comma separated branch literals, e.g. '*0, 1*0'")
    if excluded:
        parser.add_argument("--excluded", help="Branches of u, kept apart from the main set")


def presentation(config: RunConfig) -> Presentation:
    """Branch sets and elements from --input, extended by --branches/--excluded."""
    options = config["options"]
    if options.get("input"):
        found = loadPresentation(options["input"], config["kstar"])
    else:
        found = Presentation(config["kstar"], BranchSet())
    warnings = list(found.warnings)
    main = set(found.branches.branches) | set(parse_branch_list(options.get("branches") or "", warnings))
    small = set(found.branches.excluded) | set(parse_branch_list(options.get("excluded") or "", warnings))
    if found.kstar != config["kstar"] and options.get("input"):
        warnings.append(f"kstar {found.kstar} from {options['input']} overrides --kstar")
    return Presentation(found.kstar, BranchSet(frozenset(main), frozenset(small)), found.elements, warnings)


def elements_from(literals: List[str], kstar: int) -> Tuple[List[GroupElement], List[str]]:
    warnings: List[str] = []
    out = []
    for literal in literals:
        try:
            out.append(parse_element(literal, kstar, warnings))
        except InputError as exc:
            raise InputError(f"element {literal!r}: {exc}")
    return out, warnings


def make_rng(config: RunConfig) -> random.Random:
    return random.Random(config["seed"])
