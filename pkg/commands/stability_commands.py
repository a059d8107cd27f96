# stability_commands.py
import pandas as pd

from workbench.config import RunConfig
from workbench.errors import CertificateError, InputError
from workbench.loaders import load_model, parse_delta, parse_points
from workbench.reports import Outcome, render
from workbench.stability import (
    RANK_HEADER,
    RankTable,
    all_tuples,
    check_tree,
    instabilityTree,
    tpDelta,
    typeCount,
    type_rank,
)


def _common(parser):
    parser.add_argument("--model", required=True, help="Model file (size, relation and function lines)")
    parser.add_argument("--delta", action="append", required=True, help="A formula of Delta; repeat for more")
    parser.add_argument("--m", type=int, default=1, help="Length of the typed tuples")


def _load(config: RunConfig):
    options = config["options"]
    if options["m"] < 1:
        raise InputError(f"m must be positive, got {options['m']}")
    return load_model(options["model"]), parse_delta(options["delta"]), options["m"]


def configure_rank(parser):
    _common(parser)
    parser.add_argument("--subset", help="Tuples of B, `0,1,2` for m = 1 or `0 1; 1 2`; defaults to all of M^m")
    parser.add_argument("--params", help="Parameter set A; prints the Delta-types over A and their count")


def rank(config: RunConfig) -> Outcome:
    options = config["options"]
    model, delta, m = _load(config)
    table = RankTable(model, delta, m)
    B = frozenset(parse_points(options["subset"], m, model.size)) if options.get("subset") else all_tuples(model, m)
    value = table.rank(B)
    fields = [("note", RANK_HEADER), ("size", model.size), ("delta", "; ".join(str(f) for f in delta)),
              ("m", m), ("subset", len(B)), ("contradictory pairs", len(table.pairs)), ("rank", value)]
    body = []
    frame = None
    if options.get("params") is not None:
        A = [a for (a,) in parse_points(options["params"], 1, model.size)]
        rows = []
        for a in sorted(all_tuples(model, m)):
            record = tpDelta(a, A, model, delta)
            rows.append({"tuple": " ".join(map(str, a)), "type": str(record),
                         "rank": type_rank(record, model, delta, m)})
        body.append(f"types: {typeCount(m, A, model, delta)}")
        body += [f"tp({row['tuple']}) = {row['type']}" for row in rows]
        frame = pd.DataFrame(rows, columns=["tuple", "type", "rank"])
    return Outcome(render("rank", fields, body), frame)


def configure_tree(parser):
    _common(parser)
    parser.add_argument("--height", type=int, default=2)
    parser.add_argument("--budget", type=int, default=200000, help="Pair checks before giving up")


def tree(config: RunConfig) -> Outcome:
    options = config["options"]
    model, delta, m = _load(config)
    found = instabilityTree(model, delta, m, options["height"], options["budget"])
    fields = [("note", RANK_HEADER), ("size", model.size), ("delta", "; ".join(str(f) for f in delta)),
              ("m", m), ("height", options["height"])]
    if found is None:
        return Outcome(render("tree", fields + [("tree", "none")]))
    if not check_tree(found, model, delta):
        raise CertificateError("a leaf misses a side of its path", clause="tree leaves")
    return Outcome(render("tree", fields + [("tree", "found")], found.preorder(delta), passed=True))


COMMANDS = {
    "rank": (configure_rank, rank),
    "tree": (configure_tree, tree),
}
