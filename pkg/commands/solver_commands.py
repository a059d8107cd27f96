# solver_commands.py
from commands.common import make_rng
from workbench.config import RunConfig
from workbench.eqsolver import (
    buildAntiRetractChain,
    check_cauchy,
    check_perturbations,
    solveChain,
)
from workbench.errors import InputError
from workbench.freewords import nth_root, parse_word, root_orders
from workbench.loaders import load_chain
from workbench.reports import Outcome, render


def configure_solve_chain(parser):
    parser.add_argument("--chain", required=True, help="Chain file (oracle line, level and param lines)")
    parser.add_argument("--goal", type=int, default=8, help="Solve to distance 2^-goal")
    parser.add_argument("--window", type=int, help="Number of levels to report; defaults to the goal")
    parser.add_argument("--samples", type=int, default=32, help="Perturbations per level")


def solve_chain(config: RunConfig) -> Outcome:
    options = config["options"]
    chain, oracle = load_chain(options["chain"])
    window = options.get("window") or options["goal"]
    rng = make_rng(config)
    check_perturbations(chain, oracle, rng, options["samples"])
    solution = solveChain(chain, oracle, options["goal"], window)
    check_cauchy(chain, oracle, options["goal"], window, rng)
    body = []
    for n in sorted(solution.values):
        row = ", ".join(f"{slot}={oracle.format(v)}" for slot, v in solution.values[n].items())
        body.append(f"level {n}: {row}")
    fields = [
        ("seed", config["seed"]),
        ("levels", chain.length),
        ("goal", options["goal"]),
        ("stage", solution.stage),
    ]
    table = solution.table.to_frame(oracle)
    table = table[table["level"] < window].reset_index(drop=True)
    return Outcome(render("solve-chain", fields, body, passed=True), table)


def configure_roots(parser):
    parser.add_argument("--word", required=True, help="Word literal, e.g. 'abab' or 'a^2*b'")
    parser.add_argument("--n", type=int, help="Root order; without it every order up to --bound is listed")
    parser.add_argument("--bound", type=int, default=8)
    parser.add_argument("--near", help="Comma separated words b_k; builds an anti-retract chain for --word's list")


def roots(config: RunConfig) -> Outcome:
    options = config["options"]
    if options.get("near"):
        enumeration = [parse_word(w) for w in options["word"].split(",")]
        near = [parse_word(w) for w in options["near"].split(",")]
        stages = buildAntiRetractChain(enumeration, near, bound=options["bound"])
        body = [
            f"stage {s.k}: sigma(x) = {s.term()}, b{s.k} = {s.b}, exponent {s.exponent}, "
            f"obstruction {', '.join(str(a) for a in s.obstruction) or '-'}"
            for s in stages
        ]
        return Outcome(render("roots", [("enumeration", options["word"])], body))
    w = parse_word(options["word"])
    if options.get("n") is not None:
        if options["n"] < 1:
            raise InputError(f"root order must be positive, got {options['n']}")
        root = nth_root(w, options["n"])
        fields = [("word", w), ("n", options["n"]), ("root", root if root is not None else "none")]
        return Outcome(render("roots", fields))
    orders = root_orders(w, options["bound"])
    return Outcome(render("roots", [("word", w), ("orders", ", ".join(map(str, orders)))]))


COMMANDS = {
    "solve-chain": (configure_solve_chain, solve_chain),
    "roots": (configure_roots, roots),
}
