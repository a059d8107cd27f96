# metric_commands.py
from workbench.config import RunConfig
from workbench.errors import InputError
from workbench.loaders import parse_branch_vector, parse_cutoffs, parse_partial_aut
from workbench.metricspace import dAut, dRep, dRepPrime, norm121, powers_of_two
from workbench.reports import Outcome, render

KINDS = ("aut", "endo", "rep", "rep-prime", "norm")


def configure_metric(parser):
    parser.add_argument("--kind", choices=KINDS, default="aut")
    parser.add_argument("--f", help="Automorphism window `depth; i->j, ...`")
    parser.add_argument("--g", help="Second window; defaults to the identity of the same depth")
    parser.add_argument("--cutoffs", help="Representation cutoffs `1,2,4` or `pow2 K` (rep kinds)")
    parser.add_argument("--vector", help="Branch coefficients `0*0=1, 1*0=-1` (norm kind)")
    parser.add_argument("--upper-bound", action="store_true", help="Report a bound instead of failing on short windows")


def metric(config: RunConfig) -> Outcome:
    options = config["options"]
    kind = options["kind"]
    if kind == "norm":
        if not options.get("vector"):
            raise InputError("--kind norm needs --vector")
        warnings = []
        vector = parse_branch_vector(options["vector"], warnings)
        fields = [("kind", kind), ("vector", options["vector"]), ("norm", norm121(vector))]
        return Outcome(render("metric", fields), warnings=warnings)
    if not options.get("f"):
        raise InputError(f"--kind {kind} needs --f")
    f = parse_partial_aut(options["f"])
    g = parse_partial_aut(options["g"]) if options.get("g") else parse_partial_aut(f"{f.depth};")
    upper = options.get("upper_bound", False)
    if kind in ("aut", "endo"):
        distance = dAut(f, g, endomorphism=kind == "endo", upper_bound=upper)
        fields = [("kind", kind), ("f", f), ("g", g), ("distance", distance)]
        return Outcome(render("metric", fields))
    rep = parse_cutoffs(options["cutoffs"]) if options.get("cutoffs") else powers_of_two(max(f.depth, 1).bit_length())
    measure = dRep if kind == "rep" else dRepPrime
    distance = measure(f, g, rep, upper_bound=upper)
    fields = [("kind", kind), ("f", f), ("g", g), ("cutoffs", rep), ("distance", distance)]
    return Outcome(render("metric", fields))


COMMANDS = {
    "metric": (configure_metric, metric),
}
