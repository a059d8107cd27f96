# codec_commands.py
import pandas as pd

from commands.common import add_presentation_options, elements_from, presentation
from workbench.config import RunConfig
from workbench.errors import CertificateError, InputError
from workbench.fsigma import check_representation, codeGen, decode, parse_codeword, represent
from workbench.reports import Outcome, render
from workbench.shygroup import GroupElement, parse_generator
from workbench.specker import (
    embed,
    embedding_spec,
    format_vector,
    injectivity_level,
    kernel_rank_check,
    vector_frame,
)


def configure_encode(parser):
    parser.add_argument("literal", help="Generator literal (x[...] / y[...]) or element literal")
    parser.add_argument("--generator", action="store_true", help="Treat the literal as a single generator")


def encode(config: RunConfig) -> Outcome:
    options = config["options"]
    depth = config["depth"]
    warnings = []
    if options.get("generator"):
        g = parse_generator(options["literal"], config["kstar"], warnings)
        word = codeGen(g, depth)
        fields = [("generator", g), ("depth", depth), ("code", word)]
        return Outcome(render("encode", fields), warnings=warnings)
    (e,), warnings = elements_from([options["literal"]], config["kstar"])
    rep = represent(e, depth)
    failed = check_representation(rep, e, depth)
    if failed:
        raise CertificateError(f"representation of {e} fails clauses {', '.join(failed)}", clause=failed[0])
    body = [f"clause {name}: {text}" for name, text in rep.clauses().items()]
    fields = [("element", e), ("depth", depth), ("separation", rep.separation), ("code", rep.word)]
    return Outcome(render("encode", fields, body, passed=True), warnings=warnings)


def configure_decode(parser):
    parser.add_argument("code", help="Code word `kind:e1,e2,...@depth`")


def decode_command(config: RunConfig) -> Outcome:
    word = parse_codeword(config["options"]["code"])
    value = decode(word)
    kind = "element" if isinstance(value, GroupElement) else "generator"
    return Outcome(render("decode", [("code", word), (kind, value)]))


def configure_embed(parser):
    add_presentation_options(parser)
    parser.add_argument("elements", nargs="*", help="Element literals; --input element lines are added")
    parser.add_argument("--levels", type=int, default=2, help="Number of levels from the injectivity bound on")
    parser.add_argument("--start", type=int, help="First level; defaults to the injectivity bound")


def embed_command(config: RunConfig) -> Outcome:
    options = config["options"]
    found = presentation(config)
    literals, warnings = elements_from(options.get("elements") or [], found.kstar)
    elements = literals + found.elements
    if not elements:
        raise InputError("embed needs at least one element")
    U = found.branches.union(b for e in elements for b in e.branches())
    start = injectivity_level(elements) if options.get("start") is None else options["start"]
    levels = list(range(start, start + options["levels"]))
    specs = {n: embedding_spec(U, found.kstar, n, config["depth"]) for n in levels}
    body = []
    frames = []
    for i, e in enumerate(elements):
        vector = embed(e, levels, specs)
        body.append(f"element {i}: {e}")
        body.append(f"vector {i}: {format_vector(vector)}")
        frame = vector_frame(vector)
        frame.insert(0, "element", i)
        frames.append(frame)
    image_rank, rank = kernel_rank_check(elements, levels, specs)
    passed = image_rank == rank
    fields = [
        ("kstar", found.kstar),
        ("branches", U),
        ("levels", ", ".join(str(n) for n in levels)),
        ("coordinates", ", ".join(f"{n}:{specs[n].coordinateCount}" for n in levels)),
        ("rank", f"{rank} -> {image_rank}"),
    ]
    table = pd.concat(frames, ignore_index=True)
    return Outcome(render("embed", fields, body, passed=passed), table, passed=passed,
                   warnings=found.warnings + warnings)


COMMANDS = {
    "encode": (configure_encode, encode),
    "decode": (configure_decode, decode_command),
    "embed": (configure_embed, embed_command),
}
