# group_commands.py
from commands.common import add_presentation_options, elements_from, presentation
from workbench.config import RunConfig
from workbench.errors import InputError
from workbench.reports import Outcome, render
from workbench.shygroup import atLevel, integral_form, lattice_oracle_member, memberSum


def configure_normalize(parser):
    parser.add_argument("element", help="Element literal, e.g. '1 y[0*0;0]'")
    parser.add_argument("--level", type=int, help="Level to rewrite every y-generator to")
    parser.add_argument("--integral", action="store_true", help="Least level with integer coefficients")


def normalize(config: RunConfig) -> Outcome:
    options = config["options"]
    (e,), warnings = elements_from([options["element"]], config["kstar"])
    if options.get("integral"):
        form = integral_form(e, config["depth"])
    elif options.get("level") is not None:
        if options["level"] < 0:
            raise InputError(f"level must be non-negative, got {options['level']}")
        form = atLevel(e, options["level"])
    else:
        form = e.normal_form()
    fields = [("kstar", config["kstar"]), ("input", e), ("level", form.level), ("normal form", form)]
    return Outcome(render("normalize", fields), warnings=warnings)


def configure_member(parser):
    parser.add_argument("element", nargs="?", help="Element literal; defaults to the elements of --input")
    add_presentation_options(parser, excluded=True)
    parser.add_argument("--oracle", action="store_true", help="Cross-check with the Hermite form oracle")


def member(config: RunConfig) -> Outcome:
    """Membership in G_U, or in G_{U,u} when --excluded names u."""
    options = config["options"]
    found = presentation(config)
    warnings = list(found.warnings)
    elements = found.elements
    if options.get("element"):
        parsed, extra = elements_from([options["element"]], found.kstar)
        elements = parsed + elements
        warnings += extra
    if not elements:
        raise InputError("member needs an element literal or element lines in --input")
    parts = found.branches.parts()
    body = []
    agreed = True
    for e in elements:
        cert = memberSum(e, parts, max(config["depth"], e.level))
        body.append(f"element: {e}")
        body.append(f"member: {'yes' if cert.member else 'no'} (level {cert.level})")
        if cert.member:
            combination = " + ".join(f"{c} {g}" for g, c in sorted(cert.combination.items(), key=lambda i: str(i[0])))
            body.append(f"combination: {combination or '0'}")
        else:
            culprit, value = cert.obstruction
            body.append(f"obstruction: {culprit} = {value}")
        if options.get("oracle"):
            oracle = lattice_oracle_member(e, parts, cert.level)
            body.append(f"oracle: {'yes' if oracle else 'no'}")
            agreed = agreed and oracle == cert.member
    fields = [("kstar", found.kstar), ("branches", found.branches), ("depth", config["depth"])]
    return Outcome(render("member", fields, body, passed=agreed), passed=agreed, warnings=warnings)


COMMANDS = {
    "normalize": (configure_normalize, normalize),
    "member": (configure_member, member),
}
