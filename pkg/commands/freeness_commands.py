# freeness_commands.py
from certify import certify_free
from commands.common import add_presentation_options, make_rng, presentation
from workbench.config import RunConfig
from workbench.errors import CertificateError, InputError
from workbench.freeness import (
    buildBasisCountable,
    buildBasisQuotient,
    check_quotient_chain,
    check_quotient_isomorphism,
    nonFreeWitness,
    scope_sample,
    verify_basis_cert,
    verify_witness,
)
from workbench.loaders import load_witness_config, parse_branch_list
from workbench.reports import Outcome, basis_report, separator_frame, witness_report
from workbench.shygroup import BranchSet


def _with_seed(report: str, seed: int) -> str:
    head, _, rest = report.partition("\n")
    return f"{head}\nseed: {seed}\n{rest}"


def configure_basis(parser):
    add_presentation_options(parser)
    parser.add_argument("--samples", type=int, default=8, help="Extra in-scope generators to re-expand")


def basis(config: RunConfig) -> Outcome:
    found = presentation(config)
    if found.branches.excluded:
        raise InputError("basis takes no excluded branches; use basis-quotient")
    cert = buildBasisCountable(found.branches, found.kstar, config["depth"])
    verify_basis_cert(cert, scope_sample(cert, make_rng(config), config["options"]["samples"]))
    report = _with_seed(basis_report("basis", cert), config["seed"])
    return Outcome(report, separator_frame(cert), warnings=found.warnings)


def configure_basis_quotient(parser):
    add_presentation_options(parser, excluded=True)
    parser.add_argument("--samples", type=int, default=8, help="Elements per isomorphism check")
    parser.add_argument("--check-iso", action="store_true", help="Compare kernels with G_u over the empty set")
    parser.add_argument("--step", nargs=2, metavar=("U1", "U2"),
                        help="Branch lists U1 within U2 (one new branch) for the chain comparison")


def basis_quotient(config: RunConfig) -> Outcome:
    options = config["options"]
    found = presentation(config)
    U, u = BranchSet(found.branches.branches), BranchSet(found.branches.excluded)
    cert = buildBasisQuotient(U, u, found.kstar, config["depth"])
    rng = make_rng(config)
    verify_basis_cert(cert, scope_sample(cert, rng, options["samples"]))
    kernels = []
    if options.get("check_iso"):
        kernels.append(("isomorphism", check_quotient_isomorphism(U, u, found.kstar, config["depth"], rng,
                                                                   options["samples"])))
    if options.get("step"):
        warnings = found.warnings
        U1, U2 = (BranchSet(frozenset(parse_branch_list(text, warnings))) for text in options["step"])
        kernels.append(("chain", check_quotient_chain(U, U1, U2, u, found.kstar, config["depth"], rng,
                                                      options["samples"])))
    lines = _with_seed(basis_report("basis-quotient", cert), config["seed"]).rstrip("\n").split("\n")
    extra = [f"kernel check {name}: {k.checked} elements, {len(k.mismatches)} mismatches" for name, k in kernels]
    for name, k in kernels:
        if not k.passed:
            raise CertificateError(k.mismatches[0], clause=f"quotient {name}")
    report = "\n".join(lines[:-1] + extra + lines[-1:]) + "\n"
    return Outcome(report, separator_frame(cert), warnings=found.warnings)


def configure_check_free(parser):
    add_presentation_options(parser, excluded=True)
    parser.add_argument("--samples", type=int, default=6, help="Spot checks per verification")


def check_free(config: RunConfig) -> Outcome:
    found = presentation(config)
    final = certify_free(found.branches, found.kstar, config["depth"], config["seed"],
                         samples=config["options"]["samples"])
    return Outcome(_with_seed(final["report"], config["seed"]), separator_frame(final["cert"]),
                   warnings=found.warnings)


def configure_witness(parser):
    parser.add_argument("--config", required=True, help="Witness configuration file (kstar, star, part lines)")


def witness(config: RunConfig) -> Outcome:
    cfg, warnings = load_witness_config(config["options"]["config"])
    if cfg.kstar != config["kstar"]:
        warnings.append(f"kstar {cfg.kstar} from {config['options']['config']} overrides --kstar")
    cert = nonFreeWitness(cfg, config["depth"])
    verify_witness(cert)
    return Outcome(witness_report(cert), warnings=warnings)


COMMANDS = {
    "basis": (configure_basis, basis),
    "basis-quotient": (configure_basis_quotient, basis_quotient),
    "check-free": (configure_check_free, check_free),
    "witness": (configure_witness, witness),
}
