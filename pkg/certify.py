# certify.py
import argparse
import random
from typing import List, Optional, Tuple, TypedDict

from langgraph.graph import END, StateGraph

from workbench.config import default_depth, default_seed, load_environment, max_attempts
from workbench.errors import CertificateError, DepthError
from workbench.freeness import (
    FreeBasisCert,
    KernelReport,
    buildBasisCountable,
    buildBasisQuotient,
    check_quotient_isomorphism,
    scope_sample,
    verify_basis_cert,
)
from workbench.loaders import parse_branch_list
from workbench.reports import basis_report
from workbench.shygroup import BranchSet

DEPTH_STEP = 2


class CertifyState(TypedDict, total=False):
    kstar: int
    branches: BranchSet
    depth: int
    attempt: int
    max_attempts: int
    seed: int
    samples: int
    cert: Optional[FreeBasisCert]
    kernels: List[KernelReport]
    # (kind, message, clause) of the last failure
    failure: Optional[Tuple[str, str, str]]
    success: Optional[bool]
    report: str


def plan_node(state: CertifyState) -> CertifyState:
    branches = state["branches"]
    target = "G_U" if not branches.excluded else "the quotient by G_{U,u}"
    print(f" Plan: certify {target} free over {branches} (kstar {state['kstar']})")
    return state


def _escalate(state: CertifyState, exc: DepthError) -> CertifyState:
    attempt = state.get("attempt", 1)
    print(f" Depth {state['depth']} failed on attempt {attempt}: {exc}")
    if attempt >= state["max_attempts"]:
        print(" Max attempts reached. Exiting.")
        return {**state, "cert": None, "success": False, "failure": ("depth", str(exc), "")}
    return {**state, "cert": None, "depth": state["depth"] + DEPTH_STEP, "attempt": attempt + 1}


def build_basis_node(state: CertifyState) -> CertifyState:
    branches = state["branches"]
    print(f" Building basis at depth {state['depth']} (attempt {state['attempt']})...")
    try:
        if branches.excluded:
            cert = buildBasisQuotient(BranchSet(branches.branches), BranchSet(branches.excluded),
                                      state["kstar"], state["depth"])
        else:
            cert = buildBasisCountable(branches, state["kstar"], state["depth"])
    except DepthError as exc:
        return _escalate(state, exc)
    print(f" Basis has {len(cert.basis())} generators, {len(cert.order)} rewritten")
    return {**state, "cert": cert}


def verify_node(state: CertifyState) -> CertifyState:
    cert = state["cert"]
    rng = random.Random(state["seed"])
    try:
        verify_basis_cert(cert, scope_sample(cert, rng, state["samples"]))
        kernels = []
        if cert.quotient and cert.branches.excluded:
            kernels.append(check_quotient_isomorphism(
                BranchSet(cert.branches.branches), BranchSet(cert.branches.excluded),
                cert.kstar, cert.depth, rng, state["samples"],
            ))
    except DepthError as exc:
        return _escalate(state, exc)
    except CertificateError as exc:
        print(f" Verification failed: {exc}")
        return {**state, "success": False, "failure": ("certificate", str(exc), exc.clause)}
    if any(not k.passed for k in kernels):
        message = next(k.mismatches[0] for k in kernels if not k.passed)
        print(f" Kernel mismatch: {message}")
        return {**state, "kernels": kernels, "success": False,
                "failure": ("certificate", message, "quotient isomorphism")}
    print(" Certificate verified")
    return {**state, "kernels": kernels, "success": True}


def report_node(state: CertifyState) -> CertifyState:
    report = basis_report("check-free", state["cert"])
    lines = report.rstrip("\n").split("\n")
    extra = [f"kernel check: {k.checked} elements, {len(k.mismatches)} mismatches" for k in state.get("kernels", [])]
    # keep the result line last
    return {**state, "report": "\n".join(lines[:-1] + extra + lines[-1:]) + "\n"}


def _after_build(state: CertifyState) -> str:
    if state.get("cert") is not None:
        return "verify"
    return "end" if state.get("success") is False else "retry"


def _after_verify(state: CertifyState) -> str:
    if state.get("success"):
        return "report"
    return "retry" if state.get("failure") is None else "end"


workflow = StateGraph(CertifyState)
workflow.add_node("plan", plan_node)
workflow.add_node("build_basis", build_basis_node)
workflow.add_node("verify", verify_node)
workflow.add_node("report", report_node)

workflow.set_entry_point("plan")
workflow.add_edge("plan", "build_basis")
workflow.add_conditional_edges("build_basis", _after_build, {"verify": "verify", "retry": "build_basis", "end": END})
workflow.add_conditional_edges("verify", _after_verify, {"report": "report", "retry": "build_basis", "end": END})
workflow.add_edge("report", END)

app = workflow.compile()


def certify_free(branches: BranchSet, kstar: int, depth: int, seed: int,
                 attempts: Optional[int] = None, samples: int = 6) -> CertifyState:
    """Run the workflow; raises the failure it ended with."""
    final = app.invoke({
        "kstar": kstar,
        "branches": branches,
        "depth": depth,
        "attempt": 1,
        "max_attempts": attempts or max_attempts(),
        "seed": seed,
        "samples": samples,
    })
    if not final.get("success"):
        kind, message, clause = final.get("failure") or ("depth", "no certificate", "")
        if kind == "depth":
            raise DepthError(message)
        raise CertificateError(message, clause=clause)
    return final


# --- CLI Entrypoint ---
def main():
    load_environment()
    parser = argparse.ArgumentParser(description="Freeness certification workflow")
    parser.add_argument("--branches", required=True, help="Comma separated branch literals")
    parser.add_argument("--excluded", help="Branches of u for the quotient case")
    parser.add_argument("--kstar", type=int, default=0)
    parser.add_argument("--depth", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    args = parser.parse_args()

    warnings: List[str] = []
    branches = BranchSet(frozenset(parse_branch_list(args.branches, warnings)),
                         frozenset(parse_branch_list(args.excluded or "", warnings)))
    for warning in warnings:
        print(f" Warning: {warning}")
    seed = default_seed() if args.seed is None else args.seed
    print(f" Seed: {seed}")
    final = certify_free(branches, args.kstar, args.depth or default_depth(), seed)
    print(final["report"], end="")
    print(" Certification completed successfully")


if __name__ == "__main__":
    main()
