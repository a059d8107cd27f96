import pytest

from certify import DEPTH_STEP, certify_free
from workbench.errors import DepthError
from workbench.reports import verify_report
from workbench.shygroup import Branch, BranchSet

ETA = Branch("", 0)
ONE = Branch("1", 0)
FAR = Branch("00001", 0)


def test_depth_escalates_until_the_split_fits():
    with pytest.raises(DepthError):
        certify_free(BranchSet.of(ETA, FAR), 0, 1, 0, attempts=2)
    final = certify_free(BranchSet.of(ETA, FAR), 0, 1, 0, attempts=3)
    assert final["success"]
    assert final["attempt"] == 3
    assert final["depth"] == 1 + 2 * DEPTH_STEP


def test_report_verifies_from_text():
    final = certify_free(BranchSet.of(ETA, ONE), 1, 2, 0)
    assert final["cert"].separators == [0, 1, 0, 1]
    assert verify_report(final["report"]) == ("check-free", len(final["cert"].order))


def test_quotient_case_runs_kernel_check():
    final = certify_free(BranchSet.of(ONE, excluded=[ETA]), 1, 2, 3, samples=4)
    assert final["success"]
    assert [k.passed for k in final["kernels"]] == [True]
    assert "kernel check: 4 elements, 0 mismatches" in final["report"]
    command, checked = verify_report(final["report"])
    assert command == "check-free"
    assert checked == len(final["cert"].order)
