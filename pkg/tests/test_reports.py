import pytest

from workbench.errors import CertificateError, InputError
from workbench.freeness import buildBasisCountable, buildBasisQuotient
from workbench.reports import BASIS_SECTIONS, basis_report, verify_report
from workbench.shygroup import Branch, BranchSet

ETA = Branch("", 0)
ONE = Branch("1", 0)


def _report():
    return basis_report("basis", buildBasisCountable(BranchSet.of(ETA, ONE), 0, 3))


def test_basis_report_sections_in_order():
    lines = _report().splitlines()
    headers = [line for line in lines if line.startswith("[")]
    assert headers == [f"[{name}]" for name in BASIS_SECTIONS]
    tuples = lines[lines.index("[TUPLES]") + 1:lines.index("[SEPARATORS]")]
    assert [line.split()[:2] for line in tuples] == [["0", "*0"], ["1", "1*0"]]
    assert lines[lines.index("[SEPARATORS]") + 1:lines.index("[BASIS-Y1]")] == ["0 0", "1 1"]
    rewrites = lines[lines.index("[REWRITES]") + 1:-1]
    assert rewrites and all(" = " in line for line in rewrites)
    assert verify_report(_report()) == ("basis", len(rewrites))


def test_quotient_report_verifies():
    cert = buildBasisQuotient(BranchSet.of(ONE), BranchSet.of(ETA), 1, 2)
    command, checked = verify_report(basis_report("basis-quotient", cert))
    assert command == "basis-quotient"
    assert checked == len(cert.order)


def test_missing_section_is_an_input_error():
    text = _report().replace("[SEPARATORS]\n", "")
    with pytest.raises(InputError, match="SEPARATORS"):
        verify_report(text)


def test_separator_rows_must_match_tuples():
    text = _report().replace("1 1\n[BASIS-Y1]", "[BASIS-Y1]")
    with pytest.raises(CertificateError) as exc:
        verify_report(text)
    assert exc.value.clause == "layout"
    text = _report().replace("\n1 1\n", "\n2 1\n")
    with pytest.raises(CertificateError) as exc:
        verify_report(text)
    assert exc.value.clause == "layout"


def test_rewrite_moved_into_basis_breaks_triangularity():
    lines = _report().splitlines()
    first = lines[lines.index("[REWRITES]") + 1]
    head = first.partition(" = ")[0]
    lines.insert(lines.index("[BASIS-Y2]"), head)
    lines = [line if not line.startswith("basis:") else f"basis: {int(line.split()[1]) + 1}" for line in lines]
    with pytest.raises(CertificateError) as exc:
        verify_report("\n".join(lines) + "\n")
    assert exc.value.clause == "triangularity"
