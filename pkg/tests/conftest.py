import re

_CRITERIA = {
    1: "algebra laws",
    2: "Bezout exactness",
    3: "corona oracle equivalence",
    4: "Kronecker bound",
    5: "Hautus vs reachability cross-validation",
    6: "steering round-trip",
    7: "frequency identity",
    8: "scan monotonicity and symmetry",
}
_outcomes: dict[int, list[bool]] = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d)_", report.nodeid)
    if not m:
        return
    if report.when == "call" or report.failed:
        _outcomes.setdefault(int(m.group(1)), []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, label in _CRITERIA.items():
        runs = _outcomes.get(n)
        if runs is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"criterion {n} ({label}): {status}")
