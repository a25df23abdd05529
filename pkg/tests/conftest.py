import re

_CRITERION_PATTERN = re.compile(r"test_criterion_(\d+)")

_DESCRIPTIONS = {
    1: "vector table reproduction for n=4",
    2: "validity and dependency claims for k=2..5",
    3: "boundary structure (disjoint cuts, simplex, simplex products)",
    4: "identification maps, determinant and permutation signs",
    5: "relative homology table shape and seed independence",
    6: "third boundary piece matches the standard pair",
    7: "small-cover orientability verdicts",
    8: "brute-force oracle agreement",
    9: "property suites (d o d, SNF recomposition, validity invariance)",
    10: "end-to-end certificates and byte stability",
}

_results: dict[int, list[tuple[str, str]]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    match = _CRITERION_PATTERN.search(report.nodeid)
    if not match:
        return
    number = int(match.group(1))
    _results.setdefault(number, []).append((report.nodeid, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        outcomes = _results[number]
        failed = [nodeid for nodeid, outcome in outcomes if outcome == "failed"]
        status = "FAIL" if failed else "PASS"
        line = f"criterion {number:2d}: {status}  {_DESCRIPTIONS.get(number, '')}"
        terminalreporter.write_line(line)
        for nodeid in failed:
            terminalreporter.write_line(f"    failed: {nodeid}")
