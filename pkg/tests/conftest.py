"""Collects acceptance-suite outcomes and prints one verdict line per criterion."""
from collections import defaultdict

_OUTCOMES = defaultdict(list)  # criterion -> [(nodeid, outcome)]
_TITLES = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args))


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        n, title = props["criterion"]
        _TITLES[n] = title
        if hasattr(report, "wasxfail"):
            outcome = "xfailed" if report.outcome == "skipped" else "xpassed"
        else:
            outcome = report.outcome
        _OUTCOMES[n].append((report.nodeid, outcome))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_OUTCOMES):
        results = _OUTCOMES[n]
        passed = sum(o == "passed" for _, o in results)
        missed = [(nid, o) for nid, o in results if o != "passed"]
        verdict = "PASS" if not missed else "FAIL"
        tr.write_line(f"{verdict}  criterion {n}: {_TITLES[n]}  ({passed}/{len(results)} checks passed)")
        for nid, o in missed:
            note = " (known deviation, see decisions ledger)" if o == "xfailed" else ""
            tr.write_line(f"        {o}: {nid.split('::', 1)[-1]}{note}")
