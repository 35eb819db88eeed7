import collections

_outcomes = collections.OrderedDict()


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            item.user_properties.append(("criterion", mark.args[0]))


def pytest_runtest_logreport(report):
    criterion = dict(report.user_properties).get("criterion")
    if criterion is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(criterion, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion."""
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_outcomes, key=lambda n: int(n.split(" ")[0])):
        results = _outcomes[name]
        ok = all(r == "passed" for r in results)
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  {name} "
            f"({results.count('passed')}/{len(results)} checks passed)")
