import pytest

_results: dict[int, list] = {}
_titles: dict[int, str] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark is not None:
            n = mark.kwargs["criterion"]
            _titles[n] = mark.kwargs.get("title", "")
            item.user_properties.append(("criterion", n))


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.outcome != "passed":
        _results.setdefault(crit, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_titles):
        outcomes = _results.get(n, [])
        ok = bool(outcomes) and all(o == "passed" for o in outcomes)
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {_titles[n]}")


@pytest.fixture
def tiny_background():
    from sngen import Background

    return Background({"f": lambda x: float(x)}, decode=_int_or_none, encode=str,
                      universe=tuple(str(i) for i in range(1, 101)))


def _int_or_none(text):
    try:
        v = int(text)
    except ValueError:
        return None
    return v if 1 <= v <= 100 else None
