import pytest

from mmensemble.corpus import TileAlphabet, load_corpus, synthetic_corpus_dir


@pytest.fixture(scope="session")
def alphabet():
    return TileAlphabet.load()


@pytest.fixture(scope="session")
def synthetic(alphabet):
    return load_corpus(synthetic_corpus_dir(), alphabet)


CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, text): acceptance criterion checked by this test")


def pytest_runtest_logreport(report):
    marker = CRITERIA.get(report.nodeid)
    if marker is None:
        return
    n, _ = marker["key"]
    state = marker.setdefault("state", "PASS")
    if report.failed:
        marker["state"] = "FAIL"
    elif report.skipped and state != "FAIL":
        marker["state"] = "SKIP"
        marker["reason"] = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            CRITERIA[item.nodeid] = {"key": (m.args[0], m.args[1])}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    merged = {}
    for info in CRITERIA.values():
        if "state" not in info:
            continue
        n, text = info["key"]
        prev = merged.get(n)
        rank = {"FAIL": 2, "SKIP": 1, "PASS": 0}
        if prev is None or rank[info["state"]] > rank[prev[1]]:
            merged[n] = (text, info["state"], info.get("reason", ""))
    if not merged:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(merged):
        text, state, reason = merged[n]
        line = f"criterion {n}: {state}  {text}"
        if reason:
            line += f"  ({reason.removeprefix('Skipped: ')})"
        terminalreporter.write_line(line)
