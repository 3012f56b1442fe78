import time
from contextlib import contextmanager

import pytest

_LOG = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_LOG] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion: outcome, wall time and budget."""
    log = request.config.stash[_LOG]

    @contextmanager
    def run(number, title, budget):
        entry = {"number": number, "title": title, "budget": budget, "detail": ""}
        t0 = time.perf_counter()
        try:
            yield entry
        except BaseException as exc:
            entry["passed"] = False
            entry["detail"] = entry["detail"] or f"{type(exc).__name__}: {exc}".splitlines()[0]
            raise
        else:
            entry["passed"] = True
        finally:
            entry["seconds"] = time.perf_counter() - t0
            log.append(entry)
        if entry["seconds"] > budget:
            entry["passed"] = False
            entry["detail"] = f"over time budget ({entry['seconds']:.2f} s > {budget} s)"
            pytest.fail(entry["detail"])

    return run


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_LOG, [])
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for e in sorted(log, key=lambda e: e["number"]):
        status = "PASS" if e["passed"] else "FAIL"
        line = f"{status}  [{e['number']:>2}] {e['title']}  ({e['seconds']:.2f} s / {e['budget']} s)"
        if e["detail"]:
            line += f"  -- {e['detail']}"
        terminalreporter.write_line(line)
