import functools

import numpy as np
import pytest

from paraslant.runner import run_scenario
from paraslant.scenario import load_source
from paraslant.submanifold import point_data

_ACCEPTANCE: dict = {}


@functools.lru_cache(maxsize=None)
def builtin_run(name: str):
    """(scenario, report, point data) for a builtin scenario, computed once per session."""
    sc = load_source(f"builtin:{name}")
    rep = run_scenario(sc)
    pds = []
    if sc.immersion is not None:
        names = sc.sampling.names
        pds = [point_data(sc.immersion, sc.frame, np.array([p[n] for n in names]))
               for p in rep.measurements["points"]]
    return sc, rep, pds


@pytest.fixture
def acceptance(request):
    """Record the outcome of one numbered acceptance criterion."""
    key = {}

    def register(number: int, title: str):
        key["k"] = (number, title)

    yield register
    if "k" in key:
        rep = getattr(request.node, "rep_call", None)
        _ACCEPTANCE[key["k"]] = bool(rep is not None and rep.passed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for (n, title), ok in sorted(_ACCEPTANCE.items()):
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}")
