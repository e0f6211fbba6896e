import importlib
from pathlib import Path

import pytest

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


def _backends():
    out = [pytest.param("python", id="python")]
    try:
        importlib.import_module("gvf_formation._ckernels")
    except ImportError:
        out.append(pytest.param("cython", id="cython",
                                marks=pytest.mark.skip(reason="extension not built")))
    else:
        out.append(pytest.param("cython", id="cython"))
    return out


@pytest.fixture(params=_backends())
def kern(request):
    """Each kernel backend in turn."""
    name = "_pykernels" if request.param == "python" else "_ckernels"
    return importlib.import_module(f"gvf_formation.{name}")


@pytest.fixture
def scenarios_dir():
    return SCENARIOS


# acceptance verdicts, one line per criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
