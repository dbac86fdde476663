from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def phi_fixture():
    rows = [line.split("\t") for line in (DATA / "phi_fixture.tsv").read_text().splitlines() if line.strip()]
    return [(float(x), float(v)) for x, v in rows]


_ACCEPTANCE: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def record(label: str, ok: bool, detail: str) -> None:
        line = f"{label}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
