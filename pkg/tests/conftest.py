import pytest

_LINES: dict[int, str] = {}


class AcceptanceRecorder:
    def __call__(self, number: int, title: str, ok: bool, detail: str = "") -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title}" + (f": {detail}" if detail else "")
        _LINES[number] = line
        print(line)
        assert ok, line


@pytest.fixture
def acceptance():
    return AcceptanceRecorder()


def pytest_terminal_summary(terminalreporter):
    if not _LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_LINES):
        terminalreporter.write_line(_LINES[n])
    missing = [n for n in range(1, 16) if n not in _LINES]
    if missing and len(_LINES) > 1:
        terminalreporter.write_line(f"not run: {missing}")
