from collections import defaultdict

import pytest

_RESULTS: dict[int, list[tuple[str, bool, str]]] = defaultdict(list)


class CriterionRecorder:
    def __init__(self, number: int):
        self.number = number

    def check(self, part: str, ok: bool, detail: str = "") -> bool:
        _RESULTS[self.number].append((part, bool(ok), detail))
        return bool(ok)


@pytest.fixture
def criterion():
    return CriterionRecorder


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        parts = _RESULTS[number]
        ok = all(p[1] for p in parts)
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}")
        for part, part_ok, detail in parts:
            terminalreporter.write_line(f"    [{'ok' if part_ok else 'FAILED'}] {part}: {detail}")
