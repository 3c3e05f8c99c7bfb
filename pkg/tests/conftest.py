import time
from contextlib import contextmanager

import pytest

ACCEPTANCE: dict = {}


class Criterion:
    def __init__(self, number: int, title: str, budget: float):
        self.number, self.title, self.budget = number, title, budget
        self.notes: list[str] = []
        self.passed = False
        self.elapsed = 0.0

    def note(self, text: str):
        self.notes.append(text)

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        extra = "; ".join(self.notes)
        return f"{mark}  criterion {self.number}: {self.title} [{self.elapsed:.2f}s / {self.budget:g}s]" + (
            f"  ({extra})" if extra else ""
        )


@pytest.fixture
def criterion():
    @contextmanager
    def open_criterion(number: int, title: str, budget: float):
        c = Criterion(number, title, budget)
        ACCEPTANCE[number] = c
        start = time.perf_counter()
        yield c
        c.elapsed = time.perf_counter() - start
        assert c.elapsed < budget, f"took {c.elapsed:.2f}s, budget {budget}s"
        c.passed = True
        print(c.line())

    return open_criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[n].line())
