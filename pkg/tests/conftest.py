import sys
import warnings
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
warnings.filterwarnings("ignore", message=".*TBB.*")

import pytest

_ACCEPTANCE: dict[int, str] = {}


@pytest.fixture
def acceptance():
    """Record one criterion: ``acceptance(number, title, [(clause, ok), ...])``, then assert."""

    def record(number: int, title: str, clauses: list[tuple[str, bool]]) -> None:
        failed = [c for c, ok in clauses if not ok]
        status = "FAIL" if failed else "PASS"
        detail = "; ".join(failed) if failed else "; ".join(c for c, _ in clauses)
        line = f"ACCEPTANCE {number} {status}: {title} [{detail}]"
        _ACCEPTANCE[number] = line
        print(line)
        assert not failed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[k])
