import pytest

from kfree_moments.arith import sieve_kfree, sieve_mobius

_ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def mobius_1e4():
    return sieve_mobius(10**4)


@pytest.fixture(scope="session")
def mobius_1e6():
    return sieve_mobius(10**6)


@pytest.fixture(scope="session")
def kfree2_1e4():
    return sieve_kfree(2, 10**4)


@pytest.fixture
def acceptance():
    """Record one acceptance line: ``acceptance(number, passed, detail)``."""

    def record(num: int, passed: bool, detail: str) -> None:
        _ACCEPTANCE[num] = (bool(passed), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_ACCEPTANCE):
        ok, detail = _ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {num:>2}: {detail}")
