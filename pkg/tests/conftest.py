import pytest

from rateopt.relay import ChannelState

WORKED_G1R = 24.0
WORKED_G2R = 96.0
WORKED_POWERS = (0.1996, 0.2362, 0.5642)


@pytest.fixture
def worked_channel():
    """Deterministic channel with |h1|^2 = 24, |h2|^2 = 96, unit noise, 100 antennas."""
    return ChannelState.from_gains(WORKED_G1R, WORKED_G2R, 1.0, nr=100)


_CRITERIA: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record_criterion():
    """Record one pass/fail line for the acceptance summary."""

    def record(name: str, ok: bool, detail: str = ""):
        _CRITERIA[name] = (ok, detail)
        print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_CRITERIA):
        ok, detail = _CRITERIA[name]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
