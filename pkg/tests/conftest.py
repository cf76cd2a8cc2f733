import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_verdicts: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    detail = dict(report.user_properties).get("detail", "")
    _verdicts[name] = f"{'PASS' if report.passed else 'FAIL'}  {name}  {detail}".rstrip()


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_verdicts):
        terminalreporter.write_line(_verdicts[name])
