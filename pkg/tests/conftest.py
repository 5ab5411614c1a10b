import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE = "test_acceptance.py::test_criterion_"


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if _ACCEPTANCE in getattr(rep, "nodeid", "") and rep.when == "call":
                name = rep.nodeid.split("::")[-1]
                number = int(name.split("_")[2])
                lines.append((number, "PASS" if outcome == "passed" else "FAIL", name))
    if lines:
        terminalreporter.section("acceptance criteria")
        for number, verdict, name in sorted(lines):
            terminalreporter.write_line(f"criterion {number}: {verdict}  ({name})")
