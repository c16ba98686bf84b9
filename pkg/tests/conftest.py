"""Replay the acceptance-gate verdict lines after the test run.

The acceptance tests record one ``[PRIMARY] criterion N`` PASS/FAIL line
each; printing them from inside a test would leave the PASS lines hidden
behind pytest's output capture, so this hook emits the collected list in
the terminal summary instead, where capture does not apply.
"""
import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    mod = (sys.modules.get("test_acceptance")
           or sys.modules.get("tests.test_acceptance"))
    lines = getattr(mod, "VERDICT_LOG", None) if mod else None
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)
