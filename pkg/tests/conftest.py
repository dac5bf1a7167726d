"""Shared pytest plumbing: the acceptance-criteria verdict summary.

``test_acceptance.py`` records one line per criterion via
:func:`record_criterion`; the hook below prints them as a dedicated
section in the terminal summary so a plain ``pytest -v`` run always
shows every verdict, pass or fail, in one place.
"""

_CRITERION_LINES = {}


def record_criterion(number, line):
    """Store the verdict line for criterion ``number`` (1-based)."""
    _CRITERION_LINES[number] = line


def pytest_terminal_summary(terminalreporter):
    if not _CRITERION_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERION_LINES):
        terminalreporter.write_line(_CRITERION_LINES[number])
