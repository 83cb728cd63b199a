from hypothesis import settings

settings.register_profile("capax", deadline=None, max_examples=60)
settings.load_profile("capax")

_LINES = []


def record_line(number: int, line: str):
    _LINES.append((number, line))


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
