import pytest

# one line per acceptance criterion, printed after the run
CRITERIA: dict[str, str] = {}


def pytest_runtest_makereport(item, call):
    label = getattr(item.function, "criterion", None)
    if label is None or call.when != "call":
        return
    status = "PASS" if call.excinfo is None else "FAIL"
    detail = getattr(item, "criterion_detail", "")
    CRITERIA[label] = f"{label}: {status}{'  ' + detail if detail else ''}"


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[label])


@pytest.fixture
def detail(request):
    """Attach a one-line summary to the acceptance line of the running test."""

    def put(text: str) -> None:
        request.node.criterion_detail = text
        print(text)

    return put
