import pytest

# Verdict lines recorded by the acceptance suite; replayed after the test
# progress so they always reach the terminal regardless of capture mode.
acceptance_verdicts = []


@pytest.fixture(scope="session")
def acceptance_report():
    def _report(name, ok, detail=""):
        line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}" \
            + (f" ({detail})" if detail else "")
        print(line)
        acceptance_verdicts.append(line)
        assert ok, f"{name}: {detail}"

    return _report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_verdicts:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_verdicts:
            terminalreporter.write_line(line)
