import pytest


@pytest.fixture
def verdict(request):
    """Print one PASS/FAIL line for an acceptance criterion, bypassing output capture."""
    reporter = request.config.pluginmanager.getplugin("terminalreporter")

    def emit(label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f": {detail}" if detail else "")
        if reporter is not None:
            reporter.write_line("")
            reporter.write_line(line)
        else:
            print(line)
        return ok

    return emit
