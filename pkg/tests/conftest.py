import pytest

from pseudomul.ops import builtin_degenerate_right, builtin_min, builtin_tanh_phi, builtin_times

# filled by test_acceptance.py, printed at the end of the session
ACCEPTANCE_RESULTS = {}


@pytest.fixture(scope="session")
def builtins():
    """The four catalog operations, tanh-phi in its patched form."""
    return {
        "times": builtin_times(),
        "min": builtin_min(),
        "degenerate-right": builtin_degenerate_right(),
        "tanh-phi:2": builtin_tanh_phi(2.0),
    }


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, label = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {label}")
