import os

from hypothesis import HealthCheck, settings

settings.register_profile(
    "motslab",
    deadline=None,
    max_examples=int(os.environ.get("MOTSLAB_HYPOTHESIS_EXAMPLES", "12")),
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.function_scoped_fixture],
)
settings.load_profile("motslab")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import format_results
    except ImportError:
        return
    lines = format_results()
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
