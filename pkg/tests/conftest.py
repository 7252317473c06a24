import pytest

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if item.module.__name__.endswith("test_acceptance") and item.name.startswith("test_criterion"):
        label = (item.function.__doc__ or item.name).strip().splitlines()[0]
        if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
            status = "PASS" if report.passed else "FAIL"
            _ACCEPTANCE[item.name] = (status, label)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=lambda s: int(s.split("_")[2])):
        status, label = _ACCEPTANCE[name]
        terminalreporter.write_line(f"{status}  {label}")
