ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_runtest_makereport(item, call):
    label = getattr(item.function, "criterion", None)
    if label is None or call.when != "call":
        return
    ok = call.excinfo is None
    detail = item.user_properties and dict(item.user_properties).get("detail", "") or ""
    ACCEPTANCE_RESULTS[label] = (ok, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split(".")[0])):
        ok, detail = ACCEPTANCE_RESULTS[label]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {label}  {detail}")
