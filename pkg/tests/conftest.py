def pytest_terminal_summary(terminalreporter):
    """One PASS/FAIL line per acceptance criterion, in criterion order."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if getattr(report, "when", "call") != "call" and outcome != "error":
                continue
            props = dict(getattr(report, "user_properties", ()))
            if "criterion" in props:
                verdict = "PASS" if outcome == "passed" else "FAIL"
                lines.append((props["criterion"], f"{verdict}  {props['criterion']}  {props.get('detail', '')}"))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, text in sorted(lines, key=_order):
        terminalreporter.write_line(text.rstrip())


def _order(item):
    head = item[0].split()[0]
    digits = "".join(ch for ch in head if ch.isdigit())
    return (int(digits) if digits else 99, head)
