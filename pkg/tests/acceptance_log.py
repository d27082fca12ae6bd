"""Collects one summary line per acceptance criterion."""

LINES: list[str] = []


def record(label: str, ok: bool, detail: str, seconds: float) -> bool:
    line = f"{label:<14} {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.1f}s]"
    LINES.append(line)
    print(line)
    return ok
