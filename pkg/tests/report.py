"""Collects acceptance outcomes so the terminal summary can list them."""

RESULTS: list[tuple[str, bool, str]] = []


def line(name: str, ok: bool, detail: str = "") -> str:
    return f"{'PASS' if ok else 'FAIL'} {name} {detail}".rstrip()


def record(name: str, ok: bool, detail: str = "") -> bool:
    RESULTS.append((name, ok, detail))
    print(line(name, ok, detail))
    return ok
