"""Collects one summary line per acceptance criterion."""
LINES: dict = {}


def record(number: int, passed: bool, text: str) -> None:
    LINES[number] = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {text}"
