"""Shared numeric formatting for CSV and JSON output (12 significant digits)."""

import json


def sig12(x: float) -> float:
    return float(f"{x:.12g}")


def sig12_str(x: float) -> str:
    return f"{x:.12g}"


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=False)
