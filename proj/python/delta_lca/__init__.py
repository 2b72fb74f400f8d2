# SPDX-License-Identifier: Apache-2.0
"""Comparative carbon footprint of PCB designs.

Thin wrapper over the C++ extension. Inputs may be paths, bytes or text;
results come back as plain dicts.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any, Iterable, Mapping, Union

from . import _core
from ._core import ParseError, ValidationError

__all__ = [
    "ParseError",
    "ValidationError",
    "inventory",
    "footprint",
    "compare",
    "solve",
    "brute_force_optimum",
    "default_config",
]

Source = Union[str, bytes, os.PathLike]

_BUNDLED = Path(__file__).with_name("data") / "config.json"


def default_config() -> str:
    """Bundled config when installed as a wheel, else the source tree config."""
    return str(_BUNDLED) if _BUNDLED.is_file() else _core.default_config()


def _read(src: Source) -> tuple[bytes, str]:
    if isinstance(src, bytes):
        return src, "design"
    if isinstance(src, os.PathLike) or (isinstance(src, str) and "\n" not in src and Path(src).is_file()):
        p = Path(src)
        return p.read_bytes(), p.name
    return str(src).encode(), "design"


def inventory(src: Source, *, format: str = "auto", offline: bool = True, config: str | None = None) -> dict:
    data, name = _read(src)
    return json.loads(_core.inventory(data, format, name, config or default_config(), offline))


def footprint(src: Source, *, format: str = "auto", offline: bool = True, config: str | None = None) -> dict:
    data, name = _read(src)
    return json.loads(_core.footprint(data, format, name, config or default_config(), offline))


def compare(
    a: Source,
    b: Source,
    *,
    direction: str = "auto",
    rules: Iterable[Mapping[str, Any]] | Mapping[str, Any] | None = None,
    offline: bool = True,
    config: str | None = None,
) -> dict:
    """Full comparison report; ``report["result"]["verdict"]`` is "proven" or "inconclusive"."""
    data_a, _ = _read(a)
    data_b, _ = _read(b)
    if rules is None:
        rules_text = ""
    elif isinstance(rules, Mapping):
        rules_text = json.dumps(rules)
    else:
        rules_text = json.dumps(list(rules))
    return json.loads(
        _core.compare(data_a, data_b, direction, rules_text, "auto", "auto", config or default_config(), offline)
    )


def solve(problem: Mapping[str, Any], *, time_budget_ms: int = 10000) -> dict:
    """Solve a raw matching problem given as {"a": [...], "b": [...], "edges": [...]}."""
    return json.loads(_core.solve(json.dumps(problem), time_budget_ms))


def brute_force_optimum(problem: Mapping[str, Any]) -> int:
    return _core.brute_force_optimum(json.dumps(problem))
