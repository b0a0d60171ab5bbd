"""Size and budget caps, overridable from a JSON config file.

The file is located from ``--config`` on the command line or from the
``UNIPOTENT_LAB_CONFIG`` environment variable; unknown keys are rejected
so typos do not silently fall back to defaults.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace

from .errors import BadParams

ENV_VAR = "UNIPOTENT_LAB_CONFIG"


@dataclass(frozen=True)
class Caps:
    max_group_size: int = 20000
    hom_search_nodes: int = 100_000_000
    max_level: int = 8
    max_word_length: int = 32
    max_matrix_size: int = 64
    massey_candidates: int = 4_000_000
    cochain_combos: int = 2_000_000
    threads: int = 1


DEFAULT_CAPS = Caps()

_FIELD_NAMES = {f.name for f in fields(Caps)}


def load_caps(path: str | None = None) -> Caps:
    """Caps from an explicit path, else $UNIPOTENT_LAB_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR)
    if path is None:
        return DEFAULT_CAPS
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise BadParams(f"cannot read config {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise BadParams(f"config {path!r} must be a JSON object")
    unknown = set(data) - _FIELD_NAMES
    if unknown:
        raise BadParams(f"unknown config keys: {sorted(unknown)}")
    for key, value in data.items():
        if not isinstance(value, int) or value < 1:
            raise BadParams(f"config key {key} must be a positive integer")
    return replace(DEFAULT_CAPS, **data)
