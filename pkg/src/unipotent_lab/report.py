"""Line-oriented reports with a JSON variant.

Reports are byte-stable for fixed inputs: keys keep insertion order,
values are rendered deterministically, and timing lines are only added
when explicitly requested.
"""

from __future__ import annotations

import csv
import io
import json
import shlex

from . import __version__

SCHEMA = 1


class Report:
    def __init__(self, argv: list[str]):
        self.fields: dict[str, object] = {}
        self.fields["tool"] = f"unipotent-lab {__version__}"
        self.fields["schema"] = SCHEMA
        self.fields["command"] = shlex.join(argv)

    def add(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = "true" if value else "false"
        self.fields[key] = value

    def text(self) -> str:
        return "\n".join(f"{k}: {v}" for k, v in self.fields.items()) + "\n"

    def json(self) -> str:
        return json.dumps(self.fields, separators=(", ", ": ")) + "\n"

    def render(self, fmt: str) -> str:
        return self.json() if fmt == "json" else self.text()


def write_csv(path: str, header: list[str], rows: list[list]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


def slug(text: str) -> str:
    out = []
    for ch in text.lower():
        out.append(ch if ch.isalnum() else "-")
    collapsed = "".join(out).strip("-")
    while "--" in collapsed:
        collapsed = collapsed.replace("--", "-")
    return collapsed or "report"
