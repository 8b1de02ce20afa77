"""Loop exchange format: a JSON document with order, names, table, involution."""
from __future__ import annotations

import json
import sys
from pathlib import Path

from .involution import Involution, validate_involution
from .loop import LoopError, LoopTable, validate_loop


def dumps(L: LoopTable, inv: Involution | None = None) -> str:
    """Canonical text: fields in fixed order, one table row per line."""
    rows = ",\n".join("    " + json.dumps([int(v) for v in row]) for row in L.table)
    parts = [
        f'  "order": {L.order}',
        f'  "names": {json.dumps(list(L.names))}',
        f'  "table": [\n{rows}\n  ]',
    ]
    if inv is not None:
        parts.append(f'  "involution": {json.dumps([int(v) for v in inv.perm])}')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def loads(text: str) -> tuple[LoopTable, Involution | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LoopError(f"not a loop file: {exc}") from None
    if not isinstance(doc, dict) or "table" not in doc:
        raise LoopError("loop file needs a 'table' field")
    L = validate_loop(doc["table"], doc.get("names"))
    if "order" in doc and doc["order"] != L.order:
        raise LoopError(f"order field {doc['order']} does not match the table ({L.order})")
    inv = None
    if doc.get("involution") is not None:
        inv = validate_involution(L, doc["involution"])
    return L, inv


def read(path: str | Path) -> tuple[LoopTable, Involution | None]:
    if str(path) == "-":
        return loads(sys.stdin.read())
    return loads(Path(path).read_text())


def write(path: str | Path, L: LoopTable, inv: Involution | None = None):
    Path(path).write_text(dumps(L, inv))
