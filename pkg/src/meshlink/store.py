"""Resource persistence behind the HTTP service.

Two interchangeable stores keep opaque resource bytes under
(kind, resource_id) keys: an in-memory dict for tests and a directory
tree for deployments.  Handlers stay stateless; restarting a server on
the same disk store reproduces identical GET responses because the
response bytes themselves are what is stored.

Disk layout: one file per resource, ``<root>/<kind>/<resource_id>``.
Session resources hold the discovery module's own persistence format,
so a session file lifted out of the store loads with load_session as-is.
Writes go to a temporary file first and are renamed into place, so a
crash never leaves a truncated resource behind.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path

__all__ = ["KINDS", "MemoryStore", "DiskStore"]

KINDS = ("corpora", "diagrams", "sessions")


class MemoryStore:
    """Dict-backed store; contents vanish with the process."""

    def __init__(self):
        self._data: dict[str, dict[str, bytes]] = {kind: {} for kind in KINDS}

    def put(self, kind: str, resource_id: str, data: bytes) -> None:
        self._check_kind(kind)
        self._data[kind][resource_id] = bytes(data)

    def get(self, kind: str, resource_id: str) -> bytes | None:
        self._check_kind(kind)
        return self._data[kind].get(resource_id)

    def ids(self, kind: str) -> list[str]:
        self._check_kind(kind)
        return sorted(self._data[kind])

    @staticmethod
    def _check_kind(kind: str) -> None:
        if kind not in KINDS:
            raise ValueError(f"unknown resource kind {kind!r}")


class DiskStore:
    """Directory-tree store with atomic per-resource writes."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        for kind in KINDS:
            (self.root / kind).mkdir(parents=True, exist_ok=True)

    def _path(self, kind: str, resource_id: str) -> Path:
        if kind not in KINDS:
            raise ValueError(f"unknown resource kind {kind!r}")
        if not resource_id or "/" in resource_id or resource_id.startswith("."):
            raise ValueError(f"unusable resource id {resource_id!r}")
        return self.root / kind / resource_id

    def put(self, kind: str, resource_id: str, data: bytes) -> None:
        target = self._path(kind, resource_id)
        handle, tmp_name = tempfile.mkstemp(dir=target.parent, prefix=".tmp-")
        try:
            with os.fdopen(handle, "wb") as tmp:
                tmp.write(data)
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

    def get(self, kind: str, resource_id: str) -> bytes | None:
        target = self._path(kind, resource_id)
        try:
            return target.read_bytes()
        except FileNotFoundError:
            return None

    def ids(self, kind: str) -> list[str]:
        if kind not in KINDS:
            raise ValueError(f"unknown resource kind {kind!r}")
        return sorted(
            p.name for p in (self.root / kind).iterdir() if not p.name.startswith(".")
        )
