"""Append-only JSON-lines store of exact counts, shared across CLI runs."""
from __future__ import annotations

import json
import logging
import os
from pathlib import Path

from . import __version__
from .graphs import GraphModel
from .series import CountSeries

log = logging.getLogger(__name__)

ENV_VAR = "POLYGROWTH_CACHE_DIR"
FILE_NAME = "counts.jsonl"


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "polygrowth"


class CountCache:
    """Counts keyed by (graph fingerprint, height label, quantity, n).

    Entries written by another code version are ignored; unreadable lines are
    skipped with a warning.
    """

    def __init__(self, directory: str | os.PathLike | None = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.path = self.directory / FILE_NAME
        self._entries: dict[tuple, int] | None = None

    def _load(self) -> dict[tuple, int]:
        if self._entries is not None:
            return self._entries
        entries = {}
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for lineno, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    try:
                        rec = json.loads(line)
                        key = (rec["fingerprint"], rec["height"], rec["quantity"], int(rec["n"]))
                        value = int(rec["count"])
                        version = rec["version"]
                    except (ValueError, KeyError, TypeError):
                        log.warning("skipping corrupt cache line %d in %s", lineno, self.path)
                        continue
                    if version == __version__:
                        entries[key] = value
        self._entries = entries
        return entries

    def lookup(self, g: GraphModel, quantity: str, n: int, height: str | None = None) -> int | None:
        return self._load().get((g.fingerprint(), height, quantity, n))

    def series(self, g: GraphModel, quantity: str, ns, height: str | None = None) -> CountSeries | None:
        """The cached series over ``ns``, or None unless every term is present."""
        counts = {}
        for n in ns:
            value = self.lookup(g, quantity, n, height)
            if value is None:
                return None
            counts[n] = value
        return CountSeries(quantity, g.name, counts, height_label=height)

    def store(self, g: GraphModel, series: CountSeries) -> int:
        """Append the terms not already cached; returns how many were written."""
        entries = self._load()
        fp = g.fingerprint()
        lines = []
        for n, c in sorted(series.counts.items()):
            key = (fp, series.height_label, series.quantity, n)
            if entries.get(key) == c:
                continue
            entries[key] = c
            lines.append(json.dumps({
                "fingerprint": fp,
                "graph": g.name,
                "height": series.height_label,
                "quantity": series.quantity,
                "n": n,
                "count": str(c),
                "version": __version__,
            }, sort_keys=True))
        if lines:
            self.directory.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write("\n".join(lines) + "\n")
        return len(lines)
