"""Disk cache of certified zero tables and the table-for-a-window lookup.

Cache files live in ``$GRAMLAW_CACHE_DIR`` (default ``~/.cache/gramlaw``)
and are named ``zeros-<kernel>-<first>-<last>.tsv``.  Any cached table whose
index range contains the request is reused; otherwise the range is computed,
certified and stored.  Gram points are cheap to recompute and are not cached.
"""

from __future__ import annotations

import os
import re
from pathlib import Path

from .errors import DomainError, TableFormatError
from .gram import gram_heights, gram_index_below
from .zeros import ZeroTable, compute_table, load_table, save_table

KERNEL_VERSION = "rs5em12"
WINDOW_MARGIN = 64
_NAME = re.compile(r"^zeros-(?P<kernel>[A-Za-z0-9]+)-(?P<first>\d+)-(?P<last>\d+)\.tsv$")


def cache_dir() -> Path:
    root = os.environ.get("GRAMLAW_CACHE_DIR")
    return Path(root) if root else Path.home() / ".cache" / "gramlaw"


def cache_path(first: int, last: int, root: Path | None = None) -> Path:
    root = cache_dir() if root is None else Path(root)
    return root / f"zeros-{KERNEL_VERSION}-{first}-{last}.tsv"


def _cached_ranges(root: Path):
    if not root.is_dir():
        return []
    found = []
    for path in root.iterdir():
        m = _NAME.match(path.name)
        if m and m["kernel"] == KERNEL_VERSION:
            found.append((int(m["first"]), int(m["last"]), path))
    # prefer the smallest covering file, ties broken by name for stability
    return sorted(found, key=lambda r: (r[1] - r[0], r[2].name))


def cached_table(first: int, last: int, threads: int = 1,
                 root: Path | None = None) -> ZeroTable:
    """Certified table for indices first..last, from cache or freshly computed."""
    if first < 1 or last < first:
        raise DomainError("need 1 <= first <= last")
    root = cache_dir() if root is None else Path(root)
    for lo, hi, path in _cached_ranges(root):
        if lo <= first and last <= hi:
            try:
                return load_table(path).slice_indices(first, last)
            except TableFormatError:
                # a damaged cache entry is recomputed below
                continue
    table = compute_table(first, last - first + 1, threads=threads)
    root.mkdir(parents=True, exist_ok=True)
    save_table(table, cache_path(first, last, root))
    return table


def window_indices(start: int, length: int, margin: int = WINDOW_MARGIN) -> tuple[int, int]:
    """Index range of zeros needed to derive every quantity on (start, start+length]."""
    return max(1, start - margin), start + length + margin


def table_for_window(start: int, length: int, threads: int = 1,
                     root: Path | None = None) -> ZeroTable:
    first, last = window_indices(start, length)
    return cached_table(first, last, threads=threads, root=root)


def table_for_heights(t_lo: float, t_hi: float, threads: int = 1,
                      root: Path | None = None) -> ZeroTable:
    """Certified table covering the height range [t_lo, t_hi]."""
    if not t_lo < t_hi:
        raise DomainError("need t_lo < t_hi")
    t0 = gram_heights(0, 1)[0]
    first = 1 if t_lo <= t0 else max(1, gram_index_below(t_lo) - WINDOW_MARGIN)
    last = max(gram_index_below(max(t_hi, t0)), 1) + WINDOW_MARGIN
    return cached_table(first, last, threads=threads, root=root)
