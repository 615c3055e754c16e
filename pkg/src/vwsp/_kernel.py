"""Search kernel selection.

The compiled kernel is used when it imports, the instance has no
table-form users and its weights fit comfortably in int64; ``VWSP_KERNEL=python`` forces the pure-Python kernel.
"""
from __future__ import annotations

import os

from . import _pysearch

try:
    from . import _csearch
except ImportError:  # pragma: no cover - depends on the build
    _csearch = None

HAVE_COMPILED = _csearch is not None


def default_backend() -> str:
    env = os.environ.get("VWSP_KERNEL", "").strip().lower()
    if env in ("python", "py"):
        return "python"
    return "compiled" if HAVE_COMPILED else "python"


def select(ci, backend=None):
    """Return ``(search_fn, name)`` for a compiled instance."""
    name = backend or default_backend()
    if name == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel not built; run `pip install -e .`")
        if ci.has_table or not ci.int64_safe:
            return _pysearch.search, "python"
        return _csearch.search, "compiled"
    if name != "python":
        raise ValueError(f"unknown backend {name!r}")
    return _pysearch.search, "python"
