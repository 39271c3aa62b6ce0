"""Pausing the cyclic garbage collector around allocation-heavy passes."""

from __future__ import annotations

import gc
from contextlib import contextmanager


@contextmanager
def gc_paused():
    # the chart and forest hold millions of small acyclic tuples; generational
    # passes over them dominate runtime on large inputs
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if was_enabled:
            gc.enable()
