"""Exact Gromov-Witten invariants of projective spaces in all genera."""

from .kernel import Rat, format_rat
from .store import Cache, InvKey, cache_load, cache_save
from .target import Context
from .virasoro import Engine

__all__ = ["Rat", "format_rat", "Cache", "InvKey", "cache_load", "cache_save", "Context", "Engine"]
__version__ = "0.1.0"
