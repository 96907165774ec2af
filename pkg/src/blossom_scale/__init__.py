"""Weight-scaling solver for maximum-weight perfect matching and f-factors."""

from __future__ import annotations

__version__ = "0.1.0"
