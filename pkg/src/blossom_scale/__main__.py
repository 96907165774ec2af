"""Allow running the command line as python -m blossom_scale."""

from __future__ import annotations

from .cli_io import main

if __name__ == "__main__":
    main()
