"""Launcher: python struve.py <subcommand> [flags]."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent / "apps" / "engine"))

from src.cli import main  # noqa: E402

if __name__ == "__main__":
    main()
