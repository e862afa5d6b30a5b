#!/usr/bin/env python3
import sys
from pathlib import Path

SRC = str(Path(__file__).resolve().parent.parent / "src")
if SRC not in sys.path:
    sys.path.insert(0, SRC)

from cli_io.main import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
