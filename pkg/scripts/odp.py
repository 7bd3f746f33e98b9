#!/usr/bin/env python3
"""Run the odp command line without installing the package."""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from odp.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
