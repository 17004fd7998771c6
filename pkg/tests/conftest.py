"""Shared fixtures; keeps the tests directory importable for oracles."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))
