"""Command-line entry point: ``python copzero.py <command> [options]``."""

import sys

from src.zero_set_analyzer import main

if __name__ == "__main__":
    sys.exit(main())
