"""CLI entry point for orthostat."""

import sys

from orthostat.cli import main

if __name__ == "__main__":
    sys.exit(main())
