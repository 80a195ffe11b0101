"""Allow running the command-line front end via `python -m vericov`."""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
