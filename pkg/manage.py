#!/usr/bin/env python
"""Command-line utility for the branching toolkit."""
import sys


def main():
    """Run a branching subcommand."""
    try:
        from branching.cli import main as run
    except ImportError as exc:
        raise ImportError(
            "Couldn't import the branching package. Are numpy, scipy and sympy installed and "
            "is the repository root on your PYTHONPATH?"
        ) from exc
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
