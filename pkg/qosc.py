"""
Entry point for the qosc command line
Run from project root: python qosc.py <command> --alpha A --beta B
"""

import sys

from oscillator.cli import main

if __name__ == "__main__":
    sys.exit(main())
