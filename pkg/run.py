#!/usr/bin/env python3
"""Run the cardioresp command line (simulate, analyze, run, report)."""

import sys

from cli.main import main

if __name__ == "__main__":
    sys.exit(main())
