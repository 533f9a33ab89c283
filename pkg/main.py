#!/usr/bin/env python3
"""
Quantum Walk Sampler
Main entry point for the command line pipeline.

Builds transition matrices, analyzes classical and quantum mixing, runs the
quantum-walk sampler and the verification lab, writing JSON/CSV artifacts.

Usage:
    python main.py generate --family torus --params p=5,d=2 --out torus.json
    python main.py pi --matrix torus.json
    python main.py sample --matrix torus.json --eps 0.01 --mode exact --out sample.json

Environment Variables:
    QWALK_GOLDEN_DIR - directory holding the golden tables for the lab suites

Configuration:
    See config/config.yaml for tolerances, search budgets, sampling and logging.
"""

import sys

from src.cli.commands import run


if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
