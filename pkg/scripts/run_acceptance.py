#!/usr/bin/env python3
"""Run the acceptance gate and echo the per-criterion verdict lines."""
import os
import subprocess
import sys

HERE = os.path.dirname(os.path.abspath(__file__))
REPO = os.path.dirname(HERE)

if __name__ == "__main__":
    sys.exit(
        subprocess.call(
            [sys.executable, "-m", "pytest", "tests/test_acceptance.py", "-v"]
            + sys.argv[1:],
            cwd=REPO,
        )
    )
