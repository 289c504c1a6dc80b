"""Optical subsystem design calculations for surface ion traps.

All quantities are SI floats unless a name says otherwise.
"""

from ._core import *  # noqa: F401,F403
from ._core import LayoutParseError, run_cli

__all__ = [name for name in dir() if not name.startswith("_")]


def main() -> int:
    import sys

    code, out, err = run_cli(sys.argv[1:])
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
