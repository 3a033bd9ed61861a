"""Counting and uniform sampling of executions of barrier-synchronized processes."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401


def load(path):
    """Parse a process file."""
    with open(path) as f:
        return parse(f.read())  # noqa: F405


def load_poset(path):
    """Parse a poset file (one `a -> b` or bare `a` per line)."""
    with open(path) as f:
        return parse_poset(f.read())  # noqa: F405
