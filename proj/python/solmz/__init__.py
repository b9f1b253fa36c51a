"""Guided bright-soliton interferometer simulations."""

from ._core import *  # noqa: F401,F403
from ._core import BlowUpError, ConfigError, DomainError, Error, FitError, ParseError, ResolutionError  # noqa: F401


def parse_report(text):
    """key = value report lines as a dict of strings."""
    out = {}
    for line in text.splitlines():
        key, sep, value = line.partition(" = ")
        if sep:
            out[key] = value
    return out
