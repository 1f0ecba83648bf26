"""Exceptions shared across the workbench."""

import os

DEFAULT_MAX_BALL = 5_000_000
DEFAULT_MAX_POINTS = 20_000


class BudgetExceeded(RuntimeError):
    """A ball, space or enumeration grew past its configured size cap."""


class PreconditionError(ValueError):
    """Inputs do not satisfy the hypotheses an operation requires."""


class CertificationError(AssertionError):
    """A constructed object failed the postcondition it is supposed to certify."""


def max_ball_size() -> int:
    return int(os.environ.get("WREATHCOARSE_MAX_BALL", DEFAULT_MAX_BALL))


def max_points() -> int:
    return int(os.environ.get("WREATHCOARSE_MAX_POINTS", DEFAULT_MAX_POINTS))
