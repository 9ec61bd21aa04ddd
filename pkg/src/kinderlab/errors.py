"""Shared exception types.

The CLI maps these onto distinct exit codes, so keep the split coarse:
configuration problems, blown enumeration caps, and violated properties.
"""


class InvalidConfigError(ValueError):
    """Parameters outside the supported range or inconsistent with each other."""


class CapExceededError(RuntimeError):
    """An enumeration or search exceeded its configured cap."""


class PropertyViolationError(AssertionError):
    """A hard invariant that should hold on every valid input failed."""
