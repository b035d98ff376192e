"""Error taxonomy shared across the package.

Three failure classes, kept deliberately coarse:

* ``DomainError`` -- a scalar argument lies outside its mathematical domain
  (Hurst parameter outside (1/2, 1), negative time, shift outside the
  admissible window, ...).
* ``StructuralError`` -- a composite input is malformed (times not strictly
  increasing, missing terminal observation, mismatched lengths, ...).
* ``NumericsError`` -- a computation produced a non-finite intermediate.

All three derive from ``LeadLagError`` so callers (notably the CLI) can map
any validation failure to a single exit code.
"""

from __future__ import annotations

__all__ = ["LeadLagError", "DomainError", "StructuralError", "NumericsError"]


class LeadLagError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(LeadLagError, ValueError):
    """A parameter lies outside its mathematical domain."""


class StructuralError(LeadLagError, ValueError):
    """A composite input violates a structural invariant."""


class NumericsError(LeadLagError, ArithmeticError):
    """A computation produced a non-finite value."""
