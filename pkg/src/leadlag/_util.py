"""Small shared validation helpers."""

from __future__ import annotations

import numpy as np

from .errors import DomainError, StructuralError

__all__ = ["as_float_array", "check_strictly_increasing", "check_finite_scalar"]


def as_float_array(values, name: str) -> np.ndarray:
    """Coerce to a 1-D contiguous float64 array, rejecting non-finite entries."""
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise StructuralError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.isfinite(arr).all():
        raise StructuralError(f"{name} contains non-finite entries")
    return arr


def check_strictly_increasing(arr: np.ndarray, name: str) -> None:
    if arr.size >= 2 and not (np.diff(arr) > 0).all():
        raise StructuralError(f"{name} must be strictly increasing")


def check_finite_scalar(value, name: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name} must be a real number, got {value!r}") from exc
    if not np.isfinite(out):
        raise DomainError(f"{name} must be finite, got {out}")
    return out
