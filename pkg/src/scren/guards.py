"""Cost guards for the recursive multi-party measures.

The m-party terms nest convex-roof optimizations, so cost grows exponentially
with the party count; these limits keep the package at desk scale and are
enforced at the CLI boundary with a dedicated exit code.
"""

from __future__ import annotations

from math import prod
from typing import Sequence

MAX_PARTIES = 5
MAX_TOTAL_DIM = 4096


class CostGuardError(Exception):
    """The requested computation exceeds the desk-scale cost limits."""


def check_cost(dims: Sequence[int]) -> None:
    if len(dims) > MAX_PARTIES:
        raise CostGuardError(
            f"{len(dims)} parties exceeds the limit of {MAX_PARTIES}"
        )
    total = prod(dims)
    if total > MAX_TOTAL_DIM:
        raise CostGuardError(
            f"total dimension {total} exceeds the limit of {MAX_TOTAL_DIM}"
        )
