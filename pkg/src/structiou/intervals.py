"""Arithmetic on real-valued open intervals.

All scoring downstream reduces to sums and ratios of the four operations
here, so they use plain double precision with no comparison epsilon.
Degenerate intervals are rejected at construction instead (length below
``MIN_LENGTH`` seconds).
"""

from dataclasses import dataclass

# Validation threshold for degenerate intervals, in seconds.
MIN_LENGTH = 1e-9


@dataclass(frozen=True)
class OpenInterval:
    """An open interval (start, end) with start strictly before end."""

    start: float
    end: float

    def __post_init__(self):
        if not self.end - self.start >= MIN_LENGTH:
            raise ValueError(
                f"degenerate interval ({self.start}, {self.end}): "
                f"length must be at least {MIN_LENGTH}"
            )


def length(i: OpenInterval) -> float:
    return i.end - i.start


def intersection_size(i1: OpenInterval, i2: OpenInterval) -> float:
    """Length of the overlap; 0 for disjoint intervals.

    Open intervals that merely touch at an endpoint do not intersect.
    """
    lo = max(i1.start, i2.start)
    hi = min(i1.end, i2.end)
    return hi - lo if hi > lo else 0.0


def union_size(i1: OpenInterval, i2: OpenInterval) -> float:
    return length(i1) + length(i2) - intersection_size(i1, i2)


def iou(i1: OpenInterval, i2: OpenInterval) -> float:
    """Intersection over union; 1 iff the intervals are equal, 0 iff disjoint."""
    return intersection_size(i1, i2) / union_size(i1, i2)
