"""Two-anchor triangulation in the vehicle frame.

Anchors sit at ``(-x, 0)`` (left mirror) and ``(+x, 0)`` (right mirror),
where ``x`` is the half-baseline; ``+y`` points forward out of the windshield
and ``+x`` to the driver's right.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

# Relative tolerance on y_k**2 below which a near-collinear pair is clamped
# onto the baseline instead of being rejected.
CLAMP_REL = 1e-6


class GeometryError(ValueError):
    pass


class Infeasible(GeometryError):
    pass


class DegenerateLayout(GeometryError):
    pass


class Singular(GeometryError):
    pass


class Ambiguous(GeometryError):
    pass


@dataclass(frozen=True)
class AnchorLayout:
    """Mounting geometry of the two anchors and the coverage it yields.

    Angles are measured off the forward axis, in degrees, and apply to both
    sides of the vehicle. The defaults describe the mirror-mounted layout
    (1.85 m between anchors, 1.1 m above ground).
    """

    half_baseline: float = 1.85 / 2
    mount_height: float = 1.1
    front_range: float = 50.0
    front_halfangle: float = 60.0
    occlusion_start: float = 60.0
    occlusion_end: float = 90.0
    side_range: float = 5.0

    def __post_init__(self):
        if not self.half_baseline > 0:
            raise DegenerateLayout(f"half_baseline must be > 0, got {self.half_baseline}")
        if not self.front_range > self.side_range > 0:
            raise ValueError("need front_range > side_range > 0")
        if not 0 < self.front_halfangle <= 90:
            raise ValueError("front_halfangle must lie in (0, 90]")
        if not self.front_halfangle <= self.occlusion_start <= self.occlusion_end <= 180:
            raise ValueError("occlusion band must lie outside the front sector")

    @classmethod
    def from_baseline(cls, baseline: float, **kwargs) -> "AnchorLayout":
        return cls(half_baseline=baseline / 2, **kwargs)

    @property
    def baseline(self) -> float:
        return 2 * self.half_baseline

    @property
    def left_anchor(self) -> tuple[float, float]:
        return (-self.half_baseline, 0.0)

    @property
    def right_anchor(self) -> tuple[float, float]:
        return (self.half_baseline, 0.0)


@dataclass(frozen=True)
class RangePair:
    r1: float  # to the left anchor
    r2: float  # to the right anchor

    def __post_init__(self):
        if not (self.r1 >= 0 and self.r2 >= 0):
            raise ValueError(f"ranges must be non-negative, got ({self.r1}, {self.r2})")


@dataclass(frozen=True)
class TagPosition:
    x_k: float
    y_k: float

    def as_tuple(self) -> tuple[float, float]:
        return (self.x_k, self.y_k)


@dataclass(frozen=True)
class Sensitivity:
    """Localization error per unit of ranging error, per axis."""

    dx_de: float
    dy_de: float


class PerturbMode(enum.Enum):
    WORST_CASE_X = "WorstCaseX"  # (r1 + e, r2 - e)
    WORST_CASE_Y = "WorstCaseY"  # (r1 + e, r2 + e)


class CoverageStatus(enum.Enum):
    BOTH_ANCHORS = "BothAnchors"
    ONE_ANCHOR = "OneAnchor"
    NONE = "None"


def true_ranges(layout: AnchorLayout, point) -> RangePair:
    px, py = point
    x = layout.half_baseline
    return RangePair(math.hypot(px + x, py), math.hypot(px - x, py))


def triangulate(layout: AnchorLayout, ranges: RangePair) -> TagPosition:
    """Intersect the two range circles and return the forward solution.

    Raises
    ------
    Infeasible
        If the circles miss each other by more than the clamp tolerance.
    """
    x = layout.half_baseline
    r1, r2 = ranges.r1, ranges.r2
    # Same operation order as kernels.triangulate_batch.
    x_k = (r1 * r1 - r2 * r2) / (4.0 * x)
    y2 = (r1 * r1 + r2 * r2) / 2.0 - x_k * x_k - x * x
    if y2 >= 0.0:
        return TagPosition(x_k, math.sqrt(y2))
    s = r1 + r2
    if y2 >= -CLAMP_REL * (s * s):
        return TagPosition(x_k, 0.0)
    raise Infeasible("infeasible ranging pair")


def perturb(ranges: RangePair, e: float, mode: PerturbMode) -> RangePair:
    if mode is PerturbMode.WORST_CASE_X:
        r1, r2 = ranges.r1 + e, ranges.r2 - e
    else:
        r1, r2 = ranges.r1 + e, ranges.r2 + e
    if r1 < 0 or r2 < 0:
        raise Infeasible("perturbation drives a range negative")
    return RangePair(r1, r2)


def perturbed_triangulate(layout: AnchorLayout, ranges: RangePair, e: float,
                          mode: PerturbMode) -> TagPosition:
    return triangulate(layout, perturb(ranges, e, mode))


def sensitivity(layout: AnchorLayout, ranges: RangePair, e: float = 0.0) -> Sensitivity:
    """Analytic derivatives of the worst-case perturbed position w.r.t. ``e``.

    ``dx_de`` is the slope under the opposite-sign perturbation and ``dy_de``
    under the same-sign one.
    """
    x = layout.half_baseline
    r1, r2 = ranges.r1, ranges.r2
    a, b = e + r1, e + r2
    zeta = a * a - b * b
    arg = (a * a + b * b) / (2 * x * x) - zeta * zeta / (16 * x**4) - 1
    if not arg > 0:
        raise Singular("tag on or behind the baseline; derivative undefined")
    num = (4 * e + 2 * r1 + 2 * r2) / (2 * x) - (2 * r1 - 2 * r2) * zeta / (8 * x**3)
    return Sensitivity((r1 + r2) / (2 * x), num / (2 * math.sqrt(arg)))


def sensitivity_frontal(layout: AnchorLayout, r: float) -> Sensitivity:
    """Sensitivities for a tag straight ahead, equidistant from both anchors."""
    x = layout.half_baseline
    if not r > x:
        raise Singular(f"frontal range {r} must exceed the half-baseline {x}")
    return Sensitivity(r / x, 1 / math.sqrt(1 - x * x / (r * r)))


def resolve_side(candidate: TagPosition, aux_range: float, aux_anchor_position,
                 tol: float = 1e-9) -> TagPosition:
    """Pick the front or rear mirror image using a third anchor's range."""
    ax, ay = aux_anchor_position
    if ay == 0:
        raise Ambiguous("auxiliary anchor on the baseline cannot separate front from rear")
    if candidate.y_k == 0:
        return candidate
    front = TagPosition(candidate.x_k, abs(candidate.y_k))
    rear = TagPosition(candidate.x_k, -abs(candidate.y_k))
    res_front = abs(math.hypot(front.x_k - ax, front.y_k - ay) - aux_range)
    res_rear = abs(math.hypot(rear.x_k - ax, rear.y_k - ay) - aux_range)
    if abs(res_front - res_rear) <= tol * max(1.0, aux_range):
        raise Ambiguous("front and rear solutions fit the auxiliary range equally well")
    return front if res_front < res_rear else rear


def bearing_deg(point) -> float:
    """Angle off the forward axis in [0, 180], symmetric left/right."""
    px, py = point
    return math.degrees(math.atan2(abs(px), py))


def coverage(layout: AnchorLayout, true_position) -> CoverageStatus:
    dist = math.hypot(*true_position)
    if dist <= layout.side_range:
        return CoverageStatus.BOTH_ANCHORS
    if dist > layout.front_range:
        return CoverageStatus.NONE
    bearing = bearing_deg(true_position)
    if bearing <= layout.front_halfangle:
        return CoverageStatus.BOTH_ANCHORS
    if layout.occlusion_start <= bearing <= layout.occlusion_end:
        return CoverageStatus.ONE_ANCHOR
    return CoverageStatus.NONE
