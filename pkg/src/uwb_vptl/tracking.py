"""Localization of measurement batches and left/right crossing detection."""

from __future__ import annotations

import enum
import io
from collections import deque
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .geometry import CLAMP_REL, AnchorLayout, TagPosition
from .ranging import MeasurementBatch

DEFAULT_CONFIDENCE = 0.999


class TrackingError(ValueError):
    pass


class EmptyResult(TrackingError):
    pass


class TooFewPoints(TrackingError):
    pass


class SideLabel(enum.Enum):
    LEFT = "Left"
    RIGHT = "Right"
    UNDECIDED = "Undecided"

    def mirrored(self) -> "SideLabel":
        return {SideLabel.LEFT: SideLabel.RIGHT, SideLabel.RIGHT: SideLabel.LEFT}.get(self, self)


@dataclass(frozen=True)
class CrossingEvent:
    time_index: int
    from_side: SideLabel
    to_side: SideLabel

    def __post_init__(self):
        if self.from_side == self.to_side:
            raise ValueError("a crossing must change side")


@dataclass
class LocalizedBatch:
    x: np.ndarray
    y: np.ndarray
    source: MeasurementBatch | None = None
    dropped: int = 0

    def __len__(self) -> int:
        return len(self.x)

    @property
    def points(self) -> list[TagPosition]:
        return [TagPosition(float(a), float(b)) for a, b in zip(self.x, self.y)]

    @classmethod
    def from_points(cls, points: Iterable[TagPosition]) -> "LocalizedBatch":
        pts = list(points)
        return cls(np.array([p.x_k for p in pts], dtype=float),
                   np.array([p.y_k for p in pts], dtype=float))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("x_m,y_m\n")
        for a, b in zip(self.x, self.y):
            buf.write(f"{a:.9g},{b:.9g}\n")
        return buf.getvalue()


def localize_batch(layout: AnchorLayout, batch: MeasurementBatch) -> LocalizedBatch:
    """Triangulate every sample, dropping the ones whose circles do not meet."""
    xs, ys, ok = kernels.triangulate_batch(batch.r1, batch.r2, layout.half_baseline, CLAMP_REL)
    if not ok.any():
        raise EmptyResult("every sample in the batch is infeasible")
    return LocalizedBatch(xs[ok], ys[ok], batch, int(len(ok) - ok.sum()))


def _z_threshold(min_confidence: float) -> float:
    if not 0.5 < min_confidence < 1:
        raise ValueError("min_confidence must lie in (0.5, 1)")
    return NormalDist().inv_cdf(min_confidence)


def _label(mean: float, std: float, n: int, z_crit: float) -> SideLabel:
    if std == 0.0:
        if mean == 0.0:
            return SideLabel.UNDECIDED
        return SideLabel.LEFT if mean < 0 else SideLabel.RIGHT
    z = mean / (std / np.sqrt(n))
    if z <= -z_crit:
        return SideLabel.LEFT
    if z >= z_crit:
        return SideLabel.RIGHT
    return SideLabel.UNDECIDED


def _as_x(points) -> np.ndarray:
    if isinstance(points, LocalizedBatch):
        return np.ascontiguousarray(points.x, dtype=float)
    if isinstance(points, np.ndarray):
        return np.ascontiguousarray(points, dtype=float)
    return np.array([p.x_k for p in points], dtype=float)


def classify_side(points, min_confidence: float = DEFAULT_CONFIDENCE) -> SideLabel:
    """One-sample z test on the lateral coordinate.

    Returns Left when ``mean(x) >= 0`` is rejected at ``min_confidence``,
    Right for the mirrored test, Undecided otherwise.
    """
    x = _as_x(points)
    if len(x) < 2:
        raise TooFewPoints("need at least two points to classify")
    mean, std = kernels.rolling_mean_std(x, len(x))
    return _label(float(mean[0]), float(std[0]), len(x), _z_threshold(min_confidence))


def smooth(points: Sequence[TagPosition], window: int) -> list[TagPosition]:
    """Centered moving average; the window shrinks at both ends."""
    if window < 1:
        raise ValueError("window must be >= 1")
    if not len(points):
        return []
    batch = LocalizedBatch.from_points(points)
    xs = kernels.moving_average(batch.x, window)
    ys = kernels.moving_average(batch.y, window)
    return [TagPosition(float(a), float(b)) for a, b in zip(xs, ys)]


@dataclass
class CrossingDetector:
    """Streaming form of :func:`detect_crossing`; feed points in order."""

    window: int
    min_confidence: float = DEFAULT_CONFIDENCE
    index: int = -1
    side: SideLabel = SideLabel.UNDECIDED
    _buf: deque = field(init=False, repr=False)
    _z: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.window < 2:
            raise ValueError("window must be >= 2")
        self._buf = deque(maxlen=self.window)
        self._z = _z_threshold(self.min_confidence)

    def update(self, point: TagPosition) -> CrossingEvent | None:
        self.index += 1
        self._buf.append(point.x_k)
        if len(self._buf) < self.window:
            return None
        mean, std = kernels.rolling_mean_std(np.fromiter(self._buf, float, self.window),
                                             self.window)
        return self._observe(_label(float(mean[0]), float(std[0]), self.window, self._z))

    def _observe(self, label: SideLabel) -> CrossingEvent | None:
        if label is SideLabel.UNDECIDED:
            return None
        prev, self.side = self.side, label
        if prev is SideLabel.UNDECIDED or prev is label:
            return None
        return CrossingEvent(self.index, prev, label)


def detect_crossing(stream: Iterable[TagPosition], window: int = 10,
                    min_confidence: float = DEFAULT_CONFIDENCE) -> list[CrossingEvent]:
    """Left/Right transitions of the windowed side label over a track.

    Each event is stamped with the index of the last sample in the first
    window that carries the new label.
    """
    det = CrossingDetector(window, min_confidence)
    x = _as_x(list(stream))
    means, stds = kernels.rolling_mean_std(x, window)
    events = []
    for i, (m, s) in enumerate(zip(means, stds)):
        det.index = i + window - 1
        ev = det._observe(_label(float(m), float(s), window, det._z))
        if ev is not None:
            events.append(ev)
    return events
