"""Desk-scale versions of the field experiments: coverage raster and the
left/right separation test."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .geometry import AnchorLayout, coverage
from .ranging import NoiseModel, simulate_batch
from .tracking import DEFAULT_CONFIDENCE, EmptyResult, LocalizedBatch, SideLabel, classify_side, localize_batch

SIDE_DISTANCES = (10.0, 20.0, 30.0)


def coverage_map(layout: AnchorLayout, xmin=-60.0, xmax=60.0, ymin=-60.0, ymax=60.0,
                 step=1.0) -> str:
    if not step > 0 or xmax < xmin or ymax < ymin:
        raise ValueError("need step > 0 and a non-empty grid")
    xs = np.arange(round((xmax - xmin) / step) + 1) * step + xmin
    ys = np.arange(round((ymax - ymin) / step) + 1) * step + ymin
    buf = io.StringIO()
    buf.write("x,y,status\n")
    for y in ys:
        for x in xs:
            buf.write(f"{x:.6g},{y:.6g},{coverage(layout, (float(x), float(y))).value}\n")
    return buf.getvalue()


@dataclass
class SideRow:
    distance: float
    lateral: float
    trials: int = 0
    separated_trials: int = 0
    correct: int = 0
    left_label: SideLabel = SideLabel.UNDECIDED
    right_label: SideLabel = SideLabel.UNDECIDED
    scatter: dict = field(default_factory=dict)

    @property
    def separated(self) -> bool:
        return self.trials > 0 and self.separated_trials == self.trials

    @property
    def accuracy(self) -> float:
        return self.correct / (2 * self.trials) if self.trials else 0.0

    def report_line(self) -> str:
        return (f"distance_m={self.distance:g} lateral_m={self.lateral:g} trials={self.trials} "
                f"separated={'true' if self.separated else 'false'} "
                f"separated_trials={self.separated_trials} accuracy={self.accuracy:.6f} "
                f"left={self.left_label.value} right={self.right_label.value}")


def _cloud(layout, point, noise, n, seed) -> LocalizedBatch:
    try:
        return localize_batch(layout, simulate_batch(layout, point, noise, n, seed))
    except EmptyResult:
        return LocalizedBatch(np.empty(0), np.empty(0))


def side_test(layout: AnchorLayout = AnchorLayout(), noise: NoiseModel = NoiseModel(),
              distances=SIDE_DISTANCES, lateral: float = 5.0, n: int = 200, seed: int = 0,
              trials: int = 100, min_confidence: float = DEFAULT_CONFIDENCE) -> list[SideRow]:
    """Tags ``lateral`` metres left and right of the centreline at each
    forward distance; trial ``t`` uses seed ``seed + t``.

    The scatter of the first trial is kept for plotting.
    """
    rows = []
    for i, d in enumerate(distances):
        row = SideRow(float(d), float(lateral))
        for t in range(trials):
            left = _cloud(layout, (-lateral, d), noise, n, (seed + t, i, 0))
            right = _cloud(layout, (lateral, d), noise, n, (seed + t, i, 1))
            labels = [classify_side(c, min_confidence) if len(c) >= 2 else SideLabel.UNDECIDED
                      for c in (left, right)]
            row.trials += 1
            row.correct += (labels[0] is SideLabel.LEFT) + (labels[1] is SideLabel.RIGHT)
            if len(left) and len(right) and left.x.max() < right.x.min():
                row.separated_trials += 1
            if t == 0:
                row.left_label, row.right_label = labels
                row.scatter = {"Left": left, "Right": right}
        rows.append(row)
    return rows


def scatter_csv(rows: list[SideRow]) -> str:
    buf = io.StringIO()
    buf.write("distance_m,side,x_m,y_m\n")
    for row in rows:
        for side, cloud in row.scatter.items():
            for x, y in zip(cloud.x, cloud.y):
                buf.write(f"{row.distance:g},{side},{x:.9g},{y:.9g}\n")
    return buf.getvalue()
