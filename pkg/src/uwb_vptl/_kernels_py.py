"""Numpy fallback for the compiled kernels.

Loops run over window offsets rather than elements so that each output is
accumulated in the same order as the compiled version.
"""

import numpy as np


def triangulate_batch(r1, r2, half_baseline, clamp_rel):
    r1 = np.ascontiguousarray(r1, dtype=np.float64)
    r2 = np.ascontiguousarray(r2, dtype=np.float64)
    if r1.shape != r2.shape:
        raise ValueError("r1 and r2 must have the same length")
    xk = (r1 * r1 - r2 * r2) / (4.0 * half_baseline)
    y2 = (r1 * r1 + r2 * r2) / 2.0 - xk * xk - half_baseline * half_baseline
    s = r1 + r2
    with np.errstate(invalid="ignore"):
        exact = y2 >= 0.0
        clamped = ~exact & (y2 >= -clamp_rel * (s * s))
        y = np.where(exact, np.sqrt(np.where(exact, y2, 0.0)), np.nan)
    y[clamped] = 0.0
    return xk, y, exact | clamped


def moving_average(values, window):
    if window < 1:
        raise ValueError("window must be >= 1")
    values = np.ascontiguousarray(values, dtype=np.float64)
    n = values.shape[0]
    acc = np.zeros(n)
    count = np.zeros(n)
    for offset in range(-((window - 1) // 2), window // 2 + 1):
        lo = max(0, -offset)
        hi = min(n, n - offset)
        if lo >= hi:
            continue
        acc[lo:hi] = acc[lo:hi] + values[lo + offset:hi + offset]
        count[lo:hi] += 1.0
    return acc / np.maximum(count, 1.0)


def rolling_mean_std(values, window):
    if window < 2:
        raise ValueError("window must be >= 2")
    values = np.ascontiguousarray(values, dtype=np.float64)
    m = max(values.shape[0] - window + 1, 0)
    acc = np.zeros(m)
    for j in range(window):
        acc = acc + values[j:j + m]
    mean = acc / window
    acc = np.zeros(m)
    for j in range(window):
        d = values[j:j + m] - mean
        acc = acc + d * d
    return mean, np.sqrt(acc / (window - 1))
