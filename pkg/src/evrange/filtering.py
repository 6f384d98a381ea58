"""First-order Butterworth low-pass with zero-phase forward-backward filtering."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PAD_FACTOR = 3  # reflective padding samples per filter order
FILTER_ORDER = 1


@dataclass(frozen=True)
class FilterConfig:
    cutoff: float = 0.05  # fraction of Nyquist on the 1 m sample grid

    def __post_init__(self):
        if not 0.0 < self.cutoff < 1.0:
            raise ValueError(f"cutoff must be in (0, 1), got {self.cutoff}")


def butterworth_coefficients(cutoff: float) -> tuple[float, float, float]:
    """Bilinear-transform coefficients (b0, b1, a1) of a first-order low-pass.

    y[n] = b0*x[n] + b1*x[n-1] - a1*y[n-1]; DC gain is exactly 1.
    """
    gamma = np.tan(np.pi * cutoff / 2.0)
    b0 = gamma / (1.0 + gamma)
    a1 = (gamma - 1.0) / (1.0 + gamma)
    return b0, b0, a1


def _single_pass(x: np.ndarray, b0: float, b1: float, a1: float) -> np.ndarray:
    # warm start at the DC steady state of the first sample, so constants
    # pass through untouched
    y = np.empty_like(x)
    x_prev = x[0]
    y_prev = x[0]
    for i, xi in enumerate(x):
        y_prev = b0 * xi + b1 * x_prev - a1 * y_prev
        x_prev = xi
        y[i] = y_prev
    return y


def zero_phase_filter(signal: np.ndarray, cfg: FilterConfig) -> np.ndarray:
    """Filter forward then backward so the result has no phase lag."""
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1:
        raise ValueError("expected a 1-D signal")
    pad = PAD_FACTOR * FILTER_ORDER
    if x.size < pad + 1:
        raise ValueError(f"signal too short: {x.size} samples, need > {pad}")

    b0, b1, a1 = butterworth_coefficients(cfg.cutoff)
    ext = np.concatenate([x[pad:0:-1], x, x[-2 : -pad - 2 : -1]])
    fwd = _single_pass(ext, b0, b1, a1)
    bwd = _single_pass(fwd[::-1], b0, b1, a1)[::-1]
    return bwd[pad : pad + x.size]
