"""Takens delay embedding and the ellipse geometry behind lag selection.

A scalar series sampled from a rotation with per-step angle ``alpha``, once
delay-embedded with lag ``ell`` in three dimensions, traces the closed curve

    gamma_beta(theta) = (cos(theta), cos(theta + beta), cos(theta + 2 beta))

with beta = ell * alpha.  The curve is a planar ellipse whose area is
maximized at beta = pi/3; distinct beta give disjoint ellipses, which is what
lets one operator separate coexisting frequencies.  ``suggest_lag`` picks the
lag so the largest angular rate lands near the top of the useful range.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np


@dataclasses.dataclass(frozen=True)
class EmbeddedSeries:
    """Delay-vector matrix plus the metadata needed to align times.

    Row ``i`` holds ``(h_t, h_{t-ell}, ..., h_{t-(Q-1) ell})`` for
    ``t = (Q-1) ell + i`` (the newest sample stamps the row), flattened
    snapshot-first when the source is d-dimensional.
    """

    points: np.ndarray        # (N, d*Q)
    Q: int
    ell: int
    dt: float = 1.0
    t0: float = 0.0           # physical time of source sample 0
    source_length: int = 0

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def timestamps(self, count=None) -> np.ndarray:
        """Physical times of the first ``count`` rows (default: all)."""
        n = self.n_points if count is None else count
        return self.t0 + (self.ell * (self.Q - 1) + np.arange(n)) * self.dt


def delay_embed(series, Q: int, ell: int, dt: float = 1.0, t0: float = 0.0) -> EmbeddedSeries:
    """Build delay vectors from a scalar or d-dimensional series.

    Parameters
    ----------
    series : array or TimeSeries-like
        Shape (N~,) or (N~, d).  Objects exposing ``samples``/``dt``/``t0``
        (see module data) are unwrapped, and their sampling metadata wins.
    Q : int
        Number of delays (Q=1 keeps the series as is).
    ell : int
        Lag between delays, in sampling intervals.

    Returns
    -------
    EmbeddedSeries
        N = N~ - (Q-1) ell rows of dimension d*Q.
    """
    if hasattr(series, "samples"):
        dt = float(series.dt)
        t0 = float(series.t0)
        series = series.samples
    arr = np.asarray(series, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if Q < 1 or ell < 1:
        raise ValueError(f"need Q >= 1 and ell >= 1, got Q={Q}, ell={ell}")
    n_src, d = arr.shape
    n = n_src - (Q - 1) * ell
    if n <= 0:
        raise ValueError(
            f"series too short for embedding: length {n_src}, "
            f"need at least {(Q - 1) * ell + 1} samples for Q={Q}, ell={ell}")
    base = (Q - 1) * ell
    cols = [arr[base - q * ell: base - q * ell + n] for q in range(Q)]
    pts = np.hstack(cols)
    return EmbeddedSeries(points=pts, Q=Q, ell=ell, dt=dt, t0=t0, source_length=n_src)


def ellipse_curve(beta: float, theta) -> np.ndarray:
    """Point(s) of gamma_beta: (cos t, cos(t+beta), cos(t+2 beta))."""
    theta = np.asarray(theta, dtype=float)
    return np.stack([np.cos(theta), np.cos(theta + beta), np.cos(theta + 2.0 * beta)], axis=-1)


def ellipse_axes(beta: float):
    """Semi-axis lengths and unit directions of the embedded ellipse.

    Returns ``(lengths, directions)`` with lengths
    ``(sqrt(2 + cos 2 beta), sqrt(1 - cos 2 beta))`` along the normalized
    directions ``[sin 2 beta, 2 sin beta, sin 2 beta]`` and ``[1, 0, -1]``.
    Valid for 0 < beta <= pi/2.
    """
    if not 0.0 < beta <= math.pi / 2.0:
        raise ValueError(f"beta must lie in (0, pi/2], got {beta!r}")
    c2 = math.cos(2.0 * beta)
    lengths = (math.sqrt(2.0 + c2), math.sqrt(1.0 - c2))
    d1 = np.array([math.sin(2.0 * beta), 2.0 * math.sin(beta), math.sin(2.0 * beta)])
    d2 = np.array([1.0, 0.0, -1.0])
    directions = (d1 / np.linalg.norm(d1), d2 / np.linalg.norm(d2))
    return lengths, directions


def ellipse_area(beta: float) -> float:
    """Area enclosed by gamma_beta: pi sqrt((2 + cos 2b)(1 - cos 2b))."""
    c2 = np.cos(2.0 * np.asarray(beta, dtype=float))
    return np.pi * np.sqrt((2.0 + c2) * (1.0 - c2))


def suggest_lag(alpha_max: float) -> int:
    """Lag such that the fastest rotation advances ~pi/2 per delay.

    round((pi/2) / alpha_max) with half-integer ties rounding down, and a
    floor of 1.
    """
    if not 0.0 < alpha_max <= math.pi:
        raise ValueError(f"alpha_max must lie in (0, pi], got {alpha_max!r}")
    ratio = (math.pi / 2.0) / alpha_max
    return max(1, math.ceil(ratio - 0.5))


def write_embedded(emb: EmbeddedSeries, path) -> None:
    """Export the delay-vector matrix with a small metadata header."""
    with open(path, "w") as f:
        f.write(f"# Q={emb.Q} ell={emb.ell} dt={emb.dt:.17e} t0={emb.t0:.17e}\n")
        for row in emb.points:
            f.write(" ".join(f"{v:.17e}" for v in row) + "\n")
