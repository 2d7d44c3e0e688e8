"""Ingestion of real-world records: scalar stacks and gridded field stacks.

Scalar records (e.g. a benthic isotope stack) arrive as delimited text with
a time column in age-before-present units, get linearly interpolated onto a
uniform grid, and are flipped to run forward in physical time so that the
operator's forward step means forward.  Field stacks are flattened snapshot
matrices with a missing-value sentinel; gridpoints missing anywhere are
dropped and a mask remembers how to scatter reconstructions back onto the
grid.
"""

from __future__ import annotations

import dataclasses
import importlib.resources
import warnings
from typing import Optional

import numpy as np


@dataclasses.dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled series; samples is (N,) scalar or (N, d)."""

    samples: np.ndarray
    dt: float = 1.0
    t0: float = 0.0
    time_unit: str = ""
    value_unit: str = ""

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")

    def __len__(self):
        return self.samples.shape[0]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self))


@dataclasses.dataclass(frozen=True)
class NonuniformRecord:
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise ValueError("times and values must be equal-length 1-d arrays")
        if len(t) and np.any(np.diff(t) <= 0):
            raise ValueError("record times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)


@dataclasses.dataclass(frozen=True)
class FieldMask:
    """Which flattened gridpoints survived sentinel dropping."""

    shape: tuple                 # (ny, nx) of one snapshot
    kept: np.ndarray             # flat indices into the full grid

    @property
    def n_kept(self) -> int:
        return len(self.kept)


def load_scalar_record(path, time_col: int = 0, value_col: int = 1,
                       header_rows: int = 0, comment: str = "#") -> NonuniformRecord:
    """Parse a delimited text record into (times, values).

    Any columns beyond the requested two (such as per-sample uncertainty)
    are ignored.  Times are sorted ascending if needed (with a warning);
    duplicate times are an error.
    """
    times, values = [], []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            text = line.strip()
            if not text or (comment and text.startswith(comment)):
                continue
            if header_rows > 0:
                header_rows -= 1
                continue
            parts = text.split()
            try:
                times.append(float(parts[time_col]))
                values.append(float(parts[value_col]))
            except (ValueError, IndexError) as exc:
                raise ValueError(f"{path}: parse error at line {lineno}: {text!r}") from exc
    t = np.asarray(times)
    v = np.asarray(values)
    if len(t) == 0:
        raise ValueError(f"{path}: no data rows found")
    if np.any(np.diff(t) < 0):
        warnings.warn(f"{path}: times not ascending; sorting", stacklevel=2)
        order = np.argsort(t, kind="stable")
        t, v = t[order], v[order]
    if np.any(np.diff(t) == 0):
        dup = t[np.flatnonzero(np.diff(t) == 0)[0]]
        raise ValueError(f"{path}: duplicate time {dup!r} after sorting")
    return NonuniformRecord(times=t, values=v)


def interpolate_uniform(record: NonuniformRecord, dt: float,
                        t_start: float, t_end: float, **units) -> TimeSeries:
    """Linear interpolation onto t_start, t_start+dt, ..., t_end."""
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    if t_start < record.times[0] or t_end > record.times[-1]:
        raise ValueError(
            f"requested [{t_start}, {t_end}] exceeds record support "
            f"[{record.times[0]}, {record.times[-1]}]; extrapolation not supported")
    n_span = (t_end - t_start) / dt
    count = int(round(n_span))
    if not np.isclose(n_span, count, rtol=0.0, atol=1e-9):
        count = int(np.floor(n_span))
    grid = t_start + dt * np.arange(count + 1)
    vals = np.interp(grid, record.times, record.values)
    return TimeSeries(samples=vals, dt=dt, t0=t_start, **units)


def reverse_time(series: TimeSeries) -> TimeSeries:
    """Flip an age-axis series to run forward in physical time.

    A record indexed by age-before-present becomes one indexed by time
    t = -age, so its last sample (the present) comes last.
    """
    t_end = series.t0 + series.dt * (len(series) - 1)
    return TimeSeries(samples=series.samples[::-1].copy(), dt=series.dt,
                      t0=-t_end, time_unit=series.time_unit,
                      value_unit=series.value_unit)


def benthic_fixture_path():
    """Path of the bundled synthetic benthic-stack record."""
    return importlib.resources.files("spectrend").joinpath("datasets/benthic_stack.txt")


def load_benthic_fixture() -> TimeSeries:
    """Bundled stack, interpolated to 1 kyr over [0, 3000] and time-flipped.

    The result runs forward in time (sample 0 is 3000 kyr ago) with
    3001 samples; suitable directly for embedding.
    """
    record = load_scalar_record(benthic_fixture_path())
    series = interpolate_uniform(record, 1.0, 0.0, 3000.0,
                                 time_unit="kyr", value_unit="permil")
    return reverse_time(series)


def load_field_stack(path, sentinel: Optional[float] = None):
    """Read a snapshot-stack file into (TimeSeries, FieldMask).

    Format: one header line ``ny nx sentinel`` followed by the snapshots,
    each as ny rows of nx values, row major.  Gridpoints equal to the
    sentinel at any time are dropped from every snapshot; the mask records
    the kept flat indices.  Pass ``sentinel`` to override the header value.
    """
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 3:
            raise ValueError(f"{path}: header must be 'ny nx sentinel', got {header!r}")
        ny, nx = int(header[0]), int(header[1])
        file_sentinel = float(header[2])
        raw = np.loadtxt(f, ndmin=2)
    if sentinel is None:
        sentinel = file_sentinel
    if raw.size % (ny * nx) != 0 or raw.shape[1] != nx:
        raise ValueError(
            f"{path}: grid mismatch; expected row-major {ny}x{nx} snapshots, "
            f"got {raw.shape[0]} rows of {raw.shape[1]}")
    n_t = raw.shape[0] // ny
    stack = raw.reshape(n_t, ny * nx)
    missing = np.any(stack == sentinel, axis=0)
    kept = np.flatnonzero(~missing)
    mask = FieldMask(shape=(ny, nx), kept=kept)
    return TimeSeries(samples=stack[:, kept]), mask


def scatter_back(values, mask: FieldMask, fill: float = np.nan) -> np.ndarray:
    """Place kept-gridpoint values back on the full grid.

    ``values`` is (n_kept,) for one snapshot or (T, n_kept) for a stack;
    dropped cells receive ``fill``.
    """
    vals = np.asarray(values)
    if vals.shape[-1] != mask.n_kept:
        raise ValueError(f"expected last axis {mask.n_kept}, got {vals.shape[-1]}")
    ny, nx = mask.shape
    if vals.ndim == 1:
        full = np.full(ny * nx, fill, dtype=float)
        full[mask.kept] = vals
        return full.reshape(ny, nx)
    full = np.full((vals.shape[0], ny * nx), fill, dtype=float)
    full[:, mask.kept] = vals
    return full.reshape(vals.shape[0], ny, nx)


def anomalies(series: TimeSeries, window: tuple, cycle: int) -> TimeSeries:
    """Subtract the per-phase mean computed over a reference window.

    ``window`` is a half-open (start, stop) sample-index range defining the
    climatology; ``cycle`` is the phase count (12 for monthly data).  The
    phase of sample j is j mod cycle.  Every sample of the series gets its
    phase mean subtracted, so a second pass with the window means recomputed
    on the output changes nothing.
    """
    lo, hi = int(window[0]), int(window[1])
    n = len(series)
    if not (0 <= lo < hi <= n):
        raise ValueError(f"window {window!r} outside series of length {n}")
    if cycle < 1:
        raise ValueError(f"cycle must be >= 1, got {cycle}")
    if hi - lo < cycle:
        raise ValueError(f"window shorter than one cycle ({hi - lo} < {cycle})")
    samples = series.samples
    phases = np.arange(n) % cycle
    out = np.array(samples, dtype=float, copy=True)
    for p in range(cycle):
        in_window = np.flatnonzero((phases == p) & (np.arange(n) >= lo) & (np.arange(n) < hi))
        if in_window.size == 0:
            raise ValueError(f"window contains no samples of phase {p}")
        out[phases == p] -= samples[in_window].mean(axis=0)
    return TimeSeries(samples=out, dt=series.dt, t0=series.t0,
                      time_unit=series.time_unit, value_unit=series.value_unit)


def write_timeseries(series: TimeSeries, path) -> None:
    """Uniform series as delimited text with a metadata header."""
    ser = np.atleast_2d(series.samples.T).T
    with open(path, "w") as f:
        f.write(f"# dt={series.dt:.17e} t0={series.t0:.17e}"
                f" time_unit={series.time_unit or '-'} value_unit={series.value_unit or '-'}\n")
        for t, row in zip(series.times, ser):
            f.write(f"{t:.17e} " + " ".join(f"{v:.17e}" for v in row) + "\n")
