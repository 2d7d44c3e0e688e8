"""Physical interpretation of eigenpairs: periods, trends, projections.

Mode indices in this module are 1-based to match the usual eigenvalue
numbering (mode 1 is the constant eigenvector of a row-stochastic matrix).
A conjugate pair encodes an oscillation with period 2 pi s dt / |arg lambda|;
the first nontrivial real eigenvector is the trend mode.  Reconstruction
projects a target series onto chosen modes through the biorthogonal system,
Pi_j = v_j dual_j^dagger, applied componentwise for vector-valued targets.
"""

from __future__ import annotations

import dataclasses
import math
from typing import Optional, Sequence

import numpy as np

from .operator import SpectralDecomposition

_IM_TOL = 1e-10


@dataclasses.dataclass(frozen=True)
class ModeReport:
    index: int                    # 1-based position in the decomposition
    eigenvalue: complex
    kind: str                     # "constant" | "trend" | "oscillatory"
    period: Optional[float]       # physical units; None for real eigenvalues
    amplitude: float              # |dual^dagger observations|
    time_series: np.ndarray       # Re v_j aligned to row timestamps


@dataclasses.dataclass(frozen=True)
class Projection:
    indices: tuple                # 1-based, as requested (sorted)
    series: np.ndarray            # same shape as the target
    realness: bool                # True iff index set closed under conjugation
    row_times: Optional[np.ndarray] = None


def eigenperiod(lam: complex, s: int, dt: float = 1.0) -> float:
    """Oscillation period 2 pi s dt / |arg lambda| of a complex eigenvalue.

    Raises for (numerically) real eigenvalues, whose period is undefined;
    report writers show those with an infinity sentinel instead.  Frequencies
    above the Nyquist rate of the s-step map alias into |arg| <= pi and are
    reported as such.
    """
    arg = abs(np.angle(lam))
    if arg <= _IM_TOL:
        raise ValueError(f"eigenvalue {lam!r} is real; period undefined (infinite)")
    return 2.0 * math.pi * s * dt / arg


def _target_array(target, n: int, what: str) -> np.ndarray:
    arr = target.samples if hasattr(target, "samples") else np.asarray(target)
    arr = np.asarray(arr, dtype=float)
    if arr.shape[0] != n:
        raise ValueError(f"{what} length {arr.shape[0]} does not match eigenvector length {n}")
    return arr


def classify_modes(dec: SpectralDecomposition, observations) -> list:
    """Tag each mode and attach projection amplitudes a_j = |Y_j|.

    Y_j is the coefficient of the observation series in the biorthogonal
    expansion, computed against the raw (newest-sample aligned) series.
    Conjugate pairs are reported once, through their positive-frequency
    member.
    """
    h = _target_array(observations, dec.right_vectors.shape[0], "observations")
    if h.ndim != 1:
        raise ValueError("classify_modes expects a scalar observation series")
    Y = dec.dual_vectors.conj().T @ h
    reports = []
    for j in range(dec.n_modes):
        lam = dec.eigenvalues[j]
        partner = dec.pair_index[j]
        if partner >= 0 and lam.imag < 0:
            continue          # the positive member already reported this pair
        if j == 0:
            kind = "constant"
        elif partner < 0:
            kind = "trend"
        else:
            kind = "oscillatory"
        period = None
        if kind == "oscillatory":
            period = eigenperiod(lam, dec.s, dec.dt)
        reports.append(ModeReport(
            index=j + 1, eigenvalue=complex(lam), kind=kind, period=period,
            amplitude=float(abs(Y[j])), time_series=dec.right_vectors[:, j].real))
    return reports


def conjugate_closure(dec: SpectralDecomposition, indices) -> tuple:
    """Smallest superset of 1-based ``indices`` closed under conjugation."""
    closed = set()
    for i in indices:
        j = int(i) - 1
        if not 0 <= j < dec.n_modes:
            raise ValueError(f"mode index {i} out of range 1..{dec.n_modes}")
        closed.add(j)
        if dec.pair_index[j] >= 0:
            closed.add(int(dec.pair_index[j]))
    return tuple(sorted(k + 1 for k in closed))


def project(dec: SpectralDecomposition, indices, target) -> Projection:
    """Project a target series onto the span of the chosen modes.

    ``indices`` are 1-based mode positions.  The target may be scalar (n,)
    or d-dimensional (n, d); the projection acts componentwise.  When the
    index set is closed under conjugation the output of a real target is
    real and returned as such.
    """
    idx = sorted({int(i) for i in indices})
    for i in idx:
        if not 1 <= i <= dec.n_modes:
            raise ValueError(f"mode index {i} out of range 1..{dec.n_modes}")
    n = dec.right_vectors.shape[0]
    h = _target_array(target, n, "target")
    flat = h[:, None] if h.ndim == 1 else h
    zero = [i - 1 for i in idx]
    V = dec.right_vectors[:, zero]
    W = dec.dual_vectors[:, zero]
    out = V @ (W.conj().T @ flat)
    closed = all(dec.pair_index[j] < 0 or (dec.pair_index[j] + 1 in idx) for j in zero)
    if closed:
        out = out.real
    if h.ndim == 1:
        out = out[:, 0]
    return Projection(indices=tuple(idx), series=out, realness=bool(closed),
                      row_times=dec.row_times)


def affine_scale(mode_series, reference):
    """Least-squares affine map of a mode onto a reference series.

    Returns ``(offset, gain, scaled)`` minimizing
    ``||gain * mode + offset - reference||``.
    """
    mode = np.asarray(mode_series, dtype=float)
    ref = np.asarray(reference, dtype=float)
    if mode.shape != ref.shape or mode.ndim != 1:
        raise ValueError("mode and reference must be equal-length 1-d arrays")
    if np.ptp(mode) == 0.0:
        raise ValueError("mode series is constant; affine scaling is degenerate")
    A = np.column_stack([mode, np.ones_like(mode)])
    (gain, offset), *_ = np.linalg.lstsq(A, ref, rcond=None)
    return float(offset), float(gain), gain * mode + offset


def regime_localization(mode_series, mask) -> float:
    """Amplitude concentration of a mode on a masked region.

    RMS of |mode| inside the mask divided by RMS outside.  Returns ``inf``
    when the mode vanishes outside the mask.
    """
    mode = np.asarray(mode_series)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != mode.shape:
        raise ValueError(f"mask shape {mask.shape} does not match mode shape {mode.shape}")
    n_in = int(mask.sum())
    if n_in == 0 or n_in == mask.size:
        raise ValueError("mask must select a nonempty strict subset of the series")
    amp2 = np.abs(mode) ** 2
    inside = math.sqrt(amp2[mask].mean())
    outside = math.sqrt(amp2[~mask].mean())
    if outside == 0.0:
        return math.inf
    return inside / outside


def trend_mode(dec: SpectralDecomposition):
    """First nontrivial real mode: returns (1-based index, Re v)."""
    for j in range(1, dec.n_modes):
        if dec.pair_index[j] < 0 and abs(dec.eigenvalues[j].imag) <= _IM_TOL:
            return j + 1, dec.right_vectors[:, j].real
    raise ValueError("no nontrivial real eigenvalue among the retained modes")


def nearest_pair(dec: SpectralDecomposition, period: float):
    """1-based index of the positive-frequency pair member whose period is
    closest to ``period``; None when the decomposition has no pairs."""
    best = None
    for j in range(dec.n_modes):
        if dec.pair_index[j] >= 0 and dec.eigenvalues[j].imag > 0:
            p = eigenperiod(dec.eigenvalues[j], dec.s, dec.dt)
            score = abs(p - period)
            if best is None or score < best[0]:
                best = (score, j + 1)
    return None if best is None else best[1]


def write_mode_table(reports: Sequence, path) -> None:
    """Mode table: j, Re, Im, period (inf for real modes), amplitude, kind."""
    with open(path, "w") as f:
        f.write("# j re_lambda im_lambda period amplitude kind\n")
        for r in reports:
            period = "inf" if r.period is None else f"{r.period:.17e}"
            f.write(f"{r.index} {r.eigenvalue.real:.17e} {r.eigenvalue.imag:.17e} "
                    f"{period} {r.amplitude:.17e} {r.kind}\n")


def write_projection(proj: Projection, path) -> None:
    ser = np.atleast_2d(proj.series.T).T
    times = proj.row_times
    if times is None:
        times = np.arange(ser.shape[0], dtype=float)
    with open(path, "w") as f:
        f.write(f"# modes {','.join(str(i) for i in proj.indices)}"
                f" real={'yes' if proj.realness else 'no'}\n")
        f.write("# time value...\n")
        for t, row in zip(times, ser):
            if np.iscomplexobj(row):
                vals = " ".join(f"{v.real:.17e} {v.imag:.17e}" for v in row)
            else:
                vals = " ".join(f"{v:.17e}" for v in row)
            f.write(f"{t:.17e} {vals}\n")
