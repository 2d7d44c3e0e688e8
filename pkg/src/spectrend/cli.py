"""Command line pipeline driver.

Subcommands:

* ``synth``       -- generate a synthetic model trajectory (series + metadata)
* ``analyze``     -- embedding + operator + spectral analysis, writes tables
* ``reconstruct`` -- project the observation series onto chosen modes
* ``periods``     -- re-emit the mode/period table to stdout

Configuration comes from a JSON file (--config) with sections ``source``,
``preprocess``, ``embedding``, ``operator``, ``reconstruct`` and ``output``;
command line flags override config fields.  Every analysis run writes a
resolved-config sidecar next to its outputs.  Exit status: 0 on success,
2 on validation errors, 3 on numerical failures.
"""

from __future__ import annotations

import argparse
import copy
import json
import os
import sys

import numpy as np

from . import data, embed, models, operator, spectral

ENV_OUT = "SPECTREND_OUT"

_DEFAULTS = {
    "source": {"kind": "synthetic", "model": {"kind": "F"}},
    "preprocess": {},
    "embedding": {"Q": 3, "lag": 10},
    "operator": {"step": 1, "knn": 25, "modes": 12, "duplicate_tol": 0.0},
    "reconstruct": {"indices": [1]},
    "output": {"dir": None, "dump_operator": False},
}


class StageError(Exception):
    def __init__(self, stage, exc, code):
        super().__init__(f"[{stage}] {exc}")
        self.code = code


def _run_stage(stage, fn, *args, **kwargs):
    """Run one pipeline stage, tagging failures with the stage name."""
    try:
        return fn(*args, **kwargs)
    except (ValueError, OSError, KeyError, TypeError) as exc:
        raise StageError(stage, exc, 2) from exc
    except (operator.NumericalError, ArithmeticError) as exc:
        raise StageError(stage, exc, 3) from exc


def _merge(base, override):
    out = dict(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def load_config(path) -> dict:
    with open(path) as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ValueError(f"{path}: config root must be a JSON object")
    unknown = set(cfg) - set(_DEFAULTS)
    if unknown:
        raise ValueError(f"{path}: unknown config sections {sorted(unknown)}")
    return cfg


def resolve_config(args) -> dict:
    cfg = copy.deepcopy(_DEFAULTS)
    if getattr(args, "config", None):
        cfg = _merge(cfg, _run_stage("config", load_config, args.config))
    model_over = {}
    for flag, key in (("model", "kind"), ("steps", "n_steps"), ("seed", "seed"),
                      ("drift", "drift"), ("delta", "delta")):
        val = getattr(args, flag, None)
        if val is not None:
            model_over[key] = val
    if model_over:
        cfg = _merge(cfg, {"source": {"kind": "synthetic",
                                      "model": _merge(cfg["source"].get("model", {}),
                                                      model_over)}})
    emb_over = {k: v for k, v in (("Q", getattr(args, "Q", None)),
                                  ("lag", getattr(args, "lag", None))) if v is not None}
    if emb_over:
        cfg = _merge(cfg, {"embedding": emb_over})
    op_over = {k: v for k, v in (("step", getattr(args, "step", None)),
                                 ("knn", getattr(args, "knn", None)),
                                 ("modes", getattr(args, "modes", None))) if v is not None}
    if op_over:
        cfg = _merge(cfg, {"operator": op_over})
    if getattr(args, "indices", None):
        idx = [int(tok) for tok in args.indices.split(",") if tok]
        cfg = _merge(cfg, {"reconstruct": {"indices": idx}})
    out_dir = getattr(args, "out", None) or cfg["output"].get("dir") \
        or os.environ.get(ENV_OUT) or "spectrend_out"
    cfg["output"]["dir"] = out_dir
    return cfg


def _validate(cfg) -> None:
    emb = cfg["embedding"]
    op = cfg["operator"]
    for name, val in (("Q", emb["Q"]), ("lag", emb["lag"]),
                      ("knn", op["knn"]), ("modes", op["modes"])):
        if not isinstance(val, int) or val < 1:
            raise ValueError(f"{name} must be a positive integer, got {val!r}")
    if not isinstance(op["step"], int) or op["step"] < 0:
        raise ValueError(f"step must be a nonnegative integer, got {op['step']!r}")
    src = cfg["source"]
    if src.get("kind") not in ("synthetic", "scalar", "field"):
        raise ValueError(f"source kind must be synthetic|scalar|field, got {src.get('kind')!r}")
    if src["kind"] in ("scalar", "field"):
        path = src.get("path")
        if not path or not os.path.exists(path):
            raise ValueError(f"source path does not exist: {path!r}")


def _echo_config(cfg, out_dir) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "run_config.json"), "w") as f:
        json.dump(cfg, f, indent=2, sort_keys=True)
        f.write("\n")


def _load_source(cfg):
    """Returns (TimeSeries, trajectory-or-None)."""
    src = cfg["source"]
    if src["kind"] == "synthetic":
        model_cfg = dict(src.get("model", {}))
        if isinstance(model_cfg.get("drift"), list):
            model_cfg["drift"] = tuple(model_cfg["drift"])
        config = _run_stage("model-config", models.ModelConfig, **model_cfg)
        traj = _run_stage("simulate", models.simulate, config)
        return data.TimeSeries(samples=traj.observations), traj
    if src["kind"] == "scalar":
        record = _run_stage("load", data.load_scalar_record, src["path"],
                            time_col=src.get("time_col", 0),
                            value_col=src.get("value_col", 1),
                            header_rows=src.get("header_rows", 0))
        t_start = src.get("t_start", record.times[0])
        t_end = src.get("t_end", record.times[-1])
        series = _run_stage("interpolate", data.interpolate_uniform,
                            record, src.get("dt", 1.0), t_start, t_end)
        if src.get("reverse_time", False):
            series = data.reverse_time(series)
        return series, None
    series, _mask = _run_stage("load", data.load_field_stack, src["path"],
                               sentinel=src.get("sentinel"))
    return series, None


def _preprocess(cfg, series):
    anom = cfg["preprocess"].get("anomaly")
    if anom:
        series = _run_stage("anomalies", data.anomalies, series,
                            tuple(anom["window"]), int(anom["cycle"]))
    return series


def _analyze(cfg):
    series, traj = _load_source(cfg)
    series = _preprocess(cfg, series)
    emb = _run_stage("embed", embed.delay_embed, series,
                     cfg["embedding"]["Q"], cfg["embedding"]["lag"])
    opr = _run_stage("operator", operator.build_operator, emb,
                     cfg["operator"]["step"], cfg["operator"]["knn"],
                     duplicate_tol=cfg["operator"].get("duplicate_tol", 0.0))
    modes = min(cfg["operator"]["modes"], opr.n)
    dec = _run_stage("eigendecompose", operator.eigendecompose, opr, modes)
    base = (emb.Q - 1) * emb.ell
    h_rows = np.atleast_2d(series.samples.T).T[base:base + opr.n]
    target = h_rows[:, 0] if h_rows.shape[1] == 1 else h_rows
    return series, emb, opr, dec, target


def cmd_synth(args) -> int:
    cfg = resolve_config(args)
    if cfg["source"]["kind"] != "synthetic":
        raise StageError("synth", ValueError("synth requires a synthetic source"), 2)
    src = dict(cfg["source"].get("model", {}))
    if isinstance(src.get("drift"), list):
        src["drift"] = tuple(src["drift"])
    config = _run_stage("model-config", models.ModelConfig, **src)
    traj = _run_stage("simulate", models.simulate, config)
    out_dir = cfg["output"]["dir"]
    os.makedirs(out_dir, exist_ok=True)
    series_path = os.path.join(out_dir, "series.txt")
    meta_path = os.path.join(out_dir, "series.meta.json")
    models.write_trajectory(traj, series_path, meta_path)
    print(f"wrote {series_path} and {meta_path}")
    return 0


def cmd_analyze(args) -> int:
    cfg = resolve_config(args)
    _run_stage("validate", _validate, cfg)
    out_dir = cfg["output"]["dir"]
    _echo_config(cfg, out_dir)
    series, emb, opr, dec, target = _analyze(cfg)
    reports = _run_stage("classify", spectral.classify_modes, dec,
                         target if target.ndim == 1 else target[:, 0])
    operator.write_eigenvalue_table(dec, os.path.join(out_dir, "eigenvalues.txt"))
    spectral.write_mode_table(reports, os.path.join(out_dir, "periods.txt"))
    times = dec.row_times if dec.row_times is not None else np.arange(opr.n, dtype=float)
    with open(os.path.join(out_dir, "modes.txt"), "w") as f:
        f.write("# time " + " ".join(f"mode_{r.index}" for r in reports) + "\n")
        cols = np.column_stack([r.time_series for r in reports])
        for t, row in zip(times, cols):
            f.write(f"{t:.17e} " + " ".join(f"{v:.17e}" for v in row) + "\n")
    if cfg["output"].get("dump_operator"):
        operator.write_matrix(opr.P, os.path.join(out_dir, "operator.txt"))
    print(f"analyzed {len(series)} samples -> {opr.n} operator rows; "
          f"tables in {out_dir}")
    return 0


def cmd_reconstruct(args) -> int:
    cfg = resolve_config(args)
    _run_stage("validate", _validate, cfg)
    out_dir = cfg["output"]["dir"]
    _echo_config(cfg, out_dir)
    _series, _emb, _opr, dec, target = _analyze(cfg)
    wanted = tuple(cfg["reconstruct"].get("indices", [1]))
    closed = _run_stage("closure", spectral.conjugate_closure, dec, wanted)
    added = sorted(set(closed) - set(int(i) for i in wanted))
    if added:
        print(f"notice: index set extended with conjugate partner(s) {added}")
    proj = _run_stage("project", spectral.project, dec, closed, target)
    path = os.path.join(out_dir, "reconstruction.txt")
    spectral.write_projection(proj, path)
    print(f"wrote {path} (modes {','.join(str(i) for i in closed)})")
    return 0


def cmd_periods(args) -> int:
    cfg = resolve_config(args)
    _run_stage("validate", _validate, cfg)
    _echo_config(cfg, cfg["output"]["dir"])
    _series, _emb, _opr, dec, target = _analyze(cfg)
    reports = _run_stage("classify", spectral.classify_modes, dec,
                         target if target.ndim == 1 else target[:, 0])
    print("# j re_lambda im_lambda period amplitude kind")
    for r in reports:
        period = "inf" if r.period is None else f"{r.period:.6f}"
        print(f"{r.index} {r.eigenvalue.real:.6f} {r.eigenvalue.imag:.6f} "
              f"{period} {r.amplitude:.6e} {r.kind}")
    return 0


def _add_common(sp):
    sp.add_argument("--config", help="JSON run configuration")
    sp.add_argument("--model", help="synthetic model kind (M, A, F, Fprime)")
    sp.add_argument("--steps", type=int, help="synthetic run length")
    sp.add_argument("--seed", type=int, help="synthetic seed")
    sp.add_argument("--out", help=f"output directory (default ${ENV_OUT} or ./spectrend_out)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="spectrend",
        description="trend/cycle extraction via delay embedding and transfer-operator spectra")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a synthetic trajectory")
    _add_common(p_synth)
    p_synth.add_argument("--drift", help="drift preset for kinds M/A (linear|quadratic)")
    p_synth.add_argument("--delta", type=float, help="switching parameter for kinds F/Fprime")
    p_synth.set_defaults(fn=cmd_synth)

    for name, fn, description in (
            ("analyze", cmd_analyze, "run the embedding/operator/spectral pipeline"),
            ("reconstruct", cmd_reconstruct, "project the observations onto chosen modes"),
            ("periods", cmd_periods, "print the mode/period table")):
        p = sub.add_parser(name, help=description)
        _add_common(p)
        p.add_argument("--Q", type=int, help="number of delays")
        p.add_argument("--lag", type=int, help="delay lag (sampling intervals)")
        p.add_argument("--step", type=int, help="operator forward step")
        p.add_argument("--knn", type=int, help="neighbor count for bandwidths")
        p.add_argument("--modes", type=int, help="retained eigenpair count")
        if name == "reconstruct":
            p.add_argument("--indices", help="comma-separated 1-based mode indices")
        p.set_defaults(fn=fn)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except StageError as exc:
        print(f"error {exc}", file=sys.stderr)
        return exc.code
    except operator.NumericalError as exc:
        print(f"error [numeric] {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
