"""Command-line front end.

Every run is described by a :class:`RunConfig`.  Values come from built-in
defaults, then an optional ``--config`` JSON file, then explicit flags.  The
full config is stored in each JSON record, and ``replay`` (or ``--replay``)
reruns a record with the same config.

Exit codes: 0 success, 1 I/O error, 2 invalid input, 3 resource limit.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
import time
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .estimators import (alpha_probe, clt_experiment, combined_z, diff2_decay_check,
                         diff_moment_check, ell_e_law_check, estimate_rst_mean,
                         estimate_rst_variance, estimate_va_ball, estimate_va_integral,
                         expectation_limit, mecke_check, rst_tail_check)
from .functionals import eval_dsf_functional, eval_rst_functional
from .geom import Window, unit_box, window_volume
from .pointprocess import ResourceError, points_to_csv, sample_poisson, sample_poisson_dilated
from .records import dumps, make_record, table_to_csv
from .spanning import build_dsf, build_rst, edges_to_csv

COMMANDS = ("simulate", "mean", "variance", "va", "clt", "checks")

EXIT_IO = 1
EXIT_INVALID = 2
EXIT_RESOURCE = 3


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    seed: Optional[int] = None
    window: Optional[dict] = None
    d: int = 2
    a: float = 1.0
    t: Optional[float] = None
    t_list: Optional[list] = None
    r: Optional[float] = None
    R_trunc: Optional[float] = None
    e: Optional[list] = None
    replicates: Optional[int] = None
    workers: int = 1
    out: Optional[str] = None
    format: str = "json"
    graph: str = "rst"
    method: str = "ball"
    margin: Optional[float] = None
    z_samples: int = 40000
    subsamples: int = 10

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def window_obj(self) -> Window:
        if self.window is None:
            return unit_box(self.d)
        return Window.from_dict({"dim": self.d, **self.window})

    def direction(self) -> np.ndarray:
        if self.e is None:
            return np.eye(self.d)[0]
        e = np.asarray(self.e, dtype=float)
        if e.size != self.d:
            raise ConfigError("direction does not match the dimension")
        return e


def validate(cfg: RunConfig) -> None:
    if cfg.command not in COMMANDS:
        raise ConfigError(f"unknown command {cfg.command!r}")
    if cfg.seed is None:
        raise ConfigError("a seed is required (--seed)")
    if int(cfg.seed) != cfg.seed or cfg.seed < 0:
        raise ConfigError("seed must be a non-negative integer")
    if int(cfg.d) != cfg.d or cfg.d < 1:
        raise ConfigError(f"invalid dimension {cfg.d}")
    if not cfg.a >= 0:
        raise ConfigError(f"invalid exponent {cfg.a}")
    for t in ([cfg.t] if cfg.t is not None else []) + list(cfg.t_list or []):
        if not (math.isfinite(t) and t > 0):
            raise ConfigError(f"invalid intensity {t}")
    if cfg.replicates is not None and cfg.replicates < 1:
        raise ConfigError("replicates must be positive")
    if cfg.workers < 1:
        raise ConfigError("workers must be positive")
    if cfg.format not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if cfg.window is not None:
        cfg.window_obj()


# ------------------------------------------------------------------- commands

def _window_params(cfg: RunConfig) -> tuple[Window, float]:
    w = cfg.window_obj()
    if w.dim != cfg.d:
        raise ConfigError("window dimension does not match --d")
    if cfg.t is None:
        raise ConfigError("--t is required")
    return w, cfg.t


def cmd_simulate(cfg: RunConfig):
    w, t = _window_params(cfg)
    if cfg.graph == "rst":
        sample = sample_poisson(w, t, cfg.seed)
        graph = build_rst(sample)
        value = eval_rst_functional(graph, cfg.a).value
    elif cfg.graph == "dsf":
        sample = sample_poisson_dilated(w, t, cfg.margin, cfg.seed)
        graph = build_dsf(sample, cfg.direction())
        value = eval_dsf_functional(graph, w, cfg.a).value
    else:
        raise ConfigError(f"unknown graph {cfg.graph!r}")
    files = {"points.csv": points_to_csv(sample), "edges.csv": edges_to_csv(graph)}
    values = {"functional": value, "points": len(sample)}
    meta = {"dilation_margin": sample.dilation_margin,
            "duplicate_rejections": sample.duplicate_rejections}
    return values, {}, 1, meta, files


def cmd_mean(cfg: RunConfig):
    w, t = _window_params(cfg)
    reps = cfg.replicates or 400
    s = estimate_rst_mean(w, t, cfg.a, reps, cfg.seed, cfg.workers)
    limit = expectation_limit(cfg.a, w.dim, window_volume(w))
    values = {"mean": s.mean, "variance": s.variance, "limit": limit}
    errors = {"mean": s.std_error_mean, "variance": s.std_error_variance}
    rows = [(t, s.mean, s.std_error_mean, limit, reps)]
    return values, errors, reps, {"scaling": "t^(a/d-1) L"}, \
        {"mean.csv": table_to_csv(("t", "scaled_mean", "std_error", "limit", "replicates"), rows)}


def cmd_variance(cfg: RunConfig):
    w, t = _window_params(cfg)
    reps = cfg.replicates or 400
    s = estimate_rst_variance(w, t, cfg.a, reps, cfg.seed, cfg.workers)
    values = {"scaled_variance": s.variance, "scaled_mean": s.mean}
    errors = {"scaled_variance": s.std_error_variance, "scaled_mean": s.std_error_mean}
    rows = [(t, s.variance, s.std_error_variance, reps)]
    return values, errors, reps, {"scaling": "t^(2a/d-1) V[L]"}, \
        {"variance.csv": table_to_csv(("t", "scaled_variance", "std_error", "replicates"), rows)}


def cmd_va(cfg: RunConfig):
    e = cfg.direction()
    if cfg.method == "ball":
        if cfg.r is None:
            raise ConfigError("--r is required for the ball method")
        reps = cfg.replicates or 1000
        est = estimate_va_ball(cfg.r, cfg.a, cfg.d, e, reps, cfg.seed, cfg.margin, cfg.workers)
    elif cfg.method == "integral":
        reps = cfg.replicates or 1
        est = estimate_va_integral(cfg.R_trunc, cfg.a, cfg.d, e, cfg.z_samples, reps,
                                   cfg.seed, cfg.margin, workers=cfg.workers)
    else:
        raise ConfigError(f"unknown method {cfg.method!r}")
    values = {"v_a": est.value, "radius": est.radius, "ci_excludes_zero": est.ci_excludes_zero}
    rows = [(est.method, est.a, est.d, est.value, est.std_error, est.radius, est.replicates)]
    meta = dict(est.metadata, method=est.method)
    return values, {"v_a": est.std_error}, reps, meta, \
        {"va.csv": table_to_csv(("method", "a", "d", "value", "std_error", "radius",
                                 "replicates"), rows)}


def cmd_clt(cfg: RunConfig):
    w = cfg.window_obj()
    if not cfg.t_list:
        raise ConfigError("--t must list the intensities, e.g. --t 64,256,1024")
    reps = cfg.replicates or 2000
    res = clt_experiment(w, cfg.a, cfg.t_list, reps, cfg.seed, cfg.subsamples, cfg.workers)
    values = {"slope": res.slope, "rows": res.rows}
    return values, {}, reps, res.metadata, {"clt.csv": table_to_csv(res.header, res.table())}


def cmd_checks(cfg: RunConfig):
    w = cfg.window_obj()
    t = cfg.t or 250.0
    reps = cfg.replicates or 200
    report = {}
    params = alpha_probe(w, seed=cfg.seed)
    report["alpha_probe"] = {"alpha_W": params.alpha_W, "min_ratio": params.min_ratio,
                             "argmin": params.argmin, "certified": False}
    lhs, rhs = mecke_check(w, t, cfg.a, max(reps, 30), cfg.seed, workers=cfg.workers)
    report["mecke"] = {"lhs": lhs, "rhs": rhs, "z": combined_z(lhs, rhs)}
    lo, hi = w.bounds
    x = lo + 0.75 * (hi - lo)
    spacing = t ** (-1.0 / w.dim)
    report["rst_tail"] = rst_tail_check(w, t, x, [0.5 * spacing, spacing, 2 * spacing],
                                        reps, cfg.seed, params, cfg.workers)
    law = ell_e_law_check(w.dim, max(reps, 1000), cfg.seed, cfg.direction(), cfg.margin,
                          cfg.workers)
    report["ell_e_law"] = {k: v for k, v in law.items() if k != "samples"}
    z = lo + 0.7 * (hi - lo)
    z2 = z.copy()
    z2[0] -= spacing
    report["diff_moments"] = diff_moment_check(w, [t, 4 * t], cfg.a, [z], [[z, z2]],
                                               reps, cfg.seed, cfg.workers)
    seps = [spacing * k for k in (0.5, 1, 2, 3)]
    report["diff2_decay"] = diff2_decay_check(w, t, cfg.a, seps, reps, cfg.seed,
                                              params.alpha_W, z, cfg.workers)
    rows = [(r["separation"], r["frequency"], r["std_error"], r["bound"])
            for r in report["diff2_decay"]["rows"]]
    return report, {}, reps, {"t": t}, \
        {"diff2_decay.csv": table_to_csv(("separation", "frequency", "std_error", "bound"), rows)}


HANDLERS = {"simulate": cmd_simulate, "mean": cmd_mean, "variance": cmd_variance,
            "va": cmd_va, "clt": cmd_clt, "checks": cmd_checks}


def execute(cfg: RunConfig) -> tuple[dict, dict]:
    """Run a config; returns the JSON record and the extra files to write."""
    validate(cfg)
    start = time.perf_counter()
    values, errors, reps, meta, files = HANDLERS[cfg.command](cfg)
    runtime = (time.perf_counter() - start) * 1000.0
    record = make_record(cfg.command, cfg.to_dict(), cfg.seed, values, errors, reps,
                         runtime, meta)
    return record, files


def write_outputs(cfg: RunConfig, record: dict, files: dict, stdout=None) -> None:
    stdout = stdout or sys.stdout
    if cfg.out is None:
        if cfg.command == "simulate":
            raise ConfigError("simulate needs --out")
        if cfg.format == "csv" and files:
            stdout.write(next(iter(files.values())))
        else:
            stdout.write(dumps(record))
        return
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    if cfg.command == "simulate" or cfg.format == "csv":
        for name, text in files.items():
            (out / name).write_text(text)
    (out / "record.json").write_text(dumps(record))


# -------------------------------------------------------------------- parsing

_NUMERIC_LIST = re.compile(r"^-[0-9.]")


def _join_negative_values(argv: list[str]) -> list[str]:
    """``--lo -0.5,-0.5`` -> ``--lo=-0.5,-0.5`` so values are not mistaken for flags."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if (tok.startswith("--") and "=" not in tok and i + 1 < len(argv)
                and _NUMERIC_LIST.match(argv[i + 1])):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="master seed (required)")
    p.add_argument("--workers", type=int, help="worker processes (never changes the numbers)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--config", help="JSON file with config values; flags override it")
    p.add_argument("--replay", help="rerun the config stored in a record.json")
    p.add_argument("--d", type=int)
    p.add_argument("--a", type=float)
    p.add_argument("--window", choices=("box", "ball"))
    p.add_argument("--lo", type=_floats, help="box lower corner, comma separated")
    p.add_argument("--hi", type=_floats, help="box upper corner, comma separated")
    p.add_argument("--radius", type=float, help="ball window radius")
    p.add_argument("--e", type=_floats, help="direction for directed forests")
    p.add_argument("--replicates", type=int)
    p.add_argument("--margin", type=float, help="dilation margin for directed forests")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rstclt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "simulate": "one realization: points.csv, edges.csv and record.json",
        "mean": "scaled mean of the radial-tree functional",
        "variance": "scaled variance of the radial-tree functional",
        "va": "limiting variance constant (ball or covariance-integral method)",
        "clt": "Kolmogorov distance to the normal law along intensities",
        "checks": "Mecke, tail, alpha and difference-operator checks",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text, argument_default=argparse.SUPPRESS)
        _common(p)
        if name == "clt":
            p.add_argument("--t", type=_floats, dest="t_list", help="increasing intensities")
            p.add_argument("--subsamples", type=int)
        else:
            p.add_argument("--t", type=float, help="intensity")
        if name == "simulate":
            p.add_argument("--graph", choices=("rst", "dsf"))
        if name == "va":
            p.add_argument("--method", choices=("ball", "integral"))
            p.add_argument("--r", type=float, help="ball radius (ball method)")
            p.add_argument("--R-trunc", dest="R_trunc", type=float,
                           help="truncation radius (integral method; default probes it)")
            p.add_argument("--z-samples", dest="z_samples", type=int)
    rp = sub.add_parser("replay", help="rerun a stored record")
    rp.add_argument("record")
    rp.add_argument("--out")
    rp.add_argument("--workers", type=int)
    return parser


def _window_from_args(ns: dict, base: Optional[dict]) -> Optional[dict]:
    kind = ns.pop("window", None)
    lo, hi, radius = ns.pop("lo", None), ns.pop("hi", None), ns.pop("radius", None)
    if kind is None and lo is None and hi is None and radius is None:
        return base
    win = dict(base or {})
    if kind is None:
        kind = "ball" if radius is not None else win.get("kind", "box")
    win["kind"] = kind
    if kind == "box":
        win.pop("radius", None)
        if lo is not None:
            win["lower"] = lo
        if hi is not None:
            win["upper"] = hi
        if "lower" not in win or "upper" not in win:
            raise ConfigError("box window needs --lo and --hi")
    else:
        win.pop("lower", None)
        win.pop("upper", None)
        if radius is not None:
            win["radius"] = radius
        if "radius" not in win:
            raise ConfigError("ball window needs --radius")
    return win


def _load_record_config(path: str) -> dict:
    record = json.loads(Path(path).read_text())
    if "params" not in record:
        raise ConfigError(f"{path} is not an experiment record")
    return dict(record["params"])


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    args = dict(vars(ns))
    command = args.pop("command")
    if command == "replay":
        base = _load_record_config(args["record"])
        for key in ("out", "workers"):
            if args.get(key) is not None:
                base[key] = args[key]
        return RunConfig.from_dict(base)
    base = {"command": command}
    if "replay" in args:
        base.update(_load_record_config(args.pop("replay")))
        base["command"] = base.get("command", command)
    if "config" in args:
        loaded = json.loads(Path(args.pop("config")).read_text())
        loaded.pop("command", None)
        base.update(loaded)
    base["window"] = _window_from_args(args, base.get("window"))
    base.update(args)
    if "window" in base and base["window"] is not None:
        base["window"].pop("dim", None)
        if "lower" in base["window"] and "d" not in args and "d" not in base:
            base["d"] = len(base["window"]["lower"])
    return RunConfig.from_dict(base)


def main(argv: Optional[list] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        ns = parser.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        record, files = execute(cfg)
        write_outputs(cfg, record, files)
    except ResourceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except MemoryError:
        print("error: out of memory", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
