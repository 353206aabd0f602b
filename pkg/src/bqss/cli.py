"""Command-line experiment runner.

    bqss run counterexample --seed 1 --output report.json
    bqss run adaptation --config adapt.toml --table costs.csv
    bqss list

The config file is flat TOML; keys may be written ``samples-per-setting`` or
``samples_per_setting``. Command-line flags override file values. Exit
status: 0 when every check passes, 1 when one fails, 2 on a configuration
error.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import _accel
from .scenarios import SCENARIOS, ExperimentConfig, ScenarioResult

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger("bqss")

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}


class ConfigError(Exception):
    pass


def load_config_file(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = {}
    for key, val in raw.items():
        name = key.replace("-", "_")
        if name not in _FIELDS:
            raise ConfigError(f"unknown config key {key!r}")
        if isinstance(val, dict):
            raise ConfigError(f"config must be flat; {key!r} is a table")
        values[name] = val
    return values


def _coerce(values: dict) -> dict:
    out = {}
    for name, val in values.items():
        kind = _FIELDS[name].type
        try:
            if val is None:
                out[name] = None
            elif "int" in kind:
                if isinstance(val, float) and not val.is_integer():
                    raise ValueError(f"expected an integer, got {val}")
                out[name] = int(val)
            elif "float" in kind:
                out[name] = float(val)
            else:
                out[name] = str(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {name}: {exc}") from exc
    return out


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    values = load_config_file(args.config) if args.config else {}
    for name in _FIELDS:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    values = _coerce(values)
    if not values.get("scenario"):
        raise ConfigError(f"no scenario given; choose from {sorted(SCENARIOS)}")
    try:
        return ExperimentConfig(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _check_writable(path: str | None) -> None:
    if path is None:
        return
    parent = Path(path).resolve().parent
    if not parent.is_dir() or not os.access(parent, os.W_OK):
        raise ConfigError(f"cannot write to {path}")


def build_report(cfg: ExperimentConfig, result: ScenarioResult, wall_clock: float) -> dict:
    return {
        "scenario": cfg.scenario,
        "config": cfg.echo(),
        "kernel_backend": _accel.BACKEND,
        "records": result.records,
        "summary": result.summary,
        "checks": [c.as_dict() for c in result.checks],
        "passed": result.passed,
        "timing": {
            "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "wall_clock_s": round(wall_clock, 6),
        },
    }


def _json_default(obj):
    try:
        import numpy as np
        if isinstance(obj, np.generic):
            return obj.item()
        if isinstance(obj, np.ndarray):
            return obj.tolist()
    except ImportError:
        pass
    raise TypeError(f"not serialisable: {type(obj)}")


def _sanitize(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    return obj


def write_report(report: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_sanitize(report), fh, indent=2, sort_keys=True, default=_json_default, allow_nan=False)
        fh.write("\n")


def write_table(rows: list, path: str) -> None:
    fieldnames = []
    for row in rows:
        for k in row:
            if k not in fieldnames:
                fieldnames.append(k)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        writer.writerows(rows)


def run(cfg: ExperimentConfig) -> tuple[dict, ScenarioResult]:
    start = time.perf_counter()
    result = SCENARIOS[cfg.scenario](cfg)
    return build_report(cfg, result, time.perf_counter() - start), result


def _print_summary(report: dict) -> None:
    print(f"scenario: {report['scenario']} (seed {report['config']['seed']}, backend {report['kernel_backend']})")
    for c in report["checks"]:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"  {status}  {c['name']}: {c['value']!r} {c['relation']} {c['threshold']!r}")
    print(f"  {'all checks passed' if report['passed'] else 'some checks FAILED'} "
          f"in {report['timing']['wall_clock_s']:.2f} s")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bqss", description="Blind quantum source separation experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="list scenarios")

    r = sub.add_parser("run", help="run one scenario")
    r.add_argument("scenario", nargs="?", help="scenario name (or set 'scenario' in the config file)")
    r.add_argument("--config", help="flat TOML config file")
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--samples-per-setting", dest="samples_per_setting", type=int)
    r.add_argument("--sampled-trials", dest="sampled_trials", type=int)
    r.add_argument("--time-points", dest="time_points", type=int)
    r.add_argument("--j-z", dest="j_z", type=float)
    r.add_argument("--j-xy", dest="j_xy", type=float)
    r.add_argument("--dt", type=float)
    r.add_argument("--theta-law", dest="theta_law", help="sphere | uniform | point:V | range:LO:HI")
    r.add_argument("--phi-law", dest="phi_law", help="uniform | point:V | range:LO:HI")
    r.add_argument("--restarts", type=int)
    r.add_argument("--batch-size", dest="batch_size", type=int)
    r.add_argument("--max-iterations", dest="max_iterations", type=int)
    r.add_argument("--target", type=float)
    r.add_argument("--cost", choices=["amplitude", "probability", "probability-sampled"])
    r.add_argument("--output", help="write the JSON report here")
    r.add_argument("--table", help="write the per-trial CSV table here")
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        for name in SCENARIOS:
            print(name)
        return EXIT_OK

    try:
        cfg = build_config(args)
        _check_writable(cfg.output)
        _check_writable(cfg.table)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    report, result = run(cfg)
    try:
        if cfg.output:
            write_report(report, cfg.output)
        if cfg.table:
            write_table(result.table, cfg.table)
    except OSError as exc:
        print(f"configuration error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _print_summary(report)
    return EXIT_OK if report["passed"] else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
