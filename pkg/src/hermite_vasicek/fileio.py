"""Delimited file formats and the run manifest.

All delimited output is comma-separated text with one header line.  Floats
are written with 17 significant digits, so writing and re-reading a file
reproduces every value exactly.
"""
from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass, asdict
from datetime import datetime, timedelta, timezone
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as _dist_version
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, FormatError
from .harness import ESTIMATOR_COLUMNS, GT_COLUMNS, MCConfig, MCResult
from .hermite import HermiteSpec
from .paths import GridSpec, SamplePath
from .vasicek import VasicekParams

PATH_HEADER = ("t", "value")
RATE_POINT_HEADER = ("logT", "log_sd_a", "log_sd_b")
OUTPUT_DIR_ENV = "HERMITE_VASICEK_OUTDIR"
MANIFEST_VERSION = 1
_INT_COLUMNS = {"replication", "seed", "excluded", "count"}


def default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def write_path_csv(path: SamplePath, dest: str | Path) -> None:
    with open(dest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PATH_HEADER)
        for t, v in zip(path.grid.times, path.values):
            writer.writerow((_fmt(t), _fmt(v)))


def _parse_float(text: str, row: int, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise FormatError(
            f"row {row}: column '{column}' is not a number: {text!r}") from None


def read_path_csv(src: str | Path) -> SamplePath:
    """Read a path written by write_path_csv.

    The time column must start at 0 and advance on a uniform ascending
    grid; the first row breaking that rule is named in the error.
    """
    with open(src, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError(f"{src}: empty file") from None
        if tuple(header) != PATH_HEADER:
            raise FormatError(
                f"expected header {','.join(PATH_HEADER)!r}, got "
                f"{','.join(header)!r}")
        times, values = [], []
        for i, rec in enumerate(reader, start=1):
            if len(rec) != 2:
                raise FormatError(
                    f"row {i}: expected 2 columns, got {len(rec)}")
            times.append(_parse_float(rec[0], i, "t"))
            values.append(_parse_float(rec[1], i, "value"))
    if len(times) < 2:
        raise FormatError(f"{src}: need at least 2 rows, got {len(times)}")
    if times[0] != 0.0:
        raise FormatError(f"row 1: time grid must start at 0, got {times[0]}")
    t = np.asarray(times)
    n = len(t) - 1
    dt = t[-1] / n
    if not dt > 0:
        raise FormatError(f"row {len(times)}: grid is not ascending")
    tol = 1.0e-9 * max(1.0, t[-1])
    off = np.abs(t - dt * np.arange(n + 1))
    bad = np.nonzero(off > tol)[0]
    if bad.size:
        k = int(bad[0])
        raise FormatError(
            f"row {k + 1}: time {t[k]!r} breaks the uniform grid "
            f"(expected {dt * k!r})")
    vals = np.asarray(values)
    if not np.all(np.isfinite(vals)):
        k = int(np.nonzero(~np.isfinite(vals))[0][0])
        raise FormatError(f"row {k + 1}: value is not finite")
    return SamplePath(grid=GridSpec(horizon=float(t[-1]), n=n), values=vals)


def write_raw_csv(result: MCResult, dest: str | Path) -> None:
    with open(dest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(result.columns)
        for row in result.rows:
            writer.writerow(
                str(v) if c in _INT_COLUMNS else _fmt(v)
                for c, v in zip(result.columns, row))


def read_raw_csv(src: str | Path) -> tuple[tuple[str, ...], list[tuple]]:
    with open(src, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise FormatError(f"{src}: empty file") from None
        if header not in (ESTIMATOR_COLUMNS, GT_COLUMNS):
            raise FormatError(f"unrecognized raw header: {','.join(header)}")
        rows = []
        for i, rec in enumerate(reader, start=1):
            if len(rec) != len(header):
                raise FormatError(
                    f"row {i}: expected {len(header)} columns, got {len(rec)}")
            rows.append(tuple(
                int(v) if c in _INT_COLUMNS else _parse_float(v, i, c)
                for c, v in zip(header, rec)))
    return header, rows


def write_summary_csv(result: MCResult, dest: str | Path) -> None:
    stats = result.horizon_stats
    if not stats:
        raise ConfigurationError("result has no horizon statistics")
    fields = list(stats[0].__dataclass_fields__)
    with open(dest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for s in stats:
            writer.writerow(
                str(getattr(s, f)) if f in _INT_COLUMNS
                else _fmt(getattr(s, f)) for f in fields)


def write_rate_points_csv(result: MCResult, dest: str | Path) -> None:
    """Log-log spread points behind the rate fits (natural logs)."""
    if result.config.experiment not in ("rate", "distribution"):
        raise ConfigurationError(
            f"rate points need estimator spreads, got "
            f"'{result.config.experiment}'")
    with open(dest, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RATE_POINT_HEADER)
        for s in result.horizon_stats:
            writer.writerow((_fmt(math.log(s.horizon)),
                             _fmt(math.log(s.sd_a)),
                             _fmt(math.log(s.sd_b))))


def config_to_mapping(config: MCConfig) -> dict[str, str]:
    return {
        "q": str(config.spec.q),
        "hurst": _fmt(config.spec.hurst),
        "a": _fmt(config.params.a),
        "b": _fmt(config.params.b),
        "horizons": ",".join(_fmt(t) for t in config.horizons),
        "dt": _fmt(config.dt),
        "replications": str(config.replications),
        "master_seed": str(config.master_seed),
        "experiment": config.experiment,
    }


_CONFIG_KEYS = ("q", "hurst", "a", "b", "horizons", "dt",
                "replications", "master_seed", "experiment")


def config_from_mapping(mapping: dict[str, str]) -> MCConfig:
    unknown = sorted(set(mapping) - set(_CONFIG_KEYS))
    if unknown:
        raise ConfigurationError(f"unknown configuration keys: {unknown}")
    missing = sorted(set(_CONFIG_KEYS) - set(mapping))
    if missing:
        raise ConfigurationError(f"missing configuration keys: {missing}")
    try:
        spec = HermiteSpec(q=int(mapping["q"]), hurst=float(mapping["hurst"]))
        params = VasicekParams(a=float(mapping["a"]), b=float(mapping["b"]))
        horizons = tuple(float(t) for t in str(mapping["horizons"]).split(","))
        return MCConfig(spec=spec, params=params, horizons=horizons,
                        dt=float(mapping["dt"]),
                        replications=int(mapping["replications"]),
                        master_seed=int(mapping["master_seed"]),
                        experiment=str(mapping["experiment"]))
    except ValueError as exc:
        raise ConfigurationError(f"bad configuration value: {exc}") from None


def parse_config_file(src: str | Path) -> dict[str, str]:
    """Flat key = value lines; '#' comments and blank lines are skipped."""
    mapping: dict[str, str] = {}
    with open(src) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise FormatError(
                    f"line {lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not key or not value:
                raise FormatError(
                    f"line {lineno}: expected 'key = value', got {raw.rstrip()!r}")
            if key in mapping:
                raise FormatError(f"line {lineno}: duplicate key '{key}'")
            mapping[key] = value
    return mapping


def _tool_version() -> str:
    try:
        return _dist_version("hermite-vasicek")
    except PackageNotFoundError:
        return "0+unknown"


@dataclass(frozen=True)
class RunManifest:
    version: int
    tool_version: str
    started_utc: str
    finished_utc: str
    config: dict[str, str]
    warnings: tuple[str, ...]
    outputs: tuple[str, ...]
    wall_seconds: float

    @classmethod
    def for_result(cls, result: MCResult,
                   outputs: tuple[str, ...]) -> "RunManifest":
        finished = datetime.now(timezone.utc)
        started = finished - timedelta(seconds=result.wall_seconds)
        return cls(version=MANIFEST_VERSION,
                   tool_version=_tool_version(),
                   started_utc=started.isoformat(timespec="seconds"),
                   finished_utc=finished.isoformat(timespec="seconds"),
                   config=config_to_mapping(result.config),
                   warnings=tuple(result.warnings),
                   outputs=outputs,
                   wall_seconds=result.wall_seconds)


def write_manifest(manifest: RunManifest, dest: str | Path) -> None:
    """Serialize to JSON through a sibling temp file and an atomic rename."""
    dest = Path(dest)
    payload = asdict(manifest)
    payload["warnings"] = list(manifest.warnings)
    payload["outputs"] = list(manifest.outputs)
    tmp = dest.with_suffix(dest.suffix + ".tmp")
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, dest)


def read_manifest(src: str | Path) -> RunManifest:
    with open(src) as fh:
        payload = json.load(fh)
    try:
        return RunManifest(version=int(payload["version"]),
                           tool_version=str(payload["tool_version"]),
                           started_utc=str(payload["started_utc"]),
                           finished_utc=str(payload["finished_utc"]),
                           config=dict(payload["config"]),
                           warnings=tuple(payload["warnings"]),
                           outputs=tuple(payload["outputs"]),
                           wall_seconds=float(payload["wall_seconds"]))
    except KeyError as exc:
        raise FormatError(f"manifest missing field {exc}") from None
