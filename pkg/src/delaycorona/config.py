"""JSON analysis configs: parsing, field-level validation, hashing."""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .errors import ConfigError, DelayCoronaError
from .hautus_checker import SystemSpec
from .lags import parse_lag, parse_rational
from .measure_algebra import DiracSumMeasure, PiecewiseConstantFunction

_SQRT = re.compile(r"^\s*sqrt\(\s*([^()]+?)\s*\)\s*$")


def parse_generator_value(raw) -> float:
    """A positive real: a number, ``"p/q"`` or ``"sqrt(p/q)"``."""
    if isinstance(raw, str):
        m = _SQRT.match(raw)
        if m:
            inner = parse_rational(m.group(1))
            if inner <= 0:
                raise ValueError(f"sqrt argument must be positive in {raw!r}")
            val = math.sqrt(inner.numerator / inner.denominator)
            return val
    val = float(parse_rational(raw))
    if not val > 0:
        raise ValueError(f"generator value must be positive, got {raw!r}")
    return val


@dataclass
class ScanConfig:
    window: tuple[float, float] | None = None
    grid: tuple[int, int] = (64, 64)
    tol: float | None = None
    refine: int = 2
    workers: int = 1


@dataclass
class AnalysisConfig:
    generators: dict[str, float] = field(default_factory=dict)
    system: SystemSpec | None = None
    corona: list[DiracSumMeasure] | None = None
    simulate: dict[str, Any] | None = None
    steer: dict[str, Any] | None = None
    scan: ScanConfig = field(default_factory=ScanConfig)
    output: dict[str, str] = field(default_factory=dict)
    config_hash: str = ""


def config_hash(raw: dict) -> str:
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def _errs(errors: list[str], path: str):
    """Context manager-free helper: run a parser and log failures under ``path``."""

    def run(fn, *args):
        try:
            return fn(*args)
        except (DelayCoronaError, ValueError, TypeError, KeyError, IndexError, ZeroDivisionError) as exc:
            errors.append(f"{path}: {exc}")
            return None

    return run


def _parse_system(sec: dict, gens: dict, errors: list[str]) -> SystemSpec | None:
    before = len(errors)
    for key in ("d", "m", "delays", "A", "B"):
        if key not in sec:
            errors.append(f"system.{key}: missing")
    if len(errors) > before:
        return None
    d, m = sec["d"], sec["m"]
    if not (isinstance(d, int) and d >= 1):
        errors.append("system.d: must be a positive integer")
    if not (isinstance(m, int) and m >= 1):
        errors.append("system.m: must be a positive integer")
    if len(errors) > before:
        return None

    delays = []
    for j, raw in enumerate(sec["delays"]):
        lag = _errs(errors, f"system.delays[{j}]")(parse_lag, raw, gens)
        delays.append(lag)
    if len(errors) == before:
        if not delays:
            errors.append("system.delays: at least one delay is required")
        elif float(delays[0]) <= 0:
            errors.append("system.delays: delays must be positive")
        else:
            for j in range(1, len(delays)):
                if not float(delays[j - 1]) < float(delays[j]):
                    errors.append(f"system.delays: must be strictly increasing (entry {j})")

    def matrix(raw, rows, cols, name):
        if not isinstance(raw, list) or len(raw) != rows:
            errors.append(f"{name}: expected {rows} rows")
            return None
        out = []
        for i, row in enumerate(raw):
            if not isinstance(row, list) or len(row) != cols:
                errors.append(f"{name}[{i}]: row length must be {cols}")
                return None
            vals = [_errs(errors, f"{name}[{i}][{c}]")(parse_rational, x) for c, x in enumerate(row)]
            out.append(tuple(vals))
        return tuple(out)

    A = sec["A"]
    if not isinstance(A, list) or len(A) != len(sec["delays"]):
        errors.append("system.A: need one matrix per delay")
        As = None
    else:
        As = tuple(matrix(a, d, d, f"system.A[{j}]") for j, a in enumerate(A))
    Bm = matrix(sec["B"], d, m, "system.B")
    if len(errors) > before:
        return None
    return _errs(errors, "system")(SystemSpec, d, m, tuple(delays), As, Bm)


def _parse_function(raw, start: Fraction, dim: int, name: str, errors: list[str]):
    if not isinstance(raw, dict) or "mesh_step" not in raw or "values" not in raw:
        errors.append(f"{name}: expected {{mesh_step, values}}")
        return None
    before = len(errors)
    vals = raw["values"]
    if not isinstance(vals, list):
        errors.append(f"{name}.values: expected a list of cells")
        return None
    cells = []
    for k, v in enumerate(vals):
        v = v if isinstance(v, list) else [v]
        if len(v) != dim:
            errors.append(f"{name}.values[{k}]: expected {dim} components")
            continue
        cells.append(tuple(_errs(errors, f"{name}.values[{k}]")(parse_rational, x) for x in v))
    rho = _errs(errors, f"{name}.mesh_step")(parse_rational, raw["mesh_step"])
    if len(errors) > before:
        return None
    return _errs(errors, name)(PiecewiseConstantFunction, rho, start, tuple(cells))


def _parse_scan(sec: dict, errors: list[str]) -> ScanConfig:
    sc = ScanConfig()
    if "window" in sec and sec["window"] is not None:
        w = sec["window"]
        if isinstance(w, list) and len(w) == 2 and all(isinstance(x, (int, float)) for x in w) and w[0] < w[1]:
            sc.window = (float(w[0]), float(w[1]))
        else:
            errors.append("scan.window: expected [lo, hi] with lo < hi")
    if "grid" in sec:
        g = sec["grid"]
        if isinstance(g, list) and len(g) == 2 and all(isinstance(x, int) and x >= 2 for x in g):
            sc.grid = (g[0], g[1])
        else:
            errors.append("scan.grid: expected [n_sigma, n_torus] integers >= 2")
    if "tol" in sec and sec["tol"] is not None:
        if isinstance(sec["tol"], (int, float)) and sec["tol"] > 0:
            sc.tol = float(sec["tol"])
        else:
            errors.append("scan.tol: must be a positive number")
    for key in ("refine", "workers"):
        if key in sec:
            v = sec[key]
            lo = 0 if key == "refine" else 1
            if isinstance(v, int) and v >= lo:
                setattr(sc, key, v)
            else:
                errors.append(f"scan.{key}: must be an integer >= {lo}")
    return sc


KNOWN = {"generators", "system", "corona", "simulate", "steer", "scan", "output"}


def validate_config(raw: Any) -> AnalysisConfig:
    """Build an :class:`AnalysisConfig`; raises :class:`ConfigError` listing every field error."""
    errors: list[str] = []
    if not isinstance(raw, dict):
        raise ConfigError(["<root>: expected a JSON object"])
    for key in raw:
        if key not in KNOWN:
            errors.append(f"{key}: unknown section")
    cfg = AnalysisConfig(config_hash=config_hash(raw))

    gens = raw.get("generators", {}) or {}
    if not isinstance(gens, dict):
        errors.append("generators: expected an object label -> value")
        gens = {}
    for label, val in gens.items():
        if not re.match(r"^[A-Za-z_]\w*$", label):
            errors.append(f"generators.{label}: invalid label")
            continue
        v = _errs(errors, f"generators.{label}")(parse_generator_value, val)
        if v is not None:
            cfg.generators[label] = v

    if ("system" in raw) == ("corona" in raw):
        errors.append("<root>: exactly one of 'system' or 'corona' must be present")

    if isinstance(raw.get("system"), dict):
        cfg.system = _parse_system(raw["system"], cfg.generators, errors)
    elif "system" in raw:
        errors.append("system: expected an object")

    if "corona" in raw:
        sec = raw["corona"]
        measures = sec.get("measures") if isinstance(sec, dict) else None
        if not isinstance(measures, list) or not measures:
            errors.append("corona.measures: expected a nonempty list of [lag, weight] pair lists")
        else:
            cfg.corona = []
            for i, pairs in enumerate(measures):
                ok = isinstance(pairs, list) and all(isinstance(p, list) and len(p) == 2 for p in pairs)
                if not ok:
                    errors.append(f"corona.measures[{i}]: expected a list of [lag, weight] pairs")
                    continue
                m = _errs(errors, f"corona.measures[{i}]")(DiracSumMeasure.from_pairs, pairs, cfg.generators)
                if m is not None:
                    cfg.corona.append(m)

    sys_ = cfg.system
    for name, keys in (("simulate", ("x0", "u")), ("steer", ("x0", "target"))):
        if name not in raw:
            continue
        sec = raw[name]
        if not isinstance(sec, dict):
            errors.append(f"{name}: expected an object")
            continue
        if sys_ is None:
            if "system" in raw:
                continue  # system errors already reported
            errors.append(f"{name}: requires a 'system' section")
            continue
        if not sys_.commensurable:
            errors.append(f"{name}: needs rational delays")
            continue
        out: dict[str, Any] = {}
        for key in keys:
            if key not in sec:
                errors.append(f"{name}.{key}: missing")
                continue
            if key == "u":
                out[key] = _parse_function(sec[key], Fraction(0), sys_.m, f"{name}.u", errors)
            else:
                out[key] = _parse_function(sec[key], -Fraction(sys_.delays[-1]), sys_.d, f"{name}.{key}", errors)
        if "horizon" in sec:
            out["horizon"] = _errs(errors, f"{name}.horizon")(parse_rational, sec["horizon"])
        setattr(cfg, name, out)

    sc = raw.get("scan", {}) or {}
    if isinstance(sc, dict):
        cfg.scan = _parse_scan(sc, errors)
    else:
        errors.append("scan: expected an object")

    outp = raw.get("output", {}) or {}
    if isinstance(outp, dict):
        for key, val in outp.items():
            if key not in ("report", "csv") or not isinstance(val, str):
                errors.append(f"output.{key}: expected 'report' or 'csv' with a path string")
            else:
                cfg.output[key] = val
    else:
        errors.append("output: expected an object")

    if errors:
        raise ConfigError(errors)
    return cfg


def parse_config(path) -> AnalysisConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror or exc}"]) from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{path}: JSON syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}"]) from None
    return validate_config(raw)
