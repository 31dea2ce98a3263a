"""Run configuration: flat ``section.key = value`` text with ``#`` comments.

Example::

    run.mode = converge
    params.mu = 1
    params.mu_eff = 1
    params.K = 1
    params.k = 1
    params.b = 1
    geometry.nx = 32
    geometry.ny = 32
    geometry.nz = 16
    geometry.gap = constant(1)
    forcing.spec = sinusoidal(1, 0, 0, 1)
    study.eps = 1/4, 1/8, 1/16

Numbers accept Python float syntax and simple fractions ``p/q``.  Every
problem found is reported with its line number; parsing never stops at the
first error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .core import (ConstantForcing, ConstantGap, ForcingSpec, GapSpec, GradientForcing, Grid2D, ParabolicGap,
                   ParameterError, PhysicalParams, SinusoidalForcing, SinusoidalGap, ZeroForcing,
                   make_gap_field)

MODES = ("reduced", "dilated", "converge")


class ConfigError(ValueError):
    """All problems found in a configuration, each tagged with a line number (0 = whole file)."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("\n".join(f"line {ln}: {msg}" if ln else msg for ln, msg in self.issues))


@dataclass(frozen=True)
class RunConfig:
    mode: str
    params: PhysicalParams
    gap: GapSpec
    forcing: ForcingSpec
    nx: int
    ny: int
    nz: int = 16
    lx: float = 1.0
    ly: float = 1.0
    eps_list: tuple = ()
    epsilon: float | None = None
    tol: float = 1e-10
    maxit: int | None = None
    uzawa_tol: float = 1e-8
    uzawa_maxit: int = 500
    inner_tol: float = 1e-12
    heat_tol: float = 1e-12
    output_dir: str = "out"
    text: str = field(default="", repr=False)


def _number(s):
    s = s.strip()
    try:
        if "/" in s:
            return float(Fraction(s.replace(" ", "")))
        return float(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a number: {s!r}") from None


def _integer(s):
    v = _number(s)
    if not v.is_integer():
        raise ValueError(f"not an integer: {s.strip()!r}")
    return int(v)


def _number_list(s):
    s = s.strip()
    if s[:1] in "{[(" and s[-1:] in "}])":
        s = s[1:-1]
    parts = [p for p in re.split(r"[,\s]+", s) if p]
    if not parts:
        raise ValueError("empty list")
    return tuple(_number(p) for p in parts)


_CALL = re.compile(r"^\s*([A-Za-z_]\w*)\s*(?:\((.*)\))?\s*$")


def _call(s):
    m = _CALL.match(s)
    if not m:
        raise ValueError(f"malformed spec {s.strip()!r}")
    name, args = m.group(1).lower(), m.group(2)
    values = () if args is None or not args.strip() else tuple(_number(a) for a in args.split(","))
    return name, values


_GAPS = {"constant": (ConstantGap, 1, 1), "parabolic": (ParabolicGap, 2, 2),
         "sinusoidal": (SinusoidalGap, 2, 4)}
_FORCINGS = {"zero": (ZeroForcing, 0, 0), "constant": (ConstantForcing, 2, 2),
             "sinusoidal": (SinusoidalForcing, 4, 4), "gradient": (GradientForcing, 2, 5)}


def _spec(table, what):
    def parse(s):
        name, args = _call(s)
        if name not in table:
            raise ValueError(f"unknown {what} spec {name!r} (expected one of {', '.join(table)})")
        cls, lo, hi = table[name]
        if not lo <= len(args) <= hi:
            want = str(lo) if lo == hi else f"{lo}-{hi}"
            raise ValueError(f"{what} spec {name} takes {want} arguments, got {len(args)}")
        return cls(*args)
    return parse


def _mode(s):
    s = s.strip().lower()
    if s not in MODES:
        raise ValueError(f"mode must be one of {', '.join(MODES)}, got {s!r}")
    return s


_KEYS = {
    "run.mode": _mode,
    "run.output_dir": str.strip,
    "params.mu": _number,
    "params.mu_eff": _number,
    "params.K": _number,
    "params.k": _number,
    "params.b": _number,
    "geometry.lx": _number,
    "geometry.ly": _number,
    "geometry.nx": _integer,
    "geometry.ny": _integer,
    "geometry.nz": _integer,
    "geometry.gap": _spec(_GAPS, "gap"),
    "forcing.spec": _spec(_FORCINGS, "forcing"),
    "study.eps": _number_list,
    "dilated.epsilon": _number,
    "solver.tol": _number,
    "solver.maxit": _integer,
    "solver.uzawa_tol": _number,
    "solver.uzawa_maxit": _integer,
    "solver.inner_tol": _number,
    "solver.heat_tol": _number,
}
_REQUIRED = ("params.mu", "params.mu_eff", "params.K", "params.k",
             "geometry.nx", "geometry.ny", "geometry.gap")


def parse_config(text: str, mode: str | None = None) -> RunConfig:
    """Validate ``text`` into a :class:`RunConfig`; ``mode`` overrides ``run.mode``.

    Raises :class:`ConfigError` listing every problem found.
    """
    issues = []
    raw, where = {}, {}
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            issues.append((ln, f"expected 'section.key = value', got {line!r}"))
            continue
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _KEYS:
            issues.append((ln, f"unknown key {key!r}"))
            continue
        if key in raw:
            issues.append((ln, f"duplicate key {key!r} (first set on line {where[key]})"))
            continue
        if not value:
            issues.append((ln, f"{key}: empty value"))
            continue
        try:
            raw[key] = _KEYS[key](value)
            where[key] = ln
        except ValueError as exc:
            issues.append((ln, f"{key}: {exc}"))
            where[key] = ln
            raw[key] = None

    def line_of(key):
        return where.get(key, 0)

    def check(key, ok, msg):
        if key in raw and raw[key] is not None and not ok(raw[key]):
            issues.append((line_of(key), f"{key} = {raw[key]!r}: {msg}"))
            raw[key] = None

    if mode is not None:
        try:
            raw["run.mode"] = _mode(mode)
        except ValueError as exc:
            issues.append((0, f"--mode: {exc}"))
    for key in ("run.mode",) + _REQUIRED:
        if key not in raw:
            issues.append((0, f"missing required key {key!r}"))

    for key in ("params.mu", "params.mu_eff", "params.K", "params.k", "geometry.lx", "geometry.ly",
                "solver.tol", "solver.uzawa_tol", "solver.inner_tol", "solver.heat_tol"):
        check(key, lambda v: math.isfinite(v) and v > 0, "must be finite and > 0")
    check("params.b", math.isfinite, "must be finite")
    check("geometry.nx", lambda v: v >= 2, "must be >= 2")
    check("geometry.ny", lambda v: v >= 2, "must be >= 2")
    check("geometry.nz", lambda v: v >= 2, "must be >= 2")
    check("solver.maxit", lambda v: v >= 1, "must be >= 1")
    check("solver.uzawa_maxit", lambda v: v >= 1, "must be >= 1")
    check("dilated.epsilon", lambda v: 0 < v <= 1, "must lie in (0, 1]")
    check("study.eps", lambda v: all(0 < e <= 1 for e in v), "every value must lie in (0, 1]")
    check("study.eps", lambda v: all(b < a for a, b in zip(v, v[1:])), "must be strictly decreasing")

    m = raw.get("run.mode")
    if m == "converge" and "study.eps" not in raw:
        issues.append((0, "mode converge requires study.eps"))
    if m == "dilated" and "dilated.epsilon" not in raw:
        issues.append((0, "mode dilated requires dilated.epsilon"))
    gap = raw.get("geometry.gap")
    if m in ("dilated", "converge") and gap is not None and not isinstance(gap, ConstantGap):
        issues.append((line_of("geometry.gap"), f"mode {m} supports only a constant gap"))
    geo = ([raw.get(k) for k in ("geometry.nx", "geometry.ny")]
           + [raw.get(k, 1.0) for k in ("geometry.lx", "geometry.ly")])
    if gap is not None and all(v is not None for v in geo):
        try:
            make_gap_field(gap, Grid2D(*geo))
        except ParameterError as exc:
            issues.append((line_of("geometry.gap"), f"geometry.gap: {exc}"))

    params = None
    if not issues:
        try:
            params = PhysicalParams(raw["params.mu"], raw["params.mu_eff"], raw["params.K"],
                                    raw["params.k"], raw.get("params.b", 0.0))
        except ParameterError as exc:
            issues.append((0, str(exc)))
    if issues:
        raise ConfigError(sorted(issues, key=lambda t: t[0]))

    opt = {name: raw[key] for key, name in (
        ("geometry.nz", "nz"), ("geometry.lx", "lx"), ("geometry.ly", "ly"),
        ("solver.tol", "tol"), ("solver.maxit", "maxit"), ("solver.uzawa_tol", "uzawa_tol"),
        ("solver.uzawa_maxit", "uzawa_maxit"), ("solver.inner_tol", "inner_tol"),
        ("solver.heat_tol", "heat_tol"), ("run.output_dir", "output_dir"),
        ("dilated.epsilon", "epsilon")) if key in raw}
    return RunConfig(mode=m, params=params, gap=raw["geometry.gap"],
                     forcing=raw.get("forcing.spec", ZeroForcing()),
                     nx=raw["geometry.nx"], ny=raw["geometry.ny"],
                     eps_list=tuple(raw.get("study.eps", ())), text=text, **opt)
