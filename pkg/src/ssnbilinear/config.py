"""Run configuration files.

Config files use INI syntax.  A minimal file:

    [problem]
    preset = benchmark

    [mesh]
    levels = 7 8 9

Full key reference lives in the README.  parse_config collects every
violation it can find before raising, so a broken file is repaired in one
round trip.
"""

import configparser
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .expressions import compile_expression
from .mesh import MAX_LEVEL
from .problem import ProblemSpec, benchmark_instance, validate
from .ssn import SSNConfig

_PROBLEM_FUNCS = ("a", "da_dy", "d2a_dy2", "L", "dL_dy", "d2L_dy2")
_PROBLEM_REALS = ("alpha", "beta", "nu", "a0")


@dataclass(frozen=True)
class VerifySettings:
    """Parameters of the finite-difference verification run."""

    level: int = 4
    directions: int = 5
    seed: int = 1234


@dataclass(frozen=True)
class RunConfig:
    """Everything one `run` or `verify` invocation needs."""

    spec: ProblemSpec
    levels: tuple[int, ...]
    ssn: SSNConfig
    output_dir: str = "out"
    write_fields: bool = True
    tracking: str = "quadratic"
    verify: VerifySettings = field(default_factory=VerifySettings)


def _parse_bool(raw: str, key: str, errors: list[str]) -> bool:
    val = raw.strip().lower()
    if val in ("on", "true", "yes", "1"):
        return True
    if val in ("off", "false", "no", "0"):
        return False
    errors.append(f"[{key}] expected on/off, got {raw!r}")
    return True


def _parse_real(section, key: str, default, errors: list[str]):
    raw = section.get(key)
    if raw is None:
        if default is None:
            errors.append(f"[problem] missing required key {key!r}")
        return default
    raw = raw.strip()
    try:
        if raw.lower() in ("inf", "+inf") and key == "beta":
            return math.inf
        return float(raw)
    except ValueError:
        errors.append(f"[problem] {key} must be a real number, got {raw!r}")
        return default


def _parse_int(section, key: str, default, errors: list[str], label: str):
    raw = section.get(key)
    if raw is None:
        return default
    try:
        return int(raw.strip())
    except ValueError:
        errors.append(f"[{label}] {key} must be an integer, got {raw!r}")
        return default


def _parse_levels(raw: str | None, errors: list[str]) -> tuple[int, ...]:
    if raw is None or not raw.strip():
        errors.append("[mesh] at least one mesh level is required")
        return ()
    levels = []
    for tok in raw.replace(",", " ").split():
        try:
            lev = int(tok)
        except ValueError:
            errors.append(f"[mesh] levels must be integers, got {tok!r}")
            continue
        if not 1 <= lev <= MAX_LEVEL:
            errors.append(f"[mesh] level {lev} outside [1, {MAX_LEVEL}]")
            continue
        levels.append(lev)
    return tuple(levels)


def _problem_from_section(section, errors: list[str]):
    preset = section.get("preset")
    tracking = section.get("tracking", "quadratic").strip()
    if tracking not in ("quadratic", "linear"):
        errors.append(
            f"[problem] tracking must be quadratic or linear, got {tracking!r}"
        )
        tracking = "quadratic"

    if preset is not None:
        if preset.strip() != "benchmark":
            errors.append(f"[problem] unknown preset {preset!r}")
            return None, tracking
        return benchmark_instance(tracking), tracking

    funcs = {}
    for key in _PROBLEM_FUNCS:
        raw = section.get(key)
        if raw is None:
            errors.append(f"[problem] missing required key {key!r}")
            continue
        try:
            funcs[key] = compile_expression(raw, with_y=True)
        except ConfigurationError as exc:
            errors.append(f"[problem] {key}: {exc}")
    g_raw = section.get("g", "0")
    try:
        flux = compile_expression(g_raw, with_y=False)
    except ConfigurationError as exc:
        errors.append(f"[problem] g: {exc}")
        flux = None

    reals = {key: _parse_real(section, key, None, errors) for key in _PROBLEM_REALS}

    if len(funcs) < len(_PROBLEM_FUNCS) or flux is None or None in reals.values():
        return None, tracking
    spec = ProblemSpec(
        a=funcs["a"],
        da_dy=funcs["da_dy"],
        d2a_dy2=funcs["d2a_dy2"],
        L=funcs["L"],
        dL_dy=funcs["dL_dy"],
        d2L_dy2=funcs["d2L_dy2"],
        g=flux,
        alpha=reals["alpha"],
        beta=reals["beta"],
        nu=reals["nu"],
        a0=reals["a0"],
        diffusion=np.eye(2),
    )
    return spec, tracking


def parse_config(path: str) -> RunConfig:
    """Parse and validate a config file; raises ConfigurationError listing
    every violation found."""
    if not os.path.isfile(path):
        raise ConfigurationError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle, source=path)
    except configparser.Error as exc:
        raise ConfigurationError(f"config syntax error: {exc}") from exc

    errors: list[str] = []

    if not parser.has_section("problem"):
        errors.append("missing [problem] section")
        spec, tracking = None, "quadratic"
    else:
        spec, tracking = _problem_from_section(parser["problem"], errors)

    mesh_section = parser["mesh"] if parser.has_section("mesh") else {}
    levels = _parse_levels(
        mesh_section.get("levels") if mesh_section else None, errors
    )

    ssn_section = parser["ssn"] if parser.has_section("ssn") else {}
    outer_tol = 5e-14
    inner_tol = 5e-14
    max_outer = 30
    max_cg = None
    u0 = None
    if ssn_section:
        for key, cast in (("outer_tol", float), ("inner_tol", float), ("u0", float)):
            raw = ssn_section.get(key)
            if raw is None:
                continue
            try:
                val = cast(raw.strip())
            except ValueError:
                errors.append(f"[ssn] {key} must be a real number, got {raw!r}")
                continue
            if key == "outer_tol":
                outer_tol = val
            elif key == "inner_tol":
                inner_tol = val
            else:
                u0 = val
        max_outer = _parse_int(ssn_section, "max_outer", 30, errors, "ssn")
        max_cg = _parse_int(ssn_section, "max_cg", None, errors, "ssn")
    if outer_tol <= 0 or inner_tol <= 0:
        errors.append("[ssn] tolerances must be positive")
    if max_outer is not None and max_outer < 1:
        errors.append("[ssn] max_outer must be at least 1")

    out_section = parser["output"] if parser.has_section("output") else {}
    output_dir = out_section.get("directory", "out") if out_section else "out"
    write_fields = True
    if out_section and out_section.get("write_fields") is not None:
        write_fields = _parse_bool(
            out_section.get("write_fields"), "output] write_fields", errors
        )

    ver_section = parser["verify"] if parser.has_section("verify") else {}
    v_level = _parse_int(ver_section, "level", 4, errors, "verify") if ver_section else 4
    v_dirs = (
        _parse_int(ver_section, "directions", 5, errors, "verify") if ver_section else 5
    )
    v_seed = _parse_int(ver_section, "seed", 1234, errors, "verify") if ver_section else 1234
    if not 1 <= v_level <= MAX_LEVEL:
        errors.append(f"[verify] level {v_level} outside [1, {MAX_LEVEL}]")
    if v_dirs < 1:
        errors.append("[verify] directions must be at least 1")

    fd_checks = True
    if parser.has_section("problem") and parser["problem"].get("fd_check") is not None:
        fd_checks = _parse_bool(parser["problem"].get("fd_check"), "problem] fd_check", errors)

    if spec is not None:
        errors.extend(validate(spec, derivative_check=fd_checks))

    if errors:
        raise ConfigurationError(
            "invalid config:\n  " + "\n  ".join(errors)
        )

    return RunConfig(
        spec=spec,
        levels=levels,
        ssn=SSNConfig(
            outer_tol=outer_tol,
            inner_tol=inner_tol,
            max_outer=max_outer,
            max_cg=max_cg,
            u0=u0,
        ),
        output_dir=output_dir,
        write_fields=write_fields,
        tracking=tracking,
        verify=VerifySettings(level=v_level, directions=v_dirs, seed=v_seed),
    )
