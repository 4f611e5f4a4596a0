"""Run configuration: tolerance bundle and INI-style config file parsing.

Config files are flat key = value pairs under section headers, read with
:mod:`configparser`. The exact grammar (sections, keys, defaults) is
documented in the README; parse errors surface as :class:`ConfigError`
naming the offending section and key.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .fock import ModelParams, TruncationConfig


class ConfigError(ValueError):
    """A run configuration failed validation."""


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances shared by validation, evolution and the CLI."""

    hermiticity_tol: float = 1e-10
    trace_tol: float = 1e-8
    positivity_tol: float = 1e-9
    oracle_tol: float = 1e-7
    degeneracy_threshold: float = 1e-6

    def __post_init__(self):
        for name, value in dataclasses.asdict(self).items():
            if not (0 < value <= 1e-2) or not math.isfinite(value):
                raise ConfigError(f"tolerance {name} must lie in (0, 1e-2], got {value!r}")

    def replaced(self, overrides: list[str]) -> "ToleranceConfig":
        """Apply ``key=value`` override strings, e.g. from --tol-override."""
        fields = {f.name for f in dataclasses.fields(self)}
        updates = {}
        for item in overrides:
            key, sep, raw = item.partition("=")
            key = key.strip()
            if not sep or key not in fields:
                raise ConfigError(
                    f"tolerance override {item!r} is not of the form key=value with "
                    f"key in {sorted(fields)}"
                )
            try:
                updates[key] = float(raw)
            except ValueError as exc:
                raise ConfigError(f"tolerance override {item!r}: {exc}") from None
        return dataclasses.replace(self, **updates)


DEFAULT_TOLERANCES = ToleranceConfig()

METHODS = ("analytic", "expm", "rk4", "nu-zero")
STATE_KINDS = ("fock", "coherent", "thermal", "mixture")


@dataclass(frozen=True)
class StateSpec:
    """Tagged choice of initial state.

    kind "fock" uses ``n``; "coherent" uses ``alpha`` (entered in config
    files as two real fields re/im); "thermal" uses ``n_bar``; "mixture"
    uses ``terms`` as ((level, weight), ...).
    """

    kind: str
    n: int = 0
    alpha: complex = 0.0
    n_bar: float = 0.0
    terms: tuple[tuple[int, float], ...] = ()

    def __post_init__(self):
        if self.kind not in STATE_KINDS:
            raise ConfigError(f"state kind must be one of {STATE_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid over [t_start, t_end], inclusive of both endpoints."""

    t_start: float
    t_end: float
    num_points: int

    def __post_init__(self):
        if not (math.isfinite(self.t_start) and math.isfinite(self.t_end)):
            raise ConfigError("time grid endpoints must be finite")
        if self.t_start < 0:
            raise ConfigError(f"t_start must be non-negative, got {self.t_start}")
        if self.t_end < self.t_start:
            raise ConfigError(f"t_end={self.t_end} is before t_start={self.t_start}")
        if self.num_points < 1:
            raise ConfigError(f"num_points must be at least 1, got {self.num_points}")
        if self.num_points == 1 and self.t_end != self.t_start:
            raise ConfigError("num_points=1 requires t_start == t_end")

    def times(self) -> np.ndarray:
        if self.num_points == 1:
            return np.array([self.t_start])
        return np.linspace(self.t_start, self.t_end, self.num_points)


@dataclass(frozen=True)
class RunConfig:
    """Everything a quantum CLI run needs."""

    params: ModelParams
    state: StateSpec
    trunc: TruncationConfig
    grid: TimeGrid
    method: str = "analytic"
    check_truncation: bool = False
    tolerances: ToleranceConfig = DEFAULT_TOLERANCES
    photon_levels: int = 4
    steady_tol: float = 1e-4

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.method == "nu-zero" and self.params.nu != 0.0:
            raise ConfigError(f"method nu-zero requires nu = 0, got nu = {self.params.nu}")
        if self.photon_levels < 0:
            raise ConfigError(f"photon_levels must be non-negative, got {self.photon_levels}")


@dataclass(frozen=True)
class ClassicalRunConfig:
    """Configuration of a classical-oscillator CLI run."""

    omega: float
    gamma: float
    x0: float
    y0: float
    grid: TimeGrid


class _Reader:
    """configparser wrapper producing ConfigError with section/key context."""

    def __init__(self, path: str):
        self.parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path, "r", encoding="utf-8") as fh:
                self.parser.read_file(fh, source=path)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from None
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file: {exc}") from None
        self.path = path

    def has(self, section: str) -> bool:
        return self.parser.has_section(section)

    def _raw(self, section: str, key: str, default):
        if not self.parser.has_section(section):
            if default is not _REQUIRED:
                return default
            raise ConfigError(f"missing required section [{section}] in {self.path}")
        if not self.parser.has_option(section, key):
            if default is not _REQUIRED:
                return default
            raise ConfigError(f"[{section}] {key}: required key is missing")
        return self.parser.get(section, key)

    def get_float(self, section: str, key: str, default=None) -> float:
        raw = self._raw(section, key, _REQUIRED if default is None else default)
        if not isinstance(raw, str):
            return raw
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected a number, got {raw!r}") from None

    def get_int(self, section: str, key: str, default=None) -> int:
        raw = self._raw(section, key, _REQUIRED if default is None else default)
        if not isinstance(raw, str):
            return raw
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"[{section}] {key}: expected an integer, got {raw!r}") from None

    def get_str(self, section: str, key: str, default=None) -> str:
        raw = self._raw(section, key, _REQUIRED if default is None else default)
        return raw.strip() if isinstance(raw, str) else raw

    def get_bool(self, section: str, key: str, default=False) -> bool:
        raw = self._raw(section, key, default)
        if isinstance(raw, bool):
            return raw
        lowered = raw.strip().lower()
        if lowered in ("true", "yes", "on", "1"):
            return True
        if lowered in ("false", "no", "off", "0"):
            return False
        raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}")


_REQUIRED = object()


def _read_state(reader: _Reader) -> StateSpec:
    kind = reader.get_str("state", "kind")
    if kind == "fock":
        return StateSpec(kind=kind, n=reader.get_int("state", "n"))
    if kind == "coherent":
        re = reader.get_float("state", "re")
        im = reader.get_float("state", "im", 0.0)
        return StateSpec(kind=kind, alpha=complex(re, im))
    if kind == "thermal":
        return StateSpec(kind=kind, n_bar=reader.get_float("state", "n_bar"))
    if kind == "mixture":
        raw = reader.get_str("state", "terms")
        terms = []
        for piece in raw.replace(",", " ").split():
            level, sep, weight = piece.partition(":")
            if not sep:
                raise ConfigError(
                    f"[state] terms: expected level:weight entries, got {piece!r}"
                )
            try:
                terms.append((int(level), float(weight)))
            except ValueError:
                raise ConfigError(f"[state] terms: bad entry {piece!r}") from None
        if not terms:
            raise ConfigError("[state] terms: at least one level:weight entry required")
        total = sum(w for _, w in terms)
        if any(w < 0 for _, w in terms) or abs(total - 1.0) > 1e-12:
            raise ConfigError(
                f"[state] terms: weights must be non-negative and sum to 1 (got {total!r})"
            )
        return StateSpec(kind=kind, terms=tuple(terms))
    raise ConfigError(f"[state] kind: must be one of {STATE_KINDS}, got {kind!r}")


def _read_tolerances(reader: _Reader) -> ToleranceConfig:
    if not reader.has("tolerances"):
        return DEFAULT_TOLERANCES
    kwargs = {}
    for field in dataclasses.fields(ToleranceConfig):
        value = reader.get_float("tolerances", field.name, getattr(DEFAULT_TOLERANCES, field.name))
        kwargs[field.name] = value
    return ToleranceConfig(**kwargs)


def _read_grid(reader: _Reader) -> TimeGrid:
    return TimeGrid(
        t_start=reader.get_float("grid", "t_start"),
        t_end=reader.get_float("grid", "t_end"),
        num_points=reader.get_int("grid", "num_points"),
    )


def load_run_config(path: str) -> RunConfig:
    """Parse a quantum-run config file. See README for the grammar."""
    reader = _Reader(path)
    try:
        params = ModelParams(
            omega=reader.get_float("model", "omega", 0.0),
            mu=reader.get_float("model", "mu", 0.0),
            nu=reader.get_float("model", "nu", 0.0),
            theta=reader.get_float("model", "theta", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[model]: {exc}") from None
    support_max = reader.get_int("truncation", "support_max")
    guard = reader.get_int("truncation", "guard", -1)
    try:
        trunc = TruncationConfig.for_support(support_max, None if guard < 0 else guard)
    except ValueError as exc:
        raise ConfigError(f"[truncation]: {exc}") from None
    return RunConfig(
        params=params,
        state=_read_state(reader),
        trunc=trunc,
        grid=_read_grid(reader),
        method=reader.get_str("run", "method", "analytic"),
        check_truncation=reader.get_bool("run", "check_truncation", False),
        tolerances=_read_tolerances(reader),
        photon_levels=reader.get_int("run", "photon_levels", 4),
        steady_tol=reader.get_float("run", "steady_tol", 1e-4),
    )


def load_classical_config(path: str) -> ClassicalRunConfig:
    """Parse a classical-run config file ([classical] and [grid] sections)."""
    reader = _Reader(path)
    return ClassicalRunConfig(
        omega=reader.get_float("classical", "omega"),
        gamma=reader.get_float("classical", "gamma", 0.0),
        x0=reader.get_float("classical", "x0"),
        y0=reader.get_float("classical", "y0", 0.0),
        grid=_read_grid(reader),
    )
