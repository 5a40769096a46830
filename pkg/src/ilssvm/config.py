"""Experiment configuration: INI-style sections of ``key = value`` pairs.

Expression strings may be double-quoted; lists are comma separated; noise
plans are semicolon-separated ``lo:hi mean std`` groups.  Every random choice
is seeded from the file (there are no wall-clock defaults), so a config fully
determines its outputs.  See README for the full grammar.
"""

from __future__ import annotations

import configparser
import hashlib
from dataclasses import dataclass

from .data import (
    BUILTIN_BASES,
    DatasetSpec,
    NoiseRule,
    builtin_spec,
)
from .expr import ExprSyntaxError, parse_expr
from .interp import PsoParams
from .kernel import KernelSpec
from .svm import HyperParams
from .tuning import SearchSpace, SimplexParams, Weights


class ConfigError(ValueError):
    pass


def _unquote(value: str) -> str:
    value = value.strip()
    if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
        return value[1:-1]
    return value


def _split_list(value: str) -> list[str]:
    return [_unquote(item) for item in value.split(",") if item.strip()]


class Config:
    """Typed accessors over a parsed config file; errors name section/key."""

    def __init__(self, parser: configparser.ConfigParser, text: str, path: str = "<config>"):
        self._p = parser
        self.path = path
        self.hash = hashlib.sha256(text.encode()).hexdigest()[:16]

    @classmethod
    def from_path(cls, path) -> "Config":
        with open(path) as fh:
            text = fh.read()
        return cls.from_text(text, str(path))

    @classmethod
    def from_text(cls, text: str, path: str = "<config>") -> "Config":
        parser = configparser.ConfigParser(interpolation=None)
        try:
            parser.read_string(text)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        return cls(parser, text, path)

    def has(self, section: str, key: str) -> bool:
        return self._p.has_option(section, key)

    def _raw(self, section: str, key: str, default=None, required=False) -> str | None:
        if not self._p.has_option(section, key):
            if required:
                raise ConfigError(f"[{section}] {key}: missing required key")
            return default
        return self._p.get(section, key)

    def get_str(self, section, key, default=None, required=False):
        raw = self._raw(section, key, default, required)
        return _unquote(raw) if isinstance(raw, str) else raw

    def get_float(self, section, key, default=None, required=False):
        raw = self._raw(section, key, default, required)
        if raw is None or isinstance(raw, float):
            return raw
        try:
            return float(_unquote(raw))
        except ValueError:
            raise ConfigError(f"[{section}] {key}: not a number: {raw!r}") from None

    def get_int(self, section, key, default=None, required=False):
        raw = self._raw(section, key, default, required)
        if raw is None or isinstance(raw, int):
            return raw
        try:
            return int(_unquote(raw))
        except ValueError:
            raise ConfigError(f"[{section}] {key}: not an integer: {raw!r}") from None

    def get_bool(self, section, key, default=False):
        raw = self._raw(section, key)
        if raw is None:
            return default
        val = _unquote(raw).lower()
        if val in ("on", "true", "yes", "1"):
            return True
        if val in ("off", "false", "no", "0"):
            return False
        raise ConfigError(f"[{section}] {key}: expected on/off, got {raw!r}")

    def get_list(self, section, key, default=None, required=False):
        raw = self._raw(section, key, None, required)
        if raw is None:
            return default
        return _split_list(raw)

    def get_pair(self, section, key, default=None):
        items = self.get_list(section, key)
        if items is None:
            return default
        if len(items) != 2:
            raise ConfigError(f"[{section}] {key}: expected two comma-separated numbers")
        try:
            return float(items[0]), float(items[1])
        except ValueError:
            raise ConfigError(f"[{section}] {key}: not numbers: {items}") from None

    def get_expr(self, section, key, required=False):
        raw = self.get_str(section, key, required=required)
        if raw is None:
            return None
        try:
            return parse_expr(raw)
        except ExprSyntaxError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from None


def _parse_noise_plan(cfg: Config, section: str, key: str) -> tuple[NoiseRule, ...]:
    raw = cfg.get_str(section, key)
    if raw is None:
        return ()
    rules = []
    for group in raw.split(";"):
        group = group.strip()
        if not group:
            continue
        parts = group.split()
        if len(parts) != 3 or ":" not in parts[0]:
            raise ConfigError(f"[{section}] {key}: expected 'lo:hi mean std', got {group!r}")
        lo_s, _, hi_s = parts[0].partition(":")
        try:
            rules.append(NoiseRule(int(lo_s), int(hi_s), float(parts[1]), float(parts[2])))
        except ValueError:
            raise ConfigError(f"[{section}] {key}: bad numbers in {group!r}") from None
    return tuple(rules)


@dataclass(frozen=True)
class DatasetSection:
    spec: DatasetSpec
    seed: int
    builtin: str | None  # None for custom generators


def dataset_section(cfg: Config) -> DatasetSection:
    seed = cfg.get_int("dataset", "seed", required=True)
    builtin = cfg.get_str("dataset", "builtin")
    if builtin is not None:
        if cfg.has("dataset", "generator"):
            raise ConfigError("[dataset] builtin and generator are mutually exclusive")
        try:
            spec = builtin_spec(builtin)
        except ValueError as exc:
            raise ConfigError(f"[dataset] builtin: {exc}") from None
        return DatasetSection(spec=spec, seed=seed, builtin=builtin)
    generator = cfg.get_expr("dataset", "generator", required=True)
    n = cfg.get_int("dataset", "n_samples", required=True)
    ranges_raw = cfg.get_list("dataset", "ranges", required=True)
    ranges = []
    for item in ranges_raw:
        lo_s, sep, hi_s = item.partition(":")
        if not sep:
            raise ConfigError(f"[dataset] ranges: expected lo:hi, got {item!r}")
        ranges.append((float(lo_s), float(hi_s)))
    spec = DatasetSpec(
        name=cfg.get_str("dataset", "name", default="custom"),
        generator=generator,
        n_samples=n,
        input_ranges=tuple(ranges),
        noise_plan=_parse_noise_plan(cfg, "dataset", "noise"),
        permuted_plan=_parse_noise_plan(cfg, "dataset", "permuted_noise"),
        nuisance_count=cfg.get_int("dataset", "nuisance_count", default=0),
        nuisance_noise=(
            cfg.get_float("dataset", "nuisance_mean", default=0.0),
            cfg.get_float("dataset", "nuisance_std", default=1.0),
        ),
    )
    return DatasetSection(spec=spec, seed=seed, builtin=None)


@dataclass(frozen=True)
class InterpSection:
    basis: tuple  # parsed ExprAst terms
    mu: tuple[float, ...] | None  # fixed coefficients, or None to fit by PSO
    pso: PsoParams | None
    centering: str


def interp_section(cfg: Config, builtin: str | None) -> InterpSection:
    basis_raw = cfg.get_list("interp", "basis")
    if basis_raw is None:
        if builtin is None:
            raise ConfigError("[interp] basis: required for custom generators")
        basis_raw = list(BUILTIN_BASES[builtin])
    try:
        basis = tuple(parse_expr(term) for term in basis_raw)
    except ExprSyntaxError as exc:
        raise ConfigError(f"[interp] basis: {exc}") from None
    centering = cfg.get_str("interp", "centering", default="signed")
    if centering not in ("signed", "absolute"):
        raise ConfigError(f"[interp] centering: expected signed or absolute, got {centering!r}")
    mu_raw = cfg.get_list("interp", "mu")
    mu = None
    pso = None
    if mu_raw is not None:
        try:
            mu = tuple(float(v) for v in mu_raw)
        except ValueError:
            raise ConfigError(f"[interp] mu: not numbers: {mu_raw}") from None
        if len(mu) != len(basis):
            raise ConfigError(f"[interp] mu: {len(mu)} values for {len(basis)} basis terms")
    else:
        pso = PsoParams(
            seed=cfg.get_int("interp", "pso_seed", required=True),
            swarm_size=cfg.get_int("interp", "swarm_size", default=30),
            iterations=cfg.get_int("interp", "iterations", default=200),
            inertia=cfg.get_float("interp", "inertia", default=0.729),
            cognitive=cfg.get_float("interp", "cognitive", default=1.49445),
            social=cfg.get_float("interp", "social", default=1.49445),
            position_bounds=cfg.get_pair("interp", "bounds", default=(-10.0, 10.0)),
        )
    return InterpSection(basis=basis, mu=mu, pso=pso, centering=centering)


@dataclass(frozen=True)
class ModelSection:
    kernel: KernelSpec
    hyper: HyperParams
    tune: bool
    space: SearchSpace
    weights: Weights
    grid: int
    simplex: SimplexParams


def model_section(cfg: Config) -> ModelSection:
    family = cfg.get_str("model", "kernel", default="rbf")
    if family not in ("rbf", "linear"):
        raise ConfigError(f"[model] kernel: expected rbf or linear, got {family!r}")
    try:
        kernel = KernelSpec(family, width=cfg.get_float("model", "width", default=1.0))
        hyper = HyperParams(
            phi=cfg.get_float("model", "phi", default=10.0),
            sigma=cfg.get_float("model", "sigma", default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[model] {exc}") from None
    sigma_range = cfg.get_pair("model", "sigma_range", default=(0.0, 1e3))
    return ModelSection(
        kernel=kernel,
        hyper=hyper,
        tune=cfg.get_bool("model", "tune", default=False),
        space=SearchSpace(
            width=cfg.get_pair("model", "width_range", default=(1e-2, 1e2)),
            phi=cfg.get_pair("model", "phi_range", default=(1e-2, 1e4)),
            sigma=sigma_range,
        ),
        weights=Weights(
            mse=cfg.get_float("model", "weight_mse", default=1.0),
            id=cfg.get_float("model", "weight_id", default=0.5),
        ),
        grid=cfg.get_int("model", "grid", default=4),
        simplex=SimplexParams(
            max_iters=cfg.get_int("model", "nm_iters", default=60),
            tol=cfg.get_float("model", "nm_tol", default=1e-3),
            initial_step=cfg.get_float("model", "nm_step", default=0.5),
        ),
    )


@dataclass(frozen=True)
class ProtocolSection:
    folds: int
    fold_seed: int
    repeat: int
    timing: bool


def protocol_section(cfg: Config) -> ProtocolSection:
    return ProtocolSection(
        folds=cfg.get_int("protocol", "folds", default=10),
        fold_seed=cfg.get_int("protocol", "fold_seed", required=True),
        repeat=cfg.get_int("protocol", "repeat", default=10),
        timing=cfg.get_bool("protocol", "timing", default=False),
    )
