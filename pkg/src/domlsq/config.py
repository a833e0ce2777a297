"""Experiment configuration.

Flat, typed key/value files in INI syntax with one section per library
module; unknown sections or keys are errors so experiment records stay
self-describing.  Command-line flags override file values.
"""
import configparser
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple


class ConfigError(ValueError):
    """Malformed configuration file or flag value."""


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("true", "1", "yes", "on"):
        return True
    if t in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_eta(text):
    t = text.strip().lower()
    if t == "auto":
        return None
    if t == "inf":
        return math.inf
    try:
        return float(t)
    except ValueError as exc:
        raise ConfigError(f"eta must be a number, 'inf' or 'auto', got {text!r}") from exc


def _parse_orders(text):
    """Order range: 'a:b' (inclusive) or a comma-separated list."""
    t = text.strip()
    try:
        if ":" in t:
            lo, hi = t.split(":")
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(p) for p in t.split(","))
    except ValueError as exc:
        raise ConfigError(f"orders must be 'a:b' or a comma list, got {text!r}") from exc


_SCHEMA = {
    "index_sets": {
        "index_set": str,
        "order": int,
        "orders": _parse_orders,
        "dimension": int,
    },
    "domains": {
        "domain": str,
        "mandelbrot.max_iter": int,
        "seed": int,
        "stream": int,
    },
    "surrogate": {
        "algorithm": str,
        "epsilon_threshold": float,
        "m_tilde_rule": str,
        "theta": float,
    },
    "sampling": {
        "m_rule": str,
        "c": float,
        "replacement": _parse_bool,
    },
    "estimator": {
        "eta": _parse_eta,
        "alpha": float,
        "delta": float,
        "delta_tilde": float,
    },
    "bench": {
        "function": str,
        "repetitions": int,
        "m_cv": int,
        "grid_resolution": int,
        "output": str,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Complete description of one experiment (fit, sweep or heatmap run)."""

    family: str = "total_degree"
    order: int = 5
    orders: Optional[Tuple[int, ...]] = None
    dimension: int = 2
    domain: str = "swiss_cheese"
    mandelbrot_max_iter: int = 1000
    seed: int = 0
    stream: int = 0
    algorithm: str = "adapt"
    epsilon_threshold: float = 1e-12
    m_tilde_rule: str = "theta_n_log_n"
    theta: float = 200.0
    m_rule: str = "c_n_log_n"
    c: float = 4.0
    replacement: bool = True
    eta: Optional[float] = None  # None means: use the function's default
    alpha: float = 0.01
    delta: float = 0.5
    delta_tilde: float = 0.5
    function: str = "cheese"
    repetitions: int = 10
    m_cv: int = 100_000
    grid_resolution: int = 400
    output: str = ""

    def __post_init__(self):
        if self.family not in ("total_degree", "hyperbolic_cross"):
            raise ConfigError(f"unknown index_set {self.family!r}")
        if self.domain not in ("hypercube", "swiss_cheese", "annulus", "mandelbrot"):
            raise ConfigError(f"unknown domain {self.domain!r}")
        if self.domain != "hypercube" and self.dimension != 2:
            raise ConfigError(f"domain {self.domain!r} requires dimension 2")
        if self.dimension < 1:
            raise ConfigError("dimension must be >= 1")
        if self.order < 0:
            raise ConfigError("order must be >= 0")
        if self.orders is not None and (len(self.orders) == 0 or min(self.orders) < 0):
            raise ConfigError("orders must be a nonempty range of values >= 0")
        if self.algorithm not in ("direct", "adapt"):
            raise ConfigError(f"unknown algorithm {self.algorithm!r}")
        if self.m_tilde_rule != "theta_n_log_n":
            raise ConfigError(f"unknown m_tilde_rule {self.m_tilde_rule!r}")
        if self.m_rule != "c_n_log_n":
            raise ConfigError(f"unknown m_rule {self.m_rule!r}")
        if self.theta < 1 or self.c < 1:
            raise ConfigError("theta and c must be >= 1")
        if self.repetitions < 1 or self.m_cv < 1:
            raise ConfigError("repetitions and m_cv must be >= 1")
        if self.mandelbrot_max_iter < 1:
            raise ConfigError("mandelbrot.max_iter must be >= 1")
        if self.epsilon_threshold <= 0:
            raise ConfigError("epsilon_threshold must be positive")
        if self.grid_resolution < 2:
            raise ConfigError("grid_resolution must be >= 2")


_FIELD_OF_KEY = {
    ("index_sets", "index_set"): "family",
    ("index_sets", "order"): "order",
    ("index_sets", "orders"): "orders",
    ("index_sets", "dimension"): "dimension",
    ("domains", "domain"): "domain",
    ("domains", "mandelbrot.max_iter"): "mandelbrot_max_iter",
    ("domains", "seed"): "seed",
    ("domains", "stream"): "stream",
    ("surrogate", "algorithm"): "algorithm",
    ("surrogate", "epsilon_threshold"): "epsilon_threshold",
    ("surrogate", "m_tilde_rule"): "m_tilde_rule",
    ("surrogate", "theta"): "theta",
    ("sampling", "m_rule"): "m_rule",
    ("sampling", "c"): "c",
    ("sampling", "replacement"): "replacement",
    ("estimator", "eta"): "eta",
    ("estimator", "alpha"): "alpha",
    ("estimator", "delta"): "delta",
    ("estimator", "delta_tilde"): "delta_tilde",
    ("bench", "function"): "function",
    ("bench", "repetitions"): "repetitions",
    ("bench", "m_cv"): "m_cv",
    ("bench", "grid_resolution"): "grid_resolution",
    ("bench", "output"): "output",
}


def read_config_file(path):
    """Raw (section, key) -> string values from a config file, validated keys."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from exc
    values = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in parser.items(section):
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key {key!r} in section [{section}]")
            values[(section, key)] = raw
    return values


def build_config(file_values=None, overrides=None):
    """Typed ExperimentConfig from raw file values plus flag overrides."""
    merged = {}
    for source in (file_values or {}), (overrides or {}):
        for (section, key), raw in source.items():
            if section not in _SCHEMA or key not in _SCHEMA[section]:
                raise ConfigError(f"unknown config key [{section}] {key}")
            merged[(section, key)] = raw
    kwargs = {}
    for (section, key), raw in merged.items():
        parse = _SCHEMA[section][key]
        try:
            kwargs[_FIELD_OF_KEY[(section, key)]] = parse(raw)
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc
    return ExperimentConfig(**kwargs)


def load_config(path=None, overrides=None):
    """Convenience wrapper: optional file plus overrides to a config object."""
    file_values = read_config_file(path) if path else None
    return build_config(file_values, overrides)
