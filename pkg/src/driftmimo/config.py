"""Experiment configuration files.

Grammar (INI, read with :mod:`configparser`)::

    [array]          m_t, m_r, delta_t, delta_r, beta_t, beta_r, f0, v, alpha_v
    [path.<n>]       tau0, gain, mu, kappa, n_scatterers, k_ell   (one per ellipse)
    [generator]      n_paths, n_scatterers, tau_rms, kappa_min, kappa_max,
                     mean_min, mean_max, k_ell
    [evaluation]     method, antennas, q, q_prime, p, p_prime, delta_t,
                     f_min, f_max, f_points, nu_min, nu_max, nu_points,
                     tau_points, realizations, scatterers, rho
    [output]         directory
    [seed]           master, stream

Exactly one of ``[path.*]`` or ``[generator]`` may appear; with neither, a
single uniform-AOA path at zero delay is used. Numeric values accept unit
suffixes: ``s ms us ns``, ``Hz kHz MHz GHz``, ``lam`` (carrier wavelengths),
``deg`` and ``pi`` (multiples of pi radians). Lists are comma separated.
Any key can be overridden with ``section.key=value``.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigurationError
from .geometry import SPEED_OF_LIGHT, ArrayConfig, EllipsePath
from .stochastic import ClusterGenerator, SeedSpec, VonMises

_SCALE = {
    "": 1.0, "s": 1.0, "ms": 1e-3, "us": 1e-6, "ns": 1e-9,
    "hz": 1.0, "khz": 1e3, "mhz": 1e6, "ghz": 1e9,
    "deg": math.pi / 180.0, "pi": math.pi, "rad": 1.0,
}
_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*([a-zA-Z]*)\s*$")

ARRAY_KEYS = ("m_t", "m_r", "delta_t", "delta_r", "beta_t", "beta_r", "f0", "v", "alpha_v")
EVAL_DEFAULTS = {
    "method": "closed", "antennas": "1", "q": "1", "q_prime": "1", "p": "1", "p_prime": "1",
    "delta_t": "0", "f_min": "0", "f_max": "0", "f_points": "1",
    "nu_min": "0", "nu_max": "0", "nu_points": "1", "tau_points": "512",
    "realizations": "100", "scatterers": "", "rho": "0.5",
}


def parse_quantity(text: str, wavelength: float | None = None) -> float:
    """Parse ``"2GHz"``, ``"0.5lam"``, ``"-0.5pi"``, ``"30ns"`` and plain numbers."""
    m = _NUMBER.match(str(text))
    if not m or (m.group(1) is None and not m.group(2)):
        raise ConfigurationError(f"cannot parse quantity {text!r}")
    value = float(m.group(1)) if m.group(1) is not None else 1.0
    unit = m.group(2).lower()
    if unit == "lam":
        if wavelength is None:
            raise ConfigurationError(f"{text!r}: wavelength units need a carrier")
        return value * wavelength
    if unit not in _SCALE:
        raise ConfigurationError(f"unknown unit {m.group(2)!r} in {text!r}")
    return value * _SCALE[unit]


def parse_list(text: str, wavelength: float | None = None) -> list[float]:
    return [parse_quantity(t, wavelength) for t in str(text).split(",") if t.strip()]


def _int(text: str, what: str) -> int:
    v = parse_quantity(text)
    if v != int(v):
        raise ConfigurationError(f"{what} must be an integer, got {text!r}")
    return int(v)


@dataclass
class ExperimentConfig:
    array: ArrayConfig = field(default_factory=ArrayConfig)
    paths: list[EllipsePath] | None = None
    generator: ClusterGenerator | None = None
    evaluation: dict = field(default_factory=lambda: dict(EVAL_DEFAULTS))
    output: str | None = None
    seed: SeedSpec = field(default_factory=SeedSpec)

    def path_source(self):
        if self.generator is not None:
            return self.generator
        if self.paths is not None:
            return self.paths
        return [EllipsePath(0.0, 1.0, VonMises(math.pi, 0.0))]

    def eval_quantity(self, key: str) -> float:
        return parse_quantity(self.evaluation[key], self.array.wavelength)

    def eval_int(self, key: str) -> int:
        return _int(self.evaluation[key], key)

    def antennas(self) -> list[int]:
        return [_int(t, "antennas") for t in self.evaluation["antennas"].split(",") if t.strip()]


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str.lower
    return cp


def apply_overrides(cp: configparser.ConfigParser, overrides) -> None:
    for item in overrides or ():
        key, sep, value = item.partition("=")
        section, dot, name = key.strip().rpartition(".")
        if not sep or not dot or not section or not name:
            raise ConfigurationError(f"override {item!r} is not section.key=value")
        if not cp.has_section(section):
            cp.add_section(section)
        cp.set(section, name, value.strip())


def load_config(path: str | Path | None = None, overrides=None,
                base: dict[str, dict[str, str]] | None = None) -> ExperimentConfig:
    """Read a config file (optional), apply ``base`` defaults beneath it and overrides on top."""
    cp = _parser()
    if base:
        cp.read_dict(base)
    if path is not None:
        # file values replace base values key by key
        cp.read_string(Path(path).read_text())
    apply_overrides(cp, overrides)
    return build_config(cp)


def build_config(cp: configparser.ConfigParser) -> ExperimentConfig:
    known = {"array", "generator", "evaluation", "output", "seed"}
    for section in cp.sections():
        if section not in known and not section.startswith("path."):
            raise ConfigurationError(f"unknown section [{section}]")

    arr = dict(cp["array"]) if cp.has_section("array") else {}
    unknown = set(arr) - set(ARRAY_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown [array] keys: {sorted(unknown)}")
    f0 = parse_quantity(arr.get("f0", "2GHz"))
    lam = SPEED_OF_LIGHT / f0 if f0 > 0 else None
    kwargs = {"f0": f0}
    for key in ("m_t", "m_r"):
        if key in arr:
            kwargs[key] = _int(arr[key], key)
    for key in ("delta_t", "delta_r", "beta_t", "beta_r", "v", "alpha_v"):
        if key in arr:
            kwargs[key] = parse_quantity(arr[key], lam)
    array = ArrayConfig(**kwargs)

    path_sections = sorted((s for s in cp.sections() if s.startswith("path.")),
                           key=lambda s: (len(s), s))
    if path_sections and cp.has_section("generator"):
        raise ConfigurationError("give either [path.*] sections or [generator], not both")
    paths = None
    if path_sections:
        paths = []
        for s in path_sections:
            sec = cp[s]
            k_ell = sec.get("k_ell")
            paths.append(EllipsePath(
                parse_quantity(sec.get("tau0", "0")),
                parse_quantity(sec.get("gain", "1")),
                VonMises(parse_quantity(sec.get("mu", "1pi")), parse_quantity(sec.get("kappa", "0"))),
                _int(sec.get("n_scatterers", "100"), "n_scatterers"),
                parse_quantity(k_ell) if k_ell else None,
            ))
    generator = None
    if cp.has_section("generator"):
        g = cp["generator"]
        k_ell = g.get("k_ell")
        generator = ClusterGenerator(
            n_paths=_int(g.get("n_paths", "100"), "n_paths"),
            n_scatterers=_int(g.get("n_scatterers", "100"), "n_scatterers"),
            tau_rms=parse_quantity(g.get("tau_rms", "30ns")),
            kappa_range=(parse_quantity(g.get("kappa_min", "0")), parse_quantity(g.get("kappa_max", "10"))),
            mean_range=(parse_quantity(g.get("mean_min", "0")), parse_quantity(g.get("mean_max", "2pi"))),
            k_ell=parse_quantity(k_ell) if k_ell else None,
        )

    evaluation = dict(EVAL_DEFAULTS)
    if cp.has_section("evaluation"):
        extra = set(cp["evaluation"]) - set(EVAL_DEFAULTS)
        if extra:
            raise ConfigurationError(f"unknown [evaluation] keys: {sorted(extra)}")
        evaluation.update(cp["evaluation"])

    seed = SeedSpec()
    if cp.has_section("seed"):
        seed = SeedSpec(_int(cp["seed"].get("master", "0"), "master"),
                        _int(cp["seed"].get("stream", "0"), "stream"))
    output = cp["output"].get("directory") if cp.has_section("output") else None

    cfg = ExperimentConfig(array, paths, generator, evaluation, output, seed)
    _check_antennas(cfg)
    return cfg


def _check_antennas(cfg: ExperimentConfig) -> None:
    a = cfg.array
    for key in ("q", "q_prime"):
        if not 1 <= cfg.eval_int(key) <= a.m_r:
            raise ConfigurationError(f"[evaluation] {key} outside 1..{a.m_r}")
    for key in ("p", "p_prime"):
        if not 1 <= cfg.eval_int(key) <= a.m_t:
            raise ConfigurationError(f"[evaluation] {key} outside 1..{a.m_t}")
    for q in cfg.antennas():
        if not 1 <= q <= a.m_r:
            raise ConfigurationError(f"antenna {q} outside 1..{a.m_r}")


def with_seed(cfg: ExperimentConfig, master: int) -> ExperimentConfig:
    return replace(cfg, seed=SeedSpec(master, cfg.seed.stream_id))
