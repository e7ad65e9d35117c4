"""Experiment configuration: key=value files, flag overrides, validation.

A config file is plain ``key = value`` lines with ``#`` comments.  Output files
carry their full config as ``# config: key=value`` header lines (or a ``header``
object in JSON), and such a file is itself accepted as a config, so any run can
be repeated from its output.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .acceptance import SuiteConfig, Tolerances
from .potential import InvalidParams, Mode, ModelParams, WellLedger, build_ledger

COMMANDS = ("analyze", "schedule", "verify", "sample", "mcmc", "ctd-demo")
NEEDS_SEED = ("sample", "mcmc", "ctd-demo")
SUITE_KEYS = ("mcmc_sites", "mcmc_sweeps", "mcmc_burn_in", "mcmc_thin", "chain_samples", "d2_side", "d2_sweeps")


class ConfigError(ValueError):
    """Bad configuration; the message names the file/line or field at fault."""


@dataclass
class ExperimentConfig:
    command: str = "analyze"
    epsilon: float = 0.1
    truncation: int = 42
    mode: str = "exact"
    beta: tuple[float, ...] = ()
    schedule: tuple[int, int] | None = None
    dims: tuple[int, ...] = (1000,)
    sweeps: int = 10_000
    burn_in: int = 1000
    thin: int = 10
    seed: int | None = None
    replicas: int = 1
    sampler: str = "auto"
    init: str = "random"
    w_uniform: float = 0.2
    format: str = "csv"
    out: str = "-"
    criteria: tuple[int, ...] = tuple(range(1, 11))
    suite: dict = field(default_factory=dict)
    tol: dict = field(default_factory=dict)

    # -- serialisation -------------------------------------------------------

    def items(self) -> list[tuple[str, str]]:
        """Canonical key/value strings; ``out`` is left out so reruns may write elsewhere."""
        out = []
        for f in fields(self):
            if f.name in ("out", "suite", "tol"):
                continue
            v = getattr(self, f.name)
            if f.name == "schedule" and v is not None:
                out.append((f.name, f"{v[0]}..{v[1]}"))
            elif f.name == "dims":
                out.append((f.name, "x".join(str(d) for d in v)))
            else:
                out.append((f.name, _format_value(v)))
        for k in sorted(self.suite):
            out.append((f"suite.{k}", _format_value(self.suite[k])))
        for k in sorted(self.tol):
            out.append((f"tol.{k}", _format_value(self.tol[k])))
        return out

    # -- derived objects -----------------------------------------------------

    def model_params(self) -> ModelParams:
        return ModelParams(self.epsilon, self.truncation, Mode(self.mode))

    def ledger(self) -> WellLedger:
        return build_ledger(self.model_params())

    def seeds(self) -> tuple[int, ...]:
        return tuple(self.seed + i for i in range(self.replicas))

    def suite_config(self) -> SuiteConfig:
        tol = replace(Tolerances(), **self.tol)
        kw = dict(self.suite)
        if self.seed is not None:
            kw["seed"] = self.seed
        return SuiteConfig(epsilon=self.epsilon, criteria=tuple(self.criteria), tol=tol, **kw)


def _format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, tuple):
        return ",".join(_format_value(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


# ---------------------------------------------------------------------------
# parsing


def _int(s: str) -> int:
    return int(s.replace("_", ""))


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(",") if x.strip())


def _ints(s: str) -> tuple[int, ...]:
    return tuple(_int(x) for x in s.split(",") if x.strip())


def parse_schedule(s: str) -> tuple[int, int] | None:
    s = s.strip()
    if not s:
        return None
    m = re.fullmatch(r"(\d+)\s*(?:\.\.|,|-)\s*(\d+)", s)
    if not m:
        raise ValueError(f"expected n_lo..n_hi, got {s!r}")
    return int(m.group(1)), int(m.group(2))


def parse_dims(s: str) -> tuple[int, ...]:
    parts = re.split(r"[x,]", s.strip())
    return tuple(_int(p) for p in parts if p)


def _optional_int(s: str) -> int | None:
    return _int(s) if s.strip() else None


PARSERS = {
    "command": str,
    "epsilon": float,
    "truncation": _int,
    "mode": str,
    "beta": _floats,
    "schedule": parse_schedule,
    "dims": parse_dims,
    "sweeps": _int,
    "burn_in": _int,
    "thin": _int,
    "seed": _optional_int,
    "replicas": _int,
    "sampler": str,
    "init": str,
    "w_uniform": float,
    "format": str,
    "out": str,
    "criteria": _ints,
}

_TOL_TYPES = {f.name: f.type for f in fields(Tolerances)}


def apply(cfg: ExperimentConfig, key: str, raw: str, where: str = "") -> ExperimentConfig:
    """Set ``key`` from its string form; ``where`` prefixes error messages."""
    key = key.strip().replace("-", "_")
    raw = raw.strip()
    loc = f"{where}: " if where else ""
    try:
        if key.startswith("tol."):
            name = key[4:]
            if name not in _TOL_TYPES:
                raise ConfigError(f"{loc}unknown tolerance {name!r}; known: {', '.join(_TOL_TYPES)}")
            cfg.tol[name] = _int(raw) if _TOL_TYPES[name] in ("int", int) else float(raw)
            return cfg
        if key.startswith("suite."):
            name = key[6:]
            if name not in SUITE_KEYS:
                raise ConfigError(f"{loc}unknown suite setting {name!r}; known: {', '.join(SUITE_KEYS)}")
            cfg.suite[name] = _int(raw)
            return cfg
        if key not in PARSERS:
            raise ConfigError(f"{loc}unknown field {key!r}")
        setattr(cfg, key, PARSERS[key](raw))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{loc}field {key!r}: cannot parse {raw!r} ({exc})") from None
    return cfg


def _header_from_json(text: str) -> list[tuple[str, str]] | None:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        return None
    if isinstance(doc, dict) and isinstance(doc.get("header"), dict):
        return [(k, v) for k, v in doc["header"].get("config", {}).items()]
    return None


def read_config_file(path: str | Path, cfg: ExperimentConfig | None = None) -> ExperimentConfig:
    """Load ``path`` onto ``cfg``; a previous output file is read via its header."""
    cfg = cfg or ExperimentConfig()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    if text.lstrip().startswith("{"):
        pairs = _header_from_json(text)
        if pairs is None:
            raise ConfigError(f"{path}: JSON file has no header.config block")
        for k, v in pairs:
            apply(cfg, k, str(v), f"{path}: header")
        return cfg
    lines = text.splitlines()
    header = [(i, ln) for i, ln in enumerate(lines, 1) if ln.startswith("# config:")]
    if header:
        for i, ln in header:
            k, _, v = ln[len("# config:"):].partition("=")
            apply(cfg, k, v, f"{path}:{i}")
        return cfg
    for i, ln in enumerate(lines, 1):
        s = ln.split("#", 1)[0].strip()
        if not s:
            continue
        if "=" not in s:
            raise ConfigError(f"{path}:{i}: expected key = value, got {ln.strip()!r}")
        k, _, v = s.partition("=")
        apply(cfg, k, v, f"{path}:{i}")
    return cfg


# ---------------------------------------------------------------------------
# validation


def validate(cfg: ExperimentConfig) -> ExperimentConfig:
    """Check every downstream precondition that can be checked without computing."""
    if cfg.command not in COMMANDS:
        raise ConfigError(f"field 'command': unknown command {cfg.command!r}")
    if cfg.mode not in ("exact", "paper"):
        raise ConfigError(f"field 'mode': expected exact or paper, got {cfg.mode!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"field 'format': expected csv or json, got {cfg.format!r}")
    try:
        cfg.model_params()
    except InvalidParams as exc:
        raise ConfigError(f"fields 'epsilon'/'truncation': {exc}") from None
    if any(not b >= 0 or b != b or b == float("inf") for b in cfg.beta):
        raise ConfigError(f"field 'beta': values must be finite and >= 0, got {cfg.beta}")
    if cfg.schedule is not None:
        lo, hi = cfg.schedule
        if not 1 <= lo < hi <= cfg.truncation:
            raise ConfigError(f"field 'schedule': need 1 <= n_lo < n_hi <= truncation={cfg.truncation}, got {lo}..{hi}")
    if cfg.command in NEEDS_SEED and cfg.seed is None:
        raise ConfigError(f"field 'seed': command {cfg.command!r} needs an explicit seed")
    if cfg.seed is not None and not 0 <= cfg.seed < 2**64:
        raise ConfigError(f"field 'seed': must be a 64-bit unsigned integer, got {cfg.seed}")
    if cfg.command in ("analyze",) and not cfg.beta and cfg.schedule is None:
        raise ConfigError("fields 'beta'/'schedule': analyze needs a beta list or a schedule range")
    if cfg.command == "schedule" and cfg.schedule is None:
        raise ConfigError("field 'schedule': schedule needs n_lo..n_hi")
    if cfg.command == "ctd-demo" and cfg.schedule is None:
        raise ConfigError("field 'schedule': ctd-demo needs n_lo..n_hi")
    if cfg.command in ("sample", "mcmc") and len(cfg.beta) != 1:
        raise ConfigError(f"field 'beta': {cfg.command} needs exactly one beta, got {len(cfg.beta)}")
    if cfg.command in ("sample", "mcmc", "ctd-demo"):
        if not 1 <= len(cfg.dims) <= 2 or any(d < 2 for d in cfg.dims):
            raise ConfigError(f"field 'dims': need 1 or 2 sides, each >= 2, got {cfg.dims}")
        if cfg.command == "sample" and len(cfg.dims) != 1:
            raise ConfigError("field 'dims': exact sampling exists only in d = 1")
    if cfg.command in ("mcmc", "ctd-demo"):
        if cfg.sweeps < 1:
            raise ConfigError(f"field 'sweeps': must be >= 1, got {cfg.sweeps}")
        if cfg.thin < 1:
            raise ConfigError(f"field 'thin': must be >= 1, got {cfg.thin}")
        if cfg.command == "mcmc" and not cfg.sweeps > cfg.burn_in >= 0:
            raise ConfigError(f"fields 'sweeps'/'burn_in': need sweeps > burn_in >= 0, got {cfg.sweeps}, {cfg.burn_in}")
        if not 0.0 < cfg.w_uniform <= 1.0:
            raise ConfigError(f"field 'w_uniform': must lie in (0, 1], got {cfg.w_uniform}")
        if cfg.init not in ("random", "aligned", "neel"):
            raise ConfigError(f"field 'init': expected random, aligned or neel, got {cfg.init!r}")
    if cfg.command == "ctd-demo":
        if cfg.sampler not in ("auto", "exact", "mcmc"):
            raise ConfigError(f"field 'sampler': expected auto, exact or mcmc, got {cfg.sampler!r}")
        if cfg.sampler == "exact" and len(cfg.dims) != 1:
            raise ConfigError("field 'sampler': the exact sampler exists only in d = 1")
        if cfg.replicas < 1:
            raise ConfigError(f"field 'replicas': must be >= 1, got {cfg.replicas}")
    if cfg.command == "verify":
        bad = [c for c in cfg.criteria if not 1 <= c <= 10]
        if bad or not cfg.criteria:
            raise ConfigError(f"field 'criteria': expected numbers in 1..10, got {cfg.criteria}")
    return cfg
