"""Flat ``key = value`` run configuration with repeated ``site = (n, q)`` entries."""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .evolution import NormKind, t_max
from .potential import InvalidPotentialError, Potential

GRID_LOG2_RANGE = (8, 16)
ROUTES = ("exact", "spectral", "both")


class ConfigError(ValueError):
    """Malformed configuration; ``line`` is 1-based or None for whole-file problems."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message}")


@dataclass(frozen=True)
class NormSpec:
    kind: NormKind
    sigma: float | None = None

    @property
    def label(self) -> str:
        return self.kind.value if self.sigma is None else f"{self.kind.value}_sigma{self.sigma:g}"

    @classmethod
    def parse(cls, text: str) -> "NormSpec":
        name, _, sig = text.strip().partition(":")
        kind = NormKind.coerce(name.strip())
        if kind is NormKind.L2SIG:
            if not sig:
                raise ValueError(f"norm {name!r} needs a weight, e.g. {name}:0.6")
            return cls(kind, float(sig))
        if sig:
            raise ValueError(f"norm {name!r} takes no weight")
        return cls(kind)


@dataclass(frozen=True)
class RunConfig:
    mass: float
    potential: tuple = ()
    grid_log2: int = 12
    N: int = 400
    t_grid: tuple = (100.0, 3200.0, 12)
    norms: tuple = (NormSpec(NormKind.L1_TO_LINF),)
    output_dir: str = "out"
    route: str = "spectral"
    n_range: tuple = (-8, 8)
    source: str = field(default="", compare=False)

    def potential_obj(self) -> Potential:
        return Potential(self.mass, self.potential)

    def canonical(self) -> str:
        """Order-independent text used for the hash; excludes the output location."""
        sites = ";".join(f"{n}:{q!r}" for n, q in sorted(self.potential))
        norms = ",".join(sorted(s.label for s in self.norms))
        return (f"mass={self.mass!r}|sites={sites}|grid_log2={self.grid_log2}|N={self.N}|"
                f"t_grid={self.t_grid[0]!r},{self.t_grid[1]!r},{self.t_grid[2]}|norms={norms}|"
                f"route={self.route}|n_range={self.n_range[0]},{self.n_range[1]}")

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]

    def with_overrides(self, **kw) -> "RunConfig":
        kw = {k: v for k, v in kw.items() if v is not None}
        cfg = replace(self, **kw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        lo, hi = GRID_LOG2_RANGE
        if not lo <= self.grid_log2 <= hi:
            raise ConfigError(f"grid_log2 must lie in [{lo}, {hi}], got {self.grid_log2}", key="grid_log2")
        if self.route not in ROUTES:
            raise ConfigError(f"route must be one of {ROUTES}, got {self.route!r}", key="route")
        if self.N < 10:
            raise ConfigError("N must be at least 10", key="N")
        t0, t1, pts = self.t_grid
        if not (0 < t0 < t1) or pts < 2:
            raise ConfigError("t_grid needs 0 < t_min < t_max and at least 2 points", key="t_grid")
        if self.n_range[0] > self.n_range[1]:
            raise ConfigError("n_range must be increasing", key="n_range")
        try:
            self.potential_obj()
        except InvalidPotentialError as exc:
            raise ConfigError(str(exc), key="site") from exc

    def exceeds_truncation(self) -> bool:
        return self.route in ("exact", "both") and self.t_grid[1] > t_max(self.N, self.mass)

    def suggested_N(self) -> int:
        """Smallest multiple of 100 whose reflection-free time covers ``t_max``."""
        n = self.N
        while t_max(n, self.mass) < self.t_grid[1]:
            n += 100
        return n


_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_SITE = re.compile(rf"^\(\s*([-+]?\d+)\s*,\s*({_NUM})\s*\)$")
_TRIPLE = re.compile(rf"^\(\s*({_NUM})\s*,\s*({_NUM})\s*,\s*(\d+)\s*\)$")
_PAIR = re.compile(r"^\(\s*([-+]?\d+)\s*,\s*([-+]?\d+)\s*\)$")
KEYS = ("mass", "site", "grid_log2", "N", "t_grid", "norms", "output_dir", "route", "n_range")


def parse_config(text: str, source: str = "<string>") -> RunConfig:
    """Parse the flat format; every error names the line and the offending key."""
    values: dict = {}
    sites: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        try:
            if key == "site":
                m = _SITE.match(value)
                if not m:
                    raise ValueError(f"site must look like (n, q), got {value!r}")
                n, q = int(m.group(1)), float(m.group(2))
                if n in sites:
                    raise ValueError(f"site {n} given twice")
                if q == 1.0:
                    raise ValueError("q = 1 is not allowed")
                sites[n] = q
                continue
            if key in values:
                raise ValueError(f"key {key!r} given twice")
            if key == "mass":
                values[key] = float(value)
                if not values[key] > 0:
                    raise ValueError("mass must be positive")
            elif key in ("grid_log2", "N"):
                values[key] = int(value)
            elif key == "t_grid":
                m = _TRIPLE.match(value)
                if not m:
                    raise ValueError(f"t_grid must look like (t_min, t_max, points), got {value!r}")
                values[key] = (float(m.group(1)), float(m.group(2)), int(m.group(3)))
            elif key == "n_range":
                m = _PAIR.match(value)
                if not m:
                    raise ValueError(f"n_range must look like (n_lo, n_hi), got {value!r}")
                values[key] = (int(m.group(1)), int(m.group(2)))
            elif key == "norms":
                values[key] = tuple(NormSpec.parse(s) for s in value.split(",") if s.strip())
            else:
                values[key] = value
        except ValueError as exc:
            raise ConfigError(f"{key}: {exc}", lineno, key) from exc
    if "mass" not in values:
        raise ConfigError("missing required key 'mass'", key="mass")
    values["potential"] = tuple(sorted((n, q) for n, q in sites.items() if q != 0.0))
    cfg = RunConfig(source=source, **values)
    cfg.validate()
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, str(path))


__all__ = ["ConfigError", "NormSpec", "RunConfig", "load_config", "parse_config"]
