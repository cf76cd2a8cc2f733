"""Experiment configuration: defaults, validation, and key=value loading.

Every tunable lives here so sweeps touch a single surface.  Keys use the
dotted names accepted in config files (``eb.if``, ``auction.cp``, ...).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

APPROACHES = ("eb", "coop", "comp", "dauction")
HURRY_FUNCTIONS = ("lin", "log", "gro")
SPREAD_FUNCTIONS = ("std", "dbl", "rbl")
CROSSING_POLICIES = ("owp", "avp")
BIDDING = ("balanced", "random")
SPONSORSHIP_LEVELS = (0, 25, 50, 75)
ROUTE_POLICIES = ("s", "r")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EngineConfig:
    width: int = 5
    height: int = 5
    edge_length: float = 100.0
    route_length: int = 12
    routes: str = "r"
    v_max: float = 13.89
    vehicle_length: float = 5.0
    min_gap: float = 2.5
    t_cross: int = 3
    approach_radius: float = 50.0
    wait_speed_threshold: float = 0.1

    def validate(self) -> None:
        if self.width < 2 or self.height < 2:
            raise ConfigError(f"grid must be at least 2x2, got {self.width}x{self.height}")
        for name in ("edge_length", "v_max", "vehicle_length", "approach_radius"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.min_gap < 0 or self.wait_speed_threshold < 0:
            raise ConfigError("min_gap and wait_speed_threshold must be non-negative")
        if self.route_length < 1:
            raise ConfigError("route_length must be >= 1")
        if self.t_cross < 1:
            raise ConfigError("tcross must be >= 1 step")
        if self.routes not in ROUTE_POLICIES:
            raise ConfigError(f"routes must be one of {ROUTE_POLICIES}, got {self.routes!r}")
        if self.vehicle_length + self.min_gap > self.edge_length:
            raise ConfigError("edge too short to hold a single vehicle")


@dataclass(frozen=True)
class EbConfig:
    inc_fn: str = "lin"
    dec_fn: str = "gro"
    spread_fn: str = "std"
    ic: float = 10.0
    dc: float = 10.0
    sr: float = 100.0
    dm: float = 10.0
    platoon_eps: float = 0.5

    def validate(self) -> None:
        if self.inc_fn not in HURRY_FUNCTIONS or self.dec_fn not in HURRY_FUNCTIONS:
            raise ConfigError(f"eb.if/eb.df must be one of {HURRY_FUNCTIONS}")
        if self.spread_fn not in SPREAD_FUNCTIONS:
            raise ConfigError(f"eb.spread must be one of {SPREAD_FUNCTIONS}")
        for name in ("ic", "dc", "sr", "dm"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"eb.{name} must be positive")
        if self.platoon_eps < 0:
            raise ConfigError("eb.platoon_eps must be non-negative")


@dataclass(frozen=True)
class AuctionConfig:
    cp: str = "avp"
    mca: int = 2
    enhancement: bool = False
    bidding: str = "random"
    sponsorship: int = 0
    budget: float = 100.0
    auction_steps: int = 1

    def validate(self, variant: str) -> None:
        if self.cp not in CROSSING_POLICIES:
            raise ConfigError(f"auction.cp must be one of {CROSSING_POLICIES}")
        if self.mca < 1:
            raise ConfigError("auction.mca must be >= 1")
        if self.bidding not in BIDDING:
            raise ConfigError(f"auction.bidding must be one of {BIDDING}")
        if self.sponsorship not in SPONSORSHIP_LEVELS:
            raise ConfigError(
                f"auction.sponsorship must be one of {SPONSORSHIP_LEVELS}, got {self.sponsorship}")
        if variant == "coop" and self.sponsorship != 0:
            raise ConfigError("sponsorship is only available in the competitive variant")
        if self.budget < 0:
            raise ConfigError("auction.budget must be non-negative")
        if self.auction_steps < 0:
            raise ConfigError("auction.auction_steps must be >= 0")


@dataclass(frozen=True)
class DAuctionConfig:
    bidding: str = "random"
    radius: float | None = None  # None: same as the engine approach radius
    budget: float = 100.0
    skip_absent_head: bool = False

    def validate(self) -> None:
        if self.bidding not in BIDDING:
            raise ConfigError(f"dauction.bidding must be one of {BIDDING}")
        if self.radius is not None and not self.radius > 0:
            raise ConfigError("dauction.radius must be positive")
        if self.budget < 0:
            raise ConfigError("dauction.budget must be non-negative")


@dataclass(frozen=True)
class ExperimentConfig:
    approach: str = "eb"
    vehicles: int = 100
    steps: int = 10000
    runs: int = 10
    seed: int = 0
    out: str | None = None
    jobs: int = 1
    engine: EngineConfig = field(default_factory=EngineConfig)
    eb: EbConfig = field(default_factory=EbConfig)
    auction: AuctionConfig = field(default_factory=AuctionConfig)
    dauction: DAuctionConfig = field(default_factory=DAuctionConfig)

    def validate(self) -> "ExperimentConfig":
        if self.approach not in APPROACHES:
            raise ConfigError(f"approach must be one of {APPROACHES}, got {self.approach!r}")
        if self.vehicles < 1:
            raise ConfigError("vehicles must be >= 1")
        if self.steps < 0 or self.runs < 1 or self.jobs < 1:
            raise ConfigError("steps must be >= 0, runs and jobs >= 1")
        self.engine.validate()
        self.eb.validate()
        self.auction.validate(self.approach)
        self.dauction.validate()
        return self


def _to_bool(text: str) -> bool:
    t = str(text).strip().lower()
    if t in ("y", "yes", "true", "1", "on"):
        return True
    if t in ("n", "no", "false", "0", "off"):
        return False
    raise ConfigError(f"expected y/n, got {text!r}")


def _grid(text: str) -> tuple[int, int]:
    try:
        w, h = str(text).lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise ConfigError(f"grid must look like WxH, got {text!r}") from None


def _lower(text: str) -> str:
    return str(text).strip().lower()


# dotted key -> (section, field, parser)
KEYS: dict[str, tuple[str | None, str, object]] = {
    "approach": (None, "approach", _lower),
    "vehicles": (None, "vehicles", int),
    "steps": (None, "steps", int),
    "runs": (None, "runs", int),
    "seed": (None, "seed", int),
    "out": (None, "out", str),
    "jobs": (None, "jobs", int),
    "grid": ("engine", "grid", _grid),
    "edge_length": ("engine", "edge_length", float),
    "route_length": ("engine", "route_length", int),
    "routes": ("engine", "routes", _lower),
    "vmax": ("engine", "v_max", float),
    "vehicle_length": ("engine", "vehicle_length", float),
    "min_gap": ("engine", "min_gap", float),
    "tcross": ("engine", "t_cross", int),
    "approach_radius": ("engine", "approach_radius", float),
    "wait_threshold": ("engine", "wait_speed_threshold", float),
    "eb.if": ("eb", "inc_fn", _lower),
    "eb.df": ("eb", "dec_fn", _lower),
    "eb.spread": ("eb", "spread_fn", _lower),
    "eb.ic": ("eb", "ic", float),
    "eb.dc": ("eb", "dc", float),
    "eb.sr": ("eb", "sr", float),
    "eb.dm": ("eb", "dm", float),
    "eb.platoon_eps": ("eb", "platoon_eps", float),
    "auction.variant": (None, "approach", _lower),
    "auction.cp": ("auction", "cp", _lower),
    "auction.mca": ("auction", "mca", int),
    "auction.enhancement": ("auction", "enhancement", _to_bool),
    "auction.bidding": ("auction", "bidding", _lower),
    "auction.sponsorship": ("auction", "sponsorship", int),
    "auction.budget": ("auction", "budget", float),
    "auction.auction_steps": ("auction", "auction_steps", int),
    "dauction.bidding": ("dauction", "bidding", _lower),
    "dauction.radius": ("dauction", "radius", float),
    "dauction.budget": ("dauction", "budget", float),
    "dauction.skip_absent_head": ("dauction", "skip_absent_head", _to_bool),
}


def apply_overrides(cfg: ExperimentConfig, values: dict[str, str]) -> ExperimentConfig:
    """Return ``cfg`` with dotted-key string values parsed and applied."""
    sections: dict[str, dict] = {"engine": {}, "eb": {}, "auction": {}, "dauction": {}}
    top: dict = {}
    for key, raw in values.items():
        key = key.strip().replace("-", "_")
        if key not in KEYS:
            raise ConfigError(f"unknown configuration key {key!r}")
        section, name, parse = KEYS[key]
        try:
            value = parse(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid value for {key}: {raw!r} ({exc})") from None
        if section is None:
            top[name] = value
        elif name == "grid":
            sections["engine"]["width"], sections["engine"]["height"] = value
        else:
            sections[section][name] = value
    return replace(
        cfg,
        **top,
        engine=replace(cfg.engine, **sections["engine"]),
        eb=replace(cfg.eb, **sections["eb"]),
        auction=replace(cfg.auction, **sections["auction"]),
        dauction=replace(cfg.dauction, **sections["dauction"]),
    )


def read_config_file(path: str | Path) -> dict[str, str]:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    return values

