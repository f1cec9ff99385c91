"""Run configuration.

Plain INI with nested-by-name sections: [paths], [walker], [embedder],
[heads.text], [heads.graph], [harness], [synth]. Every field has an
embedded default, so an empty (or absent) file is a complete valid
configuration, and the resolved values are echoed into run manifests.
Validation failures name the offending field as section.field.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .experiment import DEFAULT_SEEDS, DEFAULT_SHOTS
from .sgns import SgnsParams
from .splits import DEFAULT_HOLDOUT_FRAC, DEFAULT_PARTITION_SEED
from .synth import DEFAULT_LABEL_MIX, DEFAULT_TARGETS, SynthParams
from .textenc import DEFAULT_TEXT_DIM
from .walks import WalkParams
from .heads import HeadParams


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class PathsConfig:
    posts: str = ""
    followers: str = ""
    friends: str = ""
    likes: str = ""
    doc_vectors: str = ""
    out: str = "runs/latest"

    def edge_files(self) -> dict[str, str]:
        return {"followers": self.followers, "friends": self.friends,
                "likes": self.likes}


@dataclass(frozen=True)
class HarnessConfig:
    shots: tuple[int, ...] = DEFAULT_SHOTS
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    partition_seed: int = DEFAULT_PARTITION_SEED
    holdout_frac: float = DEFAULT_HOLDOUT_FRAC
    source: str = ""
    dest: str = ""
    text_dim: int = DEFAULT_TEXT_DIM

    def __post_init__(self) -> None:
        if not self.shots or any(s < 1 for s in self.shots):
            raise ValueError("harness.shots: must be a non-empty list of positive ints")
        if not self.seeds:
            raise ValueError("harness.seeds: must be non-empty")
        if len(set(self.seeds)) != len(self.seeds):
            raise ValueError("harness.seeds: duplicate seeds")
        if not 0.0 < self.holdout_frac < 1.0:
            raise ValueError("harness.holdout_frac: must be in (0, 1)")
        if self.text_dim < 16:
            raise ValueError("harness.text_dim: must be >= 16")


@dataclass
class RunConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    walker: WalkParams = field(default_factory=WalkParams)
    embedder: SgnsParams = field(default_factory=SgnsParams)
    text_head: dict = field(default_factory=dict)
    graph_head: dict = field(default_factory=dict)
    harness: HarnessConfig = field(default_factory=HarnessConfig)
    synth: SynthParams = field(default_factory=SynthParams)

    def to_dict(self) -> dict:
        return {
            "paths": asdict(self.paths),
            "walker": asdict(self.walker),
            "embedder": asdict(self.embedder),
            "heads.text": dict(self.text_head),
            "heads.graph": dict(self.graph_head),
            "harness": asdict(self.harness),
            "synth": asdict(self.synth),
        }

    def require_paths(self, *names: str) -> None:
        for name in names:
            value = getattr(self.paths, name)
            if not value:
                raise ConfigError(f"paths.{name}: required for this command")
            if not Path(value).exists():
                raise ConfigError(f"paths.{name}: file not found: {value}")


def _convert(section: str, key: str, raw: str, kind: str):
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "str":
            return raw
        if kind == "int_list":
            return tuple(int(x) for x in raw.replace(",", " ").split())
        if kind == "str_list":
            return tuple(x for x in raw.replace(",", " ").split())
        if kind == "pair_list":
            pairs = []
            for part in raw.split(","):
                a, _, b = part.strip().partition(":")
                pairs.append((int(a), int(b)))
            return tuple(pairs)
    except ValueError:
        pass
    raise ConfigError(f"{section}.{key}: cannot parse {raw!r} as {kind}")


_SCHEMAS: dict[str, dict[str, str]] = {
    "paths": {k: "str" for k in ("posts", "followers", "friends", "likes",
                                 "doc_vectors", "out")},
    "walker": {"p": "float", "q": "float", "walks_per_node": "int",
               "walk_length": "int", "seed": "int", "mode": "str",
               "workers": "int", "max_table_entries": "int",
               "lazy_cache_size": "int"},
    "embedder": {"dim": "int", "window": "int", "negatives": "int",
                 "lr": "float", "min_lr": "float", "epochs": "int",
                 "power": "float", "seed": "int", "workers": "int"},
    "heads.text": {"hidden": "int", "lr": "float", "optimizer": "str",
                   "epochs": "int", "batch_size": "int", "dropout": "float",
                   "weight_decay": "float", "beta1": "float", "beta2": "float",
                   "eps": "float"},
    "heads.graph": {"hidden": "int", "lr": "float", "optimizer": "str",
                    "epochs": "int", "batch_size": "int", "dropout": "float",
                    "weight_decay": "float", "beta1": "float", "beta2": "float",
                    "eps": "float"},
    "harness": {"shots": "int_list", "seeds": "int_list",
                "partition_seed": "int", "holdout_frac": "float",
                "source": "str", "dest": "str", "text_dim": "int"},
    "synth": {"n_users": "int", "n_posts": "int", "targets": "str_list",
              "label_mix": "pair_list", "mean_degree": "float",
              "homophily": "float", "signal_rate": "float",
              "fillers_per_post": "int", "seed": "int"},
}


def _section_values(parser: configparser.ConfigParser, section: str) -> dict:
    if not parser.has_section(section):
        return {}
    schema = _SCHEMAS[section]
    values = {}
    for key, raw in parser.items(section):
        if key not in schema:
            raise ConfigError(f"{section}.{key}: unknown field")
        values[key] = _convert(section, key, raw, schema[key])
    return values


def _probe_heads(section: str, overrides: dict) -> None:
    try:
        HeadParams(input_dim=8, **overrides)
    except TypeError as e:
        raise ConfigError(f"{section}: {e}") from None
    except ValueError as e:
        raise ConfigError(str(e).replace("heads.", section + ".", 1)) from None


def load_config(path: str | Path | None = None) -> RunConfig:
    """Parse and validate a config file; None gives all defaults."""
    parser = configparser.ConfigParser(interpolation=None)
    if path is not None:
        if not Path(path).exists():
            raise ConfigError(f"config file not found: {path}")
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    for section in parser.sections():
        if section not in _SCHEMAS:
            raise ConfigError(f"unknown config section [{section}]")
    try:
        cfg = RunConfig(
            paths=PathsConfig(**_section_values(parser, "paths")),
            walker=WalkParams(**_section_values(parser, "walker")),
            embedder=SgnsParams(**_section_values(parser, "embedder")),
            text_head=_section_values(parser, "heads.text"),
            graph_head=_section_values(parser, "heads.graph"),
            harness=HarnessConfig(**_section_values(parser, "harness")),
            synth=SynthParams(**_section_values(parser, "synth")),
        )
    except ValueError as e:
        raise ConfigError(str(e)) from None
    _probe_heads("heads.text", cfg.text_head)
    _probe_heads("heads.graph", cfg.graph_head)
    return cfg
