"""Flat key=value experiment configuration.

A config file holds one ``key = value`` pair per line ('#' comments and
blank lines allowed).  CLI flags override file values, which override
the documented defaults.  The same schema backs every subcommand.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .auction import ValuationDistribution
from .errors import InputError
from .network import NetConfig
from .sim import WorldConfig


def _parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InputError(f"expected an integer, got {text!r}") from None


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InputError(f"expected a number, got {text!r}") from None


def _parse_str(text: str) -> str:
    return text


@dataclass(frozen=True)
class _Key:
    parse: object
    default: object
    help: str


SCHEMA: dict[str, _Key] = {
    # market
    "n_bidders": _Key(_parse_int, 5, "number of bidders / devices"),
    "dist_lower": _Key(_parse_float, 0.5, "valuation support lower bound"),
    "dist_upper": _Key(_parse_float, 1.0, "valuation support upper bound"),
    # network and training
    "groups": _Key(_parse_int, 5, "max-min groups per bidder"),
    "linear_units": _Key(_parse_int, 3, "affine pieces per group"),
    "kappa": _Key(_parse_float, 100.0, "softmax temperature"),
    "learning_rate": _Key(_parse_float, 0.35, "gradient-descent step size"),
    "batch_size": _Key(_parse_int, 768, "training batch size"),
    "iterations": _Key(_parse_int, 500, "training iterations"),
    "convergence_tol": _Key(_parse_float, 0.0, "early-stop loss range over 20 iterations (0 disables)"),
    "seed": _Key(_parse_int, 0, "master RNG seed"),
    # experiments
    "cases": _Key(_parse_int, 300, "number of revenue-gap cases"),
    "out": _Key(_parse_str, None, "primary output path"),
    # world
    "n_devices": _Key(_parse_int, 5, "devices in the simulated world"),
    "area_width": _Key(_parse_float, 1000.0, "world width in meters"),
    "area_height": _Key(_parse_float, 1000.0, "world height in meters"),
    "image_rows": _Key(_parse_int, 16, "image height in pixels"),
    "image_cols": _Key(_parse_int, 16, "image width in pixels"),
    "pile_size": _Key(_parse_int, 3, "images per pile"),
    "battery": _Key(_parse_float, 2500.0, "battery budget in meters of flight"),
    "uav_x": _Key(_parse_float, 500.0, "collector start x"),
    "uav_y": _Key(_parse_float, 500.0, "collector start y"),
    "max_rounds": _Key(_parse_int, 40, "episode round cap"),
    "similarity_aggregate": _Key(_parse_str, "mean", "pile similarity aggregation: mean or min"),
    "valuation_rule": _Key(_parse_str, "product", "raw valuation rule: product or proximity"),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Typed bundle the CLI commands run from."""

    net: NetConfig
    distribution: ValuationDistribution
    cases: int
    out: str | None
    world: WorldConfig


def read_config_file(path) -> dict[str, str]:
    """Parse a flat key=value file into raw strings, validating the keys."""
    raw: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, value = stripped.partition("=")
        if not sep:
            raise InputError(f"{path}:{lineno}: expected 'key = value', got {stripped!r}")
        key = key.strip()
        value = value.strip()
        if key not in SCHEMA:
            raise InputError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise InputError(f"{path}:{lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


def build_config(config_path=None, overrides: dict[str, str] | None = None) -> ExperimentConfig:
    """Merge defaults, an optional config file, and CLI overrides."""
    values = {name: key.default for name, key in SCHEMA.items()}
    if config_path is not None:
        for name, text in read_config_file(config_path).items():
            values[name] = SCHEMA[name].parse(text)
    for name, text in (overrides or {}).items():
        if name not in SCHEMA:
            raise InputError(f"unknown configuration key {name!r}")
        if text is not None:
            values[name] = SCHEMA[name].parse(text) if isinstance(text, str) else text

    if values["cases"] < 1:
        raise InputError("cases must be at least 1")
    distribution = ValuationDistribution(values["dist_lower"], values["dist_upper"])
    net = NetConfig(
        n_bidders=values["n_bidders"],
        groups=values["groups"],
        linear_units=values["linear_units"],
        kappa=values["kappa"],
        learning_rate=values["learning_rate"],
        batch_size=values["batch_size"],
        iterations=values["iterations"],
        seed=values["seed"],
        convergence_tol=values["convergence_tol"],
    )
    world = WorldConfig(
        n_devices=values["n_devices"],
        area_width=values["area_width"],
        area_height=values["area_height"],
        image_rows=values["image_rows"],
        image_cols=values["image_cols"],
        pile_size=values["pile_size"],
        battery=values["battery"],
        uav_x=values["uav_x"],
        uav_y=values["uav_y"],
        seed=values["seed"],
        distribution=distribution,
        similarity_aggregate=values["similarity_aggregate"],
        valuation_rule=values["valuation_rule"],
        max_rounds=values["max_rounds"],
    )
    return ExperimentConfig(net=net, distribution=distribution, cases=values["cases"],
                            out=values["out"], world=world)
