"""Round-based aerial data-collection simulator.

Each round every ground device prices its data from the collector's
current distance and the redundancy of its image pile against the last
pile collected, one auction (learned or second-price) picks a winner,
and the collector relocates to the winner, pays battery in meters flown,
swaps the winner's pile in as the new reference, and the device captures
a fresh pile.  Imagery comes from a seeded smooth value-noise field over
the area, so nearby devices see correlated scenes.

All randomness derives from ``WorldConfig.seed`` through fixed
sub-stream tags, so an episode replays bitwise from its seed.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .auction import AuctionOutcome, ValuationDistribution, ValuationProfile, spa_clear
from .errors import DegenerateProfileError, EpisodeExhaustedError, InputError
from .network import MonotoneNetParams, clear_hard
from .valuation import (ImagePile, Position, distance, normalize_profile, pile_similarity,
                        valuation_score)

# Sub-stream tags for seed derivation; changing these changes every world.
_TAG_PLACEMENT = 0
_TAG_FIELD = 1
_TAG_PILE = 2
_TAG_SENTINEL = 3
_TAG_REGEN = 4

_LATTICE_N = 17
_CELL_METERS = 120.0
_PIXEL_METERS = 3.0
_IMAGE_JITTER_METERS = 6.0
_PIXEL_NOISE = 0.02


@dataclass(frozen=True)
class WorldConfig:
    """World geometry, imaging, energy, and market parameters."""

    n_devices: int = 5
    area_width: float = 1000.0
    area_height: float = 1000.0
    image_rows: int = 16
    image_cols: int = 16
    pile_size: int = 3
    battery: float = 2500.0
    uav_x: float = 500.0
    uav_y: float = 500.0
    seed: int = 0
    distribution: ValuationDistribution = field(
        default_factory=lambda: ValuationDistribution(0.5, 1.0))
    similarity_aggregate: str = "mean"
    valuation_rule: str = "product"
    max_rounds: int = 40

    def __post_init__(self):
        if self.n_devices < 2:
            raise InputError("a market needs at least two devices")
        if self.area_width <= 0.0 or self.area_height <= 0.0:
            raise InputError("area dimensions must be positive")
        if self.image_rows < 1 or self.image_cols < 1:
            raise InputError("image dimensions must be at least 1x1")
        if self.pile_size < 1:
            raise InputError("pile_size must be at least 1")
        if np.isnan(self.battery) or self.battery < 0.0:
            raise InputError("battery must be non-negative")
        if self.seed < 0:
            raise InputError("seed must be a non-negative integer")
        if self.distribution.lower < 0.0:
            raise InputError("simulation needs a non-negative valuation support")
        if self.similarity_aggregate not in ("mean", "min"):
            raise InputError("similarity_aggregate must be 'mean' or 'min'")
        if self.valuation_rule not in ("product", "proximity"):
            raise InputError("valuation_rule must be 'product' or 'proximity'")
        if self.max_rounds < 1:
            raise InputError("max_rounds must be at least 1")


@dataclass
class Device:
    """Ground device: identifier, fixed position, current image pile."""

    id: int
    position: Position
    pile: ImagePile


@dataclass
class WorldState:
    """Mutable episode state advanced by :func:`step`."""

    config: WorldConfig
    uav_position: Position
    battery: float
    devices: list[Device]
    last_collected: ImagePile
    round: int = 0
    rng_seed: int = 0


@dataclass(frozen=True)
class RoundRecord:
    """Everything one auction round decided."""

    round: int
    valuations: ValuationProfile
    mechanism: str
    outcome: AuctionOutcome
    uav_moved_to: Position | None
    distance_flown: float


@dataclass(frozen=True)
class SecondPriceMechanism:
    """Truthful baseline: clear the normalized valuations by second price."""

    name: str = field(default="spa", init=False)

    def clear(self, values) -> AuctionOutcome:
        return spa_clear(values)


@dataclass(frozen=True)
class LearnedMechanism:
    """Clear with a trained monotone-net auction."""

    params: MonotoneNetParams
    name: str = field(default="dla", init=False)

    def clear(self, values) -> AuctionOutcome:
        return clear_hard(self.params, values)


class _NoiseField:
    """Seeded value noise: bilinear smoothstep interpolation of a lattice."""

    def __init__(self, seed: int):
        rng = np.random.default_rng([seed, _TAG_FIELD])
        self.lattice = rng.random((_LATTICE_N, _LATTICE_N))

    def sample(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        u = np.asarray(xs, dtype=float) / _CELL_METERS
        v = np.asarray(ys, dtype=float) / _CELL_METERS
        i0 = np.floor(u).astype(int)
        j0 = np.floor(v).astype(int)
        fu = u - i0
        fv = v - j0
        fu = fu * fu * (3.0 - 2.0 * fu)
        fv = fv * fv * (3.0 - 2.0 * fv)
        i0 %= _LATTICE_N
        j0 %= _LATTICE_N
        i1 = (i0 + 1) % _LATTICE_N
        j1 = (j0 + 1) % _LATTICE_N
        lat = self.lattice
        top = lat[i0, j0] * (1.0 - fu) + lat[i1, j0] * fu
        bottom = lat[i0, j1] * (1.0 - fu) + lat[i1, j1] * fu
        return top * (1.0 - fv) + bottom * fv


def _capture_pile(field_: _NoiseField, rng: np.random.Generator, pos: Position,
                  config: WorldConfig) -> ImagePile:
    """Sample a pile at ``pos``: jittered field windows plus sensor noise."""
    rows, cols = config.image_rows, config.image_cols
    gx = pos.x + (np.arange(cols) - cols / 2.0) * _PIXEL_METERS
    gy = pos.y + (np.arange(rows) - rows / 2.0) * _PIXEL_METERS
    images = []
    for _ in range(config.pile_size):
        ox, oy = rng.uniform(-_IMAGE_JITTER_METERS, _IMAGE_JITTER_METERS, 2)
        mesh_x, mesh_y = np.meshgrid(gx + ox, gy + oy)
        img = field_.sample(mesh_x, mesh_y) + rng.normal(0.0, _PIXEL_NOISE, (rows, cols))
        images.append(np.clip(img, 0.0, 1.0))
    return ImagePile(np.stack(images))


def generate_world(config: WorldConfig) -> WorldState:
    """Place devices uniformly at random and capture their initial piles.

    The collector starts with a sentinel reference pile captured at its
    own start position, so round one already has a meaningful redundancy
    signal.  Deterministic for a given ``config.seed``.
    """
    field_ = _NoiseField(config.seed)
    placement = np.random.default_rng([config.seed, _TAG_PLACEMENT])
    xy = placement.random((config.n_devices, 2))
    xy[:, 0] *= config.area_width
    xy[:, 1] *= config.area_height

    devices = []
    for idx in range(config.n_devices):
        pos = Position(float(xy[idx, 0]), float(xy[idx, 1]))
        pile_rng = np.random.default_rng([config.seed, _TAG_PILE, idx])
        devices.append(Device(idx, pos, _capture_pile(field_, pile_rng, pos, config)))

    start = Position(config.uav_x, config.uav_y)
    sentinel_rng = np.random.default_rng([config.seed, _TAG_SENTINEL])
    sentinel = _capture_pile(field_, sentinel_rng, start, config)
    return WorldState(config=config, uav_position=start, battery=float(config.battery),
                      devices=devices, last_collected=sentinel, rng_seed=config.seed)


def form_valuations(state: WorldState) -> ValuationProfile:
    """Score every device and normalize onto the market support.

    A zero-spread round (for example, identical piles everywhere) falls
    back to midpoint valuations for every device.
    """
    config = state.config
    raws = []
    for device in state.devices:
        d = distance(state.uav_position, device.position)
        s = pile_similarity(device.pile, state.last_collected, config.similarity_aggregate)
        raws.append(valuation_score(s, d, config.valuation_rule))
    try:
        return normalize_profile(raws, config.distribution)
    except DegenerateProfileError:
        mid = config.distribution.midpoint
        return ValuationProfile(np.full(len(raws), mid), config.distribution)


def step(state: WorldState, mechanism) -> tuple[WorldState, RoundRecord]:
    """Run one auction round and advance the world in place.

    A winning round flies the collector to the winner (battery floors at
    zero on the final hop), installs the collected pile as the new
    reference, and recaptures the winner's pile.  A no-sale round leaves
    the collector and battery untouched.  The round counter advances
    either way.
    """
    if state.battery <= 0.0:
        raise EpisodeExhaustedError(f"battery empty before round {state.round}")
    profile = form_valuations(state)
    outcome = mechanism.clear(profile.values)

    moved_to = None
    flown = 0.0
    if outcome.winner is not None:
        device = state.devices[outcome.winner]
        flown = distance(state.uav_position, device.position)
        state.uav_position = device.position
        state.battery = max(0.0, state.battery - flown)
        state.last_collected = device.pile
        field_ = _NoiseField(state.rng_seed)
        regen = np.random.default_rng([state.rng_seed, _TAG_REGEN, state.round, device.id])
        device.pile = _capture_pile(field_, regen, device.position, state.config)
        moved_to = device.position

    record = RoundRecord(round=state.round, valuations=profile, mechanism=mechanism.name,
                         outcome=outcome, uav_moved_to=moved_to, distance_flown=flown)
    state.round += 1
    return state, record


def run_episode(state: WorldState, mechanism, max_rounds: int) -> list[RoundRecord]:
    """Step until the battery is exhausted or ``max_rounds`` rounds ran.

    Starting with an empty battery is an error; exhausting it mid-episode
    simply ends the episode after the exhausting round.
    """
    if max_rounds < 1:
        raise InputError("max_rounds must be at least 1")
    if state.battery <= 0.0:
        raise EpisodeExhaustedError(f"battery empty before round {state.round}")
    records: list[RoundRecord] = []
    while len(records) < max_rounds and state.battery > 0.0:
        _, record = step(state, mechanism)
        records.append(record)
    return records


EPISODE_CSV_COLUMNS = ("round", "mechanism", "winner", "payment", "revenue",
                       "uav_x", "uav_y", "battery", "distance_flown")


def _walk_rounds(records, start_position: Position, start_battery: float):
    """Reconstruct post-round position and battery alongside each record."""
    position = start_position
    battery = start_battery
    for record in records:
        if record.uav_moved_to is not None:
            position = record.uav_moved_to
            battery = max(0.0, battery - record.distance_flown)
        yield record, position, battery


def write_episode_csv(path, records, start_position: Position, start_battery: float) -> None:
    """One row per round: outcome plus post-round collector position and battery."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(EPISODE_CSV_COLUMNS)
        for record, position, battery in _walk_rounds(records, start_position, start_battery):
            outcome = record.outcome
            winner = -1 if outcome.winner is None else outcome.winner
            writer.writerow([record.round, record.mechanism, winner,
                             repr(float(outcome.payment)), repr(float(outcome.revenue)),
                             repr(position.x), repr(position.y), repr(battery),
                             repr(float(record.distance_flown))])


def write_episode_events(path, records, start_position: Position, start_battery: float) -> None:
    """Newline-delimited JSON event stream carrying enough detail to replay."""
    lines = []
    for record, position, battery in _walk_rounds(records, start_position, start_battery):
        outcome = record.outcome
        lines.append(json.dumps({
            "round": record.round,
            "mechanism": record.mechanism,
            "valuations": [float(v) for v in record.valuations.values],
            "winner": outcome.winner,
            "payment": float(outcome.payment),
            "revenue": float(outcome.revenue),
            "allocation": [float(a) for a in outcome.allocation],
            "uav": [position.x, position.y],
            "battery": battery,
            "distance_flown": float(record.distance_flown),
        }, separators=(",", ":")))
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
