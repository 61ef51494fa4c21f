"""Versioned text checkpoints for monotone-net parameters.

Layout (UTF-8, line oriented, also described in the README):

    myerson-airnet checkpoint v1
    n_bidders <int>
    groups <int>
    linear_units <int>
    kappa <float>
    theta
    <n_bidders lines, each groups*linear_units floats, row-major over (group, unit)>
    beta
    <n_bidders lines, same layout>

Floats are written with 17 significant digits, which round-trips IEEE
doubles exactly, so save/load is bitwise faithful.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import CheckpointError, CheckpointShapeError, CheckpointVersionError
from .network import MonotoneNetParams, NetConfig

FORMAT_MAGIC = "myerson-airnet checkpoint"
FORMAT_VERSION = 1


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_params(params: MonotoneNetParams, path) -> None:
    lines = [
        f"{FORMAT_MAGIC} v{FORMAT_VERSION}",
        f"n_bidders {params.n_bidders}",
        f"groups {params.groups}",
        f"linear_units {params.linear_units}",
        f"kappa {_fmt(params.kappa)}",
    ]
    for name, array in (("theta", params.theta), ("beta", params.beta)):
        lines.append(name)
        for bidder in range(params.n_bidders):
            lines.append(" ".join(_fmt(x) for x in array[bidder].ravel()))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_int(value: str, name: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise CheckpointError(f"bad {name} value {value!r}") from None


def _next_line(lines: list[str], cursor: int, what: str) -> tuple[str, int]:
    if cursor >= len(lines):
        raise CheckpointError(f"truncated checkpoint: missing {what}")
    return lines[cursor], cursor + 1


def load_params(path, expect: NetConfig | None = None) -> MonotoneNetParams:
    """Parse a checkpoint; optionally verify dimensions against a config."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise CheckpointError(f"{path} is not a text checkpoint") from None
    lines = [line.rstrip("\n") for line in text.splitlines()]
    cursor = 0

    header, cursor = _next_line(lines, cursor, "header")
    if not header.startswith(FORMAT_MAGIC + " "):
        raise CheckpointError(f"{path} is not a {FORMAT_MAGIC} file")
    version_token = header[len(FORMAT_MAGIC) + 1:].strip()
    if not version_token.startswith("v"):
        raise CheckpointError(f"malformed version token {version_token!r}")
    version = _parse_int(version_token[1:], "version")
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(
            f"checkpoint version {version} unsupported (expected {FORMAT_VERSION})")

    dims = {}
    for name in ("n_bidders", "groups", "linear_units"):
        line, cursor = _next_line(lines, cursor, name)
        key, _, value = line.partition(" ")
        if key != name:
            raise CheckpointError(f"expected {name!r} line, found {line!r}")
        dims[name] = _parse_int(value.strip(), name)
        if dims[name] < 1:
            raise CheckpointError(f"{name} must be positive, got {dims[name]}")

    line, cursor = _next_line(lines, cursor, "kappa")
    key, _, value = line.partition(" ")
    if key != "kappa":
        raise CheckpointError(f"expected 'kappa' line, found {line!r}")
    try:
        kappa = float(value.strip())
    except ValueError:
        raise CheckpointError(f"bad kappa value {value!r}") from None

    n, k, j = dims["n_bidders"], dims["groups"], dims["linear_units"]
    arrays = {}
    for name in ("theta", "beta"):
        marker, cursor = _next_line(lines, cursor, f"{name} marker")
        if marker.strip() != name:
            raise CheckpointError(f"expected {name!r} marker, found {marker!r}")
        rows = []
        for bidder in range(n):
            line, cursor = _next_line(lines, cursor, f"{name} row {bidder}")
            try:
                row = np.array([float(tok) for tok in line.split()], dtype=float)
            except ValueError:
                raise CheckpointError(f"non-numeric {name} row {bidder}") from None
            if row.size != k * j:
                raise CheckpointError(
                    f"{name} row {bidder} has {row.size} values, expected {k * j}")
            rows.append(row.reshape(k, j))
        arrays[name] = np.stack(rows)

    if any(line.strip() for line in lines[cursor:]):
        raise CheckpointError("trailing content after beta rows")

    if expect is not None:
        expected = (expect.n_bidders, expect.groups, expect.linear_units)
        if (n, k, j) != expected:
            raise CheckpointShapeError(
                f"checkpoint dimensions {(n, k, j)} do not match configured {expected}")

    return MonotoneNetParams(arrays["theta"], arrays["beta"], kappa)
