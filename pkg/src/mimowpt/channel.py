"""I.i.d. Rayleigh MIMO channels with path loss and reproducible seeding.

Every random stream in the package comes from :func:`make_rng`: a Philox
counter-based generator keyed by a tuple of non-negative integers through
:class:`numpy.random.SeedSequence`. A channel realization is keyed by
``(seed, realization_index)``, so realizations can be drawn in any order or
in parallel and are bit-identical across runs. Complex Gaussians are drawn
with the Box-Muller transform on the generator's uniform stream.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, InvalidInputError

__all__ = [
    "ChannelConfig",
    "ChannelParseError",
    "make_rng",
    "cscg",
    "dbm_to_watts",
    "watts_to_dbm",
    "transmit_power_watts",
    "generate_channel",
    "write_channel_csv",
    "read_channel_csv",
]


class ChannelParseError(InvalidInputError):
    """Malformed channel CSV. ``line`` and ``column`` are 1-based."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def make_rng(*keys: int) -> np.random.Generator:
    """Philox generator keyed by the integer tuple ``keys``."""
    if any(int(k) < 0 for k in keys):
        raise InvalidInputError("rng keys must be non-negative integers")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in keys])))


def cscg(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly symmetric complex Gaussian samples via Box-Muller.

    Real and imaginary parts are independent with variance ``variance / 2``.
    """
    shape = tuple(int(n) for n in np.atleast_1d(shape))
    u1 = 1.0 - rng.random(shape)  # (0, 1], keeps log finite
    u2 = rng.random(shape)
    radius = np.sqrt(-np.log(u1) * variance)
    return radius * np.exp(2j * np.pi * u2)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        return float("-inf")
    return float(10.0 * np.log10(watts) + 30.0)


@dataclass(frozen=True)
class ChannelConfig:
    """Array sizes, large-scale calibration and master seed."""

    m_tx: int
    q_rx: int
    path_loss_db: float = 66.0
    transmit_power_dbm: float = 36.0
    seed: int = 0

    def __post_init__(self):
        if int(self.m_tx) < 1 or int(self.q_rx) < 1:
            raise ConfigurationError("m_tx and q_rx must be at least 1")
        if int(self.seed) < 0 or int(self.seed) >= 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")

    @property
    def variance(self) -> float:
        """Per-entry channel variance ``10**(-PL/10)``."""
        return 10.0 ** (-self.path_loss_db / 10.0)


def transmit_power_watts(cfg: ChannelConfig) -> float:
    return dbm_to_watts(cfg.transmit_power_dbm)


def generate_channel(cfg: ChannelConfig, realization_index: int) -> np.ndarray:
    """Q x M channel matrix for one realization; pure in ``(cfg, index)``."""
    rng = make_rng(cfg.seed, realization_index)
    return cscg(rng, (cfg.q_rx, cfg.m_tx), cfg.variance)


def write_channel_csv(H, path) -> None:
    """Write ``H`` as CSV, one row per receive antenna, columns re,im,re,im,..."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in H:
            fields = []
            for z in row:
                fields.extend((repr(float(z.real)), repr(float(z.imag))))
            writer.writerow(fields)


def read_channel_csv(path) -> np.ndarray:
    """Parse a channel written by :func:`write_channel_csv`.

    Blank lines and lines starting with ``#`` are skipped.

    Raises
    ------
    ChannelParseError
        On a non-numeric field, an odd column count, ragged rows, or an
        empty file.
    """
    rows = []
    width = None
    text = Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = next(csv.reader([stripped]))
        if len(fields) % 2:
            raise ChannelParseError("odd number of columns (need re,im pairs)", lineno, len(fields))
        values = []
        for col, field in enumerate(fields, start=1):
            try:
                value = float(field)
            except ValueError:
                raise ChannelParseError(f"not a number: {field.strip()!r}", lineno, col) from None
            if not np.isfinite(value):
                raise ChannelParseError(f"non-finite value {field.strip()!r}", lineno, col)
            values.append(value)
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ChannelParseError(f"expected {width} columns, found {len(values)}", lineno, len(values))
        arr = np.asarray(values)
        rows.append(arr[0::2] + 1j * arr[1::2])
    if not rows:
        raise ChannelParseError("no channel rows found", 1, 1)
    return np.vstack(rows)
