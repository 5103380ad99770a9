"""Seeded Monte Carlo sweeps over (M, Q) grids for the four beamforming schemes.

Schemes:

``dc_svd``
    DC combining with the SVD transmit beam.
``dc_opt``
    DC combining with the optimized transmit beam.
``rf_abf``
    RF combining with analog (phase-shifter) receive beamforming.
``rf_svd``
    RF combining with the optimal passive combiner (SVD pair).

Realization ``i`` of cell ``(m, q)`` draws its channel from
``make_rng(seed, m, q, i)`` and its randomization stream from a seed derived
from the same tuple plus a scheme code, so any subset of realizations can be
recomputed alone, and the worker count never changes the output.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .channel import cscg, dbm_to_watts, make_rng
from .dc_combining import DcOptConfig, optimize_dc, svd_transmit_baseline
from .errors import ConfigurationError, InvalidInputError, MimoWptError
from .rectenna import RectennaParams, make_coefficients, pout_dc_combining
from .rf_combining import AnalogConfig, optimize_rf_analog, optimize_rf_svd

__all__ = [
    "SCHEMES",
    "CSV_HEADER",
    "ExperimentConfig",
    "CellSummary",
    "McSummary",
    "RealizationRecord",
    "received_rf_power",
    "realization_channel",
    "run_realization",
    "run_experiment",
    "emit_csv",
    "read_csv",
    "parse_config_text",
    "load_settings",
    "experiment_from_settings",
    "DEFAULT_SETTINGS",
]

SCHEMES = ("dc_svd", "dc_opt", "rf_abf", "rf_svd")
_SCHEME_CODE = {name: k for k, name in enumerate(SCHEMES)}

CSV_HEADER = ("m", "q", "scheme", "mean_pout_w", "stderr_pout_w", "mean_rf_w",
              "mean_r1", "mean_r2", "n_ok", "n_failed")


@dataclass(frozen=True)
class ExperimentConfig:
    m_values: tuple[int, ...] = (1, 2, 4)
    q_values: tuple[int, ...] = (1, 2, 4, 8)
    n_realizations: int = 500
    seed: int = 0
    path_loss_db: float = 66.0
    transmit_power_dbm: float = 36.0
    rectenna: RectennaParams = field(default_factory=RectennaParams)
    dc_opt: DcOptConfig = field(default_factory=DcOptConfig)
    schemes: tuple[str, ...] = SCHEMES

    def __post_init__(self):
        object.__setattr__(self, "m_values", tuple(int(v) for v in self.m_values))
        object.__setattr__(self, "q_values", tuple(int(v) for v in self.q_values))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.n_realizations < 1:
            raise ConfigurationError("n_realizations must be at least 1")
        if not self.m_values or not self.q_values or min(self.m_values + self.q_values) < 1:
            raise ConfigurationError("m_values and q_values must be non-empty lists of counts >= 1")
        if not self.schemes:
            raise ConfigurationError("schemes must not be empty")
        unknown = [s for s in self.schemes if s not in SCHEMES]
        if unknown:
            raise ConfigurationError(f"unknown scheme(s) {unknown}; expected a subset of {SCHEMES}")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")

    @property
    def variance(self) -> float:
        return 10.0 ** (-self.path_loss_db / 10.0)

    @property
    def power_watts(self) -> float:
        return dbm_to_watts(self.transmit_power_dbm)


@dataclass
class RealizationRecord:
    m: int
    q: int
    index: int
    scheme: str
    p_out: float | None
    rf_power: float | None
    r1: float | None = None
    r2: float | None = None
    objective_trace: list[float] | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class CellSummary:
    mean_p_out: float | None
    stderr_p_out: float | None
    mean_rf_power: float | None
    mean_r1: float | None
    mean_r2: float | None
    n_ok: int
    n_failed: int


@dataclass
class McSummary:
    cells: dict[tuple[int, int, str], CellSummary] = field(default_factory=dict)
    records: list[RealizationRecord] | None = None


def received_rf_power(H, w_T, w_R=None) -> float:
    """``0.5 ||H w_T||**2`` summed over antennas, or ``0.5 |w_R^H H w_T|**2``."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    w_T = np.asarray(w_T, dtype=complex).reshape(-1)
    if H.shape[1] != w_T.shape[0]:
        raise InvalidInputError(f"w_T has length {w_T.shape[0]}, channel has {H.shape[1]} columns")
    y = H @ w_T
    if w_R is None:
        return float(0.5 * np.sum(np.abs(y) ** 2))
    w_R = np.asarray(w_R, dtype=complex).reshape(-1)
    if w_R.shape[0] != H.shape[0]:
        raise InvalidInputError(f"w_R has length {w_R.shape[0]}, channel has {H.shape[0]} rows")
    return float(0.5 * abs(np.vdot(w_R, y)) ** 2)


def realization_channel(cfg: ExperimentConfig, m: int, q: int, index: int) -> np.ndarray:
    return cscg(make_rng(cfg.seed, m, q, index), (q, m), cfg.variance)


def _derived_seed(*keys: int) -> int:
    return int(np.random.SeedSequence(list(keys)).generate_state(1, np.uint64)[0])


def run_realization(cfg: ExperimentConfig, m: int, q: int, index: int) -> list[RealizationRecord]:
    """Run every configured scheme on one channel realization."""
    H = realization_channel(cfg, m, q, index)
    coeffs = make_coefficients(cfg.rectenna)
    P = cfg.power_watts
    r_load = cfg.rectenna.r_load
    out = []
    for scheme in cfg.schemes:
        rec = RealizationRecord(m, q, index, scheme, None, None)
        seed = _derived_seed(cfg.seed, m, q, index, _SCHEME_CODE[scheme])
        try:
            if scheme == "dc_svd":
                w = svd_transmit_baseline(H, P)
                rec.p_out = pout_dc_combining(H, w, coeffs, r_load)
                rec.rf_power = received_rf_power(H, w)
            elif scheme == "dc_opt":
                res = optimize_dc(H, P, coeffs, replace(cfg.dc_opt, randomization_seed=seed), r_load)
                rec.p_out = res.p_out
                rec.rf_power = received_rf_power(H, res.w_T)
                rec.r1 = res.r1_ratio
                rec.objective_trace = list(res.objective_trace)
            elif scheme == "rf_abf":
                acfg = AnalogConfig(l_randomizations=cfg.dc_opt.l_randomizations, seed=seed)
                res = optimize_rf_analog(H, P, coeffs, acfg, r_load)
                rec.p_out = res.p_out
                rec.rf_power = received_rf_power(H, res.w_T, res.w_R)
                rec.r1, rec.r2 = res.r1_ratio, res.r2_ratio
            else:
                res = optimize_rf_svd(H, P, coeffs, r_load)
                rec.p_out = res.p_out
                rec.rf_power = received_rf_power(H, res.w_T, res.w_R)
        except (MimoWptError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
            rec.p_out = rec.rf_power = rec.r1 = rec.r2 = None
            rec.error = f"{type(exc).__name__}: {exc}"
        out.append(rec)
    return out


def _run_chunk(args):
    cfg, m, q, start, stop = args
    recs = []
    for i in range(start, stop):
        recs.extend(run_realization(cfg, m, q, i))
    return recs


def _mean(values):
    return math.fsum(values) / len(values) if values else None


def _summarize(recs: list[RealizationRecord]) -> CellSummary:
    ok = [r for r in recs if r.ok]
    p = [r.p_out for r in ok]
    mean = _mean(p)
    stderr = None
    if len(p) > 1:
        var = math.fsum((x - mean) ** 2 for x in p) / (len(p) - 1)
        stderr = math.sqrt(var / len(p))
    elif len(p) == 1:
        stderr = 0.0
    r1 = [r.r1 for r in ok if r.r1 is not None]
    r2 = [r.r2 for r in ok if r.r2 is not None]
    return CellSummary(mean_p_out=mean, stderr_p_out=stderr,
                       mean_rf_power=_mean([r.rf_power for r in ok]),
                       mean_r1=_mean(r1), mean_r2=_mean(r2),
                       n_ok=len(ok), n_failed=len(recs) - len(ok))


def run_experiment(cfg: ExperimentConfig, threads: int = 1, keep_records: bool = False,
                   chunk: int = 25) -> McSummary:
    """Run the full grid and aggregate per (m, q, scheme).

    Results are sorted by realization index before aggregation, so the
    summary is identical for any ``threads``.
    """
    if threads < 1:
        raise ConfigurationError("threads must be at least 1")
    tasks = []
    for m in cfg.m_values:
        for q in cfg.q_values:
            for start in range(0, cfg.n_realizations, chunk):
                tasks.append((cfg, m, q, start, min(start + chunk, cfg.n_realizations)))
    if threads == 1:
        chunks = [_run_chunk(t) for t in tasks]
    else:
        workers = min(threads, os.cpu_count() or 1, len(tasks))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_chunk, tasks))
    records = [r for c in chunks for r in c]
    records.sort(key=lambda r: (r.m, r.q, r.index, _SCHEME_CODE[r.scheme]))

    grouped: dict[tuple[int, int, str], list[RealizationRecord]] = {}
    for r in records:
        grouped.setdefault((r.m, r.q, r.scheme), []).append(r)
    cells = {key: _summarize(recs) for key, recs in grouped.items()}
    return McSummary(cells=cells, records=records if keep_records else None)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".16e")


def emit_csv(summary: McSummary, path) -> None:
    """Write one row per (m, q, scheme), sorted, full-precision floats."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for (m, q, scheme) in sorted(summary.cells):
            c = summary.cells[(m, q, scheme)]
            writer.writerow([m, q, scheme, _fmt(c.mean_p_out), _fmt(c.stderr_p_out),
                             _fmt(c.mean_rf_power), _fmt(c.mean_r1), _fmt(c.mean_r2),
                             c.n_ok, c.n_failed])


def read_csv(path) -> McSummary:
    """Parse a file written by :func:`emit_csv`."""
    def num(s):
        return float(s) if s != "" else None

    cells = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CSV_HEADER:
            raise InvalidInputError(f"unexpected header {header!r}")
        for row in reader:
            m, q, scheme, mp, se, rf, r1, r2, n_ok, n_failed = row
            cells[(int(m), int(q), scheme)] = CellSummary(
                num(mp), num(se), num(rf), num(r1), num(r2), int(n_ok), int(n_failed))
    return McSummary(cells=cells)


# Flat key = value configuration ------------------------------------------------

def _int_list(s):
    return tuple(int(v) for v in s.split(",") if v.strip())


def _str_list(s):
    return tuple(v.strip() for v in s.split(",") if v.strip())


_PARSERS = {
    "m_values": _int_list,
    "q_values": _int_list,
    "n_realizations": int,
    "seed": int,
    "path_loss_db": float,
    "transmit_power_dbm": float,
    "schemes": _str_list,
    "v_t": float,
    "n_ideality": float,
    "r_ant": float,
    "r_load": float,
    "n0": int,
    "epsilon": float,
    "i_max": int,
    "l_randomizations": int,
    # scaling-law comparison
    "scaling_power_w": float,
    "scaling_samples": int,
    "scaling_truncation": int,
    "scaling_miso_m": _int_list,
    "scaling_simo_q": _int_list,
    "scaling_analog_q": _int_list,
}

DEFAULT_SETTINGS = {
    "m_values": (1, 2, 4),
    "q_values": (1, 2, 4, 8),
    "n_realizations": 500,
    "seed": 0,
    "path_loss_db": 66.0,
    "transmit_power_dbm": 36.0,
    "schemes": SCHEMES,
    "v_t": 25.86e-3,
    "n_ideality": 1.05,
    "r_ant": 50.0,
    "r_load": 5000.0,
    "n0": 4,
    "epsilon": 1e-6,
    "i_max": 50,
    "l_randomizations": 100,
    "scaling_power_w": 1.0,
    "scaling_samples": 100000,
    "scaling_truncation": 4,
    "scaling_miso_m": (1, 2, 4),
    "scaling_simo_q": (1, 2, 4, 8),
    "scaling_analog_q": (8, 12, 16, 24, 32),
}


def _parse_value(key, raw, where):
    if key not in _PARSERS:
        raise ConfigurationError(f"{where}: unknown key {key!r}")
    try:
        return _PARSERS[key](raw.strip())
    except ValueError as exc:
        raise ConfigurationError(f"{where}: bad value for {key!r}: {raw.strip()!r}") from exc


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment. Unknown keys are errors."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigurationError(f"{source}:{lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in body.split("=", 1))
        out[key] = _parse_value(key, raw, f"{source}:{lineno}")
    return out


def load_settings(path=None, overrides=()) -> dict:
    """Defaults, then the file at ``path``, then ``key=value`` overrides."""
    settings = dict(DEFAULT_SETTINGS)
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {p}: {exc}") from exc
        settings.update(parse_config_text(text, str(p)))
    for item in overrides:
        if "=" not in item:
            raise ConfigurationError(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        settings[key.strip()] = _parse_value(key.strip(), raw, "override")
    return settings


def experiment_from_settings(settings: dict) -> ExperimentConfig:
    s = settings
    try:
        return ExperimentConfig(
            m_values=s["m_values"], q_values=s["q_values"], n_realizations=s["n_realizations"],
            seed=s["seed"], path_loss_db=s["path_loss_db"],
            transmit_power_dbm=s["transmit_power_dbm"],
            rectenna=RectennaParams(v_t=s["v_t"], n_ideality=s["n_ideality"], r_ant=s["r_ant"],
                                    r_load=s["r_load"], n0=s["n0"]),
            dc_opt=DcOptConfig(epsilon=s["epsilon"], i_max=s["i_max"],
                               l_randomizations=s["l_randomizations"]),
            schemes=s["schemes"],
        )
    except InvalidInputError as exc:
        raise ConfigurationError(str(exc)) from exc

