"""Truncated-Taylor rectenna model.

The rectifier output voltage for a single-tone input of amplitude ``a`` is

    v_out = sum_{i even, 2 <= i <= n0} beta_i * zeta_i * a**i

with ``beta_i = R_ant**(i/2) / (i! * (n v_t)**(i-1))`` and
``zeta_i = (1/2pi) * int_0^2pi sin(t)**i dt``. Output DC power is
``v_out**2 / R_L``.

Amplitude convention: channel rows ``h_q`` and beamformers are scaled so that
``0.5 * |h_q w_T|**2`` is the received RF power in watts, and the model is fed
the amplitude ``|h_q w_T|`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .errors import ConfigurationError, InvalidInputError, PassivityError

__all__ = [
    "RectennaParams",
    "TaylorCoefficients",
    "PosynomialForm",
    "SUPPORTED_ORDERS",
    "zeta",
    "make_coefficients",
    "vout_single",
    "pout_single",
    "pout_dc_combining",
    "pout_rf_combining",
    "posynomial_form",
]

SUPPORTED_ORDERS = (2, 4, 6)
PASSIVITY_TOL = 1e-9


def zeta(i: int) -> float:
    """Time average of ``sin(t)**i`` over one period, for even ``i``.

    Equals ``C(i, i/2) / 2**i``: 1/2, 3/8, 5/16 for i = 2, 4, 6.
    """
    if i < 0 or i % 2:
        raise ConfigurationError(f"zeta is only tabulated for even orders, got {i}")
    return float(Fraction(math.comb(i, i // 2), 2**i))


@dataclass(frozen=True)
class RectennaParams:
    """Diode and circuit constants.

    Defaults are a Schottky diode at room temperature (v_t = 25.86 mV,
    n = 1.05) behind a 50 ohm antenna with a 5 kohm load.
    """

    v_t: float = 25.86e-3
    n_ideality: float = 1.05
    r_ant: float = 50.0
    r_load: float = 5000.0
    n0: int = 4
    i_s: float | None = None

    def __post_init__(self):
        for name in ("v_t", "n_ideality", "r_ant", "r_load"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive, got {value!r}")
        if self.n0 not in SUPPORTED_ORDERS:
            raise ConfigurationError(
                f"truncation order n0 must be one of {SUPPORTED_ORDERS}, got {self.n0!r}"
            )
        if self.i_s is not None and not (np.isfinite(self.i_s) and self.i_s > 0):
            raise ConfigurationError(f"i_s must be positive when given, got {self.i_s!r}")


@dataclass(frozen=True)
class TaylorCoefficients:
    """Per-order model coefficients, keyed by the even order ``i``."""

    beta: Mapping[int, float]
    zeta: Mapping[int, float]
    kappa: Mapping[int, float] = field(default_factory=dict)

    @property
    def n0(self) -> int:
        return max(self.beta)

    @property
    def orders(self) -> tuple[int, ...]:
        return tuple(sorted(self.beta))

    def weights(self, n0: int | None = None) -> dict[int, float]:
        """Products ``beta_i * zeta_i`` for every order up to ``n0``."""
        top = self.n0 if n0 is None else n0
        if top not in self.beta:
            raise ConfigurationError(f"no coefficients for truncation order {top}")
        return {i: self.beta[i] * self.zeta[i] for i in self.orders if i <= top}


def make_coefficients(params: RectennaParams) -> TaylorCoefficients:
    """Taylor coefficients for all even orders ``2..params.n0``.

    ``kappa`` (current-model coefficients, ``i_s / (n v_t) * beta_i``) is
    only filled when ``params.i_s`` is set.
    """
    if params.n0 not in SUPPORTED_ORDERS:
        raise ConfigurationError(f"unsupported truncation order {params.n0!r}")
    nvt = params.n_ideality * params.v_t
    beta = {}
    for i in range(2, params.n0 + 1, 2):
        beta[i] = params.r_ant ** (i / 2) / (math.factorial(i) * nvt ** (i - 1))
    zetas = {i: zeta(i) for i in beta}
    kappa = {}
    if params.i_s is not None:
        kappa = {i: params.i_s / nvt * b for i, b in beta.items()}
    return TaylorCoefficients(beta=beta, zeta=zetas, kappa=kappa)


def vout_single(rf_amplitude, coeffs: TaylorCoefficients, n0: int | None = None):
    """Rectifier output voltage for received amplitude ``|h w|``.

    Works elementwise on arrays. Raises :class:`InvalidInputError` on a
    negative amplitude.
    """
    a = np.asarray(rf_amplitude, dtype=float)
    if np.any(a < 0) or not np.all(np.isfinite(a)):
        raise InvalidInputError("rf amplitude must be finite and non-negative")
    a2 = a * a
    v = np.zeros_like(a2)
    for i, c in coeffs.weights(n0).items():
        v = v + c * a2 ** (i // 2)
    return v if v.ndim else float(v)


def pout_single(rf_amplitude, coeffs: TaylorCoefficients, r_load: float, n0: int | None = None):
    """DC power delivered by one rectenna, ``v_out**2 / R_L``."""
    v = vout_single(rf_amplitude, coeffs, n0)
    return v * v / r_load


def _channel_and_vector(H, w, name):
    H = np.asarray(H, dtype=complex)
    if H.ndim == 1:
        H = H[None, :]
    w = np.asarray(w, dtype=complex).reshape(-1)
    if H.ndim != 2 or H.shape[1] != w.shape[0]:
        raise InvalidInputError(
            f"{name} has length {w.shape[0]} but channel has {H.shape[-1]} columns"
        )
    return H, w


def pout_dc_combining(H, w_T, coeffs: TaylorCoefficients, r_load: float) -> float:
    """Total DC power when each receive antenna has its own rectifier."""
    H, w_T = _channel_and_vector(H, w_T, "w_T")
    amps = np.abs(H @ w_T)
    v = vout_single(amps, coeffs)
    return float(np.sum(np.asarray(v) ** 2) / r_load)


def pout_rf_combining(H, w_T, w_R, coeffs: TaylorCoefficients, r_load: float) -> float:
    """DC power when receive signals are combined by ``w_R`` before one rectifier.

    Raises
    ------
    PassivityError
        If ``||w_R|| > 1 + 1e-9``; a passive combiner cannot add power.
    """
    H, w_T = _channel_and_vector(H, w_T, "w_T")
    w_R = np.asarray(w_R, dtype=complex).reshape(-1)
    if w_R.shape[0] != H.shape[0]:
        raise InvalidInputError(
            f"w_R has length {w_R.shape[0]} but channel has {H.shape[0]} rows"
        )
    if np.linalg.norm(w_R) > 1.0 + PASSIVITY_TOL:
        raise PassivityError(f"combiner gain {np.linalg.norm(w_R):.12g} exceeds one")
    amp = abs(np.vdot(w_R, H @ w_T))
    v = vout_single(amp, coeffs)
    return float(v * v / r_load)


@dataclass(frozen=True)
class PosynomialForm:
    """``P_out(r) = sum_k rho[k] * prod_q r[q]**xi[q, k]``.

    Monomials are stored antenna-major: the terms of antenna ``q`` occupy a
    contiguous block and each column of ``xi`` has exactly one nonzero.
    """

    rho: np.ndarray
    xi: np.ndarray

    @property
    def n_terms(self) -> int:
        return self.rho.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.xi.shape[0]

    def monomials(self, r) -> np.ndarray:
        """Values ``g_k(r)`` of every monomial."""
        r = np.asarray(r, dtype=float)
        if r.shape != (self.n_antennas,):
            raise InvalidInputError(f"r must have shape ({self.n_antennas},)")
        if np.any(r < 0):
            raise InvalidInputError("r must be non-negative")
        return self.rho * np.prod(r[:, None] ** self.xi, axis=0)

    def evaluate(self, r) -> float:
        return float(np.sum(self.monomials(r)))


def posynomial_form(H, coeffs: TaylorCoefficients, r_load: float, n0: int | None = None) -> PosynomialForm:
    """Expand the DC-combining objective as a posynomial in ``r_q = |h_q w_T|**2``.

    Squaring ``sum_i c_i r**(i/2)`` and merging equal powers gives ``n0 - 1``
    monomials per antenna (3 per antenna for ``n0 = 4``).
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim == 1:
        H = H[None, :]
    q = H.shape[0]
    weights = coeffs.weights(n0)
    per_power: dict[int, float] = {}
    for i, ci in weights.items():
        for j, cj in weights.items():
            p = (i + j) // 2
            per_power[p] = per_power.get(p, 0.0) + ci * cj / r_load
    powers = sorted(per_power)
    k_per = len(powers)
    rho = np.tile([per_power[p] for p in powers], q)
    xi = np.zeros((q, q * k_per))
    for qq in range(q):
        xi[qq, qq * k_per:(qq + 1) * k_per] = powers
    return PosynomialForm(rho=rho, xi=xi)
