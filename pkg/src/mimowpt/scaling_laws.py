"""Average output power of closed-form beamformers over i.i.d. Rayleigh channels.

All closed forms assume unit-variance channel entries and a 1 ohm load. For a
channel of variance ``s2`` the same numbers follow by substituting
``P -> P * s2``, since the received amplitude only depends on ``P |h|**2``.

Notation: ``x = ||h||**2`` is chi-square with ``2N`` real degrees of freedom
scaled so ``E[x**n] = (N+n-1)! / (N-1)!`` (see :func:`chi2_moment`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import cscg, make_rng
from .errors import InvalidInputError
from .rectenna import TaylorCoefficients, vout_single

__all__ = [
    "ScalingInputs",
    "SCHEMES",
    "chi2_moment",
    "falling_factorial",
    "miso_mrt_average",
    "simo_dc_average",
    "simo_rf_mrc_average",
    "simo_rf_analog_lower_bound",
    "analytic_average",
    "monte_carlo_average",
]

GAMMA_1_5 = math.sqrt(math.pi) / 2.0

SCHEMES = ("miso_mrt", "simo_dc", "simo_rf_mrc", "simo_rf_analog")


@dataclass(frozen=True)
class ScalingInputs:
    """Antenna count, transmit power and the two lowest Taylor coefficients."""

    antennas: int
    power: float
    beta2: float
    beta4: float
    truncation: int = 4

    def __post_init__(self):
        if int(self.antennas) < 1:
            raise InvalidInputError("antennas must be at least 1")
        if self.truncation not in (2, 4):
            raise InvalidInputError("truncation must be 2 or 4")
        if not self.power >= 0:
            raise InvalidInputError("power must be non-negative")

    @classmethod
    def from_coefficients(cls, antennas: int, power: float, coeffs: TaylorCoefficients,
                          truncation: int = 4) -> "ScalingInputs":
        return cls(antennas, power, coeffs.beta[2], coeffs.beta.get(4, 0.0), truncation)

    @property
    def b4(self) -> float:
        """``beta4``, or zero under second-order truncation."""
        return self.beta4 if self.truncation == 4 else 0.0


def chi2_moment(M: int, n: int) -> int:
    """``E[||h||**(2n)] = (M+n-1)! / (M-1)!`` for ``h`` with M unit-variance entries."""
    if M < 1 or n < 0:
        raise InvalidInputError("need M >= 1 and n >= 0")
    return math.factorial(M + n - 1) // math.factorial(M - 1)


def falling_factorial(Q: int, n: int) -> int:
    """``Q (Q-1) ... (Q-n+1)``; zero when ``Q < n``."""
    if Q < n:
        return 0
    return math.perm(Q, n)


def _chi2_power_average(N: int, x: ScalingInputs) -> float:
    # E[(b2 P X + 1.5 b4 P^2 X^2)^2] with E[X^n] = chi2_moment(N, n)
    P, b2, b4 = x.power, x.beta2, x.b4
    return (b2**2 * P**2 * chi2_moment(N, 2)
            + 3.0 * b2 * b4 * P**3 * chi2_moment(N, 3)
            + 2.25 * b4**2 * P**4 * chi2_moment(N, 4))


def miso_mrt_average(x: ScalingInputs) -> float:
    """M transmit antennas, one receive antenna, MRT."""
    return _chi2_power_average(int(x.antennas), x)


def simo_dc_average(x: ScalingInputs) -> float:
    """One transmit antenna, Q rectennas with DC combining; linear in Q."""
    P, b2, b4 = x.power, x.beta2, x.b4
    return (2.0 * b2**2 * P**2 + 18.0 * b2 * b4 * P**3 + 54.0 * b4**2 * P**4) * int(x.antennas)


def simo_rf_mrc_average(x: ScalingInputs) -> float:
    """One transmit antenna, Q receive antennas combined by MRC."""
    return _chi2_power_average(int(x.antennas), x)


def simo_rf_analog_lower_bound(x: ScalingInputs) -> float:
    """Lower bound for equal-gain analog combining.

    Keeps only the products of distinct ``|h_q|`` in the moments of
    ``||h||_1``; these vanish when Q is smaller than the moment order.
    """
    Q, P, b2, b4 = int(x.antennas), x.power, x.beta2, x.b4
    g = GAMMA_1_5
    return (b2**2 * P**2 * g**4 / Q**2 * falling_factorial(Q, 4)
            + 3.0 * b2 * b4 * P**3 * g**6 / Q**3 * falling_factorial(Q, 6)
            + 2.25 * b4**2 * P**4 * g**8 / Q**4 * falling_factorial(Q, 8))


_ANALYTIC = {
    "miso_mrt": miso_mrt_average,
    "simo_dc": simo_dc_average,
    "simo_rf_mrc": simo_rf_mrc_average,
    "simo_rf_analog": simo_rf_analog_lower_bound,
}


def analytic_average(scheme: str, x: ScalingInputs) -> float:
    """Closed form for ``scheme`` (a lower bound for ``simo_rf_analog``)."""
    try:
        return _ANALYTIC[scheme](x)
    except KeyError:
        raise InvalidInputError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}") from None


def monte_carlo_average(scheme: str, antennas: int, power: float, coeffs: TaylorCoefficients,
                        n_samples: int, seed: int = 0, truncation: int = 4,
                        variance: float = 1.0, r_load: float = 1.0,
                        batch: int = 20000) -> tuple[float, float]:
    """Sample mean and standard error of the output power of ``scheme``.

    Channels are drawn in batches from ``make_rng(seed, batch_index)``, so
    the result does not depend on anything but the arguments.
    """
    if scheme not in SCHEMES:
        raise InvalidInputError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if n_samples < 1:
        raise InvalidInputError("n_samples must be at least 1")
    n_ant = int(antennas)
    total = 0.0
    total_sq = 0.0
    done = 0
    b = 0
    while done < n_samples:
        size = min(batch, n_samples - done)
        h = cscg(make_rng(seed, b), (size, n_ant), variance)
        mag2 = np.abs(h) ** 2
        if scheme == "simo_dc":
            # each rectenna sees amplitude sqrt(2P)|h_q|
            p = np.sum(vout_single(np.sqrt(2.0 * power * mag2), coeffs, truncation) ** 2, axis=1)
        else:
            if scheme == "simo_rf_analog":
                gain = np.sum(np.sqrt(mag2), axis=1) ** 2 / n_ant
            else:
                gain = np.sum(mag2, axis=1)
            p = vout_single(np.sqrt(2.0 * power * gain), coeffs, truncation) ** 2
        p = p / r_load
        total += float(np.sum(p))
        total_sq += float(np.sum(p * p))
        done += size
        b += 1
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0)
    stderr = math.sqrt(var / max(n_samples - 1, 1)) if n_samples > 1 else 0.0
    return mean, stderr
