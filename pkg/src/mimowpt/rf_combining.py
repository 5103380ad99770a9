"""Beamforming for RF combining (receive signals combined before one rectifier).

Output power is increasing in ``|w_R^H H w_T|**2`` whatever the truncation
order, so every optimizer here maximises that gain:

* ``optimize_rf_svd``: unconstrained passive combiner, closed form from the
  dominant singular pair.
* ``optimize_rf_analog``: equal-gain phase-shifter combiner, via the
  diagonally constrained SDP relaxation plus Gaussian randomization, then
  MRT against the chosen combiner.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .channel import cscg, make_rng
from .convex_core import solve_diag_constrained_sdp
from .errors import DegenerateChannelError, InvalidInputError
from .rectenna import TaylorCoefficients, pout_rf_combining

__all__ = [
    "AnalogCombiner",
    "AnalogConfig",
    "RfResult",
    "optimize_rf_svd",
    "optimize_rf_analog",
    "mrt_against_combiner",
    "mrc",
]

RANK1_THRESHOLD = 1e-6


@dataclass(frozen=True)
class AnalogCombiner:
    """Phase shifts ``theta_q`` in ``[-pi, pi)`` feeding an equal-power combiner."""

    phases: np.ndarray

    def __post_init__(self):
        theta = np.asarray(self.phases, dtype=float).reshape(-1)
        object.__setattr__(self, "phases", (theta + np.pi) % (2 * np.pi) - np.pi)

    @property
    def weights(self) -> np.ndarray:
        """``w_R = exp(-j theta) / sqrt(Q)``."""
        return np.exp(-1j * self.phases) / np.sqrt(self.phases.size)

    @classmethod
    def from_weights(cls, w_R) -> "AnalogCombiner":
        return cls(-np.angle(np.asarray(w_R, dtype=complex)))


@dataclass(frozen=True)
class AnalogConfig:
    l_randomizations: int = 100
    seed: int = 0
    tol: float = 1e-10


@dataclass
class RfResult:
    w_T: np.ndarray
    w_R: np.ndarray
    p_out: float
    scheme: str
    r1_ratio: float | None = None
    r2_ratio: float | None = None
    sdp_objective: float | None = None
    combiner: AnalogCombiner | None = None

    def effective_gain(self, H) -> float:
        """``|w_R^H H w_T|**2`` for the channel the result was computed on."""
        return float(abs(np.vdot(self.w_R, np.asarray(H) @ self.w_T)) ** 2)


def _check_channel(H):
    H = linalg.as_complex_matrix(np.atleast_2d(H), "H")
    if not np.any(H):
        raise DegenerateChannelError("channel is identically zero")
    return H


def mrc(h) -> np.ndarray:
    """Maximum ratio combiner ``h / ||h||``."""
    h = np.asarray(h, dtype=complex).reshape(-1)
    norm = np.linalg.norm(h)
    if not norm > 0:
        raise DegenerateChannelError("cannot combine a zero channel")
    return h / norm


def mrt_against_combiner(H, w_R, P: float) -> np.ndarray:
    """Full-power MRT towards the effective row ``w_R^H H``."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    w_R = np.asarray(w_R, dtype=complex).reshape(-1)
    if w_R.shape[0] != H.shape[0]:
        raise InvalidInputError("w_R length must equal the number of receive antennas")
    g = w_R.conj() @ H
    norm = np.linalg.norm(g)
    if not norm > 0:
        raise DegenerateChannelError("effective channel w_R^H H is zero")
    return np.sqrt(2.0 * P) * g.conj() / norm


def optimize_rf_svd(H, P: float, coeffs: TaylorCoefficients, r_load: float = 1.0) -> RfResult:
    """Optimal transmit/receive pair ``(sqrt(2P) v1, u1)``."""
    H = _check_channel(H)
    U, _, V = linalg.svd(H)
    v1 = linalg.normalize_phase(V[:, 0])
    w_T = np.sqrt(2.0 * P) * v1 / np.linalg.norm(v1)
    u1 = H @ v1
    w_R = u1 / np.linalg.norm(u1)  # u1 in the phase convention matching v1
    p = pout_rf_combining(H, w_T, w_R, coeffs, r_load)
    return RfResult(w_T=w_T, w_R=w_R, p_out=p, scheme="svd")


def _unit_modulus(v, q):
    return np.exp(1j * np.angle(v)) / np.sqrt(q)


def optimize_rf_analog(H, P: float, coeffs: TaylorCoefficients,
                       cfg: AnalogConfig = AnalogConfig(), r_load: float = 1.0) -> RfResult:
    """Analog receive beamforming through the SDP relaxation.

    When the relaxed matrix is rank-1 (ratio above ``1 - 1e-6``) its top
    eigenvector is projected onto unit-modulus phases. Otherwise ``L``
    Gaussian draws with the relaxed covariance are projected the same way,
    and the best one by ``||w_R^H H||**2`` is kept (the projected top
    eigenvector joins the candidate pool). The first phase is then rotated
    to zero, and the transmitter uses MRT against the combiner.
    """
    H = _check_channel(H)
    q = H.shape[0]
    G = H @ H.conj().T
    if q == 1:
        w_R = np.ones(1, dtype=complex)
        r1 = r2 = 1.0
        sdp_obj = float(G[0, 0].real)
    else:
        sdp = solve_diag_constrained_sdp(G, q, cfg.tol)
        W = sdp.matrix
        sdp_obj = sdp.objective
        r1 = linalg.rank1_ratio(W)
        lam, U = linalg.evd_hermitian(W)
        w_eig = _unit_modulus(U[:, 0], q)
        if r1 > 1.0 - RANK1_THRESHOLD:
            w_R = w_eig
        else:
            rng = make_rng(cfg.seed)
            root = U * np.sqrt(np.clip(lam, 0.0, None))
            cand = _unit_modulus(root @ cscg(rng, (q, cfg.l_randomizations)), q)
            cand = np.column_stack([cand, w_eig])
            values = np.einsum("il,ij,jl->l", cand.conj(), G, cand).real
            w_R = cand[:, int(np.argmax(values))]
        w_R = w_R * np.exp(-1j * np.angle(w_R[0]))
        w_R[0] = abs(w_R[0])
        r2 = float(np.vdot(w_R, G @ w_R).real / sdp_obj)
    w_T = mrt_against_combiner(H, w_R, P)
    p = pout_rf_combining(H, w_T, w_R, coeffs, r_load)
    return RfResult(w_T=w_T, w_R=w_R, p_out=p, scheme="analog", r1_ratio=r1, r2_ratio=r2,
                    sdp_objective=sdp_obj, combiner=AnalogCombiner.from_weights(w_R))
