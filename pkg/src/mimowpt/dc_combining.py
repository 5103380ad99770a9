"""Transmit beamforming for DC combining (one rectifier per receive antenna).

``optimize_dc`` maximises the total DC power, a posynomial in the per-antenna
received powers ``r_q = |h_q w_T|**2``, by successive inner approximation:
each step bounds the posynomial from below by a monomial through the
weighted AM-GM inequality (tight at the current ``r``), lifts ``w_T w_T^H``
to a PSD matrix and solves the resulting convex program. A rank-1 final
matrix gives the beamformer directly; otherwise Gaussian randomization
draws candidates from it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .channel import cscg, make_rng
from .convex_core import GpSubproblem, solve_gp_subproblem
from .errors import ConvergenceError, InvalidInputError
from .rectenna import PosynomialForm, TaylorCoefficients, pout_dc_combining, posynomial_form

__all__ = [
    "DcOptConfig",
    "DcResult",
    "optimize_dc",
    "update_gamma",
    "svd_transmit_baseline",
]

RANK1_THRESHOLD = 1e-6


@dataclass(frozen=True)
class DcOptConfig:
    """Stopping rule and randomization settings.

    ``epsilon`` is relative: iterations stop once
    ``|t0_i - t0_{i-1}| < epsilon * t0_i``.
    """

    epsilon: float = 1e-6
    i_max: int = 50
    l_randomizations: int = 100
    randomization_seed: int = 0

    def __post_init__(self):
        if not self.epsilon > 0:
            raise InvalidInputError("epsilon must be positive")
        if self.i_max < 1 or self.l_randomizations < 1:
            raise InvalidInputError("i_max and l_randomizations must be at least 1")


@dataclass
class DcResult:
    w_T: np.ndarray
    p_out: float
    iterations: int
    converged: bool
    rank1: bool
    r1_ratio: float
    # P_out of the matrix-level iterate, entry 0 is the starting point
    objective_trace: list[float] = field(default_factory=list)
    W: np.ndarray | None = None
    extraction: str = "eigen"


def svd_transmit_baseline(H, P: float) -> np.ndarray:
    """Full-power beam along the strongest right singular vector.

    Ties between equal singular values go to the first triplet returned by
    the SVD; the global phase is fixed so the first nonzero entry is real.
    """
    H = linalg.as_complex_matrix(np.atleast_2d(H), "H")
    if not np.any(H):
        raise InvalidInputError("channel is identically zero")
    _, _, V = linalg.svd(H)
    v1 = linalg.normalize_phase(V[:, 0])
    return np.sqrt(2.0 * P) * v1 / np.linalg.norm(v1)


def update_gamma(r, posynomial: PosynomialForm) -> np.ndarray:
    """AM-GM weights ``gamma_k = g_k(r) / sum_j g_j(r)``."""
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise InvalidInputError("expansion point r must be strictly positive")
    g = posynomial.monomials(r)
    return g / g.sum()


def _randomize(W, P, L, rng):
    lam, U = linalg.evd_hermitian(W)
    root = U * np.sqrt(np.clip(lam, 0.0, None))
    cand = root @ cscg(rng, (W.shape[0], L))
    norms = np.linalg.norm(cand, axis=0)
    cand = cand[:, norms > 0] / norms[norms > 0]
    return np.sqrt(2.0 * P) * cand.T


def optimize_dc(H, P: float, coeffs: TaylorCoefficients, cfg: DcOptConfig = DcOptConfig(),
                r_load: float = 1.0) -> DcResult:
    """Maximise total DC-combined output power over ``0.5 ||w_T||^2 <= P``.

    The iteration starts from the SVD beamformer, ``r0 = |H w_svd|**2``.
    The returned beamformer is never worse than that starting point: the
    SVD beam is kept as a fallback candidate next to the extracted one.
    ``r_load`` only scales the reported power.

    Raises
    ------
    ConvergenceError
        If a convex step fails; ``trace`` carries the objective history.
    """
    H = linalg.as_complex_matrix(np.atleast_2d(H), "H")
    if not P > 0:
        raise InvalidInputError("transmit power must be positive")
    q, m = H.shape
    live = np.any(H != 0, axis=1)
    if not live.any():
        raise InvalidInputError("channel is identically zero")
    Hl = H[live]
    posy = posynomial_form(Hl, coeffs, r_load)

    w_svd = svd_transmit_baseline(H, P)
    p_svd = pout_dc_combining(H, w_svd, coeffs, r_load)
    r = np.abs(Hl @ w_svd) ** 2
    if r.min() <= 1e-12 * r.max():
        # a row orthogonal to the SVD beam: start from a slightly smeared matrix
        W0 = 0.999 * np.outer(w_svd, w_svd.conj()) + 0.001 * (2.0 * P / m) * np.eye(m)
        r = np.einsum("qi,ij,qj->q", Hl, W0, Hl.conj()).real

    trace = [posy.evaluate(r)]
    t0_prev = trace[0]
    W = np.outer(w_svd, w_svd.conj())
    converged = False
    it = 0
    for it in range(1, cfg.i_max + 1):
        gamma = update_gamma(r, posy)
        try:
            sol = solve_gp_subproblem(GpSubproblem(Hl, P, gamma, posy))
        except ConvergenceError as exc:
            raise ConvergenceError(f"iteration {it}: {exc}", best=W, trace=trace) from exc
        W, r = sol.W, sol.r
        trace.append(posy.evaluate(r))
        if abs(sol.t0 - t0_prev) < cfg.epsilon * sol.t0:
            converged = True
            break
        t0_prev = sol.t0

    r1 = linalg.rank1_ratio(W) if m > 1 else 1.0
    rank1 = r1 > 1.0 - RANK1_THRESHOLD
    _, U = linalg.evd_hermitian(W)
    w_eig = np.sqrt(2.0 * P) * linalg.normalize_phase(U[:, 0])
    if rank1:
        candidates = [(w_eig, "eigen")]
    else:
        rng = make_rng(cfg.randomization_seed)
        candidates = [(w, "randomized") for w in _randomize(W, P, cfg.l_randomizations, rng)]
        candidates.append((w_eig, "eigen"))
    candidates.append((w_svd, "initial"))

    best_w, best_p, source = None, -np.inf, ""
    for w, tag in candidates:
        p = pout_dc_combining(H, w, coeffs, r_load) if tag != "initial" else p_svd
        if p > best_p:
            best_w, best_p, source = w, p, tag
    return DcResult(w_T=best_w, p_out=float(best_p), iterations=it, converged=converged,
                    rank1=rank1, r1_ratio=r1, objective_trace=trace, W=W, extraction=source)
