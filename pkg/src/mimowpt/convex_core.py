"""Small dense convex solvers used by the beamforming algorithms.

Two problems are handled, both with matrix variables of size at most ~16:

* the log-transformed GP step of the DC-combining algorithm,
  ``max  log c1^{-1} + sum_q a_q log r_q``
  ``s.t. r_q <= h_q W h_q^H,  Tr W <= 2P,  W >= 0``;
* the diagonally constrained SDP of analog receive beamforming,
  ``max Tr(G W)  s.t.  diag(W) = 1/q,  W >= 0``.

Both are solved on their Lagrange dual with a log-det barrier and damped
Newton steps. The dual has one scalar variable per linear constraint (q for
the SDP, Q + 1 for the GP step), and the primal matrix is recovered from the
barrier's central path as ``W = Z^{-1} / t``, which is positive definite by
construction. The reported duality gap is recomputed from the recovered
primal/dual pair, not taken from the barrier's ``m / t`` estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InfeasibleError, InvalidInputError
from .rectenna import PosynomialForm

__all__ = [
    "GpSubproblem",
    "GpSolution",
    "SdpSolution",
    "solve_gp_subproblem",
    "solve_diag_constrained_sdp",
]

MAX_OUTER = 60
MAX_NEWTON = 80
BARRIER_GROWTH = 12.0
_ARMIJO = 0.25


@dataclass(frozen=True)
class GpSubproblem:
    """One inner-approximation step of the DC-combining algorithm.

    ``gamma`` are the AM-GM weights of the monomials of ``posynomial``;
    ``c1`` and ``alpha`` are always recomputed from them.
    """

    channel_rows: np.ndarray
    power_budget: float
    gamma: np.ndarray
    posynomial: PosynomialForm

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.channel_rows, dtype=complex))
        gamma = np.asarray(self.gamma, dtype=float)
        object.__setattr__(self, "channel_rows", H)
        object.__setattr__(self, "gamma", gamma)
        if gamma.shape != (self.posynomial.n_terms,):
            raise InvalidInputError("gamma must have one weight per monomial")
        if np.any(gamma < 0) or abs(gamma.sum() - 1.0) > 1e-9:
            raise InvalidInputError("gamma must be non-negative and sum to one")
        if self.posynomial.n_antennas != H.shape[0]:
            raise InvalidInputError("posynomial and channel disagree on the antenna count")
        if not self.power_budget > 0:
            raise InvalidInputError("power budget must be positive")

    @property
    def log_c1(self) -> float:
        g = self.gamma
        mask = g > 0
        return float(-np.sum(g[mask] * np.log(self.posynomial.rho[mask] / g[mask])))

    @property
    def c1(self) -> float:
        return float(np.exp(self.log_c1))

    @property
    def alpha(self) -> np.ndarray:
        return -(self.posynomial.xi @ self.gamma)

    def log_t0(self, r) -> float:
        """Largest feasible ``log t0`` for a given ``r``."""
        return float(-self.log_c1 - self.alpha @ np.log(r))


@dataclass
class GpSolution:
    W: np.ndarray
    r: np.ndarray
    t0: float
    log_t0: float
    dual_gap: float
    iterations: int


@dataclass
class SdpSolution:
    matrix: np.ndarray
    objective: float
    dual_gap: float
    iterations: int


def _barrier_solve(A0, A, fobj, y0, gap_fn, tol, label):
    """Minimise ``fobj(y)`` subject to ``A0 + sum_i y_i A_i >= 0``.

    ``fobj(y)`` returns ``(value, grad, hess)`` or ``None`` outside its
    domain. ``gap_fn(y, S, t)`` maps the current dual point and barrier
    parameter to ``(gap, primal)`` using the recovered primal matrix.
    Returns ``(y, primal, gap, newton_steps)``.
    """
    m = A0.shape[0]
    y = np.array(y0, dtype=float)

    def zmat(yy):
        return A0 + np.tensordot(yy, A, axes=1)

    def logdet_chol(z):
        try:
            L = np.linalg.cholesky(z)
        except np.linalg.LinAlgError:
            return None
        d = np.diagonal(L).real
        if np.any(d <= 0):
            return None
        return 2.0 * np.sum(np.log(d))

    fv = fobj(y)
    Z = zmat(y)
    ld = logdet_chol(Z)
    if fv is None or ld is None:
        raise InvalidInputError(f"{label}: starting point is not strictly feasible")
    S = np.linalg.inv(Z)
    gap, primal = gap_fn(y, S, 1.0)
    t = m / max(gap, 1e-12)
    steps = 0
    best = (y.copy(), primal, gap)
    for _ in range(MAX_OUTER):
        for _ in range(MAX_NEWTON):
            val, fg, fh = fv
            S = np.linalg.inv(Z)
            S = 0.5 * (S + S.conj().T)
            SA = S @ A
            grad = t * fg - np.einsum("iaa->i", SA).real
            hess = t * fh + np.einsum("iab,jba->ij", SA, SA).real
            try:
                step = -np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError:
                step = -np.linalg.lstsq(hess, grad, rcond=None)[0]
            dec = -grad @ step
            if not np.isfinite(dec) or dec <= 2e-10:
                break
            phi0 = t * val - ld
            s = 1.0
            accepted = False
            while s > 1e-14:
                yn = y + s * step
                fvn = fobj(yn)
                if fvn is not None:
                    Zn = zmat(yn)
                    ldn = logdet_chol(Zn)
                    if ldn is not None and t * fvn[0] - ldn <= phi0 - _ARMIJO * s * dec:
                        accepted = True
                        break
                s *= 0.5
            steps += 1
            if not accepted:
                break
            y, fv, Z, ld = yn, fvn, Zn, ldn
        S = np.linalg.inv(Z)
        S = 0.5 * (S + S.conj().T)
        gap, primal = gap_fn(y, S, t)
        if gap < best[2]:
            best = (y.copy(), primal, gap)
        if gap <= tol:
            return y, primal, gap, steps
        t *= BARRIER_GROWTH
    if best[2] <= 10 * tol:
        return best[0], best[1], best[2], steps
    raise ConvergenceError(
        f"{label}: duality gap {best[2]:.3e} above tolerance {tol:.1e}", best=best[1]
    )


def solve_gp_subproblem(p: GpSubproblem, tol: float = 1e-9) -> GpSolution:
    """Solve one log-transformed GP step with a PSD matrix variable.

    ``t0`` is eliminated analytically (its constraint is active at the
    optimum), leaving the concave program
    ``max sum_q a_q log(h_q W h_q^H)`` over ``{W >= 0, Tr W <= 2P}`` with
    ``a_q = -alpha_q``. ``tol`` bounds the duality gap of that program,
    which is the gap in ``log t0``.

    Raises
    ------
    InfeasibleError
        If a channel row is zero, so that ``r_q > 0`` cannot be met.
    ConvergenceError
        If the barrier method stalls above ``10 * tol``.
    """
    H = p.channel_rows
    q, m = H.shape
    row_norm2 = np.sum(np.abs(H) ** 2, axis=1)
    if np.any(row_norm2 <= 0) or not np.all(np.isfinite(row_norm2)):
        raise InfeasibleError("zero channel row: r_q > 0 is unreachable")
    a = -p.alpha
    if np.any(a <= 0):
        raise InvalidInputError("every antenna needs a positive exponent weight")

    # Work on Tr X <= 1 with rows scaled to unit mean energy.
    scale2 = float(np.mean(row_norm2))
    Hn = H / np.sqrt(scale2)
    B = np.einsum("qi,qj->qij", Hn.conj(), Hn)  # h_q^H h_q
    A = np.concatenate([-B, np.eye(m, dtype=complex)[None]], axis=0)
    A0 = np.zeros((m, m), dtype=complex)
    a_sum = float(a.sum())

    def fobj(y):
        lam, mu = y[:q], y[q]
        if np.any(lam <= 0):
            return None
        val = mu - a @ np.log(lam)
        grad = np.empty(q + 1)
        grad[:q] = -a / lam
        grad[q] = 1.0
        hess = np.zeros((q + 1, q + 1))
        hess[np.arange(q), np.arange(q)] = a / lam**2
        return val, grad, hess

    def recover(y, S, t):
        X = S / t
        X = X * (1.0 / np.trace(X).real)
        v = np.einsum("qi,ij,qj->q", Hn, X, Hn.conj()).real
        lam, mu = y[:q], y[q]
        dual = float(a @ (np.log(a / lam) - 1.0) + mu)
        primal_val = float(a @ np.log(v))
        return max(dual - primal_val, 0.0), (X, v)

    v0 = np.sum(np.abs(Hn) ** 2, axis=1) / m
    lam0 = a / v0
    top = np.linalg.eigvalsh(np.tensordot(lam0, B, axes=1))[-1]
    y0 = np.concatenate([lam0, [1.25 * top + 1e-3 * a_sum]])
    _, (X, v), gap, steps = _barrier_solve(A0, A, fobj, y0, recover, tol, "gp subproblem")

    two_p = 2.0 * p.power_budget
    W = two_p * X
    r = two_p * scale2 * v
    log_t0 = p.log_t0(r)
    return GpSolution(W=W, r=r, t0=float(np.exp(log_t0)), log_t0=log_t0,
                      dual_gap=gap, iterations=steps)


def solve_diag_constrained_sdp(G, q: int | None = None, tol: float = 1e-10) -> SdpSolution:
    """``max Tr(G W)`` over Hermitian ``W >= 0`` with ``diag(W) = 1/q``.

    ``tol`` is relative: the returned duality gap satisfies
    ``dual_gap <= tol * |objective|``. The dual is
    ``min (1/q) sum(y)  s.t.  Diag(y) - G >= 0``.
    """
    G = np.asarray(G, dtype=complex)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise InvalidInputError("G must be square")
    n = G.shape[0]
    if q is None:
        q = n
    if q != n:
        raise InvalidInputError(f"G is {n}x{n} but q = {q}")
    if not np.all(np.isfinite(G)):
        raise InvalidInputError("G has non-finite entries")
    G = 0.5 * (G + G.conj().T)
    if n == 1:
        return SdpSolution(matrix=np.ones((1, 1), dtype=complex),
                           objective=float(G[0, 0].real), dual_gap=0.0, iterations=0)
    scale = float(np.trace(G).real) / n
    if not scale > 0:
        W = np.eye(n, dtype=complex) / n
        return SdpSolution(matrix=W, objective=float(np.trace(G @ W).real),
                           dual_gap=0.0, iterations=0)
    Gn = G / scale
    A = np.zeros((n, n, n), dtype=complex)
    A[np.arange(n), np.arange(n), np.arange(n)] = 1.0
    A0 = -Gn
    zero_h = np.zeros((n, n))
    ones = np.ones(n) / n

    def fobj(y):
        return float(y.sum() / n), ones, zero_h

    def recover(y, S, t):
        d = np.sqrt(np.diagonal(S).real * n)
        W = S / np.outer(d, d)
        primal_val = float(np.einsum("ij,ji->", Gn, W).real)
        dual = float(y.sum() / n)
        gap = max(dual - primal_val, 0.0)
        return gap / max(abs(primal_val), 1e-300), (W, primal_val, gap)

    top = np.linalg.eigvalsh(Gn)[-1]
    y0 = np.full(n, top + 1.0)
    _, (W, obj, gap), _, steps = _barrier_solve(A0, A, fobj, y0, recover, tol, "diag sdp")
    return SdpSolution(matrix=W, objective=obj * scale, dual_gap=gap * scale, iterations=steps)
