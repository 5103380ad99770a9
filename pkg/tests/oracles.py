"""Brute-force reference solutions for 2x2 channels, independent of the solvers."""

import numpy as np

from mimowpt.rectenna import vout_single


def dc_grid_max(H, P, coeffs, r_load, n_angle=400, n_phase=400):
    """Best DC-combined power over unit-norm rank-1 beams ``[cos a, sin a e^{j phi}]``."""
    a = np.linspace(0.0, np.pi / 2, n_angle)
    phi = np.linspace(-np.pi, np.pi, n_phase, endpoint=False)
    A, PHI = np.meshgrid(a, phi, indexing="ij")
    w0 = np.cos(A) * np.sqrt(2 * P)
    w1 = np.sin(A) * np.exp(1j * PHI) * np.sqrt(2 * P)
    total = np.zeros_like(A)
    for q in range(H.shape[0]):
        amp = np.abs(H[q, 0] * w0 + H[q, 1] * w1)
        total += vout_single(amp, coeffs) ** 2
    return float(total.max() / r_load)


def phase_grid_max(H, n=10_000):
    """Best ``||w_R^H H||**2`` over ``w_R = [1, e^{-j theta}] / sqrt(2)``."""
    theta = np.linspace(-np.pi, np.pi, n, endpoint=False)
    w = np.stack([np.ones_like(theta), np.exp(-1j * theta)]) / np.sqrt(2)
    G = H @ H.conj().T
    return float(np.einsum("il,ij,jl->l", w.conj(), G, w).real.max())


def mrt_power(h, P, coeffs, r_load):
    """Single receive antenna optimum: amplitude ``sqrt(2P) ||h||``."""
    return float(vout_single(np.sqrt(2 * P) * np.linalg.norm(h), coeffs) ** 2 / r_load)


def trace_is_monotone(trace, rel=1e-8):
    t = np.asarray(trace)
    return bool(np.all(t[1:] >= t[:-1] * (1 - rel)))
