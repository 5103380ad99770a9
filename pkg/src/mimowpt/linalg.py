"""Dense complex linear algebra for the small matrices used by the optimizers.

Thin validated wrappers around LAPACK (through :mod:`numpy.linalg`). All
functions accept anything array-like and never modify their input.
"""

import numpy as np

from .errors import InvalidInputError, UndefinedRatioError

__all__ = ["as_complex_matrix", "svd", "evd_hermitian", "rank1_ratio", "is_rank1", "normalize_phase"]

HERMITIAN_RTOL = 1e-9


def as_complex_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D complex array.

    Raises
    ------
    InvalidInputError
        If ``a`` is not 2-D, is empty or holds NaN/Inf entries.
    """
    arr = np.asarray(a, dtype=complex)
    if arr.ndim != 2:
        raise InvalidInputError(f"{name} must be 2-D, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return arr


def svd(a):
    """Thin SVD ``A = U diag(s) V^H``.

    Returns ``(U, s, V)`` with ``s`` sorted in descending order and ``V``
    (not ``V^H``) holding the right singular vectors as columns. A zero
    matrix yields zero singular values and arbitrary orthonormal bases.
    """
    arr = as_complex_matrix(a)
    u, s, vh = np.linalg.svd(arr, full_matrices=False)
    return u, s, vh.conj().T


def evd_hermitian(w):
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns.

    Raises
    ------
    InvalidInputError
        If ``w`` is not square or deviates from Hermitian symmetry by more
        than ``1e-9 * ||w||_F``.
    """
    arr = as_complex_matrix(w)
    if arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"matrix must be square, got shape {arr.shape}")
    norm = np.linalg.norm(arr)
    if np.linalg.norm(arr - arr.conj().T) > HERMITIAN_RTOL * max(norm, 1e-300):
        raise InvalidInputError("matrix is not Hermitian")
    lam, vec = np.linalg.eigh(0.5 * (arr + arr.conj().T))
    return lam[::-1].copy(), vec[:, ::-1].copy()


def rank1_ratio(w):
    """Share of the trace carried by the largest eigenvalue.

    Negative eigenvalues from round-off are clipped to zero, so the result
    lies in ``[0, 1]`` and is 1 exactly for a rank-1 matrix up to
    round-off.
    """
    lam, _ = evd_hermitian(w)
    lam = np.clip(lam, 0.0, None)
    total = lam.sum()
    if not total > 0.0:
        raise UndefinedRatioError("rank-1 ratio undefined for zero-trace matrix")
    return float(lam[0] / total)


def is_rank1(w, threshold=1e-6):
    """True when :func:`rank1_ratio` exceeds ``1 - threshold``."""
    return rank1_ratio(w) > 1.0 - threshold


def normalize_phase(v):
    """Rotate ``v`` so its first non-negligible entry is real and positive."""
    v = np.asarray(v, dtype=complex)
    mags = np.abs(v)
    if not mags.any():
        return v.copy()
    k = int(np.argmax(mags > 1e-12 * mags.max()))
    out = v * np.exp(-1j * np.angle(v[k]))
    out[k] = mags[k]
    return out
