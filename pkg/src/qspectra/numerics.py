"""Dense eigenvalue and singular value kernels.

Thin, contract-checked wrappers around LAPACK (through numpy/scipy): the
eigensolver is Hessenberg reduction plus implicitly shifted QR, singular
values come from bidiagonalization.  Wrappers exist so callers get explicit
failures, recorded backward errors, and the conjugate-pairing step that the
spectral engine relies on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "EigenResult",
    "SingularEstimate",
    "NumericsError",
    "EigensolverError",
    "NonConvergenceError",
    "StructuralIntegrityError",
    "eig_dense",
    "sigma_min",
    "sigma_max",
    "singular_values",
    "sigma_min_bidiagonal",
    "pair_conjugates",
]


class NumericsError(Exception):
    """Base class for numerical kernel failures."""


class EigensolverError(NumericsError):
    """Eigenvalue iteration did not converge within the LAPACK sweep cap."""

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class NonConvergenceError(NumericsError):
    """Singular value iteration failed; never reported silently."""


class StructuralIntegrityError(NumericsError):
    """Eigenvalues of a complex adjoint failed to pair into conjugates,
    which signals a bug upstream rather than a property of the input."""


@dataclass(frozen=True)
class EigenResult:
    values: np.ndarray
    backward_error: float


@dataclass(frozen=True)
class SingularEstimate:
    value: float
    kind: str
    converged: bool = True


def eig_dense(M: np.ndarray) -> EigenResult:
    """All eigenvalues with multiplicity, sorted by (real, imag).

    The recorded backward error is max_k ||M v_k - mu_k v_k|| / ||M||
    over computed eigenpairs; the returned values also satisfy
    sigma_min(M - mu I) <= 1e-8 * sigma_max(M).
    """
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(np.imag(M))):
        raise ValueError("matrix entries must be finite")
    try:
        w, v = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigenvalue QR iteration failed: {exc}") from exc
    mnorm = float(np.linalg.norm(M, 2))
    if mnorm == 0.0:
        be = 0.0
    else:
        res = np.linalg.norm(M @ v - v * w[None, :], axis=0)
        vn = np.linalg.norm(v, axis=0)
        be = float(np.max(res / (mnorm * np.maximum(vn, 1e-300))))
    order = np.lexsort((w.imag, w.real))
    return EigenResult(values=w[order], backward_error=be)


def singular_values(M: np.ndarray) -> np.ndarray:
    """All singular values, descending."""
    try:
        return np.linalg.svd(np.asarray(M), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"SVD iteration failed: {exc}") from exc


def sigma_min(M: np.ndarray) -> SingularEstimate:
    """Smallest singular value, accurate to ~eps * sigma_max absolutely.

    Exact-zero detection is not promised; thresholding is the caller's job.
    """
    s = singular_values(M)
    return SingularEstimate(value=float(s[-1]), kind="smallest")


def sigma_max(M: np.ndarray) -> SingularEstimate:
    """Largest singular value (the operator 2-norm)."""
    s = singular_values(M)
    return SingularEstimate(value=float(s[0]), kind="largest")


def sigma_min_bidiagonal(diag: np.ndarray, superdiag: np.ndarray) -> SingularEstimate:
    """Smallest singular value of a real upper bidiagonal matrix.

    Assembled in upper bidiagonal form the LAPACK reduction step is exact,
    so the QR-on-bidiagonal path (gesvd) delivers high *relative* accuracy
    even for singular values far below eps * sigma_max.  Used where dense
    SVD would bottom out at its absolute noise floor.
    """
    d = np.asarray(diag, dtype=float)
    e = np.asarray(superdiag, dtype=float)
    if d.ndim != 1 or e.shape != (max(d.size - 1, 0),):
        raise ValueError("need diag of length n and superdiag of length n-1")
    B = np.diag(d)
    if d.size > 1:
        B[np.arange(d.size - 1), np.arange(1, d.size)] = e
    try:
        s = scipy.linalg.svd(B, compute_uv=False, lapack_driver="gesvd")
    except scipy.linalg.LinAlgError as exc:
        raise NonConvergenceError(f"bidiagonal SVD failed: {exc}") from exc
    return SingularEstimate(value=float(s[-1]), kind="smallest")


def pair_conjugates(values: np.ndarray, *, tol_factor: float = 1e-8) -> np.ndarray:
    """Greedily match each eigenvalue with a partner near its conjugate.

    Input must carry the conjugate symmetry of a complex adjoint.  Returns
    an (m, 2) array of (re, |im|) per matched pair, m = len(values) / 2.
    Unmatched values raise StructuralIntegrityError: the symmetry is
    structural, so failure means a broken embedding, not bad luck.
    """
    w = np.asarray(values, dtype=complex).copy()
    if w.size % 2 != 0:
        raise StructuralIntegrityError(f"odd eigenvalue count {w.size} cannot pair")
    order = np.lexsort((w.imag, w.real))
    w = w[order]
    used = np.zeros(w.size, dtype=bool)
    pairs = []
    for idx in range(w.size):
        if used[idx]:
            continue
        used[idx] = True
        target = np.conj(w[idx])
        dist = np.abs(w - target)
        dist[used] = np.inf
        jdx = int(np.argmin(dist))
        tol = tol_factor * max(1.0, abs(w[idx]))
        if not np.isfinite(dist[jdx]) or dist[jdx] > tol:
            raise StructuralIntegrityError(
                f"eigenvalue {w[idx]} has no conjugate partner within {tol:.3e} "
                f"(closest at distance {dist[jdx]:.3e})"
            )
        used[jdx] = True
        a = 0.5 * (w[idx].real + w[jdx].real)
        b = 0.5 * (abs(w[idx].imag) + abs(w[jdx].imag))
        pairs.append((a, b))
    return np.array(pairs, dtype=float).reshape(-1, 2)
