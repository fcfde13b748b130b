"""Factorizations inside the nest algebra.

Both factorizations are canonical: the diagonal blocks of the triangular
factor are Hermitian positive definite.  With that normalization the QR-type
factor ``R`` of ``S`` coincides with the Cholesky-type factor of ``S^* S``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FiniteModel, block_triangular_inverse, check_mat, lower_part_norm, opnorm
from .config import INVERTIBILITY_TOL, resolve_tol
from .exceptions import NotPositiveDefinite, SingularInput

__all__ = ["FactorizationResult", "qr_in_algebra", "cholesky_in_algebra", "psd_sqrt", "membership_residual"]


@dataclass(frozen=True)
class FactorizationResult:
    """Output of :func:`qr_in_algebra` or :func:`cholesky_in_algebra`.

    ``R_or_C`` is the triangular factor, ``inverse`` its inverse (also in the
    algebra) and ``residual`` the relative reconstruction error.  ``U`` is
    ``None`` for the Cholesky-type factorization.
    """

    U: np.ndarray | None
    R_or_C: np.ndarray
    inverse: np.ndarray
    residual: float
    unitarity: float = 0.0


def psd_sqrt(H):
    """Principal square root of a Hermitian positive semidefinite matrix."""
    H = 0.5 * (H + H.conj().T)
    w, V = np.linalg.eigh(H)
    return (V * np.sqrt(np.clip(w, 0, None))) @ V.conj().T


def _polar(W):
    """``W = U H`` with ``U`` an isometry and ``H`` Hermitian positive definite."""
    X, s, Yh = np.linalg.svd(W, full_matrices=False)
    return X @ Yh, (Yh.conj().T * s) @ Yh


def qr_in_algebra(S, model: FiniteModel, tol: float = INVERTIBILITY_TOL) -> FactorizationResult:
    """Factor ``S = U R`` with ``U`` unitary and ``R, R^{-1}`` in the algebra.

    Block Gram-Schmidt (with one reorthogonalization pass) on the block
    columns of every summand; the diagonal blocks of ``R`` are the Hermitian
    factors of the polar decompositions of the orthogonalized columns.

    Raises
    ------
    SingularInput
        If ``sigma_min(S) <= tol * ||S||``.
    """
    S = check_mat(S, model)
    sv = np.linalg.svd(S, compute_uv=False)
    if sv.size == 0 or sv[-1] <= tol * sv[0]:
        smin = float(sv[-1]) if sv.size else 0.0
        raise SingularInput(f"matrix is singular to tolerance (sigma_min={smin:.3e})", smin)
    U = np.zeros_like(S)
    R = np.zeros_like(S)
    for s in range(model.n_summands):
        ssl = model.summand_slice(s)
        Ss = S[ssl, ssl]
        cols = [slice(sl.start - ssl.start, sl.stop - ssl.start) for sl in model.block_slices(s)]
        Us = np.zeros_like(Ss)
        Rs = np.zeros_like(Ss)
        for j, cj in enumerate(cols):
            W = Ss[:, cj].copy()
            for _ in range(2):
                for i in range(j):
                    ci = cols[i]
                    coef = Us[:, ci].conj().T @ W
                    Rs[ci, cj] += coef
                    W -= Us[:, ci] @ coef
            Uj, Hj = _polar(W)
            Us[:, cj] = Uj
            Rs[cj, cj] = Hj
        U[ssl, ssl] = Us
        R[ssl, ssl] = Rs
    scale = max(sv[0], np.finfo(float).tiny)
    residual = opnorm(U @ R - S) / scale
    unitarity = opnorm(U.conj().T @ U - np.eye(model.dim))
    return FactorizationResult(U, R, block_triangular_inverse(R, model), residual, unitarity)


def cholesky_in_algebra(P, model: FiniteModel, tol: float | None = None) -> FactorizationResult:
    """Factor ``P = C^* C`` with ``C, C^{-1}`` in the algebra.

    Block Cholesky, eliminating lower-index blocks first; each diagonal block
    is the principal square root of the current Schur complement.

    Raises
    ------
    NotPositiveDefinite
        If ``P`` is not Hermitian, or ``lambda_min(P) <= tol``.
    """
    tol = resolve_tol(tol)
    P = check_mat(P, model)
    scale = max(opnorm(P), np.finfo(float).tiny)
    if opnorm(P - P.conj().T) > tol * scale:
        raise NotPositiveDefinite("matrix is not Hermitian")
    P = 0.5 * (P + P.conj().T)
    lam = float(np.linalg.eigvalsh(P)[0])
    if lam <= tol:
        raise NotPositiveDefinite(f"matrix is not positive definite (lambda_min={lam:.3e})", lam)
    C = np.zeros_like(P)
    for s in range(model.n_summands):
        sls = model.block_slices(s)
        for j, sj in enumerate(sls):
            schur = P[sj, sj].copy()
            for i in range(j):
                schur -= C[sls[i], sj].conj().T @ C[sls[i], sj]
            Cjj = psd_sqrt(schur)
            C[sj, sj] = Cjj
            for k in range(j + 1, len(sls)):
                sk = sls[k]
                rhs = P[sj, sk].copy()
                for i in range(j):
                    rhs -= C[sls[i], sj].conj().T @ C[sls[i], sk]
                # C_jj is Hermitian, so C_jj^* C_jk = rhs
                C[sj, sk] = np.linalg.solve(Cjj, rhs)
    residual = opnorm(C.conj().T @ C - P) / scale
    return FactorizationResult(None, C, block_triangular_inverse(C, model), residual)


def membership_residual(result: FactorizationResult, model: FiniteModel) -> float:
    """Largest block-lower norm of the triangular factor and its inverse."""
    return max(lower_part_norm(result.R_or_C, model), lower_part_norm(result.inverse, model))
