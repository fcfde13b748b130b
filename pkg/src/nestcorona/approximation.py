"""Distance to the nest algebra and nearest approximants.

The distance is computed from the nest compressions ``(I - Q_n) A Q_n`` and,
independently, from the compressions of left multiplication on the
Hilbert-Schmidt space by ``P0`` and ``P1``.  A nearest element is built by
filling the block upper-triangular part of ``A - B`` one block at a time,
each step a minimal-norm two-by-two completion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FiniteModel, check_mat, mult_op, opnorm
from .config import NEAREST_REG

__all__ = ["DistanceReport", "nest_distance", "hs_compression_norm", "nearest_in_algebra"]


@dataclass(frozen=True)
class DistanceReport:
    """Distance from a matrix to the algebra.

    Attributes
    ----------
    value : float
        ``max_n ||(I - Q_n) A Q_n||`` over all summands.
    attaining_index : int
        Nest index attaining the maximum (smallest on ties; 0 if the
        distance is zero).
    attaining_summand : int
    hs_value_P0, hs_value_P1 : float
        ``||(I - P) L_A P||`` on the Hilbert-Schmidt space.
    per_index : tuple of float
        ``max`` over summands of ``||(I - Q_n) A Q_n||`` for ``n = 0..K``.
    """

    value: float
    attaining_index: int
    attaining_summand: int
    hs_value_P0: float
    hs_value_P1: float
    per_index: tuple

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "attaining_index": self.attaining_index,
            "attaining_summand": self.attaining_summand,
            "hs_value_P0": self.hs_value_P0,
            "hs_value_P1": self.hs_value_P1,
            "per_index": list(self.per_index),
        }


def hs_compression_norm(A, model: FiniteModel, which: str = "P0") -> float:
    """``||(I - P) L_A P||`` with ``P`` the ``P0`` or ``P1`` projection."""
    L = mult_op(A, model, "left").matrix
    b = model.hs_band
    keep = b >= (0 if which == "P0" else 1)
    if which not in ("P0", "P1"):
        raise ValueError(f"which must be 'P0' or 'P1', got {which!r}")
    return opnorm(L[np.ix_(~keep, keep)])


def nest_distance(A, model: FiniteModel) -> DistanceReport:
    """Distance from ``A`` to the algebra via the nest formula."""
    A = check_mat(A, model)
    per_index = np.zeros(model.depth + 1)
    best, best_n, best_s = 0.0, 0, 0
    for s in range(model.n_summands):
        sl = model.summand_slice(s)
        As = A[sl, sl]
        cuts = np.cumsum(model.summands[s])[:-1]
        for n, c in enumerate(cuts, start=1):
            v = opnorm(As[c:, :c])
            per_index[n] = max(per_index[n], v)
            if v > best or (v == best and v > 0 and n < best_n):
                best, best_n, best_s = v, n, s
    return DistanceReport(
        value=best,
        attaining_index=best_n,
        attaining_summand=best_s,
        hs_value_P0=hs_compression_norm(A, model, "P0"),
        hs_value_P1=hs_compression_norm(A, model, "P1"),
        per_index=tuple(float(x) for x in per_index),
    )


def _inv_sqrt_gap(G, mu2):
    """``(mu2 I - G)^{-1/2}`` for Hermitian PSD ``G`` with ``||G|| <= mu2``."""
    if G.shape[0] == 0:
        return np.zeros_like(G)
    w, V = np.linalg.eigh(G)
    gap = np.maximum(mu2 - w, mu2 * 1e-300 + np.finfo(float).tiny)
    return (V / np.sqrt(gap)) @ V.conj().T


def _central_completion(A, B, C, mu):
    """Central solution ``X`` of ``min ||[[A, B], [C, X]]||`` at level ``mu``.

    Requires ``mu`` at least the norms of ``[A, B]`` and ``[A; C]``.
    """
    if A.size == 0:
        return np.zeros((C.shape[0], B.shape[1]), dtype=complex)
    mu2 = mu * mu
    Kc = C @ _inv_sqrt_gap(A.conj().T @ A, mu2)
    Lr = _inv_sqrt_gap(A @ A.conj().T, mu2) @ B
    return -Kc @ A.conj().T @ Lr


def _complete_summand(As, sizes, mu):
    """Fill the block upper part of ``As`` (lower blocks kept) at level ``mu``."""
    X = np.array(As, dtype=complex)
    edges = np.concatenate([[0], np.cumsum(sizes)])
    K = len(sizes)
    # zero the unknown (upper, incl. diagonal) blocks before filling
    for i in range(K):
        X[edges[i]:edges[i + 1], edges[i]:] = 0
    for n in range(K):
        for i in range(K - n):
            j = i + n
            r0, r1 = edges[i], edges[i + 1]
            c0, c1 = edges[j], edges[j + 1]
            # unknown block at rows [r0, r1), cols [c0, c1); the staircase
            # submatrix is rows [r0, end) x cols [0, c1)
            shared = X[r1:, :c0]
            below = X[r1:, c0:c1]
            left = X[r0:r1, :c0]
            X[r0:r1, c0:c1] = _central_completion(shared, below, left, mu)
    return X


def nearest_in_algebra(A, model: FiniteModel, reg: float = NEAREST_REG):
    """Nearest element of the algebra to ``A``.

    Returns ``(B, mu)`` with ``B`` block upper-triangular (exactly, in every
    summand) and ``mu`` the distance, such that
    ``||A - B|| <= mu * (1 + reg)`` up to rounding.
    """
    A = check_mat(A, model)
    mu = nest_distance(A, model).value
    B = np.array(A)
    if mu == 0.0:
        return np.where(model.band_index >= 0, A, 0), 0.0
    level = mu * (1.0 + reg)
    for s in range(model.n_summands):
        sl = model.summand_slice(s)
        X = _complete_summand(A[sl, sl], model.summands[s], level)
        B[sl, sl] = A[sl, sl] - X
    B = np.where(model.band_index >= 0, B, 0)
    return B, mu
