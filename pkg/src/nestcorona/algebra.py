"""Finite-dimensional nest-algebra models.

A model is a direct sum of full matrix algebras ``M_{d_1} + ... + M_{d_S}``;
summand ``s`` carries an ordered block decomposition ``(d_1, ..., d_K)`` whose
partial sums define the nest ``0 = Q_0 < Q_1 < ... < Q_K = I``.  The algebra
is the block upper-triangular part, the diagonal is the block-diagonal part,
and the conditional expectation keeps diagonal blocks.

Elements are dense ``(d, d)`` complex arrays over the whole direct sum, with
entries between different summands held at zero.  The Hilbert-Schmidt space
is indexed only by the in-summand entries, so its dimension is
``sum_s d_s**2``.  Vectorization is row-major, hence left multiplication by
``A`` is ``kron(A, I)`` and right multiplication is ``kron(I, A.T)``
restricted to those indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .config import resolve_tol
from .exceptions import DimensionError, InvalidModel

__all__ = [
    "FiniteModel",
    "SuperOp",
    "make_model",
    "check_mat",
    "opnorm",
    "phi",
    "in_algebra",
    "band",
    "band_range",
    "hs_projection",
    "proj_hs",
    "mult_op",
    "vec",
    "unvec",
    "hs_inner",
    "block_triangular_inverse",
]


def opnorm(X) -> float:
    """Spectral norm (largest singular value); zero for empty arrays."""
    X = np.asarray(X)
    if X.size == 0:
        return 0.0
    return float(np.linalg.svd(X, compute_uv=False)[0])


@dataclass(frozen=True)
class FiniteModel:
    """Direct sum of block-nested full matrix algebras.

    Parameters
    ----------
    summands : tuple of tuple of int
        Block sizes of each summand, in nest order.
    """

    summands: tuple

    def __post_init__(self):
        if len(self.summands) == 0:
            raise InvalidModel("a model needs at least one summand")
        clean = []
        for s in self.summands:
            s = tuple(s)
            if len(s) == 0:
                raise InvalidModel("empty block-size list")
            for b in s:
                if isinstance(b, bool) or int(b) != b or b < 1:
                    raise InvalidModel(f"block sizes must be positive integers, got {b!r}")
            clean.append(tuple(int(b) for b in s))
        object.__setattr__(self, "summands", tuple(clean))

    # -- dimension bookkeeping -------------------------------------------

    @cached_property
    def dims(self) -> tuple:
        return tuple(sum(s) for s in self.summands)

    @property
    def dim(self) -> int:
        return sum(self.dims)

    @property
    def n_summands(self) -> int:
        return len(self.summands)

    @cached_property
    def offsets(self) -> tuple:
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.dims)[:-1]]))

    @property
    def depth(self) -> int:
        """Largest number of blocks over the summands."""
        return max(len(s) for s in self.summands)

    @property
    def hs_dim(self) -> int:
        return sum(d * d for d in self.dims)

    def summand_slice(self, s: int) -> slice:
        return slice(self.offsets[s], self.offsets[s] + self.dims[s])

    def block_slices(self, s: int) -> list:
        """Global slices of the blocks of summand ``s``, in nest order."""
        start = self.offsets[s]
        out = []
        for b in self.summands[s]:
            out.append(slice(start, start + b))
            start += b
        return out

    @cached_property
    def summand_of(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_summands), self.dims)

    @cached_property
    def block_of(self) -> np.ndarray:
        """1-based block index of every coordinate within its summand."""
        parts = [np.repeat(np.arange(1, len(s) + 1), s) for s in self.summands]
        return np.concatenate(parts)

    @cached_property
    def support(self) -> np.ndarray:
        """Boolean ``(d, d)`` mask of in-summand entries."""
        so = self.summand_of
        return so[:, None] == so[None, :]

    @cached_property
    def band_index(self) -> np.ndarray:
        """Integer ``(d, d)`` array: column block minus row block.

        Entries outside the support hold a sentinel larger than any band.
        """
        bo = self.block_of
        out = bo[None, :] - bo[:, None]
        out = np.where(self.support, out, 10 * (self.depth + 1))
        return out

    @cached_property
    def hs_index(self) -> np.ndarray:
        """Flat (row-major) indices of the Hilbert-Schmidt coordinates."""
        return np.flatnonzero(self.support.ravel())

    @cached_property
    def hs_band(self) -> np.ndarray:
        """Band label of each Hilbert-Schmidt coordinate."""
        return self.band_index.ravel()[self.hs_index]

    # -- distinguished elements ------------------------------------------

    @property
    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def Q(self, n: int, summand: int | None = None) -> np.ndarray:
        """Nest projection ``Q_n`` (sum of the first ``n`` blocks).

        With ``summand=None`` the projection is taken in every summand at once
        (``Q_n = I`` in summands with fewer than ``n`` blocks).
        """
        diag = np.zeros(self.dim)
        for s in range(self.n_summands) if summand is None else [summand]:
            sl = self.summand_slice(s)
            diag[sl] = self.block_of[sl] <= n
        return np.diag(diag).astype(complex)

    def E(self, j: int, summand: int | None = None) -> np.ndarray:
        """Block projection ``E_j = Q_j - Q_{j-1}``."""
        diag = np.zeros(self.dim)
        for s in range(self.n_summands) if summand is None else [summand]:
            sl = self.summand_slice(s)
            diag[sl] = self.block_of[sl] == j
        return np.diag(diag).astype(complex)

    def summand_projection(self, s: int) -> np.ndarray:
        return np.diag((self.summand_of == s).astype(float)).astype(complex)

    def diagonal_basis(self) -> list:
        """Matrix units spanning the diagonal algebra."""
        units = []
        for s in range(self.n_summands):
            for sl in self.block_slices(s):
                for a in range(sl.start, sl.stop):
                    for b in range(sl.start, sl.stop):
                        e = np.zeros((self.dim, self.dim), dtype=complex)
                        e[a, b] = 1.0
                        units.append(e)
        return units

    # -- derived models --------------------------------------------------

    def adjoint(self) -> "FiniteModel":
        """Model whose algebra is the flip-conjugate of the adjoint algebra."""
        return FiniteModel(tuple(tuple(reversed(s)) for s in self.summands))

    @cached_property
    def flip(self) -> np.ndarray:
        """Permutation matrix reversing coordinates inside every summand.

        ``flip @ A.conj().T @ flip`` maps this model's algebra onto the
        algebra of :meth:`adjoint`.
        """
        perm = np.concatenate(
            [np.arange(o + d - 1, o - 1, -1) for o, d in zip(self.offsets, self.dims)]
        )
        J = np.zeros((self.dim, self.dim))
        J[np.arange(self.dim), perm] = 1.0
        return J

    def amplify(self, N: int) -> tuple:
        """Model of ``algebra (x) M_N`` and the coordinate permutation.

        Returns ``(model, perm)``.  A matrix ``X`` in natural ``N x N`` block
        layout (copy-major) is carried to the amplified model as
        ``X[np.ix_(perm, perm)]``.
        """
        d = self.dim
        perm = []
        for s in range(self.n_summands):
            for sl in self.block_slices(s):
                for k in range(N):
                    perm.extend(k * d + i for i in range(sl.start, sl.stop))
        model = FiniteModel(tuple(tuple(N * b for b in s) for s in self.summands))
        return model, np.asarray(perm)

    def assemble(self, blocks: Sequence) -> np.ndarray:
        """Build a full matrix from per-summand square arrays."""
        if len(blocks) != self.n_summands:
            raise DimensionError(
                f"expected {self.n_summands} summand matrices, got {len(blocks)}"
            )
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for s, B in enumerate(blocks):
            B = np.asarray(B, dtype=complex)
            if B.shape != (self.dims[s], self.dims[s]):
                raise DimensionError(
                    f"summand {s} expects shape {(self.dims[s],) * 2}, got {B.shape}"
                )
            sl = self.summand_slice(s)
            out[sl, sl] = B
        return out

    def split(self, A) -> list:
        """Per-summand square arrays of a full matrix."""
        A = check_mat(A, self)
        return [A[self.summand_slice(s), self.summand_slice(s)] for s in range(self.n_summands)]


def make_model(block_size_lists) -> FiniteModel:
    """Build a :class:`FiniteModel` from a list of block-size lists.

    A flat list of integers is accepted as a single summand.

    >>> make_model([[2, 1]]).dim
    3
    """
    lists = list(block_size_lists)
    if len(lists) == 0:
        raise InvalidModel("empty block-size list")
    if all(isinstance(x, (int, np.integer)) and not isinstance(x, bool) for x in lists):
        lists = [lists]
    try:
        return FiniteModel(tuple(tuple(s) for s in lists))
    except TypeError as exc:
        raise InvalidModel(f"malformed block-size lists: {block_size_lists!r}") from exc


def check_mat(A, model: FiniteModel, tol: float | None = None) -> np.ndarray:
    """Validate ``A`` against ``model`` and return it as a complex array.

    Entries between different summands must vanish up to ``tol`` relative to
    ``max(1, ||A||)``; they are zeroed in the returned copy.
    """
    try:
        A = np.array(A, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise DimensionError(f"not a numeric matrix: {exc}") from exc
    d = model.dim
    if A.shape != (d, d):
        raise DimensionError(f"expected a {d}x{d} matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DimensionError("matrix has non-finite entries")
    if model.n_summands > 1:
        off = np.where(model.support, 0, A)
        scale = max(1.0, float(np.abs(A).max(initial=0.0)))
        if np.abs(off).max(initial=0.0) > resolve_tol(tol) * scale:
            raise DimensionError("matrix has entries between different summands")
        A[~model.support] = 0.0
    return A


# -- conditional expectation, membership, bands ----------------------------


def band(A, model: FiniteModel, n: int) -> np.ndarray:
    """``n``-th block superdiagonal ``sum_j E_j A E_{j+n}`` (negative: subdiagonal)."""
    A = check_mat(A, model)
    return np.where(model.band_index == n, A, 0)


def band_range(model: FiniteModel) -> range:
    """Band indices that can be nonzero in ``model``."""
    K = model.depth
    return range(-(K - 1), K)


def phi(A, model: FiniteModel) -> np.ndarray:
    """Conditional expectation onto the block diagonal."""
    return band(A, model, 0)


def in_algebra(A, model: FiniteModel, which: str = "algebra", tol: float | None = None) -> bool:
    """Membership test for the algebra, its ideal, or the diagonal.

    ``which='algebra'``: ``max_n ||(I-Q_n) A Q_n|| <= tol``.
    ``which='ideal'``: additionally ``||Phi(A)|| <= tol``.
    ``which='diagonal'``: ``||A - Phi(A)|| <= tol``.
    """
    tol = resolve_tol(tol)
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    A = check_mat(A, model)
    if which == "diagonal":
        return opnorm(A - phi(A, model)) <= tol
    lower = max((opnorm(c) for c in nest_compressions(A, model)), default=0.0)
    if which == "algebra":
        return lower <= tol
    if which == "ideal":
        return lower <= tol and opnorm(phi(A, model)) <= tol
    raise ValueError(f"unknown membership kind {which!r}")


def nest_compressions(A, model: FiniteModel):
    """Yield ``(I - Q_n) A Q_n`` blocks for every summand and ``0 < n < K``."""
    for s in range(model.n_summands):
        sl = model.summand_slice(s)
        As = A[sl, sl]
        cuts = np.cumsum(model.summands[s])[:-1]
        for c in cuts:
            yield As[c:, :c]


def lower_part_norm(A, model: FiniteModel) -> float:
    """Spectral norm of the strictly block-lower part (distance-free membership gauge)."""
    A = check_mat(A, model)
    return opnorm(np.where(model.band_index < 0, A, 0))


# -- Hilbert-Schmidt realization --------------------------------------------


def vec(x, model: FiniteModel) -> np.ndarray:
    x = check_mat(x, model)
    return x.ravel()[model.hs_index]


def unvec(v, model: FiniteModel) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.shape != (model.hs_dim,):
        raise DimensionError(f"expected a vector of length {model.hs_dim}, got {v.shape}")
    out = np.zeros(model.dim * model.dim, dtype=complex)
    out[model.hs_index] = v
    return out.reshape(model.dim, model.dim)


def hs_inner(x, y) -> complex:
    """``<x, y> = tr(y^* x)``."""
    return complex(np.vdot(np.asarray(y), np.asarray(x)))


@dataclass(frozen=True)
class SuperOp:
    """Linear operator on the Hilbert-Schmidt space of a model.

    ``space`` is ``"L2"`` for the full Hilbert-Schmidt space or ``"H2"`` for
    the block upper-triangular subspace (Toeplitz compressions).
    """

    matrix: np.ndarray
    model: FiniteModel
    origin: str = ""
    space: str = "L2"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def basis(self) -> np.ndarray:
        """Positions (within the Hilbert-Schmidt coordinates) spanned by ``space``."""
        if self.space == "L2":
            return np.arange(self.model.hs_dim)
        return np.flatnonzero(self.model.hs_band >= 0)

    def apply(self, x) -> np.ndarray:
        v = vec(x, self.model)
        idx = self.basis
        if self.space != "L2" and np.abs(np.delete(v, idx)).max(initial=0.0) > 0:
            raise DimensionError("argument is not in the operator's domain")
        out = np.zeros(self.model.hs_dim, dtype=complex)
        out[idx] = self.matrix @ v[idx]
        return unvec(out, self.model)

    def adjoint(self) -> "SuperOp":
        return SuperOp(self.matrix.conj().T, self.model, f"({self.origin})*", self.space)

    def norm(self) -> float:
        return opnorm(self.matrix)

    def _check(self, other):
        if not isinstance(other, SuperOp):
            return NotImplemented
        if other.model != self.model or other.space != self.space:
            raise DimensionError("super-operators live on different spaces")
        return other

    def __matmul__(self, other):
        if isinstance(other, SuperOp):
            self._check(other)
            return SuperOp(self.matrix @ other.matrix, self.model,
                           f"{self.origin}.{other.origin}", self.space)
        return NotImplemented

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SuperOp(self.matrix + other.matrix, self.model,
                       f"{self.origin}+{other.origin}", self.space)

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return SuperOp(self.matrix - other.matrix, self.model,
                       f"{self.origin}-{other.origin}", self.space)

    def __rmul__(self, c):
        if np.isscalar(c):
            return SuperOp(c * self.matrix, self.model, self.origin, self.space)
        return NotImplemented

    @classmethod
    def identity(cls, model: FiniteModel) -> "SuperOp":
        return cls(np.eye(model.hs_dim, dtype=complex), model, "I")


def _band_mask(model: FiniteModel, which: str, k: int | None) -> np.ndarray:
    b = model.hs_band
    if which == "P0":
        return b >= 0
    if which == "P1":
        return b >= 1
    if k is None:
        raise ValueError(f"projection {which!r} needs an index k")
    if which == "Pn":
        return b >= k
    if which == "En":
        return b == k
    raise ValueError(f"unknown projection {which!r}")


def hs_projection(model: FiniteModel, which: str = "P0", k: int | None = None) -> SuperOp:
    """Orthogonal projection on the Hilbert-Schmidt space.

    ``P0`` keeps bands ``>= 0`` (``H^2``), ``P1`` bands ``>= 1`` (``H^2_0``),
    ``Pn`` bands ``>= k`` and ``En`` exactly band ``k``.
    """
    mask = _band_mask(model, which, k)
    name = which if k is None else f"{which}({k})"
    return SuperOp(np.diag(mask.astype(complex)), model, name)


def proj_hs(x, model: FiniteModel, which: str = "P0", k: int | None = None) -> np.ndarray:
    """Apply :func:`hs_projection` to a matrix."""
    x = check_mat(x, model)
    keep = _band_mask(model, which, k)
    out = np.zeros(model.dim * model.dim, dtype=complex)
    idx = model.hs_index[keep]
    out[idx] = x.ravel()[idx]
    return out.reshape(x.shape)


def mult_op(A, model: FiniteModel, side: str = "left") -> SuperOp:
    """Left (``x -> A x``) or right (``x -> x A``) multiplication super-operator."""
    A = check_mat(A, model)
    eye = np.eye(model.dim)
    if side == "left":
        full = np.kron(A, eye)
        name = "L_A"
    elif side == "right":
        full = np.kron(eye, A.T)
        name = "R_A"
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    idx = model.hs_index
    return SuperOp(full[np.ix_(idx, idx)], model, name)


def block_triangular_inverse(C, model: FiniteModel) -> np.ndarray:
    """Inverse of an invertible block upper-triangular matrix by back substitution.

    The result is exactly block upper-triangular.
    """
    C = check_mat(C, model)
    X = np.zeros_like(C)
    for s in range(model.n_summands):
        sls = model.block_slices(s)
        K = len(sls)
        inv_diag = [np.linalg.inv(C[sl, sl]) for sl in sls]
        for j in range(K):
            X[sls[j], sls[j]] = inv_diag[j]
            for i in range(j - 1, -1, -1):
                acc = np.zeros((sls[i].stop - sls[i].start, sls[j].stop - sls[j].start), dtype=complex)
                for l in range(i + 1, j + 1):
                    acc += C[sls[i], sls[l]] @ X[sls[l], sls[j]]
                X[sls[i], sls[j]] = -inv_diag[i] @ acc
    return X
