"""Periodic flow, spectral strata and the associated projections.

On a finite model the flow ``alpha_t`` multiplies band ``n`` by ``e^{int}``;
its spectral subspaces (strata) are the block superdiagonals.  Each stratum is
spanned, as a right module over the diagonal, by a column-orthogonal family of
partial isometries ``U_{n,m}``; these give the projections
``F_n = sum_m U_{n,m} U_{n,m}^*`` and the maps
``beta_n(T) = sum_m L_{U_{n,m}} T L_{U_{n,m}^*}`` on the commutant of the
left diagonal action.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import FiniteModel, SuperOp, check_mat, mult_op, opnorm
from .config import resolve_tol
from .exceptions import InvalidDescriptor, NotInCommutant, NotInStratum

__all__ = [
    "flow_apply",
    "flow_unitary_hs",
    "fourier_strata",
    "polar_stratum",
    "StrataFamily",
    "stratum_isometries",
    "f_projections",
    "beta",
    "EXTENTS",
    "ModelDescriptor",
    "form_decomposition",
    "in_center_and_diagonal",
]


def _flow_diag(model: FiniteModel, t: float) -> np.ndarray:
    return np.exp(1j * model.block_of * t)


def flow_apply(A, model: FiniteModel, t: float) -> np.ndarray:
    """``alpha_t(A)``: band ``n`` of ``A`` is multiplied by ``e^{int}``.

    Realized as ``D_t^* A D_t`` with ``D_t = sum_j e^{ijt} E_j``.
    """
    A = check_mat(A, model)
    w = _flow_diag(model, t)
    return (w.conj()[:, None] * A) * w[None, :]


def flow_unitary_hs(model: FiniteModel, t: float) -> SuperOp:
    """``W_t = sum_n e^{int} E_n`` on the Hilbert-Schmidt space.

    Satisfies ``W_t L_A W_t^* = L_{alpha_t(A)}``.
    """
    return SuperOp(np.diag(np.exp(1j * model.hs_band * t)), model, f"W({t:g})")


def fourier_strata(A, model: FiniteModel) -> dict:
    """Fourier coefficients of ``t -> alpha_t(A)``.

    Stratum ``n`` is the discrete average
    ``(1/T) sum_j e^{-int_j} alpha_{t_j}(A)`` over ``T = 2K + 1`` equispaced
    points, ``K`` the largest number of blocks.  Exact for finite models,
    where it equals ``band(A, n)``.
    """
    A = check_mat(A, model)
    K = model.depth
    T = 2 * K + 1
    ts = 2 * np.pi * np.arange(T) / T
    flows = [flow_apply(A, model, t) for t in ts]
    out = {}
    for n in range(-(K - 1), K):
        out[n] = sum(np.exp(-1j * n * t) * F for t, F in zip(ts, flows)) / T
    return out


def _check_band(x, model: FiniteModel, n: int, tol: float) -> np.ndarray:
    x = check_mat(x, model)
    off = np.where(model.band_index == n, 0, x)
    if opnorm(off) > tol * max(1.0, opnorm(x)):
        raise NotInStratum(f"matrix has support outside band {n}")
    return np.where(model.band_index == n, x, 0)


def polar_stratum(x, model: FiniteModel, n: int, tol: float | None = None):
    """Polar decomposition ``x = U h`` of a band-``n`` element.

    ``h = (x^* x)^{1/2}`` lies in the diagonal and ``U`` is a partial
    isometry on band ``n`` whose initial projection is the support of ``h``.
    """
    tol = resolve_tol(tol)
    x = _check_band(x, model, n, tol)
    W, s, Vh = np.linalg.svd(x)
    r = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    U = W[:, :r] @ Vh[:r]
    h = (Vh[:r].conj().T * s[:r]) @ Vh[:r]
    U = np.where(model.band_index == n, U, 0)
    h = np.where(model.band_index == 0, h, 0)
    return U, h


@dataclass(frozen=True)
class StrataFamily:
    """Column-orthogonal partial isometries spanning band ``n``.

    ``members[m]`` is ``U_{n,m}``; ``F`` is ``sum_m U_{n,m} U_{n,m}^*``.
    """

    model: FiniteModel
    n: int
    members: tuple

    @property
    def F(self) -> np.ndarray:
        F = np.zeros((self.model.dim, self.model.dim), dtype=complex)
        for U in self.members:
            F += U @ U.conj().T
        return F

    def orthogonality_defect(self) -> float:
        """Largest ``||U_m^* U_l||`` (``m != l``) or off-diagonal part of ``U_m^* U_m``."""
        worst = 0.0
        for a, Ua in enumerate(self.members):
            for b, Ub in enumerate(self.members):
                G = Ua.conj().T @ Ub
                if a != b:
                    worst = max(worst, opnorm(G))
                else:
                    worst = max(worst, opnorm(np.where(self.model.band_index == 0, 0, G)))
                    worst = max(worst, opnorm(G @ G - G))
        return worst

    def span_defect(self) -> float:
        """``||Pi_span - E_n||`` for the Hilbert-Schmidt projection onto ``sum_m U_m D``."""
        m = self.model
        idx = m.hs_index
        target = np.diag((m.hs_band == self.n).astype(float))
        vecs = [(U @ D).ravel()[idx] for U in self.members for D in m.diagonal_basis()]
        if not vecs:
            return opnorm(target)
        M = np.array(vecs).T
        Q, s, _ = np.linalg.svd(M, full_matrices=False)
        Q = Q[:, s > 1e-10 * max(1.0, s[0])]
        return opnorm(Q @ Q.conj().T - target)


def stratum_isometries(model: FiniteModel, n: int) -> StrataFamily:
    """Column-orthogonal family spanning band ``n``.

    For each block pair ``(j, j + n)`` the rows of block ``j`` are peeled off
    in chunks of at most ``d_{j+n}`` rows; a chunk is carried isometrically
    from the leading coordinates of block ``j + n``.  Member ``m`` collects
    the ``m``-th chunk of every block pair.  The result is deterministic
    given the block ordering; ``n = 0`` gives ``I`` and an absent band gives
    the empty family.
    """
    pieces: dict = {}
    for s in range(model.n_summands):
        sls = model.block_slices(s)
        K = len(sls)
        for j in range(K):
            k = j + n
            if not 0 <= k < K:
                continue
            rows = np.arange(sls[j].start, sls[j].stop)
            width = sls[k].stop - sls[k].start
            for c in range(0, rows.size, width):
                chunk = rows[c:c + width]
                pieces.setdefault(c // width, []).append((chunk, sls[k].start))
    members = []
    for m in sorted(pieces):
        U = np.zeros((model.dim, model.dim), dtype=complex)
        for chunk, col0 in pieces[m]:
            U[chunk, col0 + np.arange(chunk.size)] = 1.0
        members.append(U)
    return StrataFamily(model, n, tuple(members))


def f_projections(model: FiniteModel) -> dict:
    """Projections ``F_n`` for every band plus the limits ``F_minus``, ``F_plus``.

    Returns a dict with integer keys ``-(K-1) .. K-1`` (``K`` the largest
    number of blocks) and the string keys ``"F_minus"``, ``"F_plus"``.  On a
    finite model the sequence reaches zero, so both limits vanish.
    """
    K = model.depth
    out = {n: stratum_isometries(model, n).F for n in range(-(K - 1), K)}
    zero = np.zeros((model.dim, model.dim), dtype=complex)
    # first index past the last band: the sequence has stabilized there
    out["F_plus"] = stratum_isometries(model, K).F if K > 0 else zero
    out["F_minus"] = stratum_isometries(model, -K).F if K > 0 else zero
    return out


def _check_commutant(T: SuperOp, tol: float):
    scale = max(1.0, T.norm())
    for D in T.model.diagonal_basis():
        L = mult_op(D, T.model).matrix
        if opnorm(L @ T.matrix - T.matrix @ L) > tol * scale:
            raise NotInCommutant("operator does not commute with left multiplication by the diagonal")


def beta(T: SuperOp, model: FiniteModel, n: int, tol: float | None = None) -> SuperOp:
    """``beta_n(T) = sum_m L_{U_{n,m}} T L_{U_{n,m}^*}`` for ``T`` commuting with ``L(D)``.

    Commutation is checked against every matrix unit of the diagonal.
    """
    tol = resolve_tol(tol)
    if T.model != model:
        raise ValueError("super-operator belongs to a different model")
    _check_commutant(T, max(tol, 1e-9))
    out = np.zeros_like(T.matrix, dtype=complex)
    for U in stratum_isometries(model, n).members:
        out += mult_op(U, model).matrix @ T.matrix @ mult_op(U.conj().T, model).matrix
    return SuperOp(out, model, f"beta_{n}({T.origin})", T.space)


EXTENTS = ("finite", "up_infinite", "down_infinite", "bilateral")


@dataclass(frozen=True)
class ModelDescriptor:
    """Declared nest extent of every summand of ``model``.

    ``finite`` summands are genuine finite nests.  The three infinite extents
    mark a summand as the truncation of an infinite nest; such a truncation
    must have equal block sizes (constant multiplicity).
    """

    model: FiniteModel
    extents: tuple

    def __post_init__(self):
        object.__setattr__(self, "extents", tuple(self.extents))
        if len(self.extents) != self.model.n_summands:
            raise InvalidDescriptor(
                f"{len(self.extents)} extents given for {self.model.n_summands} summands"
            )
        for s, e in enumerate(self.extents):
            if e not in EXTENTS:
                raise InvalidDescriptor(f"unknown extent {e!r}")
            if e != "finite" and len(set(self.model.summands[s])) != 1:
                raise InvalidDescriptor(
                    f"summand {s} is declared {e} but its blocks are not of equal size"
                )


def form_decomposition(desc: ModelDescriptor) -> dict:
    """Central projections ``C_00, C_01, C_10, C_11`` of the form decomposition.

    Limit projections are assigned per summand from the declared extent
    (``F_plus`` is the identity on ``up_infinite`` and ``bilateral``
    summands, ``F_minus`` on ``down_infinite`` and ``bilateral`` ones) and
    combined as ``C_01 = F_plus - F_minus F_plus``,
    ``C_10 = F_minus - F_minus F_plus``, ``C_11 = F_minus F_plus`` and
    ``C_00 = I - C_01 - C_10 - C_11``.
    """
    if not isinstance(desc, ModelDescriptor):
        raise InvalidDescriptor("expected a ModelDescriptor")
    m = desc.model
    Fp = np.zeros((m.dim, m.dim), dtype=complex)
    Fm = np.zeros_like(Fp)
    for s, e in enumerate(desc.extents):
        Z = m.summand_projection(s)
        if e in ("up_infinite", "bilateral"):
            Fp += Z
        if e in ("down_infinite", "bilateral"):
            Fm += Z
    C11 = Fm @ Fp
    C01 = Fp - C11
    C10 = Fm - C11
    C00 = np.eye(m.dim) - C01 - C10 - C11
    return {"C_00": C00, "C_01": C01, "C_10": C10, "C_11": C11}


def in_center_and_diagonal(X, model: FiniteModel, tol: float = 1e-12) -> bool:
    """Whether ``X`` is a diagonal element commuting with the whole direct sum."""
    X = check_mat(X, model)
    if opnorm(np.where(model.band_index == 0, 0, X)) > tol:
        return False
    for s in range(model.n_summands):
        sl = model.summand_slice(s)
        Xs = X[sl, sl]
        if opnorm(Xs - Xs[0, 0] * np.eye(Xs.shape[0])) > tol:
            return False
    return True

