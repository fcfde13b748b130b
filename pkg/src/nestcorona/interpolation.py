"""Corona-type interpolation in nest algebras.

Given ``A_1, ..., A_N`` in the algebra, the solvers produce ``B_1, ..., B_N``
in the algebra with ``sum_k B_k A_k = I`` (``side='left'``) or
``sum_k A_k B_k = I`` (``side='right'``), together with a certificate that
can be re-verified independently.

Lower-bound constants are always measured, never trusted:

* ``eps_25``: ``sigma_min`` of the stacked ``A_k``;
* ``eps_26_P``: the same for ``(I - P) L_{A_k}`` on the range of ``I - P``,
  ``P`` in ``{P0, P1}``;
* ``eps_nest[n]``: the same for the compressions ``(I - Q_n) A_k (I - Q_n)``.

Right-sided problems are solved in the mirror model via
``x -> J x^T J``, which reverses products and maps the algebra onto the
algebra of the reversed nest.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    FiniteModel,
    SuperOp,
    block_triangular_inverse,
    check_mat,
    lower_part_norm,
    mult_op,
    opnorm,
)
from .approximation import nearest_in_algebra
from .config import CERT_RESIDUAL_TOL, resolve_tol
from .exceptions import (
    ConditionViolated,
    DimensionError,
    EmptyInstance,
    NumericalContractionError,
)
from .factorization import cholesky_in_algebra

__all__ = [
    "CoronaInstance",
    "EpsilonReport",
    "CoronaCertificate",
    "LemmaCertificate",
    "epsilon_report",
    "left_inverse_partial_isometry",
    "corona_solve_general",
    "corona_solve_nest",
    "toeplitz_op",
    "toeplitz_epsilon",
    "toeplitz_corona",
    "certificate_bound",
    "corona_isometry",
]


def _smin(M) -> float:
    M = np.asarray(M)
    if M.shape[1] == 0:
        return float("inf")
    if M.shape[0] < M.shape[1]:
        return 0.0
    return float(np.linalg.svd(M, compute_uv=False)[-1])


# -- instances --------------------------------------------------------------


@dataclass(frozen=True)
class CoronaInstance:
    """Tuple ``A_1, ..., A_N`` in the algebra of ``model``.

    Membership is checked at construction; ``alpha = max_k ||A_k||``.
    """

    model: FiniteModel
    A_list: tuple
    tol: float | None = None
    alpha: float = field(init=False)

    def __post_init__(self):
        if len(self.A_list) == 0:
            raise EmptyInstance("a corona instance needs at least one matrix")
        tol = resolve_tol(self.tol)
        mats = []
        for k, A in enumerate(self.A_list):
            A = check_mat(A, self.model)
            if lower_part_norm(A, self.model) > tol * max(1.0, opnorm(A)):
                raise DimensionError(f"A_{k + 1} is not in the algebra")
            A = np.where(self.model.band_index >= 0, A, 0)
            A.setflags(write=False)
            mats.append(A)
        object.__setattr__(self, "A_list", tuple(mats))
        object.__setattr__(self, "alpha", max(opnorm(A) for A in mats))

    @property
    def N(self) -> int:
        return len(self.A_list)

    def scaled(self, c: float) -> "CoronaInstance":
        return CoronaInstance(self.model, tuple(c * A for A in self.A_list), self.tol)

    def mirrored(self) -> "CoronaInstance":
        """Instance ``J A_k^T J`` in the reversed-nest model."""
        return CoronaInstance(
            self.model.adjoint(), tuple(_transpose_mirror(A, self.model) for A in self.A_list), self.tol
        )

    def adjoint(self) -> "CoronaInstance":
        """Instance ``J A_k^* J`` in the reversed-nest model."""
        return CoronaInstance(
            self.model.adjoint(), tuple(_adjoint_mirror(A, self.model) for A in self.A_list), self.tol
        )


def _transpose_mirror(X, model: FiniteModel) -> np.ndarray:
    J = model.flip
    return J @ np.asarray(X).T @ J


def _adjoint_mirror(X, model: FiniteModel) -> np.ndarray:
    J = model.flip
    return J @ np.asarray(X).conj().T @ J


# -- epsilon measurements ---------------------------------------------------


@dataclass(frozen=True)
class EpsilonReport:
    """Measured lower-bound constants of an instance.

    ``eps_nest[n]`` is the minimum over summands having a nest index ``n``;
    ``eps_nest[0]`` equals ``eps_25``.  ``eps_P1_only`` is the ``P1``
    compression bound (identical to ``eps_26_P1``).
    """

    eps_25: float
    eps_26_P0: float
    eps_26_P1: float
    eps_nest: tuple
    eps_P1_only: float

    @property
    def eps_nest_min(self) -> float:
        return min(self.eps_nest)

    def nest_witness(self, tol: float | None = None):
        """Failing nest index, or ``None`` if every compression is bounded below.

        Among indices with ``eps_nest[n] <= tol`` the smallest value wins;
        ties go to the largest ``n`` (the most localized compression).
        """
        tol = resolve_tol(tol)
        failing = [(v, -n) for n, v in enumerate(self.eps_nest) if v <= tol]
        if not failing:
            return None
        vmin = min(v for v, _ in failing)
        return max(-m for v, m in failing if v <= vmin + tol)

    def as_dict(self) -> dict:
        return {
            "eps_25": self.eps_25,
            "eps_26_P0": self.eps_26_P0,
            "eps_26_P1": self.eps_26_P1,
            "eps_nest": list(self.eps_nest),
            "eps_nest_min": self.eps_nest_min,
            "eps_P1_only": self.eps_P1_only,
        }


def _hs_eps(inst: CoronaInstance, which: str) -> float:
    keep = inst.model.hs_band < (0 if which == "P0" else 1)
    blocks = [mult_op(A, inst.model).matrix[np.ix_(keep, keep)] for A in inst.A_list]
    return _smin(np.vstack(blocks))


def _nest_eps(inst: CoronaInstance) -> tuple:
    m = inst.model
    out = [np.inf] * m.depth
    for s in range(m.n_summands):
        sl = m.summand_slice(s)
        cuts = np.concatenate([[0], np.cumsum(m.summands[s])[:-1]])
        for n, c in enumerate(cuts):
            stack = np.vstack([A[sl, sl][c:, c:] for A in inst.A_list])
            out[n] = min(out[n], _smin(stack))
    return tuple(float(x) for x in out)


def epsilon_report(inst: CoronaInstance) -> EpsilonReport:
    """Measure every lower-bound constant of ``inst``."""
    if not isinstance(inst, CoronaInstance):
        raise TypeError("epsilon_report expects a CoronaInstance")
    eps_25 = _smin(np.vstack(inst.A_list))
    p1 = _hs_eps(inst, "P1")
    return EpsilonReport(
        eps_25=eps_25,
        eps_26_P0=_hs_eps(inst, "P0"),
        eps_26_P1=p1,
        eps_nest=_nest_eps(inst),
        eps_P1_only=p1,
    )


# -- certificates ------------------------------------------------------------


def certificate_bound(N: int, alpha: float, eps: float) -> float:
    """Norm bound carried by every corona certificate.

    Equals ``4 N alpha eps^{-3}`` for ``alpha <= 1`` and the scale-covariant
    ``4 N alpha^2 eps^{-3}`` for ``alpha > 1``.
    """
    return 4.0 * N * alpha * max(alpha, 1.0) / eps**3


@dataclass
class CoronaCertificate:
    """Solver output with attestations.

    ``side='left'`` attests ``sum_k B_k A_k = I``; ``side='right'`` attests
    ``sum_k A_k B_k = I``.
    """

    B_list: tuple
    residual: float
    side: str
    N: int
    alpha: float
    eps: float
    bound: float
    unscaled_bound: float
    B_norms: tuple
    membership: float
    mode: str
    residual_tol: float = CERT_RESIDUAL_TOL
    membership_tol: float = 1e-9
    diagnostics: dict = field(default_factory=dict)

    @property
    def bound_ok(self) -> bool:
        return all(b <= self.bound for b in self.B_norms)

    @property
    def unscaled_bound_ok(self) -> bool:
        return all(b <= self.unscaled_bound for b in self.B_norms)

    @property
    def ok(self) -> bool:
        return (
            self.residual <= self.residual_tol
            and self.membership <= self.membership_tol
            and self.bound_ok
        )

    def verify(self, inst: CoronaInstance) -> bool:
        """Re-check residual, memberships and the bound from scratch."""
        m = inst.model
        B = [check_mat(b, m) for b in self.B_list]
        if len(B) != inst.N:
            return False
        if self.side == "left":
            total = sum(b @ a for b, a in zip(B, inst.A_list))
        else:
            total = sum(a @ b for a, b in zip(inst.A_list, B))
        res = opnorm(total - np.eye(m.dim))
        memb = max(lower_part_norm(b, m) for b in B)
        bound = certificate_bound(inst.N, inst.alpha, self.eps)
        return (
            res <= self.residual_tol
            and memb <= self.membership_tol
            and all(opnorm(b) <= bound for b in B)
        )

    def as_dict(self) -> dict:
        return {
            "side": self.side,
            "mode": self.mode,
            "N": self.N,
            "alpha": self.alpha,
            "eps": self.eps,
            "residual": self.residual,
            "residual_tol": self.residual_tol,
            "membership": self.membership,
            "bound": self.bound,
            "unscaled_bound": self.unscaled_bound,
            "B_norms": list(self.B_norms),
            "bound_ok": self.bound_ok,
            "unscaled_bound_ok": self.unscaled_bound_ok,
            "ok": self.ok,
            "diagnostics": self.diagnostics,
        }


def _make_certificate(inst, B_list, side, eps, mode, diagnostics):
    m = inst.model
    if side == "left":
        total = sum(b @ a for b, a in zip(B_list, inst.A_list))
    else:
        total = sum(a @ b for a, b in zip(inst.A_list, B_list))
    return CoronaCertificate(
        B_list=tuple(B_list),
        residual=opnorm(total - np.eye(m.dim)),
        side=side,
        N=inst.N,
        alpha=inst.alpha,
        eps=float(eps),
        bound=certificate_bound(inst.N, inst.alpha, eps),
        unscaled_bound=4.0 * inst.N * inst.alpha / eps**3,
        B_norms=tuple(opnorm(b) for b in B_list),
        membership=max(lower_part_norm(b, m) for b in B_list),
        mode=mode,
        diagnostics=diagnostics,
    )


# -- partial isometry left inverse -------------------------------------------


@dataclass(frozen=True)
class LemmaCertificate:
    residual: float
    norm_B: float
    bound: float
    eps: float
    eps_measured: float
    contraction: float
    distance: float

    @property
    def ok(self) -> bool:
        return self.residual <= 1e-8 and self.norm_B <= self.bound


def _lemma_eps(U, model: FiniteModel, which: str) -> float:
    """``inf ||(I-P) U x|| / ||x||`` over ``x`` in ``range(L_{U^*U}) cap range(I-P)``."""
    keep = model.hs_band < (0 if which == "P0" else 1)
    L = mult_op(U, model).matrix[np.ix_(keep, keep)]
    Pi = mult_op(U.conj().T @ U, model).matrix[np.ix_(keep, keep)]
    w, V = np.linalg.eigh(0.5 * (Pi + Pi.conj().T))
    Y = V[:, w > 0.5]
    if Y.shape[1] == 0:
        return float("inf")
    return _smin(L @ Y)


def left_inverse_partial_isometry(U, model: FiniteModel, eps: float | None = None,
                                  P: str = "P0", tol: float | None = None):
    """Left inverse of a partial isometry in the algebra.

    For ``U`` in the algebra with ``U^*U`` diagonal and
    ``||(I-P) U x|| >= eps ||(I-P) x||`` on ``range(U^*U)``, returns
    ``(B, cert)`` with ``B`` in the algebra, ``B U = U^*U`` and
    ``||B|| <= 4 eps^{-2}``.

    ``eps`` is a claimed floor; it is checked against the measured value.
    """
    tol = resolve_tol(tol)
    U = check_mat(U, model)
    d = model.dim
    I = np.eye(d)
    scale = max(1.0, opnorm(U))
    if lower_part_norm(U, model) > tol * scale:
        raise DimensionError("U is not in the algebra")
    U = np.where(model.band_index >= 0, U, 0)
    Ustar = U.conj().T
    if opnorm(Ustar @ U @ Ustar - Ustar) > max(tol, 1e-8) * scale:
        raise DimensionError("U is not a partial isometry")
    UU = Ustar @ U
    if opnorm(np.where(model.band_index == 0, 0, UU)) > max(tol, 1e-8):
        raise DimensionError("U^*U is not in the diagonal")
    measured = _lemma_eps(U, model, P)
    if eps is None:
        eps = min(measured, 1.0)
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if measured < eps * (1 - 1e-12) - tol:
        raise ConditionViolated(
            f"partial isometry hypothesis fails: measured eps={measured:.3e} < {eps:.3e}",
            witness="lemma", measured=measured,
        )
    C0, mu = nearest_in_algebra(Ustar, model)
    C = UU @ C0
    C = np.where(model.band_index >= 0, C, 0)
    T = (I - UU) + C @ U
    contraction = opnorm(I - T)
    if not contraction < 1:
        raise NumericalContractionError(f"||I - T|| = {contraction:.3e} is not below one", contraction)
    B = block_triangular_inverse(T, model) @ C
    cert = LemmaCertificate(
        residual=opnorm(B @ U - UU),
        norm_B=opnorm(B),
        bound=4.0 / eps**2,
        eps=float(eps),
        eps_measured=float(measured),
        contraction=contraction,
        distance=mu,
    )
    return B, cert


# -- general corona solver ------------------------------------------------------


def _check_side(side):
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")


def _unmirror(cert: CoronaCertificate, inst: CoronaInstance, mode: str) -> CoronaCertificate:
    B = [_transpose_mirror(b, inst.model.adjoint()) for b in cert.B_list]
    return _make_certificate(inst, B, "right", cert.eps, mode, dict(cert.diagnostics, mirrored=True))


def corona_isometry(inst: CoronaInstance):
    """Column partial isometry of the normalized instance in the amplified model.

    With ``sum_k A_k^* A_k = alpha^2 C^* C`` (``C`` from
    :func:`cholesky_in_algebra` applied to the normalized tuple), the first
    block column of ``U`` holds ``A_k C^{-1} / alpha``.  Returns
    ``(U_amp, amp_model, perm, C_inv, factorization)``; ``U_amp`` lives in
    ``amp_model`` and ``perm`` carries the natural ``N x N`` block layout to
    it.
    """
    m, N, d = inst.model, inst.N, inst.model.dim
    A = [a / inst.alpha for a in inst.A_list]
    fact = cholesky_in_algebra(sum(a.conj().T @ a for a in A), m)
    Cinv = fact.inverse
    amp, perm = m.amplify(N)
    U_nat = np.zeros((N * d, N * d), dtype=complex)
    for k, a in enumerate(A):
        U_nat[k * d:(k + 1) * d, :d] = a @ Cinv
    return U_nat[np.ix_(perm, perm)], amp, perm, Cinv, fact


def corona_solve_general(inst: CoronaInstance, P: str = "P0", side: str = "left",
                         eps: float | None = None, tol: float | None = None) -> CoronaCertificate:
    """Solve ``sum_k B_k A_k = I`` under the global and ``P``-compression bounds.

    The construction factors ``sum_k A_k^* A_k = C^* C`` in the algebra,
    forms the column partial isometry ``[A_k C^{-1}]`` in the amplified
    algebra (``algebra (x) M_N``), left-inverts it, and reads ``B_k`` off the
    first block row.  Inputs are normalized by ``alpha`` internally.

    ``side='right'`` solves ``sum_k A_k B_k = I`` under the right-hand
    conditions.  ``eps`` is an optional claimed floor.
    """
    _check_side(side)
    if P not in ("P0", "P1"):
        raise ValueError(f"P must be 'P0' or 'P1', got {P!r}")
    tol = resolve_tol(tol)
    if side == "right":
        cert = corona_solve_general(inst.mirrored(), P=P, side="left", eps=eps, tol=tol)
        return _unmirror(cert, inst, cert.mode)

    rep = epsilon_report(inst)
    eps_P = rep.eps_26_P0 if P == "P0" else rep.eps_26_P1
    measured = min(rep.eps_25, eps_P)
    if measured <= tol:
        witness = "eps_25" if rep.eps_25 <= eps_P else P
        raise ConditionViolated(
            f"lower bound fails (eps_25={rep.eps_25:.3e}, eps_26_{P}={eps_P:.3e})",
            witness=witness, measured=measured, diagnostics=rep.as_dict(),
        )
    if eps is not None:
        if eps <= 0:
            raise ValueError("eps must be positive")
        if eps > measured * (1 + 1e-12) + tol:
            raise ConditionViolated(
                f"claimed eps={eps:.3e} exceeds measured {measured:.3e}",
                witness=P, measured=measured, diagnostics=rep.as_dict(),
            )
    eps_used = float(measured if eps is None else min(eps, measured))

    m, N, d = inst.model, inst.N, inst.model.dim
    s = inst.alpha
    eps_n = min(eps_used / s, 1.0)
    U_amp, amp, perm, Cinv, fact = corona_isometry(inst)
    eps_lemma = eps_n / np.sqrt(N)
    V_amp, lemma = left_inverse_partial_isometry(U_amp, amp, eps=eps_lemma, P=P, tol=max(tol, 1e-9))
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    V_nat = V_amp[np.ix_(inv, inv)]
    B = [Cinv @ V_nat[:d, k * d:(k + 1) * d] / s for k in range(N)]
    B = [np.where(m.band_index >= 0, b, 0) for b in B]
    diagnostics = {
        "P": P,
        "eps_report": rep.as_dict(),
        "eps_lemma": eps_lemma,
        "lemma_eps_measured": lemma.eps_measured,
        "lemma_norm_V": lemma.norm_B,
        "lemma_contraction": lemma.contraction,
        "cholesky_residual": fact.residual,
    }
    return _make_certificate(inst, B, "left", eps_used, "general", diagnostics)


def corona_solve_nest(inst: CoronaInstance, mode: str = "all_n", side: str = "left",
                      tol: float | None = None) -> CoronaCertificate:
    """Solve from nest-compression bounds.

    ``mode='all_n'`` requires every compression ``(I - Q_n) A_k (I - Q_n)``
    to be bounded below; ``mode='P1_only'`` requires only the ``P1``
    compression bound (finite nests).  Both derive the global and
    ``P``-compression bounds at the same level and delegate to
    :func:`corona_solve_general`.
    """
    _check_side(side)
    tol = resolve_tol(tol)
    if side == "right":
        cert = corona_solve_nest(inst.mirrored(), mode=mode, side="left", tol=tol)
        return _unmirror(cert, inst, cert.mode)
    rep = epsilon_report(inst)
    if mode == "all_n":
        eps = rep.eps_nest_min
        if eps <= tol:
            n = rep.nest_witness(tol)
            raise ConditionViolated(
                f"nest compression bound fails at index n={n} (eps={rep.eps_nest[n]:.3e})",
                witness=n, measured=eps, diagnostics=rep.as_dict(),
            )
        P = "P0"
        derived = {"eps_25": rep.eps_25, "eps_26_P0": rep.eps_26_P0}
    elif mode == "P1_only":
        eps = rep.eps_P1_only
        if eps <= tol:
            raise ConditionViolated(
                f"P1 compression bound fails (eps={eps:.3e})",
                witness="P1", measured=eps, diagnostics=rep.as_dict(),
            )
        P = "P1"
        derived = {"eps_25": rep.eps_25, "global_bound_implied": bool(rep.eps_25 >= eps - 1e-9)}
    else:
        raise ValueError(f"mode must be 'all_n' or 'P1_only', got {mode!r}")
    cert = corona_solve_general(inst, P=P, eps=eps, tol=tol)
    cert.mode = mode
    cert.diagnostics["derived"] = derived
    return cert


# -- Toeplitz operators ---------------------------------------------------------


def toeplitz_op(A, model: FiniteModel, side: str = "left") -> SuperOp:
    """``T_A x = P0(A x)`` (left) or ``t_A x = P0(x A)`` (right) on ``H^2``."""
    _check_side(side)
    L = mult_op(A, model, side).matrix
    idx = np.flatnonzero(model.hs_band >= 0)
    name = "T_A" if side == "left" else "t_A"
    return SuperOp(L[np.ix_(idx, idx)], model, name, space="H2")


def toeplitz_epsilon(inst: CoronaInstance, side: str = "left") -> float:
    """``sigma_min`` of the stacked adjoint Toeplitz operators on ``H^2``."""
    stack = [toeplitz_op(A, inst.model, side).matrix.conj().T for A in inst.A_list]
    return _smin(np.vstack(stack))


def toeplitz_corona(inst: CoronaInstance, side: str = "left", tol: float | None = None) -> CoronaCertificate:
    """Corona problem under the adjoint Toeplitz lower bound.

    ``side='left'`` uses left Toeplitz operators and yields
    ``sum_k A_k B_k = I``; ``side='right'`` uses right Toeplitz operators and
    yields ``sum_k B_k A_k = I``.
    """
    _check_side(side)
    tol = resolve_tol(tol)
    eps = toeplitz_epsilon(inst, side)
    if eps <= tol:
        raise ConditionViolated(
            f"adjoint Toeplitz lower bound fails (eps={eps:.3e})", witness="toeplitz", measured=eps
        )
    m = inst.model
    if side == "left":
        # adjoint algebra, realized as J A^* J in the reversed model
        adj = inst.adjoint()
        cert = corona_solve_nest(adj, mode="P1_only", tol=tol)
        B = [_adjoint_mirror(b, m.adjoint()) for b in cert.B_list]
        out_side = "right"
        mirror_eps = epsilon_report(adj).eps_P1_only
    else:
        mir = inst.mirrored()
        cert = toeplitz_corona(mir, side="left", tol=tol)
        B = [_transpose_mirror(b, m.adjoint()) for b in cert.B_list]
        out_side = "left"
        mirror_eps = cert.eps
    diagnostics = dict(cert.diagnostics, toeplitz_eps=eps, mirror_eps=mirror_eps)
    return _make_certificate(inst, B, out_side, eps, f"toeplitz-{side}", diagnostics)
