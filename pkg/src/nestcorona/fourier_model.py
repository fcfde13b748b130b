"""Scalar ``H^infinity`` on the circle through trigonometric polynomials.

Symbols are :class:`TrigPoly` objects; operators are finite Toeplitz sections
``[c_{j-k}]``.  The translation-invariant expectation onto Toeplitz
operators is approximated by averaging each diagonal over a central window,
which is exact for band-limited sections perturbed by finite-rank corner
terms.  The scalar corona problem is solved by a least-norm coefficient
system over analytic polynomials of increasing degree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .algebra import make_model
from .exceptions import ConditionViolated, ResidualNotMet, WindowError
from .flows import ModelDescriptor

__all__ = [
    "TrigPoly",
    "ToeplitzSection",
    "toeplitz_section",
    "ShiftExpectation",
    "shift_expectation",
    "ScalarEpsilon",
    "corona_epsilon_scalar",
    "ScalarCoronaResult",
    "scalar_corona",
    "bilateral_descriptor",
    "CIRCLE_EPS_POINTS",
    "RESIDUAL_GRID_POINTS",
    "DEG_CAP",
]

CIRCLE_EPS_POINTS = 1024
RESIDUAL_GRID_POINTS = 512
DEG_CAP = 64


@dataclass(frozen=True)
class TrigPoly:
    """``f(z) = sum_{|n| <= K} c_n z^n`` on the unit circle.

    ``coeffs[n + K]`` holds ``c_n``.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError("coefficient array must be one-dimensional of odd length 2K+1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, coefs: dict) -> "TrigPoly":
        """Build from ``{n: c_n}``."""
        K = max((abs(int(n)) for n in coefs), default=0)
        c = np.zeros(2 * K + 1, dtype=complex)
        for n, v in coefs.items():
            c[int(n) + K] = v
        return cls(c)

    @classmethod
    def analytic(cls, c) -> "TrigPoly":
        """``sum_{n >= 0} c[n] z^n``."""
        c = np.atleast_1d(np.asarray(c, dtype=complex))
        K = c.size - 1
        return cls(np.concatenate([np.zeros(K, dtype=complex), c]))

    @classmethod
    def constant(cls, c: complex) -> "TrigPoly":
        return cls(np.array([c], dtype=complex))

    @property
    def K(self) -> int:
        return (self.coeffs.size - 1) // 2

    def coef(self, n: int) -> complex:
        return complex(self.coeffs[n + self.K]) if abs(n) <= self.K else 0j

    @property
    def degree(self) -> int:
        """Largest ``|n|`` with ``c_n != 0`` (0 for the zero polynomial)."""
        nz = np.flatnonzero(self.coeffs)
        return int(np.max(np.abs(nz - self.K))) if nz.size else 0

    @property
    def is_analytic(self) -> bool:
        return not np.any(self.coeffs[: self.K])

    def analytic_coeffs(self) -> np.ndarray:
        """``c_0, ..., c_K`` (the non-negative part)."""
        return np.array(self.coeffs[self.K:])

    def __call__(self, theta) -> np.ndarray:
        """Evaluate at ``z = e^{i theta}``."""
        theta = np.asarray(theta, dtype=float)
        n = np.arange(-self.K, self.K + 1)
        return np.exp(1j * np.multiply.outer(theta, n)) @ self.coeffs

    def grid(self, points: int) -> np.ndarray:
        return self(2 * np.pi * np.arange(points) / points)

    def sup_norm(self, points: int = RESIDUAL_GRID_POINTS) -> float:
        return float(np.max(np.abs(self.grid(points))))

    def trimmed(self) -> "TrigPoly":
        d = self.degree
        return TrigPoly(self.coeffs[self.K - d: self.K + d + 1])

    def _padded(self, K: int) -> np.ndarray:
        return np.pad(self.coeffs, K - self.K)

    def __add__(self, other):
        if np.isscalar(other):
            other = TrigPoly.constant(other)
        K = max(self.K, other.K)
        return TrigPoly(self._padded(K) + other._padded(K))

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(-self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, TrigPoly) else -other)

    def __mul__(self, other):
        if np.isscalar(other):
            return TrigPoly(other * self.coeffs)
        return TrigPoly(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def allclose(self, other: "TrigPoly", atol: float = 0.0) -> bool:
        K = max(self.K, other.K)
        return bool(np.max(np.abs(self._padded(K) - other._padded(K)), initial=0.0) <= atol)


@dataclass(frozen=True)
class ToeplitzSection:
    """Finite section ``[c_{j-k}]_{j,k < m}`` of a Toeplitz operator."""

    m: int
    matrix: np.ndarray
    analytic: bool


def toeplitz_section(f: TrigPoly, m: int) -> ToeplitzSection:
    """Section with entry ``(j, k) = c_{j-k}``; analytic symbols give lower triangles."""
    if m < 1:
        raise ValueError(f"section size must be at least 1, got {m}")
    j = np.arange(m)
    diff = j[:, None] - j[None, :]
    T = np.zeros((m, m), dtype=complex)
    mask = np.abs(diff) <= f.K
    T[mask] = f.coeffs[diff[mask] + f.K]
    return ToeplitzSection(m, T, f.is_analytic)


@dataclass(frozen=True)
class ShiftExpectation:
    """Central-window diagonal averages of a matrix.

    ``deviation`` is the largest variance of a diagonal over the window and
    vanishes exactly when every averaged diagonal is constant there.
    """

    symbol: TrigPoly
    section: ToeplitzSection
    deviation: float
    window: int


def shift_expectation(T, w: int, degree: int | None = None) -> ShiftExpectation:
    """Diagonal averages of ``T`` over the central window ``[w, m - w)``.

    ``c_q`` is the mean of ``T[j + q, j]`` over the ``j`` with both ``j`` and
    ``j + q`` in the window, for ``|q| <= degree`` (default
    ``(m - 2w) // 2``).

    Raises
    ------
    WindowError
        If ``w`` is negative or ``w >= m / 4``.
    """
    T = np.asarray(T, dtype=complex)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError("expected a square matrix")
    m = T.shape[0]
    if w < 0 or 4 * w >= m:
        raise WindowError(f"window {w} must satisfy 0 <= w < m/4 = {m / 4:g}")
    inner = m - 2 * w
    K = inner // 2 if degree is None else int(degree)
    if not 0 <= K < inner:
        raise WindowError(f"degree {K} needs a window longer than {inner}")
    c = np.zeros(2 * K + 1, dtype=complex)
    dev = 0.0
    for q in range(-K, K + 1):
        j = np.arange(max(w, w - q), min(m - w, m - w - q))
        vals = T[j + q, j]
        c[q + K] = vals.mean()
        dev = max(dev, float(np.mean(np.abs(vals - c[q + K]) ** 2)))
    f = TrigPoly(c)
    return ShiftExpectation(f, toeplitz_section(f, m), dev, w)


@dataclass(frozen=True)
class ScalarEpsilon:
    """Toeplitz lower bound at section size ``m`` and its symbol-level companion."""

    eps: float
    circle_min: float
    m: int

    def __float__(self):
        return self.eps


def _check_list(f_list):
    f_list = list(f_list)
    if not f_list:
        raise ValueError("need at least one symbol")
    return f_list


def corona_epsilon_scalar(f_list, m: int) -> ScalarEpsilon:
    """``sigma_min`` of the stacked adjoint sections ``[section(f_k)^*]``.

    Also reports ``min (sum_k |f_k|^2)^{1/2}`` over a 1024-point circle grid.
    """
    f_list = _check_list(f_list)
    stack = np.vstack([toeplitz_section(f, m).matrix.conj().T for f in f_list])
    eps = float(np.linalg.svd(stack, compute_uv=False)[-1])
    vals = np.array([f.grid(CIRCLE_EPS_POINTS) for f in f_list])
    circle = float(np.sqrt(np.min(np.sum(np.abs(vals) ** 2, axis=0))))
    return ScalarEpsilon(eps, circle, m)


@dataclass
class ScalarCoronaResult:
    """Analytic ``g_k`` with ``sum_k f_k g_k`` close to ``1`` on the circle.

    ``g_sup_norms`` versus ``bound`` (``4 N alpha eps^{-3}``) is recorded for
    information only.
    """

    g_list: list
    residual: float
    deg_g: int
    curve: list
    eps: ScalarEpsilon
    g_sup_norms: list
    bound: float
    tol: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.residual <= self.tol

    def as_dict(self) -> dict:
        return {
            "residual": self.residual,
            "deg_g": self.deg_g,
            "tol": self.tol,
            "ok": self.ok,
            "eps": self.eps.eps,
            "circle_min": self.eps.circle_min,
            "section_size": self.eps.m,
            "g_sup_norms": list(self.g_sup_norms),
            "bound": self.bound,
            "bound_informational": all(g <= self.bound for g in self.g_sup_norms),
            "curve": [list(p) for p in self.curve],
        }


def _residual(f_list, g_list) -> float:
    total = sum(f.grid(RESIDUAL_GRID_POINTS) * g.grid(RESIDUAL_GRID_POINTS) for f, g in zip(f_list, g_list))
    return float(np.max(np.abs(total - 1.0)))


def _solve_degree(f_list, D: int) -> list:
    """Least-norm analytic ``g_k`` of degree ``<= D`` with ``sum_k f_k g_k = 1``."""
    fa = [f.analytic_coeffs() for f in f_list]
    rows = max(a.size for a in fa) + D
    cols = []
    for a in fa:
        M = np.zeros((rows, D + 1), dtype=complex)
        for p in range(D + 1):
            M[p:p + a.size, p] = a
        cols.append(M)
    M = np.hstack(cols)
    rhs = np.zeros(rows, dtype=complex)
    rhs[0] = 1.0
    x = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return [TrigPoly.analytic(x[k * (D + 1):(k + 1) * (D + 1)]) for k in range(len(f_list))]


def scalar_corona(f_list, deg_g: int | None = None, tol: float = 1e-8, m: int = 64,
                  margin: float = 1e-9, cap: int = DEG_CAP) -> ScalarCoronaResult:
    """Solve ``sum_k f_k g_k = 1`` with analytic polynomial ``g_k``.

    Starts at degree ``deg_g`` (default four times the largest input degree,
    at most ``cap``) and raises the degree one step at a time until the
    circle-grid residual is at most ``tol``.  The recorded curve holds
    ``(degree, best residual so far)``.

    Raises
    ------
    ConditionViolated
        If the Toeplitz lower bound at section size ``m`` is ``<= margin``.
    ResidualNotMet
        If the degree cap is reached first.
    """
    f_list = _check_list(f_list)
    if not all(f.is_analytic for f in f_list):
        raise ValueError("corona symbols must be analytic")
    eps = corona_epsilon_scalar(f_list, m)
    if eps.eps <= margin:
        raise ConditionViolated(
            f"Toeplitz lower bound fails (eps={eps.eps:.3e} at m={m})",
            witness="scalar", measured=eps.eps,
            diagnostics={"eps": eps.eps, "circle_min": eps.circle_min, "m": m},
        )
    top = max(f.degree for f in f_list)
    D = min(cap, max(top, 4 * top if deg_g is None else deg_g))
    alpha = max(f.sup_norm() for f in f_list)
    bound = 4 * len(f_list) * alpha / eps.eps**3
    curve = []
    best = None
    while True:
        g = _solve_degree(f_list, D)
        r = _residual(f_list, g)
        if best is None or r < best[0]:
            best = (r, g, D)
        curve.append((D, best[0]))
        if best[0] <= tol or D >= cap:
            break
        D += 1
    r, g, D = best
    result = ScalarCoronaResult(
        g_list=g, residual=r, deg_g=D, curve=curve, eps=eps,
        g_sup_norms=[gk.sup_norm() for gk in g], bound=bound, tol=tol,
        diagnostics={"alpha": alpha},
    )
    if r > tol:
        raise ResidualNotMet(f"residual {r:.3e} above {tol:.1e} at degree cap {cap}", curve, result)
    return result


def bilateral_descriptor(m: int) -> ModelDescriptor:
    """Descriptor of a size-``m`` truncation of the bilateral shift nest."""
    return ModelDescriptor(make_model([[1] * m]), ("bilateral",))
