"""Seeded invariant suite behind ``nestcorona selftest``."""

from __future__ import annotations

import numpy as np

from .algebra import band, hs_projection, mult_op, opnorm
from .approximation import nearest_in_algebra, nest_distance
from .exceptions import ConditionViolated
from .factorization import cholesky_in_algebra, membership_residual, qr_in_algebra
from .flows import beta, f_projections, flow_apply, fourier_strata, stratum_isometries
from .fourier_model import TrigPoly, scalar_corona, shift_expectation, toeplitz_section
from .generators import random_instance, random_matrix, random_model, unsolvable_instance
from .interpolation import corona_solve_general, corona_solve_nest, epsilon_report, toeplitz_corona

__all__ = ["run_selftest"]


def _distance(rng, reps):
    worst = 0.0
    for _ in range(reps):
        m = random_model(rng, 8, 3)
        A = random_matrix(rng, m)
        r = nest_distance(A, m)
        worst = max(worst, abs(r.value - r.hs_value_P0), abs(r.value - r.hs_value_P1))
    return worst <= 1e-9, worst


def _nearest(rng, reps):
    worst = 0.0
    for _ in range(reps):
        m = random_model(rng, 6, 2)
        A = random_matrix(rng, m)
        B, mu = nearest_in_algebra(A, m)
        worst = max(worst, opnorm(A - B) - mu * (1 + 1e-9))
    return worst <= 1e-9, worst


def _factor(rng, reps):
    worst = 0.0
    for _ in range(reps):
        m = random_model(rng, 6, 2)
        S = random_matrix(rng, m)
        qr = qr_in_algebra(S, m)
        ch = cholesky_in_algebra(S.conj().T @ S, m)
        worst = max(worst, qr.residual, qr.unitarity, ch.residual,
                    membership_residual(qr, m), membership_residual(ch, m))
    return worst <= 1e-9, worst


def _corona(rng, reps):
    worst = 0.0
    ok = True
    for _ in range(reps):
        m = random_model(rng, 6, 2)
        inst = random_instance(rng, m, int(rng.integers(1, 4)))
        for cert in (
            corona_solve_general(inst),
            corona_solve_nest(inst),
            corona_solve_nest(inst, "P1_only"),
            corona_solve_nest(inst, side="right"),
            toeplitz_corona(inst),
        ):
            ok &= cert.ok and cert.verify(inst)
            worst = max(worst, cert.residual)
    return ok, worst


def _unsolvable(rng, reps):
    hits = 0
    for _ in range(reps):
        m = random_model(rng, 6, 2)
        n0 = int(rng.integers(0, len(m.summands[0])))
        inst = unsolvable_instance(rng, m, int(rng.integers(1, 4)), n0)
        try:
            corona_solve_nest(inst)
        except ConditionViolated as exc:
            hits += exc.witness == n0
    return hits == reps, hits


def _p1_implies_global(rng, reps):
    worst = 0.0
    for _ in range(reps):
        m = random_model(rng, 6, 2)
        rep = epsilon_report(random_instance(rng, m, int(rng.integers(1, 4)), 0.0))
        worst = max(worst, rep.eps_P1_only - rep.eps_25)
    return worst <= 1e-9, worst


def _flows(rng, reps):
    worst = 0.0
    ts = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    for _ in range(reps):
        m = random_model(rng, 6, 2)
        A = random_matrix(rng, m)
        strata = fourier_strata(A, m)
        for n, An in strata.items():
            worst = max(worst, opnorm(An - band(A, m, n)))
            for t in ts:
                worst = max(worst, opnorm(flow_apply(An, m, t) - np.exp(1j * n * t) * An))
        F = f_projections(m)
        E0 = hs_projection(m, "En", 0)
        for n in range(m.depth):
            worst = max(worst, opnorm(beta(E0, m, n).matrix - hs_projection(m, "En", n).matrix))
            fam = stratum_isometries(m, n)
            worst = max(worst, fam.span_defect(), fam.orthogonality_defect())
            for k in range(m.depth - n):
                lhs = beta(beta(E0, m, k), m, n).matrix
                rhs = mult_op(F[n], m).matrix @ beta(E0, m, n + k).matrix
                worst = max(worst, opnorm(lhs - rhs))
    return worst <= 1e-10, worst


def _fourier(rng, reps):
    worst = 0.0
    ok = True
    for _ in range(reps):
        f = TrigPoly(rng.normal(size=7) + 1j * rng.normal(size=7))
        T = toeplitz_section(f, 64).matrix.copy()
        T[:2, :2] += rng.normal(size=(2, 2))
        se = shift_expectation(T, 2)
        worst = max(worst, max(abs(se.symbol.coef(q) - f.coef(q)) for q in range(-3, 4)))
        f1 = TrigPoly.analytic(rng.normal(size=5))
        f2 = TrigPoly.analytic(rng.normal(size=5))
        try:
            ok &= scalar_corona([f1, f2], tol=1e-6).ok
        except ConditionViolated:
            pass
    return ok and worst <= 1e-12, worst


CHECKS = {
    "distance_formula": _distance,
    "nearest_approximant": _nearest,
    "factorization": _factor,
    "corona_solvers": _corona,
    "unsolvable_witness": _unsolvable,
    "p1_implies_global": _p1_implies_global,
    "flows": _flows,
    "fourier_model": _fourier,
}


def run_selftest(seed: int = 0, reps: int = 10) -> dict:
    """Run every check with its own seeded stream; returns ``name -> {ok, value}``."""
    out = {}
    for i, (name, fn) in enumerate(CHECKS.items()):
        rng = np.random.default_rng([seed, i])
        ok, value = fn(rng, reps)
        out[name] = {"ok": bool(ok), "value": float(value)}
    return out
