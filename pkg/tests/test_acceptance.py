"""Acceptance criteria, one test each, at the stated tolerances.

Every test prints a single ``PASS``/``FAIL`` line (visible without ``-s``)
before asserting.
"""

import time

import numpy as np
import pytest

from nestcorona.algebra import hs_projection, in_algebra, lower_part_norm, make_model, mult_op, opnorm
from nestcorona.approximation import nearest_in_algebra, nest_distance
from nestcorona.exceptions import ConditionViolated
from nestcorona.factorization import cholesky_in_algebra, membership_residual, qr_in_algebra
from nestcorona.flows import (
    ModelDescriptor,
    beta,
    f_projections,
    flow_apply,
    form_decomposition,
    fourier_strata,
)
from nestcorona.fourier_model import (
    TrigPoly,
    bilateral_descriptor,
    corona_epsilon_scalar,
    scalar_corona,
    shift_expectation,
    toeplitz_section,
)
from nestcorona.generators import (
    random_instance,
    random_matrix,
    random_model,
    random_partial_isometry,
    unsolvable_instance,
)
from nestcorona.interpolation import (
    corona_solve_general,
    corona_solve_nest,
    epsilon_report,
    left_inverse_partial_isometry,
)

from .oracles import sdp_distance


@pytest.fixture
def report(capsys):
    def emit(k, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {k}: {detail}")
        assert ok, detail

    return emit


def test_criterion_1_distance_formula(report):
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        m = random_model(rng, 8, 3)
        A = random_matrix(rng, m)
        r = nest_distance(A, m)
        worst = max(worst, abs(r.value - r.hs_value_P0), abs(r.value - r.hs_value_P1))
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-9 and dt < 5,
           f"distance formula, 200 matrices, max gap {worst:.2e} (tol 1e-9), {dt:.2f}s (< 5s)")


def test_criterion_2_nearest_approximant(report):
    rng = np.random.default_rng(202)
    m = make_model([[1, 1, 1]])
    t0 = time.perf_counter()
    attain, rel = -np.inf, 0.0
    for _ in range(100):
        A = random_matrix(rng, m)
        B, mu = nearest_in_algebra(A, m)
        got = opnorm(A - B)
        attain = max(attain, got - (mu * (1 + 1e-9) + 1e-9))
        rel = max(rel, abs(got - sdp_distance(A, m)) / mu)
    dt = time.perf_counter() - t0
    ok = attain <= 0 and rel <= 1e-6 and dt < 30
    report(2, ok, f"nearest approximant, 100 instances, attainment slack {attain:.2e} (<= 0), "
                  f"oracle rel gap {rel:.2e} (tol 1e-6), {dt:.2f}s (< 30s)")


def test_criterion_3_factorization(report):
    rng = np.random.default_rng(303)
    worst, bounds_ok = 0.0, True
    for i in range(200):
        m = random_model(rng, 8, 3)
        S = random_matrix(rng, m)
        if i % 2 == 0:
            r = qr_in_algebra(S, m)
            worst = max(worst, r.unitarity, membership_residual(r, m))
        else:
            r = cholesky_in_algebra(S.conj().T @ S + 0.01 * np.eye(m.dim), m)
            worst = max(worst, r.residual, membership_residual(r, m))
        inst = random_instance(rng, random_model(rng, 6, 2), int(rng.integers(1, 4)), 0.0)
        eps = epsilon_report(inst).eps_25
        C = cholesky_in_algebra(sum(a.conj().T @ a for a in inst.A_list), inst.model).R_or_C
        w = np.linalg.eigvalsh(C.conj().T @ C)
        bounds_ok &= w[0] >= eps**2 * (1 - 1e-9) and w[-1] <= inst.N * (1 + 1e-12)
    report(3, worst <= 1e-9 and bounds_ok,
           f"factorization, 200 inputs, worst residual/membership {worst:.2e} (tol 1e-9), "
           f"eps^2 I <= C*C <= N I on all normalized instances: {bounds_ok}")


def test_criterion_4_partial_isometry(report):
    rng = np.random.default_rng(404)
    done, violations, worst_res, min_eps = 0, 0, 0.0, np.inf
    while done < 100:
        m = make_model([list(rng.integers(1, 3, size=int(rng.integers(2, 4))))])
        U, amp = random_partial_isometry(rng, m, int(rng.integers(1, 3)))
        B, cert = left_inverse_partial_isometry(U, amp)
        if not cert.eps_measured >= 0.3:
            continue
        done += 1
        min_eps = min(min_eps, cert.eps_measured)
        res = opnorm(B @ U - U.conj().T @ U)
        worst_res = max(worst_res, res)
        violations += res > 1e-8 or opnorm(B) > 4 * cert.eps**-2 or lower_part_norm(B, amp) > 0
    report(4, violations == 0,
           f"left inverse, 100 instances (measured eps >= {min_eps:.3f}), max ||BU - U*U|| "
           f"{worst_res:.2e} (tol 1e-8), violations of ||B|| <= 4 eps^-2: {violations}")


def test_criterion_5_corona_solvers(report):
    rng = np.random.default_rng(505)
    t0 = time.perf_counter()
    solvers = {
        "general": lambda i: corona_solve_general(i),
        "all_n": lambda i: corona_solve_nest(i, "all_n"),
        "P1_only": lambda i: corona_solve_nest(i, "P1_only"),
    }
    fails = {k: 0 for k in solvers}
    worst = 0.0
    for name, solve in solvers.items():
        for _ in range(100):
            m = random_model(rng, 6, 2)
            inst = random_instance(rng, m, int(rng.integers(1, 4)))
            cert = solve(inst)
            unscaled_bound = 4 * inst.N * inst.alpha / cert.eps**3
            memb = max(lower_part_norm(b, m) for b in cert.B_list)
            worst = max(worst, cert.residual)
            fails[name] += not (
                cert.residual <= 1e-8 and memb <= 1e-9 and all(opnorm(b) <= unscaled_bound for b in cert.B_list)
            )
    rejected = 0
    for _ in range(20):
        m = random_model(rng, 6, 2)
        n0 = int(rng.integers(0, len(m.summands[0])))
        inst = unsolvable_instance(rng, m, int(rng.integers(1, 4)), n0)
        try:
            corona_solve_nest(inst)
        except ConditionViolated as exc:
            rejected += exc.witness == n0
    dt = time.perf_counter() - t0
    ok = sum(fails.values()) == 0 and rejected == 20 and dt < 60
    report(5, ok, f"corona solvers, 3x100 instances, failures {fails}, worst residual {worst:.2e} "
                  f"(tol 1e-8), unsolvable rejected with correct index {rejected}/20, {dt:.2f}s (< 60s)")


def test_criterion_6_p1_implies_global(report):
    rng = np.random.default_rng(606)
    worst = -np.inf
    for _ in range(100):
        m = random_model(rng, 6, 2)
        rep = epsilon_report(random_instance(rng, m, int(rng.integers(1, 4)), 0.0))
        worst = max(worst, rep.eps_P1_only - rep.eps_25)
    report(6, worst <= 1e-9, f"P1 bound implies global bound, 100 instances, max(eps_P1 - eps_25) {worst:.2e} (<= 1e-9)")


def test_criterion_7_flows(report):
    rng = np.random.default_rng(707)
    ts = np.linspace(0, 2 * np.pi, 32, endpoint=False)
    eig, beta_err = 0.0, 0.0
    for _ in range(10):
        m = random_model(rng, 6, 2)
        A = random_matrix(rng, m)
        for n, An in fourier_strata(A, m).items():
            for t in ts:
                eig = max(eig, opnorm(flow_apply(An, m, t) - np.exp(1j * n * t) * An))
        F = f_projections(m)
        E0 = hs_projection(m, "En", 0)
        for n in range(m.depth):
            beta_err = max(beta_err, opnorm(beta(E0, m, n).matrix - hs_projection(m, "En", n).matrix))
            for k in range(m.depth - n):
                lhs = beta(beta(E0, m, k), m, n).matrix
                beta_err = max(beta_err, opnorm(lhs - mult_op(F[n], m).matrix @ beta(E0, m, n + k).matrix))
    f_ok = True
    for d in range(1, 7):
        m = make_model([[1] * d])
        F = f_projections(m)
        f_ok &= all(np.array_equal(F[n], m.Q(d - n)) for n in range(d))
    form_ok = all(
        np.array_equal(form_decomposition(ModelDescriptor(m, ["finite"] * m.n_summands))["C_00"], np.eye(m.dim))
        for m in (random_model(rng, 8, 3) for _ in range(20))
    )
    form_ok &= np.array_equal(form_decomposition(bilateral_descriptor(8))["C_11"], np.eye(8))
    ok = eig <= 1e-10 and beta_err <= 1e-10 and f_ok and form_ok
    report(7, ok, f"flows, eigenrelation {eig:.2e}, beta identities {beta_err:.2e} (tol 1e-10), "
                  f"singleton F_n = Q_(d-n): {f_ok}, form decomposition: {form_ok}")


def test_criterion_8_shift_expectation(report):
    rng = np.random.default_rng(808)
    m, rec, mod = 64, 0.0, 0.0
    for _ in range(20):
        K = int(rng.integers(1, 7))
        w = int(rng.integers(1, 8))
        f = TrigPoly(rng.normal(size=2 * K + 1) + 1j * rng.normal(size=2 * K + 1))
        T = toeplitz_section(f, m).matrix.copy()
        T[:w, :w] += rng.normal(size=(w, w)) + 1j * rng.normal(size=(w, w))
        sym = shift_expectation(T, w).symbol
        rec = max(rec, max(abs(sym.coef(q) - f.coef(q)) for q in range(-K, K + 1)))
        b = TrigPoly.analytic(rng.normal(size=min(w, 3)))
        lhs = shift_expectation(toeplitz_section(b, m).matrix @ T, w).symbol
        rhs = b * sym
        mod = max(mod, max(abs(lhs.coef(q) - rhs.coef(q)) for q in range(-lhs.K, lhs.K + 1)))
    proj_ok = all(
        shift_expectation(np.diag((np.arange(m) >= n).astype(float)), 4).symbol.allclose(TrigPoly.constant(1), 0.0)
        for n in range(-4, 5)
    )
    ok = rec <= 1e-13 and mod <= 1e-13 and proj_ok
    report(8, ok, f"shift expectation at m = 64, symbol recovery error {rec:.1e}, module property error "
                  f"{mod:.1e} (exact up to rounding, 1e-13), projections give symbol 1: {proj_ok}")


def test_criterion_9_scalar_corona(report):
    rng = np.random.default_rng(909)
    t0 = time.perf_counter()
    worst, degs, n = 0.0, [], 0
    while n < 20:
        pair = [TrigPoly.analytic(rng.normal(size=int(rng.integers(2, 10))) + 1j * rng.normal(size=1))
                for _ in range(2)]
        if corona_epsilon_scalar(pair, 64).circle_min < 0.2:
            continue
        n += 1
        r = scalar_corona(pair, tol=1e-6)
        worst, degs = max(worst, r.residual), degs + [r.deg_g]
    try:
        scalar_corona([TrigPoly.analytic([0, 1])])
        rejected = False
    except ConditionViolated as exc:
        rejected = exc.measured == 0.0
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and max(degs) <= 64 and rejected and dt < 20
    report(9, ok, f"scalar corona, 20 pairs, worst residual {worst:.2e} (tol 1e-6) at deg_g <= {max(degs)}, "
                  f"f = z rejected with eps = 0: {rejected}, {dt:.2f}s (< 20s)")
