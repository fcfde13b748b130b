"""Independent reference computations used by the tests."""

import cvxpy as cp
import numpy as np


def sdp_distance(A, model):
    """``min ||A - B||`` over block upper-triangular ``B`` by semidefinite programming."""
    d = model.dim
    mask = (model.band_index >= 0) & model.support
    B = cp.Variable((d, d), complex=True)
    cons = [B[i, j] == 0 for i, j in zip(*np.nonzero(~mask))]
    prob = cp.Problem(cp.Minimize(cp.sigma_max(A - B)), cons)
    prob.solve(solver=cp.CLARABEL)
    return float(prob.value)


def dense_distance_oracle(A, model):
    """``max_n ||(I - Q_n) A Q_n||`` by explicit projections over the whole direct sum."""
    best = 0.0
    for s in range(model.n_summands):
        for n in range(len(model.summands[s]) + 1):
            Q = model.Q(n, s)
            Z = model.summand_projection(s)
            best = max(best, np.linalg.norm((Z - Q) @ A @ Q, 2))
    return best
