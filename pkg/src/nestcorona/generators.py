"""Seeded random models and instances for tests and the self-test."""

from __future__ import annotations

import numpy as np

from .algebra import FiniteModel, make_model
from .interpolation import CoronaInstance, corona_isometry, epsilon_report

__all__ = [
    "random_model",
    "random_matrix",
    "random_element",
    "random_instance",
    "unsolvable_instance",
    "random_partial_isometry",
]


def random_model(rng: np.random.Generator, max_dim: int = 6, max_summands: int = 2) -> FiniteModel:
    """Random model with total dimension at most ``max_dim``."""
    while True:
        S = int(rng.integers(1, max_summands + 1))
        lists = []
        for _ in range(S):
            K = int(rng.integers(1, 4))
            lists.append([int(b) for b in rng.integers(1, 3, size=K)])
        m = make_model(lists)
        if m.dim <= max_dim:
            return m


def random_matrix(rng: np.random.Generator, model: FiniteModel) -> np.ndarray:
    """Complex Gaussian entries inside every summand."""
    return model.assemble(
        [rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)) for d in model.dims]
    )


def random_element(rng: np.random.Generator, model: FiniteModel) -> np.ndarray:
    """Random element of the algebra."""
    return np.where(model.band_index >= 0, random_matrix(rng, model), 0)


def random_instance(rng: np.random.Generator, model: FiniteModel, N: int,
                    min_eps: float = 0.05) -> CoronaInstance:
    """Random instance with ``alpha = 1`` and every nest compression bounded below by ``min_eps``."""
    while True:
        inst = CoronaInstance(model, tuple(random_element(rng, model) for _ in range(N)))
        inst = inst.scaled(1.0 / inst.alpha)
        if epsilon_report(inst).eps_nest_min >= min_eps:
            return inst


def unsolvable_instance(rng: np.random.Generator, model: FiniteModel, N: int, n0: int,
                        summand: int = 0) -> CoronaInstance:
    """Instance whose nest compression at index ``n0`` (in ``summand``) has a common kernel.

    A unit vector ``v`` in block ``n0 + 1`` of the summand is chosen and
    ``(I - Q_{n0}) A_k v`` is removed from every ``A_k``; compressions at
    other indices are left generic.
    """
    sl = model.block_slices(summand)[n0]
    v = np.zeros(model.dim, dtype=complex)
    v[sl] = rng.normal(size=sl.stop - sl.start) + 1j * rng.normal(size=sl.stop - sl.start)
    v /= np.linalg.norm(v)
    keep = np.zeros(model.dim)
    keep[sl.start:model.summand_slice(summand).stop] = 1.0
    mats = []
    for _ in range(N):
        A = random_element(rng, model)
        Av = A @ v
        A = A - np.outer(keep * Av, v.conj())
        mats.append(A)
    inst = CoronaInstance(model, tuple(mats))
    if inst.alpha <= 1e-8:
        # every A_k vanished up to rounding: keep the exact zero instance
        return inst.scaled(0.0)
    return inst.scaled(1.0 / inst.alpha)


def random_partial_isometry(rng: np.random.Generator, model: FiniteModel, N: int = 2):
    """Column partial isometry of a random instance, as ``(U, amplified_model)``."""
    inst = random_instance(rng, model, N)
    U, amp, *_ = corona_isometry(inst)
    return U, amp
