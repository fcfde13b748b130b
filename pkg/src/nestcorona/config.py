"""Tolerance defaults.

``NESTCORONA_TOL`` in the environment overrides the structural tolerance.
"""

import os

DEFAULT_TOL = 1e-9
CERT_RESIDUAL_TOL = 1e-8
INVERTIBILITY_TOL = 1e-10
NEAREST_REG = 1e-9


def default_tol():
    """Structural tolerance used by membership and orthogonality predicates."""
    raw = os.environ.get("NESTCORONA_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"NESTCORONA_TOL is not a number: {raw!r}") from None
    if not value >= 0:
        raise ValueError(f"NESTCORONA_TOL must be nonnegative, got {value}")
    return value


def resolve_tol(tol):
    return default_tol() if tol is None else float(tol)
