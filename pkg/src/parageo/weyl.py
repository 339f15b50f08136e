"""Conformal Weyl connections translated from a metric by a 1-form.

For a metric ``g`` and a 1-form ``alpha``::

    D^alpha_X Y = D^g_X Y + alpha(X) Y + alpha(Y) X - g(X, Y) alpha^#

The sign of ``alpha`` is the one used throughout the package; for a second
metric ``exp(2f) g`` the same Weyl connection has 1-form ``alpha - df``.
"""
from __future__ import annotations

import numpy as np

from .geometry import MetricField, connection_at

NULL_THRESHOLD = 1e-12


class NullVelocityError(ValueError):
    pass


def acceleration_terms(gamma, g, g_inv, v, alpha):
    """Coordinate ``dv/dt`` of a ``D^alpha``-geodesic (array-level helper)."""
    gvv = v @ g @ v
    return (-(gamma @ v) @ v
            - 2.0 * (alpha @ v) * v + gvv * (g_inv @ alpha))


def weyl_acceleration(M: MetricField, x, v, alpha) -> np.ndarray:
    """``dv/dt`` solving ``D^alpha_v v = 0`` at ``x``."""
    v = np.asarray(v, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    g, g_inv, gamma = connection_at(M, x)
    return acceleration_terms(gamma, g, g_inv, v, alpha)


def alpha_from_covariant(g, v, A):
    """Unique 1-form making ``A = D^g_v v`` the negative of the Weyl correction."""
    gvv = v @ g @ v
    if abs(gvv) <= NULL_THRESHOLD:
        raise NullVelocityError(f"g(v, v) = {gvv:.3e} is null; alpha cannot be recovered")
    A_flat = g @ A
    v_flat = g @ v
    return (A_flat - 2.0 * (A @ v_flat) / gvv * v_flat) / gvv


def alpha_from_acceleration(M: MetricField, x, v, a) -> np.ndarray:
    """Invert :func:`weyl_acceleration` for non-null ``v``.

    ``a`` is the coordinate acceleration ``dv/dt``.
    """
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    g, _, gamma = connection_at(M, x)
    A = a + np.einsum("kij,i,j->k", gamma, v, v)
    return alpha_from_covariant(g, v, A)


def weyl_coefficients(M: MetricField, x, alpha) -> np.ndarray:
    """Connection coefficients ``C^k_ij`` of ``D^alpha`` (``D_i d_j = C^k_ij d_k``)."""
    alpha = np.asarray(alpha, dtype=float)
    g, g_inv, gamma = connection_at(M, x)
    n = M.dim
    eye = np.eye(n)
    return (gamma + np.einsum("i,kj->kij", alpha, eye) + np.einsum("j,ki->kij", alpha, eye)
            - np.einsum("ij,k->kij", g, g_inv @ alpha))
