"""Metrics given by coordinate expressions and their pointwise tensors.

Curvature conventions: ``R(X, Y)Z = D_X D_Y Z - D_Y D_X Z - D_[X,Y] Z`` with
components ``R^l_ijk`` of ``R(d_j, d_k) d_i`` and ``Ric_ij = R^k_ikj``, so the
unit round sphere has ``Ric = (n - 1) g``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .expr import ScalarExpr, Tape, compile_tape, parse, raise_tape_status, run_tape

DEGENERACY_THRESHOLD = 1e-10


class GeometryError(ValueError):
    pass


class DegenerateMetricError(GeometryError, ArithmeticError):
    pass


class SignatureError(GeometryError, ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class MetricField:
    """Symmetric matrix of expressions ``g_ij(x)`` with a declared signature ``(p, q)``.

    ``p`` counts positive and ``q`` negative eigenvalues.
    """

    dim: int
    signature: tuple
    components: tuple  # n x n tuple of ScalarExpr, symmetric by construction
    name: str = ""
    _tape: Tape = field(init=False, repr=False)

    def __post_init__(self):
        n = self.dim
        if n < 2:
            raise GeometryError("metric dimension must be at least 2")
        p, q = (int(s) for s in self.signature)
        if p < 0 or q < 0 or p + q != n:
            raise GeometryError(f"signature {self.signature} does not add up to dimension {n}")
        object.__setattr__(self, "signature", (p, q))
        comps = tuple(tuple(row) for row in self.components)
        if len(comps) != n or any(len(row) != n for row in comps):
            raise GeometryError("components must be an n x n array")
        for i in range(n):
            for j in range(n):
                if comps[i][j].dim != n:
                    raise GeometryError(f"component ({i + 1},{j + 1}) has dimension {comps[i][j].dim}")
                if comps[i][j] != comps[j][i]:
                    raise GeometryError(f"components ({i + 1},{j + 1}) and ({j + 1},{i + 1}) differ")
        object.__setattr__(self, "components", comps)
        flat = [comps[i][j] for i in range(n) for j in range(n)]
        object.__setattr__(self, "_tape", compile_tape(flat))

    @classmethod
    def from_strings(cls, rows, signature, name="") -> "MetricField":
        """Build from expression strings.

        ``rows`` is either a full ``n x n`` array or the upper triangle given
        as ragged rows (row ``i`` holds entries ``i..n``).
        """
        rows = [list(r) for r in rows]
        n = len(rows)
        full = all(len(r) == n for r in rows)
        upper = all(len(r) == n - i for i, r in enumerate(rows))
        if not (full or upper):
            raise GeometryError("metric rows must form a full matrix or an upper triangle")
        parsed = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                text = rows[i][j] if full else rows[i][j - i]
                parsed[i][j] = parsed[j][i] = parse(str(text), n)
            if full:
                for j in range(i):
                    lower = parse(str(rows[i][j]), n)
                    if lower != parsed[j][i]:
                        raise GeometryError(f"metric is not symmetric at ({i + 1},{j + 1})")
        return cls(n, tuple(signature), tuple(tuple(r) for r in parsed), name)

    @classmethod
    def from_exprs(cls, components, signature, name="") -> "MetricField":
        return cls(len(components), tuple(signature), tuple(tuple(r) for r in components), name)


@dataclass(frozen=True)
class MetricAtPoint:
    x: np.ndarray
    g: np.ndarray
    g_inv: np.ndarray
    dg: np.ndarray  # dg[k, i, j] = d_k g_ij
    d2g: np.ndarray  # d2g[k, l, i, j] = d_k d_l g_ij


@dataclass(frozen=True)
class CurvatureAtPoint:
    """Everything derived from two derivatives of the metric at one point."""

    metric: MetricAtPoint
    gamma: np.ndarray
    riemann: np.ndarray
    ricci: np.ndarray
    scalar: float

    @property
    def dim(self):
        return self.metric.g.shape[0]

    @property
    def schouten(self) -> np.ndarray:
        n = self.dim
        if n < 3:
            raise GeometryError("Schouten tensor undefined for n < 3 (requires n = p + q >= 3)")
        g = self.metric.g
        return (self.ricci - self.scalar / (2.0 * (n - 1)) * g) / (n - 2)

    @property
    def projective_schouten(self) -> np.ndarray:
        return self.ricci / (self.dim - 1)


def _point(M: MetricField, x) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    if x.shape[0] != M.dim:
        raise ValueError(f"point has length {x.shape[0]}, expected {M.dim}")
    return x


def check_signature(g: np.ndarray, signature) -> None:
    p, q, degenerate = _kernels.signature(g, DEGENERACY_THRESHOLD)
    if degenerate:
        raise DegenerateMetricError(f"degenerate metric (eigenvalues {np.linalg.eigvalsh(g)})")
    if (p, q) != tuple(signature):
        raise SignatureError(f"metric has signature {(p, q)}, expected {tuple(signature)}")


def metric_jets(M: MetricField, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(g, dg, d2g)`` at ``x`` without signature checks or inversion."""
    x = _point(M, x)
    n = M.dim
    val, grad, hess = run_tape(M._tape, x)
    g = val.reshape(n, n)
    dg = np.ascontiguousarray(grad.reshape(n, n, n).transpose(2, 0, 1))
    d2g = np.ascontiguousarray(hess.reshape(n, n, n, n).transpose(2, 3, 0, 1))
    return g, dg, d2g


def metric_at(M: MetricField, x) -> MetricAtPoint:
    x = _point(M, x)
    g, dg, d2g = metric_jets(M, x)
    check_signature(g, M.signature)
    g_inv = np.linalg.inv(g)
    g_inv = 0.5 * (g_inv + g_inv.T)
    return MetricAtPoint(x, g, g_inv, dg, d2g)


def _fused(M: MetricField, x, with_curvature: bool):
    x = _point(M, x)
    t = M._tape
    (status, where, p, q, degenerate, g, dg, d2g, g_inv, gamma, riem, ric,
     scal) = _kernels.metric_curvature(t.ops, t.a, t.b, t.c, t.outputs, x,
                                       DEGENERACY_THRESHOLD, with_curvature)
    raise_tape_status(t, int(status), int(where))
    if degenerate:
        raise DegenerateMetricError(f"degenerate metric at {x} (eigenvalues {np.linalg.eigvalsh(g)})")
    if (p, q) != M.signature:
        raise SignatureError(f"metric has signature {(p, q)} at {x}, expected {M.signature}")
    return x, g, dg, d2g, g_inv, gamma, riem, ric, scal


def connection_at(M: MetricField, x):
    """``(g, g_inv, gamma)`` at ``x``; cheaper than :func:`curvature_at`."""
    _, g, _, _, g_inv, gamma, _, _, _ = _fused(M, x, False)
    return g, g_inv, gamma


def curvature_at(M: MetricField, x) -> CurvatureAtPoint:
    x, g, dg, d2g, g_inv, gamma, riem, ric, scal = _fused(M, x, True)
    return CurvatureAtPoint(MetricAtPoint(x, g, g_inv, dg, d2g), gamma, riem, ric, float(scal))


def christoffel(M: MetricField, x) -> np.ndarray:
    """Levi-Civita symbols ``gamma[k, i, j] = Gamma^k_ij``."""
    return connection_at(M, x)[2]


def riemann(M: MetricField, x) -> np.ndarray:
    return curvature_at(M, x).riemann


def ricci(M: MetricField, x) -> np.ndarray:
    return curvature_at(M, x).ricci


def scalar(M: MetricField, x) -> float:
    return curvature_at(M, x).scalar


def schouten(M: MetricField, x) -> np.ndarray:
    if M.dim < 3:
        raise GeometryError("Schouten tensor undefined for n < 3 (requires n = p + q >= 3)")
    return curvature_at(M, x).schouten


def projective_schouten(M: MetricField, x) -> np.ndarray:
    """``Ric / (n - 1)`` of the Levi-Civita connection (symmetric)."""
    return curvature_at(M, x).projective_schouten


def sharp(M: MetricField, x, omega: Sequence[float]) -> np.ndarray:
    return metric_at(M, x).g_inv @ np.asarray(omega, dtype=float)


def flat(M: MetricField, x, X: Sequence[float]) -> np.ndarray:
    return metric_at(M, x).g @ np.asarray(X, dtype=float)


def conformal_rescale(M: MetricField, f: ScalarExpr, name: str = "") -> MetricField:
    """The metric ``exp(2 f) g`` as a new expression field."""
    from .expr import apply, combine

    n = M.dim
    if f.dim != n:
        raise GeometryError("conformal factor has the wrong dimension")
    factor = apply("exp", combine("*", 2.0, f, n), n)
    comps = [[combine("*", factor, M.components[i][j], n) for j in range(n)] for i in range(n)]
    return MetricField.from_exprs(comps, M.signature, name or f"exp(2f)*{M.name}")
