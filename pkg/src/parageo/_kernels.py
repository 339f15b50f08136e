"""Hot kernels: jet evaluation of expression tapes and curvature contractions.

Every kernel exists twice: a scalar-loop version compiled with numba and a
vectorised numpy version.  ``eval_tape``/``curvature``/``connection`` are bound
(and ``closest``) to one of them at import time according to :mod:`parageo._accel`.

Tensor layouts (0-based indices)::

    dg[k, i, j]      = d_k g_ij
    d2g[k, l, i, j]  = d_k d_l g_ij
    gamma[k, i, j]   = Gamma^k_ij
    riem[l, i, j, k] = R^l_ijk  (component of R(d_j, d_k) d_i)
    ric[i, j]        = R^k_ikj
"""
import math

import numpy as np

from ._accel import USE_NUMBA, njit
from .expr import (OP_ADD, OP_CONST, OP_DIV, OP_FUNC, OP_MUL, OP_NEG, OP_POW, OP_POWC,
                   OP_POWI, OP_SUB, OP_VAR)

OP_SIN = OP_FUNC["sin"]
OP_COS = OP_FUNC["cos"]
OP_TAN = OP_FUNC["tan"]
OP_EXP = OP_FUNC["exp"]
OP_LOG = OP_FUNC["log"]
OP_SQRT = OP_FUNC["sqrt"]
OP_SINH = OP_FUNC["sinh"]
OP_COSH = OP_FUNC["cosh"]
OP_TANH = OP_FUNC["tanh"]

ST_OK, ST_DIV0, ST_LOG, ST_SQRT, ST_POW, ST_NONFINITE = 0, 1, 2, 3, 4, 5


# ------------------------------------------------------------------ scalar rules

@njit
def _unary_coeffs(op, u, p):
    """(f, f', f'', status) for the elementary function ``op`` at ``u``."""
    if op == OP_NEG:
        return -u, -1.0, 0.0, ST_OK
    if op == OP_SIN:
        s = math.sin(u)
        return s, math.cos(u), -s, ST_OK
    if op == OP_COS:
        c = math.cos(u)
        return c, -math.sin(u), -c, ST_OK
    if op == OP_TAN:
        t = math.tan(u)
        d = 1.0 + t * t
        return t, d, 2.0 * t * d, ST_OK
    if op == OP_EXP:
        e = math.exp(u)
        return e, e, e, ST_OK
    if op == OP_LOG:
        if u <= 0.0:
            return 0.0, 0.0, 0.0, ST_LOG
        return math.log(u), 1.0 / u, -1.0 / (u * u), ST_OK
    if op == OP_SQRT:
        if u <= 0.0:
            return 0.0, 0.0, 0.0, ST_SQRT
        r = math.sqrt(u)
        return r, 0.5 / r, -0.25 / (r * u), ST_OK
    if op == OP_SINH:
        return math.sinh(u), math.cosh(u), math.sinh(u), ST_OK
    if op == OP_COSH:
        return math.cosh(u), math.sinh(u), math.cosh(u), ST_OK
    if op == OP_TANH:
        t = math.tanh(u)
        d = 1.0 - t * t
        return t, d, -2.0 * t * d, ST_OK
    if op == OP_POWI:
        if u == 0.0 and p < 0.0:
            return 0.0, 0.0, 0.0, ST_DIV0
        f1 = 0.0 if p == 0.0 else p * u ** (p - 1.0)
        f2 = 0.0 if p * (p - 1.0) == 0.0 else p * (p - 1.0) * u ** (p - 2.0)
        return u ** p, f1, f2, ST_OK
    if op == OP_POWC:
        if u < 0.0:
            return 0.0, 0.0, 0.0, ST_POW
        if u == 0.0:
            if p > 2.0:
                return 0.0, 0.0, 0.0, ST_OK
            return 0.0, 0.0, 0.0, ST_POW
        f0 = math.exp(p * math.log(u))
        return f0, p * f0 / u, p * (p - 1.0) * f0 / (u * u), ST_OK
    return 0.0, 0.0, 0.0, ST_NONFINITE


# ----------------------------------------------------------- tape: numba version

@njit
def _eval_tape_numba(ops, a, b, c, x):
    m = ops.shape[0]
    n = x.shape[0]
    val = np.zeros(m)
    grad = np.zeros((m, n))
    hess = np.zeros((m, n, n))
    for i in range(m):
        op = ops[i]
        ra = a[i]
        rb = b[i]
        if op == OP_CONST:
            val[i] = c[i]
        elif op == OP_VAR:
            k = int(c[i])
            val[i] = x[k]
            grad[i, k] = 1.0
        elif op == OP_ADD or op == OP_SUB:
            s = 1.0 if op == OP_ADD else -1.0
            val[i] = val[ra] + s * val[rb]
            for j in range(n):
                grad[i, j] = grad[ra, j] + s * grad[rb, j]
                for k in range(j, n):
                    h = hess[ra, j, k] + s * hess[rb, j, k]
                    hess[i, j, k] = h
                    hess[i, k, j] = h
        elif op == OP_MUL:
            u = val[ra]
            w = val[rb]
            val[i] = u * w
            for j in range(n):
                grad[i, j] = u * grad[rb, j] + w * grad[ra, j]
            for j in range(n):
                for k in range(j, n):
                    h = (u * hess[rb, j, k] + w * hess[ra, j, k]
                         + (grad[ra, j] * grad[rb, k] + grad[rb, j] * grad[ra, k]))
                    hess[i, j, k] = h
                    hess[i, k, j] = h
        elif op == OP_DIV:
            w = val[rb]
            if w == 0.0:
                return val, grad, hess, ST_DIV0, i
            q = val[ra] / w
            val[i] = q
            for j in range(n):
                grad[i, j] = (grad[ra, j] - q * grad[rb, j]) / w
            for j in range(n):
                for k in range(j, n):
                    h = (hess[ra, j, k] - q * hess[rb, j, k]
                         - (grad[i, j] * grad[rb, k] + grad[rb, j] * grad[i, k])) / w
                    hess[i, j, k] = h
                    hess[i, k, j] = h
        elif op == OP_POW:
            u = val[ra]
            if u <= 0.0:
                return val, grad, hess, ST_POW, i
            w = val[rb]
            lu = math.log(u)
            # m = w * log(u); result = exp(m)
            gm = np.empty(n)
            for j in range(n):
                gm[j] = w * grad[ra, j] / u + lu * grad[rb, j]
            e = math.exp(w * lu)
            val[i] = e
            for j in range(n):
                grad[i, j] = e * gm[j]
            for j in range(n):
                for k in range(j, n):
                    hl = hess[ra, j, k] / u - grad[ra, j] * grad[ra, k] / (u * u)
                    hm = (w * hl + lu * hess[rb, j, k]
                          + (grad[rb, j] * grad[ra, k] + grad[ra, j] * grad[rb, k]) / u)
                    h = e * (hm + gm[j] * gm[k])
                    hess[i, j, k] = h
                    hess[i, k, j] = h
        else:
            f0, f1, f2, st = _unary_coeffs(op, val[ra], c[i])
            if st != ST_OK:
                return val, grad, hess, st, i
            val[i] = f0
            for j in range(n):
                grad[i, j] = f1 * grad[ra, j]
            for j in range(n):
                for k in range(j, n):
                    h = f1 * hess[ra, j, k] + f2 * grad[ra, j] * grad[ra, k]
                    hess[i, j, k] = h
                    hess[i, k, j] = h
        if not math.isfinite(val[i]):
            return val, grad, hess, ST_NONFINITE, i
        for j in range(n):
            if not math.isfinite(grad[i, j]):
                return val, grad, hess, ST_NONFINITE, i
            for k in range(n):
                if not math.isfinite(hess[i, j, k]):
                    return val, grad, hess, ST_NONFINITE, i
    return val, grad, hess, ST_OK, -1


# ----------------------------------------------------------- tape: numpy version

def _eval_tape_numpy(ops, a, b, c, x):
    m = ops.shape[0]
    n = x.shape[0]
    val = np.zeros(m)
    grad = np.zeros((m, n))
    hess = np.zeros((m, n, n))
    with np.errstate(all="ignore"):
        for i in range(m):
            op = int(ops[i])
            ra = int(a[i])
            rb = int(b[i])
            if op == OP_CONST:
                val[i] = c[i]
            elif op == OP_VAR:
                k = int(c[i])
                val[i] = x[k]
                grad[i, k] = 1.0
            elif op == OP_ADD:
                val[i] = val[ra] + val[rb]
                grad[i] = grad[ra] + grad[rb]
                hess[i] = hess[ra] + hess[rb]
            elif op == OP_SUB:
                val[i] = val[ra] - val[rb]
                grad[i] = grad[ra] - grad[rb]
                hess[i] = hess[ra] - hess[rb]
            elif op == OP_MUL:
                u, w = val[ra], val[rb]
                val[i] = u * w
                grad[i] = u * grad[rb] + w * grad[ra]
                cross = np.outer(grad[ra], grad[rb])
                hess[i] = u * hess[rb] + w * hess[ra] + (cross + cross.T)
            elif op == OP_DIV:
                w = val[rb]
                if w == 0.0:
                    return val, grad, hess, ST_DIV0, i
                q = val[ra] / w
                val[i] = q
                grad[i] = (grad[ra] - q * grad[rb]) / w
                cross = np.outer(grad[i], grad[rb])
                hess[i] = (hess[ra] - q * hess[rb] - (cross + cross.T)) / w
            elif op == OP_POW:
                u, w = val[ra], val[rb]
                if u <= 0.0:
                    return val, grad, hess, ST_POW, i
                lu = math.log(u)
                gl = grad[ra] / u
                hl = hess[ra] / u - np.outer(gl, gl)
                gm = w * gl + lu * grad[rb]
                cross = np.outer(grad[rb], gl)
                hm = w * hl + lu * hess[rb] + (cross + cross.T)
                e = math.exp(w * lu)
                val[i] = e
                grad[i] = e * gm
                hess[i] = e * (hm + np.outer(gm, gm))
            else:
                f0, f1, f2, st = _unary_coeffs_py(op, val[ra], c[i])
                if st != ST_OK:
                    return val, grad, hess, st, i
                val[i] = f0
                grad[i] = f1 * grad[ra]
                hess[i] = f1 * hess[ra] + f2 * np.outer(grad[ra], grad[ra])
            if not (np.isfinite(val[i]) and np.isfinite(grad[i]).all()
                    and np.isfinite(hess[i]).all()):
                return val, grad, hess, ST_NONFINITE, i
    return val, grad, hess, ST_OK, -1


def _unary_coeffs_py(op, u, p):
    fn = getattr(_unary_coeffs, "py_func", _unary_coeffs)
    try:
        return fn(op, float(u), float(p))
    except OverflowError:
        return 0.0, 0.0, 0.0, ST_NONFINITE


# ------------------------------------------------------------ curvature kernels

@njit
def _connection_numba(g, dg):
    n = g.shape[0]
    ginv = np.linalg.inv(g)
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.5 * (ginv[i, j] + ginv[j, i])
            ginv[i, j] = s
            ginv[j, i] = s
    low = np.empty((n, n, n))  # Gamma_{m,ij}
    for m in range(n):
        for i in range(n):
            for j in range(i, n):
                s = 0.5 * (dg[i, j, m] + dg[j, i, m] - dg[m, i, j])
                low[m, i, j] = s
                low[m, j, i] = s
    gamma = np.zeros((n, n, n))
    for k in range(n):
        for i in range(n):
            for j in range(i, n):
                s = 0.0
                for m in range(n):
                    s += ginv[k, m] * low[m, i, j]
                gamma[k, i, j] = s
                gamma[k, j, i] = s
    return ginv, low, gamma


@njit
def _curvature_numba(g, dg, d2g):
    n = g.shape[0]
    ginv, low, gamma = _connection_numba(g, dg)
    # d_l g^{km} = -g^{ka} d_l g_ab g^{bm}
    dginv = np.zeros((n, n, n))
    for l in range(n):
        tmp = np.zeros((n, n))
        for a in range(n):
            for m in range(n):
                s = 0.0
                for bb in range(n):
                    s += dg[l, a, bb] * ginv[bb, m]
                tmp[a, m] = s
        for k in range(n):
            for m in range(n):
                s = 0.0
                for a in range(n):
                    s += ginv[k, a] * tmp[a, m]
                dginv[l, k, m] = -s
    # dgamma[l, k, i, j] = d_l Gamma^k_ij
    dgamma = np.zeros((n, n, n, n))
    for l in range(n):
        for k in range(n):
            for i in range(n):
                for j in range(i, n):
                    s = 0.0
                    for m in range(n):
                        dlow = 0.5 * (d2g[l, i, j, m] + d2g[l, j, i, m] - d2g[l, m, i, j])
                        s += dginv[l, k, m] * low[m, i, j] + ginv[k, m] * dlow
                    dgamma[l, k, i, j] = s
                    dgamma[l, k, j, i] = s
    riem = np.zeros((n, n, n, n))
    for l in range(n):
        for i in range(n):
            for j in range(n):
                for k in range(j + 1, n):
                    s = dgamma[j, l, k, i] - dgamma[k, l, j, i]
                    for m in range(n):
                        s += gamma[l, j, m] * gamma[m, k, i] - gamma[l, k, m] * gamma[m, j, i]
                    riem[l, i, j, k] = s
                    riem[l, i, k, j] = -s
    ric = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            s = 0.0
            for k in range(n):
                s += riem[k, i, k, j]
            ric[i, j] = s
    scal = 0.0
    for i in range(n):
        for j in range(n):
            scal += ginv[i, j] * ric[i, j]
    return ginv, gamma, riem, ric, scal


def _connection_numpy(g, dg):
    ginv = np.linalg.inv(g)
    ginv = 0.5 * (ginv + ginv.T)
    low = 0.5 * (np.einsum("ijm->mij", dg) + np.einsum("jim->mij", dg) - dg)
    gamma = np.einsum("km,mij->kij", ginv, low)
    gamma = 0.5 * (gamma + gamma.transpose(0, 2, 1))
    return ginv, low, gamma


def _curvature_numpy(g, dg, d2g):
    ginv, low, gamma = _connection_numpy(g, dg)
    dginv = -np.einsum("ka,lab,bm->lkm", ginv, dg, ginv)
    dlow = 0.5 * (np.einsum("lijm->lmij", d2g) + np.einsum("ljim->lmij", d2g) - d2g)
    dgamma = np.einsum("lkm,mij->lkij", dginv, low) + np.einsum("km,lmij->lkij", ginv, dlow)
    riem = (np.einsum("jlki->lijk", dgamma) - np.einsum("klji->lijk", dgamma)
            + np.einsum("ljm,mki->lijk", gamma, gamma) - np.einsum("lkm,mji->lijk", gamma, gamma))
    riem = 0.5 * (riem - riem.transpose(0, 1, 3, 2))
    ric = np.einsum("kikj->ij", riem)
    scal = float(np.einsum("ij,ij->", ginv, ric))
    return ginv, gamma, riem, ric, scal


@njit
def _gather_numba(val, grad, hess, outputs, n):
    g = np.empty((n, n))
    dg = np.empty((n, n, n))
    d2g = np.empty((n, n, n, n))
    for i in range(n):
        for j in range(n):
            r = outputs[i * n + j]
            g[i, j] = val[r]
            for k in range(n):
                dg[k, i, j] = grad[r, k]
                for l in range(n):
                    d2g[k, l, i, j] = hess[r, k, l]
    return g, dg, d2g


def _gather_numpy(val, grad, hess, outputs, n):
    g = val[outputs].reshape(n, n)
    dg = np.ascontiguousarray(grad[outputs].reshape(n, n, n).transpose(2, 0, 1))
    d2g = np.ascontiguousarray(hess[outputs].reshape(n, n, n, n).transpose(2, 3, 0, 1))
    return g, dg, d2g


@njit
def _signature_numba(g, threshold):
    eig = np.linalg.eigvalsh(g)
    p = 0
    q = 0
    degenerate = False
    for e in eig:
        if abs(e) <= threshold:
            degenerate = True
        elif e > 0.0:
            p += 1
        else:
            q += 1
    return p, q, degenerate


def _signature_numpy(g, threshold):
    eig = np.linalg.eigvalsh(g)
    degenerate = bool(np.any(np.abs(eig) <= threshold))
    return int(np.sum(eig > threshold)), int(np.sum(eig < -threshold)), degenerate


@njit
def _metric_curvature_numba(ops, a, b, c, outputs, x, threshold, with_curvature):
    n = x.shape[0]
    val, grad, hess, status, where = _eval_tape_numba(ops, a, b, c, x)
    g = np.zeros((n, n))
    dg = np.zeros((n, n, n))
    d2g = np.zeros((n, n, n, n))
    ginv = np.eye(n)
    gamma = np.zeros((n, n, n))
    riem = np.zeros((n, n, n, n))
    ric = np.zeros((n, n))
    scal = 0.0
    p, q, degenerate = 0, 0, False
    if status == ST_OK:
        g, dg, d2g = _gather_numba(val, grad, hess, outputs, n)
        p, q, degenerate = _signature_numba(g, threshold)
        if not degenerate:
            if with_curvature:
                ginv, gamma, riem, ric, scal = _curvature_numba(g, dg, d2g)
            else:
                ginv, _, gamma = _connection_numba(g, dg)
    return status, where, p, q, degenerate, g, dg, d2g, ginv, gamma, riem, ric, scal


def _metric_curvature_numpy(ops, a, b, c, outputs, x, threshold, with_curvature):
    n = x.shape[0]
    val, grad, hess, status, where = _eval_tape_numpy(ops, a, b, c, x)
    g, dg, d2g = np.zeros((n, n)), np.zeros((n, n, n)), np.zeros((n, n, n, n))
    ginv, gamma = np.eye(n), np.zeros((n, n, n))
    riem, ric, scal = np.zeros((n, n, n, n)), np.zeros((n, n)), 0.0
    p, q, degenerate = 0, 0, False
    if status == ST_OK:
        g, dg, d2g = _gather_numpy(val, grad, hess, outputs, n)
        p, q, degenerate = _signature_numpy(g, threshold)
        if not degenerate:
            if with_curvature:
                ginv, gamma, riem, ric, scal = _curvature_numpy(g, dg, d2g)
            else:
                ginv, _, gamma = _connection_numpy(g, dg)
    return status, where, p, q, degenerate, g, dg, d2g, ginv, gamma, riem, ric, scal


# ------------------------------------------------ closest point on a sampled curve

@njit
def _closest_numba(p, G, x, v, t):
    """``(distance^2, interval, s)`` of the point of a Hermite-sampled curve closest to ``p``.

    Piece ``j`` runs from ``x[j]`` to ``x[j + 1]`` with end velocities ``v`` and
    duration ``t[j + 1] - t[j]``.  Only the pieces around the nearest sample are searched.
    """
    m, n = x.shape
    k = 0
    best_vertex = np.inf
    for i in range(m):
        d = 0.0
        for a in range(n):
            d += (x[i, a] - p[a]) ** 2
        if d < best_vertex:
            best_vertex = d
            k = i
    best, best_j, best_s = np.inf, max(0, min(k, m - 2)), 0.0
    q = np.empty(n)
    d1 = np.empty(n)
    d2 = np.empty(n)
    r = np.empty(n)
    for j in range(k - 2, k + 2):
        if j < 0 or j + 1 >= m:
            continue
        dt = t[j + 1] - t[j]
        # start from the chord projection
        num = 0.0
        den = 0.0
        for a in range(n):
            for b in range(n):
                num += (p[a] - x[j, a]) * G[a, b] * (x[j + 1, b] - x[j, b])
                den += (x[j + 1, a] - x[j, a]) * G[a, b] * (x[j + 1, b] - x[j, b])
        s = 0.0 if den == 0.0 else min(1.0, max(0.0, num / den))
        for it in range(9):
            s2 = s * s
            s3 = s2 * s
            for a in range(n):
                xa, xb = x[j, a], x[j + 1, a]
                va, vb = dt * v[j, a], dt * v[j + 1, a]
                q[a] = (2 * s3 - 3 * s2 + 1) * xa + (s3 - 2 * s2 + s) * va + (3 * s2 - 2 * s3) * xb + (s3 - s2) * vb
                d1[a] = (6 * s2 - 6 * s) * (xa - xb) + (3 * s2 - 4 * s + 1) * va + (3 * s2 - 2 * s) * vb
                d2[a] = (12 * s - 6) * (xa - xb) + (6 * s - 4) * va + (6 * s - 2) * vb
                r[a] = q[a] - p[a]
            if it == 8:
                break
            f1 = 0.0
            f2 = 0.0
            for a in range(n):
                for b in range(n):
                    f1 += d1[a] * G[a, b] * r[b]
                    f2 += d2[a] * G[a, b] * r[b] + d1[a] * G[a, b] * d1[b]
            if f2 <= 0.0:
                break
            s_new = min(1.0, max(0.0, s - f1 / f2))
            if abs(s_new - s) < 1e-15:
                s = s_new
                break
            s = s_new
        # distance at the final s
        s2 = s * s
        s3 = s2 * s
        dist = 0.0
        for a in range(n):
            r[a] = ((2 * s3 - 3 * s2 + 1) * x[j, a] + (s3 - 2 * s2 + s) * dt * v[j, a]
                    + (3 * s2 - 2 * s3) * x[j + 1, a] + (s3 - s2) * dt * v[j + 1, a]) - p[a]
        for a in range(n):
            for b in range(n):
                dist += r[a] * G[a, b] * r[b]
        dist = abs(dist)
        if dist < best:
            best, best_j, best_s = dist, j, s
    return best, best_j, best_s


def _hermite_numpy(a, va, b, vb, dt, s):
    s2, s3 = s * s, s * s * s
    va, vb = dt * va, dt * vb
    q = (2 * s3 - 3 * s2 + 1) * a + (s3 - 2 * s2 + s) * va + (3 * s2 - 2 * s3) * b + (s3 - s2) * vb
    d1 = (6 * s2 - 6 * s) * (a - b) + (3 * s2 - 4 * s + 1) * va + (3 * s2 - 2 * s) * vb
    d2 = (12 * s - 6) * (a - b) + (6 * s - 4) * va + (6 * s - 2) * vb
    return q, d1, d2


def _closest_numpy(p, G, x, v, t):
    k = int(np.argmin(((x - p) ** 2).sum(axis=1)))
    m = x.shape[0]
    best = (np.inf, max(0, min(k, m - 2)), 0.0)
    for j in range(k - 2, k + 2):
        if j < 0 or j + 1 >= m:
            continue
        a, b, dt = x[j], x[j + 1], t[j + 1] - t[j]
        ab = b - a
        den = ab @ G @ ab
        s = 0.0 if den == 0 else min(1.0, max(0.0, ((p - a) @ G @ ab) / den))
        for _ in range(8):
            q, d1, d2 = _hermite_numpy(a, v[j], b, v[j + 1], dt, s)
            r = q - p
            f2 = d2 @ G @ r + d1 @ G @ d1
            if f2 <= 0:
                break
            s_new = min(1.0, max(0.0, s - (d1 @ G @ r) / f2))
            if abs(s_new - s) < 1e-15:
                s = s_new
                break
            s = s_new
        r = _hermite_numpy(a, v[j], b, v[j + 1], dt, s)[0] - p
        dist = abs(float(r @ G @ r))
        if dist < best[0]:
            best = (dist, j, s)
    return best


if USE_NUMBA:
    metric_curvature = _metric_curvature_numba
    signature = _signature_numba
    eval_tape = _eval_tape_numba
    connection = _connection_numba
    curvature = _curvature_numba
    closest = _closest_numba
else:
    metric_curvature = _metric_curvature_numpy
    signature = _signature_numpy
    eval_tape = _eval_tape_numpy
    connection = _connection_numpy
    curvature = _curvature_numpy
    closest = _closest_numpy
