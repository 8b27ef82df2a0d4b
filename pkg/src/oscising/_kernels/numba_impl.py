"""numba-compiled inner loops: phase stepping and exhaustive max-cut."""

import numpy as np
from numba import njit

TWO_PI = 2.0 * np.pi


@njit(cache=True, nogil=True)
def _sched(s, t):
    # s = (v0, v1, t_start, t_ramp)
    if t <= s[2]:
        return s[0]
    if s[3] <= 0.0 or t >= s[2] + s[3]:
        return s[1]
    return s[0] + (s[1] - s[0]) * (t - s[2]) / s[3]


@njit(cache=True, nogil=True)
def _wave(x, kind, duty):
    if kind == 0:
        return np.sin(x)
    y = x - TWO_PI * np.floor(x / TWO_PI)
    if kind == 1:
        # sign(sin x) without the transcendental call
        if y == 0.0 or y == np.pi:
            return 0.0
        return 1.0 if y < np.pi else -1.0
    if y < TWO_PI * duty:
        return 1.0
    return -duty / (1.0 - duty)


@njit(cache=True, nogil=True)
def _rhs(th, J, dw, c, ks, h, kind, duty, phase, out, sb, cb):
    n = th.shape[0]
    for j in range(n):
        sb[j] = np.sin(th[j])
        cb[j] = np.cos(th[j])
    for i in range(n):
        a = 0.0
        b = 0.0
        for j in range(n):
            jij = J[i, j]
            a += jij * sb[j]
            b += jij * cb[j]
        # sum_j J_ij sin(th_j - th_i) in product form
        v = dw[i] + c * (cb[i] * a - sb[i] * b)
        if ks != 0.0:
            v -= ks * _wave(h * th[i] + phase, kind, duty)
        out[i] = v


@njit(cache=True, nogil=True)
def rhs_batch(theta, J, domega, c, ks, h, kind, duty, phase):
    m, n = theta.shape
    out = np.empty((m, n))
    sb = np.empty(n)
    cb = np.empty(n)
    for b in range(m):
        _rhs(theta[b], J, domega[b], c, ks, h, kind, duty, phase, out[b], sb, cb)
    return out


@njit(cache=True, nogil=True)
def advance(theta, J, domega, t0, dt, nsteps, stride, csch, ksch, esch,
            h, kind, duty, phi, detune, method, noise, wrap, out):
    m, n = theta.shape
    k1 = np.empty(n)
    k2 = np.empty(n)
    k3 = np.empty(n)
    k4 = np.empty(n)
    tmp = np.empty(n)
    sb = np.empty(n)
    cb = np.empty(n)
    for b in range(m):
        th = theta[b]
        dw = domega[b]
        for s in range(nsteps):
            t = t0 + s * dt
            if method == 0:
                tm = t + 0.5 * dt
                te = t + dt
                ca = _sched(csch, t)
                cm = _sched(csch, tm)
                ce = _sched(csch, te)
                ka = _sched(ksch, t)
                km = _sched(ksch, tm)
                ke = _sched(ksch, te)
                _rhs(th, J, dw, ca, ka, h, kind, duty, phi - detune * t, k1, sb, cb)
                for i in range(n):
                    tmp[i] = th[i] + 0.5 * dt * k1[i]
                _rhs(tmp, J, dw, cm, km, h, kind, duty, phi - detune * tm, k2, sb, cb)
                for i in range(n):
                    tmp[i] = th[i] + 0.5 * dt * k2[i]
                _rhs(tmp, J, dw, cm, km, h, kind, duty, phi - detune * tm, k3, sb, cb)
                for i in range(n):
                    tmp[i] = th[i] + dt * k3[i]
                _rhs(tmp, J, dw, ce, ke, h, kind, duty, phi - detune * te, k4, sb, cb)
                for i in range(n):
                    th[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
            else:
                ca = _sched(csch, t)
                ka = _sched(ksch, t)
                _rhs(th, J, dw, ca, ka, h, kind, duty, phi - detune * t, k1, sb, cb)
                eta = _sched(esch, t)
                if eta > 0.0:
                    amp = np.sqrt(2.0 * eta * dt)
                    for i in range(n):
                        th[i] += dt * k1[i] + amp * noise[b, s, i]
                else:
                    for i in range(n):
                        th[i] += dt * k1[i]
            if wrap:
                for i in range(n):
                    y = th[i] - TWO_PI * np.floor(th[i] / TWO_PI)
                    if y >= TWO_PI:
                        y -= TWO_PI
                    th[i] = y
            if (s + 1) % stride == 0:
                r = (s + 1) // stride - 1
                for i in range(n):
                    out[b, r, i] = th[i]


@njit(cache=True, nogil=True)
def maxcut_enumerate(n, indptr, indices, weights, tol):
    """Gray-code walk over 2**(n-1) bipartitions with vertex 0 pinned to bit 0.

    Returns the lexicographic code of the best assignment: bit for vertex i
    is ``(code >> (n - 1 - i)) & 1``.
    """
    x = np.zeros(n, np.int8)
    cut = 0.0
    best = 0.0
    best_code = 0
    code = 0
    total = 1 << (n - 1)
    for k in range(1, total):
        t = 0
        kk = k
        while (kk & 1) == 0:
            kk >>= 1
            t += 1
        v = n - 1 - t
        delta = 0.0
        for p in range(indptr[v], indptr[v + 1]):
            if x[indices[p]] == x[v]:
                delta += weights[p]
            else:
                delta -= weights[p]
        x[v] ^= 1
        cut += delta
        code ^= 1 << t
        if cut > best + tol:
            best = cut
            best_code = code
        elif cut >= best - tol and code < best_code:
            best_code = code
    return best_code
