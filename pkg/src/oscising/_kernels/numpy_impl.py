"""Pure-numpy versions of the inner loops, vectorized over the trial batch."""

import numpy as np

TWO_PI = 2.0 * np.pi


def _sched(s, t):
    if t <= s[2]:
        return s[0]
    if s[3] <= 0.0 or t >= s[2] + s[3]:
        return s[1]
    return s[0] + (s[1] - s[0]) * (t - s[2]) / s[3]


def _wave(x, kind, duty):
    if kind == 0:
        return np.sin(x)
    y = x - TWO_PI * np.floor(x / TWO_PI)
    if kind == 1:
        return np.where((y == 0.0) | (y == np.pi), 0.0, np.where(y < np.pi, 1.0, -1.0))
    return np.where(y < TWO_PI * duty, 1.0, -duty / (1.0 - duty))


def rhs_batch(theta, J, domega, c, ks, h, kind, duty, phase):
    s = np.sin(theta)
    co = np.cos(theta)
    # einsum keeps the per-row summation order independent of batch size
    a = np.einsum("bj,ij->bi", s, J)
    b = np.einsum("bj,ij->bi", co, J)
    out = domega + c * (co * a - s * b)
    if ks != 0.0:
        out = out - ks * _wave(h * theta + phase, kind, duty)
    return out


def advance(theta, J, domega, t0, dt, nsteps, stride, csch, ksch, esch,
            h, kind, duty, phi, detune, method, noise, wrap, out):
    th = theta
    for s in range(nsteps):
        t = t0 + s * dt
        if method == 0:
            tm = t + 0.5 * dt
            te = t + dt
            cm, km = _sched(csch, tm), _sched(ksch, tm)
            k1 = rhs_batch(th, J, domega, _sched(csch, t), _sched(ksch, t),
                           h, kind, duty, phi - detune * t)
            k2 = rhs_batch(th + 0.5 * dt * k1, J, domega, cm, km,
                           h, kind, duty, phi - detune * tm)
            k3 = rhs_batch(th + 0.5 * dt * k2, J, domega, cm, km,
                           h, kind, duty, phi - detune * tm)
            k4 = rhs_batch(th + dt * k3, J, domega, _sched(csch, te), _sched(ksch, te),
                           h, kind, duty, phi - detune * te)
            th += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        else:
            k1 = rhs_batch(th, J, domega, _sched(csch, t), _sched(ksch, t),
                           h, kind, duty, phi - detune * t)
            eta = _sched(esch, t)
            if eta > 0.0:
                th += dt * k1 + np.sqrt(2.0 * eta * dt) * noise[:, s, :]
            else:
                th += dt * k1
        if wrap:
            y = th - TWO_PI * np.floor(th / TWO_PI)
            y[y >= TWO_PI] -= TWO_PI
            th[...] = y
        if (s + 1) % stride == 0:
            out[:, (s + 1) // stride - 1, :] = th


def maxcut_enumerate(n, indptr, indices, weights, tol, chunk=1 << 16):
    """Chunked direct enumeration; same contract as the compiled version."""
    src = np.repeat(np.arange(n), np.diff(indptr))
    keep = src < indices
    ei, ej, w = src[keep], indices[keep], weights[keep]
    shifts = (n - 1 - np.arange(n)).astype(np.int64)
    total = 1 << (n - 1)
    best = -np.inf
    best_code = 0
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = (codes[:, None] >> shifts[None, :]) & 1
        cuts = ((bits[:, ei] != bits[:, ej]) * w).sum(axis=1) if w.size else np.zeros(codes.size)
        m = cuts.max()
        if m > best + tol:
            best = m
            best_code = int(codes[np.argmax(cuts >= m - tol)])
        elif m >= best - tol:
            first = int(codes[np.argmax(cuts >= best - tol)])
            best_code = min(best_code, first)
            best = max(best, m)
    return best_code
