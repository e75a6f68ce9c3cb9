"""Pure numpy implementation of the QSP evaluation kernels.

Both kernels evaluate the top-left entry of

    e^{i th_0 Z} W(x) e^{i th_1 Z} W(x) ... W(x) e^{i th_k Z}

with W(x) = [[x, i s], [i s, x]], s = sqrt(1 - x^2), vectorized over the
sample points.  Only the first row of the running prefix and the first
column of the running suffix are ever needed, so everything is carried
as 2-vectors.
"""

import numpy as np


def _w_row(r0, r1, x, s):
    # row vector times W(x)
    return r0 * x + 1j * s * r1, 1j * s * r0 + r1 * x


def qsp_top_left(phases, xs):
    phases = np.ascontiguousarray(phases, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    s = np.sqrt(np.maximum(0.0, 1.0 - xs * xs))
    r0 = np.full(xs.shape, np.exp(1j * phases[0]))
    r1 = np.zeros(xs.shape, dtype=complex)
    for th in phases[1:]:
        r0, r1 = _w_row(r0, r1, xs, s)
        r0 = r0 * np.exp(1j * th)
        r1 = r1 * np.exp(-1j * th)
    return r0


def qsp_top_left_grad(phases, xs):
    """Top-left entries and their derivatives with respect to every phase.

    Returns ``(p, dp)`` where ``p`` has shape ``(len(xs),)`` and ``dp`` has
    shape ``(len(xs), len(phases))``.
    """
    phases = np.ascontiguousarray(phases, dtype=np.float64)
    xs = np.ascontiguousarray(xs, dtype=np.float64)
    k = len(phases) - 1
    n = len(xs)
    s = np.sqrt(np.maximum(0.0, 1.0 - xs * xs))
    e = np.exp(1j * phases)

    # pre[j] = first row of E_0 W E_1 W ... E_{j-1} W  (pre[0] = e_0^T)
    pre0 = np.empty((k + 1, n), dtype=complex)
    pre1 = np.empty((k + 1, n), dtype=complex)
    pre0[0] = 1.0
    pre1[0] = 0.0
    for j in range(k):
        a0 = pre0[j] * e[j]
        a1 = pre1[j] * np.conj(e[j])
        pre0[j + 1], pre1[j + 1] = _w_row(a0, a1, xs, s)

    # suf[j] = first column of E_j W E_{j+1} ... W E_k
    suf0 = np.empty((k + 1, n), dtype=complex)
    suf1 = np.empty((k + 1, n), dtype=complex)
    suf0[k] = e[k]
    suf1[k] = 0.0
    for j in range(k - 1, -1, -1):
        c0 = xs * suf0[j + 1] + 1j * s * suf1[j + 1]
        c1 = 1j * s * suf0[j + 1] + xs * suf1[j + 1]
        suf0[j] = e[j] * c0
        suf1[j] = np.conj(e[j]) * c1

    p = pre0[0] * suf0[0] + pre1[0] * suf1[0]
    # d/dth_j inserts iZ in front of E_j
    dp = 1j * (pre0 * suf0 - pre1 * suf1)
    return p, dp.T.copy()
