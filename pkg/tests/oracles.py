"""Independent reference computations used only by the tests.

None of these share code paths with the package: loops instead of
Kronecker products, Taylor series instead of eigendecompositions, an ODE
integrator instead of product formulas.
"""

import math

import numpy as np
from scipy.integrate import solve_ivp


def kron_loops(a, b):
    a, b = np.asarray(a), np.asarray(b)
    n, m = a.shape[0], b.shape[0]
    out = np.zeros((n * m, n * m), dtype=complex)
    for i in range(n):
        for j in range(n):
            for k in range(m):
                for l in range(m):
                    out[i * m + k, j * m + l] = a[i, j] * b[k, l]
    return out


def expm_taylor(h, t, terms=30):
    """``exp(-i t h)`` by scaling and squaring a truncated Taylor series."""
    a = -1j * t * np.asarray(h, dtype=complex)
    s = max(0, int(np.ceil(np.log2(max(np.linalg.norm(a, 1), 1e-300)))) + 1)
    a = a / 2**s
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def power_norm(a, iters=2000, seed=0):
    a = np.asarray(a, dtype=complex)
    g = a.conj().T @ a
    v = np.random.default_rng(seed).normal(size=a.shape[1]) + 0j
    for _ in range(iters):
        v = g @ v
        v /= np.linalg.norm(v)
    return math.sqrt(abs(np.vdot(v, g @ v)))


def bessel_series(n, t, terms=40):
    """Ascending series in floating point; fine for small ``t``."""
    return sum((-1) ** j * (t / 2) ** (2 * j + n) / (math.factorial(j) * math.factorial(j + n))
               for j in range(terms))


def adaptive_simpson(f, a, b, tol=1e-13, depth=50):
    def simpson(fa, fm, fb, a, b):
        return (b - a) / 6 * (fa + 4 * fm + fb)

    def rec(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, a, m)
        right = simpson(fm, frm, fb, m, b)
        if depth <= 0 or abs(left + right - whole) <= 15 * tol:
            return left + right + (left + right - whole) / 15
        return rec(a, m, fa, flm, fm, left, tol / 2, depth - 1) + rec(
            m, b, fm, frm, fb, right, tol / 2, depth - 1)

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, depth)


def schrodinger_propagator(hfun, t, dim, rtol=1e-12, atol=1e-13):
    """Time-ordered propagator from ``i dU/dt = H(t) U`` with an adaptive RK solver."""
    def rhs(s, y):
        u = y.reshape(dim, dim)
        return (-1j * hfun(s) @ u).ravel()

    sol = solve_ivp(rhs, (0.0, t), np.eye(dim, dtype=complex).ravel(), method="DOP853",
                    rtol=rtol, atol=atol)
    return sol.y[:, -1].reshape(dim, dim)


def spectral_transform(a, f):
    w, v = np.linalg.eigh(a)
    return (v * f(w)) @ v.conj().T


def hermitian_dilation(a):
    """Unitary ``[[A, S], [S, -A]]`` with ``S = sqrt(I - A^2)`` for Hermitian ``||A|| <= 1``."""
    w, v = np.linalg.eigh(a)
    s = (v * np.sqrt(np.clip(1 - w**2, 0, None))) @ v.conj().T
    return np.block([[a, s], [s, -a]])


def random_hermitian(rng, dim, norm=None):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = 0.5 * (a + a.conj().T)
    if norm is not None:
        h *= norm / np.linalg.norm(h, 2)
    return h


def random_parity_poly(rng, degree, parity, sup):
    from tdhsim.qsp import ChebyshevPoly

    c = rng.normal(size=degree + 1) / np.arange(1, degree + 2)
    c[(1 if parity == "even" else 0)::2] = 0.0
    if not np.any(c):
        c[1 if parity == "odd" else 0] = 1.0
    p = ChebyshevPoly.from_coeffs(c, parity)
    return p.scaled(sup / p.sup_bound)
