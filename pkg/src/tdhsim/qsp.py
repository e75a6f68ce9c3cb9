"""Quantum signal processing on a single qubit.

Convention used throughout the package::

    U_phi(x) = e^{i th_0 Z} * prod_{j=1..k} [ W(x) e^{i th_j Z} ],
    W(x)     = [[x, i sqrt(1-x^2)], [i sqrt(1-x^2), x]]

The top-left entry ``P(x)`` is a complex polynomial of degree ``k`` and
parity ``k mod 2``.  ``find_phases`` solves for symmetric phases whose
top-left entry has real part equal to a real target polynomial; the
imaginary part is a free completion.  Block encodings recover the real
part exactly by averaging the sequences for ``phi`` and ``-phi``, whose
top-left entries are ``P`` and ``conj(P)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from numpy.polynomial import chebyshev as C

from . import kernels
from .errors import ConvergenceError, DomainError, ParityError

#: Callers scale targets to ``max|P| <= 1 - PHASE_MARGIN``; the solver itself
#: accepts anything up to 1 (Chebyshev polynomials like T_d sit exactly at 1).
PHASE_MARGIN = 1e-6

_PARITY_TOL = 1e-14
_GRID_POINTS = 1001


def cheb_grid(n: int = _GRID_POINTS) -> np.ndarray:
    """Chebyshev extreme points ``cos(j pi/(n-1))``, including both endpoints."""
    if n == 1:
        return np.array([1.0])
    return np.cos(np.pi * np.arange(n) / (n - 1))


@dataclass(frozen=True)
class PhaseSequence:
    """Rotation angles ``(th_0, ..., th_k)``; ``k`` is the number of W factors."""

    angles: tuple

    def __post_init__(self):
        a = tuple(float(x) for x in np.ravel(self.angles))
        if not a or not all(np.isfinite(a)):
            raise DomainError("phase sequence needs at least one finite angle")
        object.__setattr__(self, "angles", a)

    @property
    def degree(self) -> int:
        return len(self.angles) - 1

    def __neg__(self):
        return PhaseSequence(tuple(-a for a in self.angles))

    def __len__(self):
        return len(self.angles)

    def as_array(self) -> np.ndarray:
        return np.array(self.angles)


def _certify_parity(coeffs: np.ndarray, tol: float = _PARITY_TOL):
    if len(coeffs) == 1 or np.all(np.abs(coeffs[1::2]) <= tol):
        return "even"
    if np.all(np.abs(coeffs[0::2]) <= tol):
        return "odd"
    return None


def _sup_abs(c: np.ndarray) -> float:
    """``max |p(x)|`` on [-1, 1] from the critical points of ``|p|^2``.

    A sampling grid alone underestimates the maximum of high-degree
    polynomials by enough to make a near-unit target infeasible.
    """
    # real polynomials peak in |p| where p' vanishes, at half the degree of |p|^2
    if np.all(c.imag == 0):
        q = c.real
    else:
        q = C.chebadd(C.chebmul(c.real, c.real), C.chebmul(c.imag, c.imag))
    pts = [cheb_grid(), np.array([-1.0, 1.0])]
    if len(q) > 2:
        d1 = C.chebder(q)
        d2 = C.chebder(d1)
        r = C.chebroots(d1)
        r = np.clip(r[np.abs(r.imag) < 1e-6].real, -1.0, 1.0)
        for _ in range(3):
            den = C.chebval(r, d2)
            ok = np.abs(den) > 1e-300
            r = np.where(ok, np.clip(r - C.chebval(r, d1) / np.where(ok, den, 1.0), -1.0, 1.0), r)
        pts.append(r)
    x = np.concatenate(pts)
    return float(np.max(np.abs(C.chebval(x, c))))


@dataclass(frozen=True)
class ChebyshevPoly:
    """Polynomial ``sum_k c_k T_k(x)`` with a declared parity and sup bound.

    Build instances with :meth:`from_coeffs`, which trims trailing zeros,
    certifies parity and computes the sup bound from the critical points.
    """

    coeffs: np.ndarray
    parity: str | None = None
    sup_bound: float = field(default=np.inf)

    @classmethod
    def from_coeffs(cls, coeffs, parity: str | None = None) -> "ChebyshevPoly":
        c = np.array(coeffs, dtype=complex).ravel()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if parity == "even":
            c[1::2] = 0.0
        elif parity == "odd":
            c[0::2] = 0.0
        elif parity not in (None, "none"):
            raise DomainError(f"unknown parity {parity!r}")
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else c[:1]
        if parity in (None, "none"):
            parity = _certify_parity(c)
        elif parity == "odd" and not nz.size:
            c = np.zeros(2, dtype=complex)
        c.setflags(write=False)
        return cls(c, parity, _sup_abs(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) <= _PARITY_TOL))

    def __call__(self, x):
        v = C.chebval(np.asarray(x, dtype=float), self.coeffs)
        return v

    def scaled(self, factor: float) -> "ChebyshevPoly":
        return ChebyshevPoly.from_coeffs(self.coeffs * factor, self.parity)

    def real_part(self) -> "ChebyshevPoly":
        return ChebyshevPoly.from_coeffs(self.coeffs.real, self.parity)

    def imag_part(self) -> "ChebyshevPoly":
        return ChebyshevPoly.from_coeffs(self.coeffs.imag, self.parity)

    def even_part(self) -> "ChebyshevPoly":
        return ChebyshevPoly.from_coeffs(self.coeffs, "even")

    def odd_part(self) -> "ChebyshevPoly":
        return ChebyshevPoly.from_coeffs(self.coeffs, "odd")

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs) <= tol))

    def integral(self) -> "ChebyshevPoly":
        """Antiderivative vanishing at zero."""
        return ChebyshevPoly.from_coeffs(C.chebint(self.coeffs, lbnd=0.0))


def signal_w(x: float) -> np.ndarray:
    """The x-rotation ``exp(i arccos(x) X)``."""
    if not np.isfinite(x) or abs(x) > 1.0:
        raise DomainError(f"signal_w needs |x| <= 1, got {x}")
    s = np.sqrt(1.0 - x * x)
    return np.array([[x, 1j * s], [1j * s, x]], dtype=complex)


def _rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(1j * theta), np.exp(-1j * theta)])


def apply_phases(phi, x: float) -> np.ndarray:
    """Return the 2x2 QSP unitary ``U_phi(x)``."""
    if not isinstance(phi, PhaseSequence):
        phi = PhaseSequence(phi)
    w = signal_w(x)
    u = _rz(phi.angles[0])
    for th in phi.angles[1:]:
        u = u @ w @ _rz(th)
    return u


def qsp_response(phi, xs) -> np.ndarray:
    """Top-left entries ``P(x)`` of ``U_phi(x)`` over an array of points."""
    if isinstance(phi, PhaseSequence):
        phi = phi.as_array()
    xs = np.asarray(xs, dtype=float)
    if np.any(np.abs(xs) > 1.0):
        raise DomainError("QSP sample points must lie in [-1, 1]")
    return kernels.qsp_top_left(np.asarray(phi, dtype=float), xs.ravel()).reshape(xs.shape)


def verification_nodes(d: int) -> np.ndarray:
    """Chebyshev nodes ``cos(j pi/(2d))``, ``j = 0..2d``, used to check phases."""
    if d == 0:
        return np.array([1.0, 0.0, -1.0])
    return np.cos(np.pi * np.arange(2 * d + 1) / (2 * d))


def _symmetric_expand(r: np.ndarray, d: int) -> np.ndarray:
    if d % 2:
        return np.concatenate([r, r[::-1]])
    return np.concatenate([r, r[-2::-1]])


def _fold_jacobian(dfull: np.ndarray, d: int) -> np.ndarray:
    # dF/dr_j collects the full-phase derivatives of th_j and its mirror
    nr = dfull.shape[1] // 2 + (1 if d % 2 == 0 else 0)
    jac = dfull[:, :nr].copy()
    mirror = dfull[:, ::-1][:, :nr]
    if d % 2 == 0:
        jac[:, : nr - 1] += mirror[:, : nr - 1]
    else:
        jac += mirror
    return jac


def find_phases(target: ChebyshevPoly, tol: float = 1e-12, max_iter: int = 60) -> PhaseSequence:
    """Symmetric phases with ``Re P_phi = target`` on [-1, 1].

    Newton iteration on the residual at the ``ceil((d+1)/2)`` positive
    Chebyshev roots, started from the near-trivial point with both end
    phases at pi/4 (where ``Re P`` vanishes identically).

    Raises
    ------
    ParityError
        ``target`` has mixed parity.
    DomainError
        Complex coefficients, or ``max|target|`` above 1.
    ConvergenceError
        Residual at the verification nodes still above ``tol`` after
        ``max_iter`` iterations.
    """
    if tol < 1e-12:
        raise DomainError("phase tolerance below 1e-12 is not supported")
    if target.parity not in ("even", "odd"):
        raise ParityError("phase finding needs a definite-parity target")
    if not target.is_real:
        raise DomainError("phase finding needs real Chebyshev coefficients")
    if target.sup_bound > 1.0 + 1e-12:
        raise DomainError(f"target sup {target.sup_bound:.6g} exceeds 1; rescale it")
    c = target.coeffs.real.copy()
    d = target.degree
    if d % 2 != (0 if target.parity == "even" else 1):
        d += 1
        c = np.append(c, 0.0)

    if d == 0:
        return PhaseSequence((float(np.arccos(c[0])),))

    nr = (d + 2) // 2
    nodes = np.cos((2 * np.arange(1, nr + 1) - 1) * np.pi / (4 * nr))
    f_nodes = C.chebval(nodes, c)
    r = np.zeros(nr)
    r[0] = np.pi / 4

    best = (np.inf, r.copy())
    for _ in range(max_iter):
        p, dp = kernels.qsp_top_left_grad(_symmetric_expand(r, d), nodes)
        res = p.real - f_nodes
        err = float(np.max(np.abs(res)))
        if err < best[0]:
            best = (err, r.copy())
        if err <= 1e-15:
            break
        jac = _fold_jacobian(dp.real, d)
        try:
            step = np.linalg.solve(jac, res)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(jac, res, rcond=None)[0]
        r = r - step
        if np.max(np.abs(step)) <= 1e-16:
            break

    phi = PhaseSequence(_symmetric_expand(best[1], d))
    xv = verification_nodes(d)
    resid = float(np.max(np.abs(qsp_response(phi, xv).real - C.chebval(xv, c))))
    if not resid <= tol:
        raise ConvergenceError(
            f"phase finding stalled at residual {resid:.3e} (degree {d})", resid
        )
    return phi


def cheb_fit(f, degree: int, parity: str | None = None) -> ChebyshevPoly:
    """Chebyshev interpolant of ``f`` at ``degree + 1`` first-kind points.

    ``f`` must accept a numpy array.  With a parity hint the coefficients of
    the opposite parity must already be negligible; they are then zeroed.
    """
    if degree < 0:
        raise DomainError("degree must be nonnegative")
    n = degree + 1
    x = C.chebpts1(n)
    y = np.asarray(f(x), dtype=complex) * np.ones(n)
    v = C.chebvander(x, degree)
    c = v.T @ y
    c[0] /= n
    c[1:] /= 0.5 * n
    if parity in ("even", "odd"):
        drop = c[1::2] if parity == "even" else c[0::2]
        scale = max(1.0, float(np.max(np.abs(c))))
        if drop.size and np.max(np.abs(drop)) > 1e-12 * scale:
            raise ParityError(f"function does not look {parity} at degree {degree}")
    return ChebyshevPoly.from_coeffs(c, parity)


# ---------------------------------------------------------------------------
# Polynomial approximation toolbox
# ---------------------------------------------------------------------------

_GRID_CHECK = 2001


@lru_cache(maxsize=4096)
def bessel_j(n: int, t: float) -> float:
    """Bessel function ``J_n(t)`` of the first kind, integer order ``n >= 0``.

    Sums the ascending series ``sum_j (-1)^j (t/2)^(2j+n) / (j! (j+n)!)`` in
    exact rational arithmetic, then rounds once.  Float summation of the
    same series loses all digits to cancellation once ``t`` passes ~20.
    """
    if n < 0:
        raise DomainError("bessel_j takes a nonnegative order")
    if not np.isfinite(t):
        raise DomainError("bessel_j needs a finite argument")
    half = Fraction(float(t)) / 2
    term = half**n / math.factorial(n)
    total = term
    q = half * half
    j = 0
    while True:
        j += 1
        term = -term * q / (j * (j + n))
        total += term
        # terms decrease monotonically once j exceeds t/2; stop well past
        # double precision relative to the sum (or absolutely, near a zero)
        if j > abs(half) and abs(term) <= Fraction(1, 10**30) * max(abs(total), Fraction(1, 10**300)):
            break
        if term == 0:
            break
    return float(total)


class JacobiAnger(NamedTuple):
    """Truncated Jacobi-Anger expansion of ``cos(t x)`` and ``sin(t x)``.

    Unpacks as ``(cos_part, sin_part)``; ``degree`` is the truncation
    order and ``tail`` the certified sup-norm bound on either part's error.
    """

    cos_part: ChebyshevPoly
    sin_part: ChebyshevPoly

    @property
    def degree(self) -> int:
        return max(self.cos_part.degree, self.sin_part.degree)

    @property
    def tail(self) -> float:
        return _ja_tail(self.cos_part, self.sin_part)


def _ja_tail(cos_part, sin_part):
    return float(max(getattr(cos_part, "_tail", 0.0), getattr(sin_part, "_tail", 0.0)))


def _bessel_sequence(t: float) -> list:
    """``J_0(t), J_1(t), ...`` until the values are negligible."""
    vals = []
    k = 0
    while True:
        v = bessel_j(k, t)
        vals.append(v)
        if k > math.e * abs(t) / 2 + 10 and abs(v) < 1e-20:
            return vals
        k += 1


def jacobi_anger_degree(t_eff: float, eps: float) -> int:
    """Smallest ``K`` with ``2 * sum_{k>K} |J_k(t_eff)| <= eps``."""
    j = np.abs(_bessel_sequence(t_eff))
    tails = 2.0 * (np.cumsum(j[::-1])[::-1] - j)  # tails[K] = 2 sum_{k>K}
    return int(np.argmax(tails <= eps))


def jacobi_anger(t_eff: float, eps: float) -> JacobiAnger:
    """Chebyshev approximants of ``cos(t_eff x)`` (even) and ``sin(t_eff x)`` (odd).

    ``cos(tx) = J_0(t) + 2 sum_k (-1)^k J_2k(t) T_2k(x)`` and
    ``sin(tx) = 2 sum_k (-1)^k J_2k+1(t) T_2k+1(x)``, both truncated at the
    smallest order whose Bessel tail is at most ``eps``.  The result is
    checked on a 2001-point grid.
    """
    if not (0.0 < eps < 0.5):
        raise DomainError(f"eps must lie in (0, 1/2), got {eps}")
    if not (np.isfinite(t_eff) and t_eff >= 0.0):
        raise DomainError("t_eff must be finite and nonnegative")
    K = jacobi_anger_degree(t_eff, eps)
    j = _bessel_sequence(t_eff)
    tail = 2.0 * float(sum(abs(v) for v in j[K + 1:]))
    cc = np.zeros(K + 1)
    sc = np.zeros(max(K + 1, 2))
    for k in range(K + 1):
        sign = (-1) ** (k // 2)
        if k % 2 == 0:
            cc[k] = j[0] if k == 0 else 2.0 * sign * j[k]
        else:
            sc[k] = 2.0 * sign * j[k]
    cos_part = ChebyshevPoly.from_coeffs(cc, "even")
    sin_part = ChebyshevPoly.from_coeffs(sc, "odd")
    x = np.linspace(-1.0, 1.0, _GRID_CHECK)
    err = max(
        np.max(np.abs(cos_part(x) - np.cos(t_eff * x))),
        np.max(np.abs(sin_part(x) - np.sin(t_eff * x))),
    )
    if err > eps:
        raise ConvergenceError(f"Jacobi-Anger grid error {err:.3e} exceeds {eps:.3e}", err)
    object.__setattr__(cos_part, "_tail", tail)
    object.__setattr__(sin_part, "_tail", tail)
    return JacobiAnger(cos_part, sin_part)


def rect_degree_cap(delta: float, eps: float) -> int:
    return int(math.ceil(4.0 / delta * math.log(1.0 / eps))) + 20


@lru_cache(maxsize=64)
def rect_poly(t: float, delta: float, eps: float) -> ChebyshevPoly:
    """Even polynomial approximating the indicator of ``[-t, t]``.

    Bands: ``P in [1-eps, 1]`` for ``|x| <= t - delta``, ``P in [0, eps]``
    for ``|x| >= t + delta``, ``|P| <= 1`` everywhere.  Built from the
    smoothed step ``(erf(k(x+t)) - erf(k(x-t)))/2``, projected onto
    Chebyshev polynomials, truncated, and squeezed into ``[eps/4, 1-eps/4]``.
    The bands are verified on a 2001-point grid.
    """
    if not (0.0 < delta < 0.5 and 0.0 < eps < 0.5):
        raise DomainError("delta and eps must lie in (0, 1/2)")
    if not (0.0 < t < 1.0) or t + delta > 1.0 or t <= delta:
        raise DomainError(f"infeasible rectangle bands t={t}, delta={delta}")
    # erfc(k delta) <= eps/8 puts the smoothed step inside the bands
    kd = 1.0
    while math.erfc(kd) > eps / 8:
        kd *= 1.05
    k = kd / delta
    erf = np.frompyfunc(math.erf, 1, 1)

    def g(x):
        return 0.5 * (erf(k * (x + t)).astype(float) - erf(k * (x - t)).astype(float))

    cap = rect_degree_cap(delta, eps)
    full = cheb_fit(g, cap, "even").coeffs.real
    tails = np.cumsum(np.abs(full[::-1]))[::-1]  # tails[i] = sum_{k>=i} |c_k|
    keep = int(np.argmax(tails <= eps / 8)) if np.any(tails <= eps / 8) else len(full)
    p = full[: max(keep, 1)].copy()
    p *= 1.0 - eps / 2
    p[0] += eps / 4
    poly = ChebyshevPoly.from_coeffs(p, "even")
    x = np.linspace(-1.0, 1.0, _GRID_CHECK)
    v = poly(x).real
    ax = np.abs(x)
    ok = (
        np.all(np.abs(v) <= 1.0)
        and np.all((v[ax >= t + delta] >= 0.0) & (v[ax >= t + delta] <= eps))
        and np.all((v[ax <= t - delta] >= 1.0 - eps) & (v[ax <= t - delta] <= 1.0))
    )
    if not ok:
        raise ConvergenceError("rectangle polynomial misses its bands within the degree cap")
    return poly


def _arcsin_taylor(n_terms: int) -> np.ndarray:
    """Monomial coefficients of the first ``n_terms`` odd terms of arcsin."""
    c = np.zeros(2 * n_terms)
    a = 1.0  # (2k)! / (4^k (k!)^2)
    for k in range(n_terms):
        c[2 * k + 1] = a / (2 * k + 1)
        a *= (2 * k + 1) / (2 * k + 2)
    return c


def arcsin_poly(eps: float, margin: float) -> ChebyshevPoly:
    """Odd polynomial within ``eps`` of ``(2/pi) arcsin x`` on ``|x| <= 1 - margin``.

    Truncated Taylor series.  Every Taylor coefficient is positive, so the
    truncation sits below ``(2/pi) arcsin`` on ``[0, 1]`` and is bounded
    by 1 on the whole interval.
    """
    if not (0.0 < eps < 0.5):
        raise DomainError("eps must lie in (0, 1/2)")
    if not (0.0 < margin <= 0.5):
        raise DomainError("margin must lie in (0, 1/2]")
    x0 = 1.0 - margin
    x = np.linspace(-x0, x0, _GRID_CHECK)
    target = (2.0 / np.pi) * np.arcsin(x)
    for n_terms in range(1, 2001):
        # tail bound of the remaining series: c_n x0^(2n+1) / (1 - x0^2)
        mono = _arcsin_taylor(n_terms + 1)
        bound = (2.0 / np.pi) * mono[-1] * x0 ** (2 * n_terms + 1) / (1.0 - x0 * x0)
        if bound > eps / 2:
            continue
        poly = ChebyshevPoly.from_coeffs(
            C.poly2cheb((2.0 / np.pi) * _arcsin_taylor(n_terms)), "odd"
        )
        if np.max(np.abs(poly(x) - target)) <= eps and poly.sup_bound <= 1.0:
            return poly
    raise ConvergenceError(f"arcsin approximation infeasible for eps={eps}, margin={margin}")
