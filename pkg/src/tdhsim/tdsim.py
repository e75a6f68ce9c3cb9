"""Time-dependent Hamiltonians whose terms commute, and their simulation.

``H(t) = sum_i gamma_i(t) * fold_i * h_i`` on ``t in [0, 1]``.  When the
physical terms ``fold_i h_i`` commute pairwise, the time-ordered propagator
collapses to ``exp(-i sum_i alpha_i(t) fold_i h_i)`` with
``alpha_i(t) = int_0^t gamma_i``.  :func:`simulate_td` builds a block
encoding of that exponential from scalar encodings of ``alpha_i(t)``,
operator encodings of the terms, a linear combination, and Jacobi-Anger
exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import polynomial as Pm

from . import blockenc as B
from . import matkernel as mk
from . import qsp
from .errors import CommutativityError, ConvergenceError, DomainError, ModelError

KINDS = ("constant", "polynomial", "trig", "rect")
INPUT_MODES = ("direct-encoding", "evolution-oracle")
MODES = ("effective-time", "m-fold")

_T_GRID = np.linspace(0.0, 1.0, 1001)


def _check_t(t: float) -> float:
    t = float(t)
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"time must lie in [0, 1], got {t}")
    return t


@dataclass(frozen=True)
class CoefficientFn:
    """A scalar coefficient ``gamma(t)`` on ``[0, 1]`` with ``|gamma| <= 1``.

    Use the classmethod constructors.  ``params`` holds:

    * constant: ``(c,)``
    * polynomial: monomial coefficients ``(a_0, a_1, ...)`` in ``t``
    * trig: ``(m, omega)`` for ``exp(-i m omega t)``
    * rect: ``(t_on, t_off, amplitude, delta, eps_rect)``; the pulse is the
      difference of two rectangle polynomials, so its integral is exact
    """

    kind: str
    params: tuple
    _poly: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown coefficient kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(self.params))
        if self.kind == "rect":
            object.__setattr__(self, "_poly", _pulse_poly(*self.params))
        v = np.abs(self.values(_T_GRID))
        if np.max(v) > 1.0 + 1e-12:
            raise DomainError(f"|gamma(t)| reaches {np.max(v):.6g} > 1 on [0, 1]")

    @classmethod
    def constant(cls, c) -> "CoefficientFn":
        return cls("constant", (complex(c) if np.iscomplexobj(c) else float(c),))

    @classmethod
    def polynomial(cls, coeffs) -> "CoefficientFn":
        cs = tuple(complex(c) if np.iscomplexobj(c) else float(c) for c in coeffs)
        if not cs:
            raise DomainError("polynomial coefficient needs at least one term")
        return cls("polynomial", cs)

    @classmethod
    def trig(cls, m: int, omega: float) -> "CoefficientFn":
        if int(m) != m or not np.isfinite(omega):
            raise DomainError("trig coefficient needs integer m and finite omega")
        return cls("trig", (int(m), float(omega)))

    @classmethod
    def rect(cls, t_on, t_off, amplitude, delta, eps_rect) -> "CoefficientFn":
        return cls("rect", (float(t_on), float(t_off), float(amplitude), float(delta), float(eps_rect)))

    @property
    def is_real(self) -> bool:
        if self.kind == "trig":
            return self.params[0] == 0 or self.params[1] == 0
        return all(not isinstance(p, complex) or p.imag == 0 for p in self.params)

    @property
    def is_constant(self) -> bool:
        if self.kind == "constant":
            return True
        if self.kind == "polynomial":
            return all(p == 0 for p in self.params[1:])
        if self.kind == "trig":
            return self.params[0] * self.params[1] == 0
        return False

    def values(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full(t.shape, self.params[0], dtype=complex)
        if self.kind == "polynomial":
            return Pm.polyval(t, np.array(self.params, dtype=complex))
        if self.kind == "trig":
            m, w = self.params
            return np.exp(-1j * m * w * t)
        return np.asarray(self._poly[0](t), dtype=complex)

    def integral_values(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return self.params[0] * t + 0j
        if self.kind == "polynomial":
            return Pm.polyval(t, Pm.polyint(np.array(self.params, dtype=complex)))
        if self.kind == "trig":
            m, w = self.params
            if m * w == 0:
                return t + 0j
            return (1.0 - np.exp(-1j * m * w * t)) / (1j * m * w)
        return np.asarray(self._poly[1](t), dtype=complex)

    def alpha_cheb(self):
        """Exact Chebyshev coefficients of ``alpha`` when it is a polynomial, else None."""
        if self.kind == "constant":
            return np.array([0.0, self.params[0]], dtype=complex)
        if self.kind == "polynomial":
            return C.poly2cheb(Pm.polyint(np.array(self.params, dtype=complex)))
        if self.kind == "trig" and self.params[0] * self.params[1] == 0:
            return np.array([0.0, 1.0], dtype=complex)
        if self.kind == "rect":
            return self._poly[1].coeffs
        return None


def _pulse_poly(t_on, t_off, amplitude, delta, eps_rect):
    """Rectangle pulse ``amplitude * (P_off(t) - P_on(t))`` and its integral."""
    if not (0.0 <= t_on < t_off <= 1.0):
        raise DomainError(f"need 0 <= t_on < t_off <= 1, got ({t_on}, {t_off})")
    outer = qsp.rect_poly(t_off, delta, eps_rect).coeffs.real
    inner = qsp.rect_poly(t_on, delta, eps_rect).coeffs.real if t_on > 0 else np.zeros(1)
    g = amplitude * C.chebsub(outer, inner)
    gp = qsp.ChebyshevPoly.from_coeffs(g, "even")
    return gp, gp.integral()


def coeff_eval(c: CoefficientFn, t: float) -> complex:
    return complex(c.values(_check_t(t)))


def coeff_integral(c: CoefficientFn, t: float) -> complex:
    """``alpha(t) = int_0^t gamma(s) ds`` in closed form."""
    return complex(c.integral_values(_check_t(t)))


@dataclass(frozen=True)
class Term:
    """One summand ``coeff(t) * fold * h``.

    ``h`` is Hermitian with norm at most 1/2 and ``fold`` a positive
    factor, so the physical operator is ``fold * h``.  ``pauli`` records
    the string a term was built from, if any.
    """

    coeff: CoefficientFn
    h: np.ndarray
    fold: float = 1.0
    input_mode: str = "direct-encoding"
    pauli: str | None = None

    @property
    def operator(self) -> np.ndarray:
        return self.fold * self.h


def pauli_term(coeff: CoefficientFn, label: str, input_mode: str = "direct-encoding") -> Term:
    """Term for a Pauli string ``P``: ``h = P/2`` with fold 2."""
    return Term(coeff, 0.5 * mk.pauli_matrix(label), 2.0, input_mode, mk.PauliString(label).ops)


def matrix_term(coeff: CoefficientFn, h, input_mode: str = "evolution-oracle") -> Term:
    """Term for a Hermitian matrix, folded so that ``||h|| <= 1/2``."""
    h = mk.as_matrix(h)
    fold = max(1.0, 2.0 * mk.spectral_norm(h))
    return Term(coeff, h / fold, fold, input_mode)


@dataclass(frozen=True)
class TDHamiltonian:
    system_qubits: int
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        d = 2**self.system_qubits
        if not self.terms:
            raise ModelError("a Hamiltonian needs at least one term")
        for term in self.terms:
            if term.h.shape != (d, d):
                raise ModelError(f"term of shape {term.h.shape} on {self.system_qubits} qubits")
            if not mk.is_hermitian(term.h):
                raise ModelError("every term must be Hermitian")
            if term.input_mode not in INPUT_MODES:
                raise ModelError(f"unknown input mode {term.input_mode!r}")
            if term.input_mode == "evolution-oracle" and mk.spectral_norm(term.h) > 0.5 + 1e-10:
                raise ModelError("evolution-oracle terms need ||h|| <= 1/2")
            if term.input_mode == "direct-encoding" and not mk.is_unitary(term.operator):
                raise ModelError("direct-encoding terms must be unitary after folding")
        for t in np.linspace(0.0, 1.0, 11):
            if not mk.is_hermitian(self.at(t)):
                raise ModelError(f"H(t) is not Hermitian at t={t:.2f}; pair complex coefficients")

    @property
    def dim(self) -> int:
        return 2**self.system_qubits

    def at(self, t: float) -> np.ndarray:
        """``H(t)`` as a dense matrix."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for term in self.terms:
            out += complex(term.coeff.values(t)) * term.operator
        return out


@dataclass(frozen=True)
class CommutingReport:
    passed: bool
    max_commutator_norm: float
    offending_pair: tuple | None
    max_time_pair_norm: float


def check_commuting(td: TDHamiltonian, tol: float = 1e-10) -> CommutingReport:
    """Pairwise commutator test on the physical terms.

    ``[H(t1), H(t2)]`` is also evaluated on a 5x5 grid of time pairs and
    reported; the verdict rests on the pairwise test, which implies it.
    """
    worst, pair = 0.0, None
    ops = [term.operator for term in td.terms]
    for i in range(len(ops)):
        for j in range(i + 1, len(ops)):
            n = mk.spectral_norm(mk.commutator(ops[i], ops[j]))
            if n > worst:
                worst, pair = n, (i, j)
    ts = np.linspace(0.0, 1.0, 5)
    hs = [td.at(t) for t in ts]
    tp = max(mk.spectral_norm(mk.commutator(a, b)) for a in hs for b in hs)
    passed = worst <= tol
    return CommutingReport(passed, worst, None if passed else pair, tp)


def h_integral(td: TDHamiltonian, t: float) -> np.ndarray:
    """``int_0^t H(s) ds = sum_i alpha_i(t) fold_i h_i``."""
    t = _check_t(t)
    out = np.zeros((td.dim, td.dim), dtype=complex)
    for term in td.terms:
        out += coeff_integral(term.coeff, t) * term.operator
    if not mk.is_hermitian(out):
        raise ModelError("integrated Hamiltonian is not Hermitian")
    return 0.5 * (out + out.conj().T)


# ---------------------------------------------------------------------------
# scalar approximants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarComponent:
    """``weight * poly(t)`` with ``poly`` real, definite parity, sup below 1."""

    poly: qsp.ChebyshevPoly
    weight: complex


def _trim_tail(c: np.ndarray, budget: float) -> tuple[np.ndarray, float]:
    tails = np.cumsum(np.abs(c[::-1]))[::-1]
    cut = len(c)
    while cut > 1 and tails[cut - 1] <= budget:
        cut -= 1
    dropped = float(tails[cut]) if cut < len(c) else 0.0
    return c[:cut], dropped


def _fit_real(f, parity: str, budget: float) -> tuple[np.ndarray, float]:
    """Chebyshev fit of a smooth real function to within ``budget``."""
    x = np.linspace(-1.0, 1.0, 2001)
    fx = f(x)
    deg = 1 if parity == "odd" else 0
    while deg <= 400:
        p = qsp.cheb_fit(f, deg, parity)
        err = float(np.max(np.abs(p(x).real - fx)))
        if err <= budget:
            return p.coeffs.real, err
        deg += 2
    raise ConvergenceError(f"no Chebyshev fit within {budget:.2e} below degree 400", err)


def alpha_components(c: CoefficientFn, budget: float):
    """Split ``alpha`` into real definite-parity polynomials on ``[-1, 1]``.

    Returns ``(components, approximation_error)``; each component's poly is
    scaled below ``1 - PHASE_MARGIN`` and the scale moved into its weight.
    Exact polynomial integrals keep their full degree unless a Chebyshev
    tail fits inside ``budget``; trig integrals are fitted.
    """
    exact = c.alpha_cheb()
    parts = []
    if exact is not None:
        approx_err = 0.0
        for unit, vals in ((1.0, exact.real), (1j, exact.imag)):
            for parity in ("even", "odd"):
                v = vals.copy()
                v[(1 if parity == "even" else 0)::2] = 0.0
                if not np.any(v):
                    continue
                v, dropped = _trim_tail(v, budget / 4)
                approx_err += dropped
                parts.append((unit, parity, v))
    else:
        m, w = c.params
        mw = m * w
        approx_err = 0.0
        re, e1 = _fit_real(lambda x: np.sin(mw * x) / mw, "odd", budget / 2)
        im, e2 = _fit_real(lambda x: (np.cos(mw * x) - 1.0) / mw, "even", budget / 2)
        approx_err = e1 + e2
        parts = [(1.0, "odd", re), (1j, "even", im)]
    comps = []
    for unit, parity, v in parts:
        p = qsp.ChebyshevPoly.from_coeffs(v, parity)
        if p.is_zero(1e-300):
            continue
        kappa = p.sup_bound / (1.0 - qsp.PHASE_MARGIN)
        comps.append(ScalarComponent(p.scaled(1.0 / kappa), unit * kappa))
    return comps, approx_err


def _scalar_encoding(comps, t: float, ledger):
    parts = [B.be_scalar(cp.poly, t, ledger) for cp in comps]
    return B.be_lcu(parts, [cp.weight for cp in comps], ledger)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def _term_operator(term: Term, eps_log: float, ledger):
    """Encoding and LCU weight with ``weight * corner = fold * h``."""
    if term.input_mode == "direct-encoding":
        return B.be_from_unitary(term.operator), 1.0
    u = mk.expm_i(term.h, 1.0)
    return B.be_log_unitary(u, eps_log, ledger), 2.0 * term.fold / np.pi


def _op_scale(term: Term) -> float:
    # scale of the weighted operator encoding, known before it is built
    return 1.0 if term.input_mode == "direct-encoding" else term.fold * np.pi / 2


def _groups(td: TDHamiltonian):
    groups = {}
    for term in td.terms:
        groups.setdefault(term.coeff, []).append(term)
    return list(groups.items())


def _generator_encoding(td: TDHamiltonian, t: float, eps: float, ledger):
    """Encoding of ``sum_i alpha_i(t) fold_i h_i`` within ``eps/4``.

    Terms sharing a coefficient share one scalar encoding.  Half the budget
    goes to the scalar approximants, half to the logarithm encodings.
    """
    groups = _groups(td)
    n_evo = sum(1 for term in td.terms if term.input_mode == "evolution-oracle")
    encs = []
    scalar_err = 0.0
    for coeff, terms in groups:
        lam_op = sum(_op_scale(term) for term in terms)
        comps, approx = alpha_components(coeff, eps / (8 * len(groups) * lam_op))
        if not comps:
            continue
        scalar_err += approx * lam_op
        if ledger is not None:
            ledger.add_degree("alpha", sum(cp.poly.degree for cp in comps))
        sc = _scalar_encoding(comps, t, ledger)
        ops, weights = [], []
        for term in terms:
            eps_log = eps / (8 * max(n_evo, 1) * term.fold * sc.scale)
            be, w = _term_operator(term, min(eps_log, 0.25), ledger)
            ops.append(be)
            weights.append(w)
        op = B.be_lcu(ops, weights, ledger)
        encs.append(B.be_scale_mul(sc, op))
    if not encs:
        return None, 0.0
    total = B.be_lcu(encs, [1.0] * len(encs), ledger)
    return total, scalar_err


def simulate_td(td: TDHamiltonian, t: float, eps: float, ledger: B.QueryLedger | None = None,
                mode: str = "effective-time", force_noncommuting: bool = False,
                m_fold: int | None = None) -> B.BlockEncoding:
    """Block encoding of ``exp(-i int_0^t H(s) ds)`` within ``eps``.

    The budget is split in eighths: scalar approximants, logarithm
    encodings, Jacobi-Anger truncation, and a reserve for phase-fit
    errors.  The polar re-unitarization at most doubles the sum, which
    the remaining half covers.  In ``m-fold`` mode the exponential is a
    product of ``r = ceil(2m/pi)`` copies at time ``1/r`` where ``m`` is
    the number of terms (or ``m_fold``).

    Raises
    ------
    CommutativityError
        Terms do not commute and ``force_noncommuting`` is not set.
    ConvergenceError
        The assembled error bound exceeds ``eps``.
    """
    t = _check_t(t)
    if not (0.0 < eps < 0.5):
        raise DomainError("eps must lie in (0, 1/2)")
    if mode not in MODES:
        raise DomainError(f"unknown mode {mode!r}")
    report = check_commuting(td)
    if not report.passed and not force_noncommuting:
        raise CommutativityError(
            f"terms {report.offending_pair} do not commute "
            f"(||[H_i, H_j]|| = {report.max_commutator_norm:.3g})", report,
        )
    if ledger is not None:
        ledger.budget.update({
            "eps": eps, "scalar": eps / 8, "log_unitary": eps / 8,
            "jacobi_anger": eps / 8, "reserve": eps / 8, "polar_factor": 2.0,
        })
    if t == 0.0:
        return B.be_identity(td.system_qubits)
    gen, scalar_err = _generator_encoding(td, t, eps, ledger)
    if gen is None:
        return B.be_identity(td.system_qubits)
    if mode == "effective-time":
        out = B.be_simulate(gen, 1.0, eps / 4, ledger)
    else:
        m = m_fold if m_fold is not None else len(td.terms)
        reps = max(1, math.ceil(2 * m / math.pi))
        step = B.be_simulate(gen, 1.0 / reps, eps / (4 * reps), ledger)
        out = step
        for _ in range(reps - 1):
            out = B.be_product(out, B.be_simulate(gen, 1.0 / reps, eps / (4 * reps), ledger))
        if ledger is not None:
            ledger.degrees["repetitions"] = reps
    out = B.BlockEncoding(out.unitary, out.system_qubits, out.ancilla_qubits, out.scale,
                          out.err + scalar_err)
    if ledger is not None:
        ledger.budget["recorded_err"] = out.err
    if out.err > eps:
        raise ConvergenceError(f"error bound {out.err:.3e} exceeds eps={eps:.3e}", out.err)
    return out


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------


def reference_propagator(td: TDHamiltonian, t: float, steps: int) -> np.ndarray:
    """Time-ordered product of midpoint exponentials, later times on the left."""
    if steps < 1:
        raise DomainError("steps must be at least 1")
    t = _check_t(t)
    dt = t / steps
    u = np.eye(td.dim, dtype=complex)
    if t == 0:
        return u
    for k in range(steps):
        u = mk.expm_i(td.at((k + 0.5) * dt), dt) @ u
    return u


def trotter1(td: TDHamiltonian, t: float, steps: int) -> np.ndarray:
    """First-order product formula with left-endpoint coefficient sampling.

    Terms with identical operators are merged first so conjugate Floquet
    pairs contribute one Hermitian factor.
    """
    if steps < 1:
        raise DomainError("steps must be at least 1")
    t = _check_t(t)
    merged = []
    for term in td.terms:
        for entry in merged:
            if np.array_equal(entry[0], term.operator):
                entry[1].append(term.coeff)
                break
        else:
            merged.append((term.operator, [term.coeff]))
    dt = t / steps
    u = np.eye(td.dim, dtype=complex)
    for k in range(steps):
        tk = k * dt
        for op, coeffs in merged:
            g = sum(complex(c.values(tk)) for c in coeffs)
            if abs(g.imag) > 1e-12:
                raise ModelError("unpaired complex coefficient in a product formula")
            u = mk.expm_i(g.real * op, dt) @ u
    return u


def richardson_ratio(td: TDHamiltonian, t: float, steps: int = 256):
    """``(e1, e2, ratio)`` from the oracle at ``steps``, ``2 steps``, ``4 steps``.

    Second-order convergence gives a ratio near 4.  When ``e1`` is already
    at rounding level the oracle is exact and the ratio is reported as 4.
    """
    u1 = reference_propagator(td, t, steps)
    u2 = reference_propagator(td, t, 2 * steps)
    u4 = reference_propagator(td, t, 4 * steps)
    e1 = mk.spectral_norm(u1 - u2)
    e2 = mk.spectral_norm(u2 - u4)
    if e1 < 1e-11:
        return e1, e2, 4.0
    return e1, e2, e1 / max(e2, 1e-300)


def query_report(ledger: B.QueryLedger) -> dict:
    return {
        "w_gate_uses": ledger.w_gate_uses,
        "encoding_uses": ledger.encoding_uses,
        "ancillas_peak": ledger.ancillas_peak,
        "degrees": dict(ledger.degrees),
        "polar_steps": ledger.polar_steps,
        "budget": dict(ledger.budget),
    }
