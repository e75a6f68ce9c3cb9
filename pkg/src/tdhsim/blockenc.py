"""Block encodings and their algebra.

A block encoding is a unitary ``U`` on ``a`` ancilla qubits and ``s`` system
qubits such that ``lam * (<0|^a (x) I) U (|0>^a (x) I)`` approximates the
encoded operator.  Ancillas are always the most significant qubits, so the
encoded block is the top-left ``2^s x 2^s`` corner of ``U``.

Polynomial transforms go through :func:`tdhsim.qsp.find_phases`, which
matches the real part of the QSP response.  Matrix-level sequences for the
phases ``phi`` and ``-phi`` share every call to ``U``; averaging them with
one extra ancilla yields exactly the real part, so each transform costs
``degree(poly)`` uses of the input encoding and one ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matkernel as mk
from . import qsp
from .errors import ContractError, DimensionError, DomainError, ParityError


@dataclass(frozen=True)
class BlockEncoding:
    unitary: np.ndarray
    system_qubits: int
    ancilla_qubits: int
    scale: float = 1.0
    err: float = 0.0

    def __post_init__(self):
        u = np.asarray(self.unitary, dtype=complex)
        if u.shape != (self.dim, self.dim):
            raise DimensionError(
                f"unitary shape {u.shape} does not match 2^{self.system_qubits + self.ancilla_qubits}"
            )
        if self.ancilla_qubits < 0 or self.system_qubits < 0:
            raise DomainError("qubit counts must be nonnegative")
        if not (self.scale > 0 and np.isfinite(self.scale)):
            raise DomainError("scale must be positive and finite")
        if not self.err >= 0:
            raise DomainError("error bound must be nonnegative")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)

    @property
    def dim(self) -> int:
        return 2 ** (self.system_qubits + self.ancilla_qubits)

    @property
    def sys_dim(self) -> int:
        return 2**self.system_qubits

    @property
    def block(self) -> np.ndarray:
        """The raw top-left block, without the scale."""
        d = self.sys_dim
        return self.unitary[:d, :d]


@dataclass
class QueryLedger:
    """Query counts for one pipeline run.

    ``w_gate_uses`` counts signal-operator calls in scalar encodings,
    ``encoding_uses`` counts applications of block encodings inside
    polynomial transforms.  Not thread-safe; use one ledger per run and
    :meth:`merge` afterwards.
    """

    w_gate_uses: int = 0
    encoding_uses: int = 0
    ancillas_peak: int = 0
    degrees: dict = field(default_factory=dict)
    polar_steps: int = 0
    budget: dict = field(default_factory=dict)

    def note_ancillas(self, a: int) -> None:
        self.ancillas_peak = max(self.ancillas_peak, int(a))

    def add_degree(self, stage: str, degree: int) -> None:
        self.degrees[stage] = self.degrees.get(stage, 0) + int(degree)

    def merge(self, other: "QueryLedger") -> "QueryLedger":
        out = QueryLedger(
            self.w_gate_uses + other.w_gate_uses,
            self.encoding_uses + other.encoding_uses,
            max(self.ancillas_peak, other.ancillas_peak),
            dict(self.degrees),
            self.polar_steps + other.polar_steps,
            dict(self.budget),
        )
        for k, v in other.degrees.items():
            out.degrees[k] = out.degrees.get(k, 0) + v
        out.budget.update(other.budget)
        return out


def _num_qubits(dim: int) -> int:
    n = int(round(np.log2(dim)))
    if 2**n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def be_from_unitary(u) -> BlockEncoding:
    """Trivial encoding of a unitary: no ancillas, scale 1, exact."""
    u = mk.as_matrix(u)
    if not mk.is_unitary(u):
        raise ContractError("be_from_unitary requires a unitary matrix")
    return BlockEncoding(u, _num_qubits(u.shape[0]), 0, 1.0, 0.0)


def be_identity(system_qubits: int) -> BlockEncoding:
    return BlockEncoding(np.eye(2**system_qubits, dtype=complex), system_qubits, 0, 1.0, 0.0)


def be_corner(be: BlockEncoding) -> np.ndarray:
    """The encoded operator, ``scale * block``."""
    return be.scale * be.block


def be_verify(be: BlockEncoding, target) -> float:
    """Spectral-norm distance between ``target`` and the encoded operator."""
    target = np.asarray(target, dtype=complex)
    if target.ndim == 0:
        target = target.reshape(1, 1)
    if target.shape != (be.sys_dim, be.sys_dim):
        raise DimensionError(f"target shape {target.shape} does not match 2^{be.system_qubits}")
    return mk.spectral_norm(target - be_corner(be))


def _real_part_unitary(plus: np.ndarray, minus: np.ndarray) -> np.ndarray:
    # (H (x) I) diag(plus, minus) (H (x) I): top-left block is (plus + minus)/2
    s = 0.5 * (plus + minus)
    d = 0.5 * (plus - minus)
    return np.block([[s, d], [d, s]])


def be_scalar(alpha_poly: qsp.ChebyshevPoly, t: float, ledger: QueryLedger | None = None,
              tol: float = 1e-12) -> BlockEncoding:
    """Encode the number ``alpha_poly(t)`` with single-qubit QSP.

    The signal ``W(t)`` acts on one qubit; a second qubit averages the
    sequences for ``phi`` and ``-phi`` so the corner is ``Re P(t)`` and
    equals ``alpha_poly(t)``.  The result is a 4x4 unitary with two
    ancillas and a 1x1 block.
    """
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"scalar encodings are evaluated at t in [0, 1], got {t}")
    phi = qsp.find_phases(alpha_poly, tol)
    u = _real_part_unitary(qsp.apply_phases(phi, t), qsp.apply_phases(-phi, t))
    err = abs(u[0, 0] - complex(alpha_poly(t)))
    if ledger is not None:
        ledger.w_gate_uses += phi.degree
        ledger.note_ancillas(2)
    return BlockEncoding(u, 0, 2, 1.0, float(err))


def be_scale_mul(scalar: BlockEncoding, op: BlockEncoding) -> BlockEncoding:
    """Encode ``c * A`` from an encoding of the number ``c`` and one of ``A``."""
    if scalar.system_qubits != 0:
        raise DimensionError("first argument must encode a scalar (no system qubits)")
    c = complex(be_corner(scalar)[0, 0])
    if abs(c) > scalar.scale * (1 + 1e-12):
        raise ContractError("scalar corner exceeds its scale")
    u = np.kron(scalar.unitary, op.unitary)
    err = scalar.scale * op.err + op.scale * scalar.err + scalar.err * op.err
    return BlockEncoding(
        u, op.system_qubits, scalar.ancilla_qubits + op.ancilla_qubits,
        scalar.scale * op.scale, err,
    )


def _pad_ancillas(be: BlockEncoding, a: int) -> np.ndarray:
    extra = a - be.ancilla_qubits
    if extra == 0:
        return be.unitary
    return np.kron(np.eye(2**extra), be.unitary)


def _prep_unitary(amplitudes: np.ndarray) -> np.ndarray:
    """Unitary with the given first column, completed by Gram-Schmidt."""
    m = len(amplitudes)
    cols = [amplitudes / np.linalg.norm(amplitudes)]
    for k in range(m):
        if len(cols) == m:
            break
        v = np.zeros(m, dtype=complex)
        v[k] = 1.0
        for c in cols:
            v = v - np.vdot(c, v) * c
        for c in cols:  # second pass keeps orthogonality at rounding level
            v = v - np.vdot(c, v) * c
        nv = np.linalg.norm(v)
        if nv > 1e-8:
            cols.append(v / nv)
    return np.column_stack(cols)


def be_lcu(terms, weights, ledger: QueryLedger | None = None) -> BlockEncoding:
    """Encode ``sum_j w_j A_j``.

    Scale ``sum_j |w_j| lam_j``; ancillas ``max a_j + ceil(log2 m)`` with the
    selection register most significant.  Weight phases sit in the select
    stage, so the preparation amplitudes are real and nonnegative.
    """
    terms = list(terms)
    weights = np.asarray(list(weights), dtype=complex)
    if not terms or len(terms) != len(weights):
        raise DomainError("need one weight per term and at least one term")
    s = terms[0].system_qubits
    if any(b.system_qubits != s for b in terms):
        raise DimensionError("LCU terms act on different system sizes")
    mass = np.abs(weights) * np.array([b.scale for b in terms])
    total = float(np.sum(mass))
    if total == 0.0:
        raise DomainError("LCU weights are all zero")
    m = len(terms)
    b = int(np.ceil(np.log2(m))) if m > 1 else 0
    a = max(t.ancilla_qubits for t in terms)
    inner = 2 ** (a + s)
    M = 2**b
    amps = np.zeros(M)
    amps[:m] = np.sqrt(mass / total)
    prep = _prep_unitary(amps)
    n = M * inner
    mk._check_dim(n, mk.MAX_DIM)
    select = np.zeros((n, n), dtype=complex)
    for j in range(M):
        sl = slice(j * inner, (j + 1) * inner)
        if j < m:
            ph = weights[j] / abs(weights[j]) if weights[j] != 0 else 1.0
            select[sl, sl] = ph * _pad_ancillas(terms[j], a)
        else:
            select[sl, sl] = np.eye(inner)
    p_full = np.kron(prep, np.eye(inner))
    u = p_full.conj().T @ select @ p_full
    err = float(np.sum(np.abs(weights) * np.array([t.err for t in terms])))
    if ledger is not None:
        ledger.note_ancillas(a + b)
    return BlockEncoding(u, s, a + b, total, err)


def be_product(a: BlockEncoding, b: BlockEncoding) -> BlockEncoding:
    """Encode ``A B``; registers are ``[ancillas of a][ancillas of b][system]``."""
    if a.system_qubits != b.system_qubits:
        raise DimensionError("product factors act on different system sizes")
    da, db, ds = 2**a.ancilla_qubits, 2**b.ancilla_qubits, a.sys_dim
    n = da * db * ds
    mk._check_dim(n, mk.MAX_DIM)
    ua = a.unitary.reshape(da, ds, da, ds)
    ub = b.unitary.reshape(db, ds, db, ds)
    eye_a, eye_b = np.eye(da), np.eye(db)
    ext_a = np.einsum("ispt,jq->ijspqt", ua, eye_b).reshape(n, n)
    ext_b = np.einsum("jsqt,ip->ijspqt", ub, eye_a).reshape(n, n)
    err = a.scale * b.err + b.scale * a.err + a.err * b.err
    return BlockEncoding(
        ext_a @ ext_b, a.system_qubits, a.ancilla_qubits + b.ancilla_qubits,
        a.scale * b.scale, err,
    )


# ---------------------------------------------------------------------------
# polynomial transforms
# ---------------------------------------------------------------------------


def reflection_phases(phi: qsp.PhaseSequence) -> np.ndarray:
    """Convert W-convention phases to the reflection convention.

    ``W(x) = i e^{-i pi/4 Z} R(x) e^{-i pi/4 Z}`` with the reflection
    ``R(x) = [[x, s], [s, -x]]``, so the W sequence equals ``i^k`` times the
    R sequence with the end phases shifted by ``-pi/4`` and the interior
    phases by ``-pi/2``.
    """
    th = phi.as_array().copy()
    k = len(th) - 1
    if k == 0:
        return th
    th[0] -= np.pi / 4
    th[-1] -= np.pi / 4
    th[1:-1] -= np.pi / 2
    return th


def _check_hermitian_block(be: BlockEncoding, tol: float = 1e-9) -> None:
    blk = be.block
    if np.max(np.abs(blk - blk.conj().T), initial=0.0) > tol:
        raise ContractError("polynomial transforms need a Hermitian encoded block")


def _qsvt_columns(u: np.ndarray, uh: np.ndarray, d: int, phases: np.ndarray,
                  cols: np.ndarray) -> np.ndarray:
    """Apply the projector-phased alternating sequence to a block of columns.

    Sequence (left to right): ``e^{i ph_0 Zpi} U_1 e^{i ph_1 Zpi} ... U_k e^{i ph_k Zpi}``
    where ``Zpi = 2 Pi - I`` and ``U_k = U``, ``U_{k-1} = U^dagger`` and so on.
    """
    k = len(phases) - 1
    sign = np.full(u.shape[0], -1.0)
    sign[:d] = 1.0
    x = np.exp(1j * phases[k] * sign)[:, None] * cols
    for j in range(k, 0, -1):
        x = (u if (k - j) % 2 == 0 else uh) @ x
        x = np.exp(1j * phases[j - 1] * sign)[:, None] * x
    return (1j**k) * x


def _qsvt_check(be: BlockEncoding, poly: qsp.ChebyshevPoly):
    if poly.parity not in ("even", "odd"):
        raise ParityError("QSVT needs a definite-parity polynomial")
    _check_hermitian_block(be)


def _phase_error(phi: qsp.PhaseSequence, poly: qsp.ChebyshevPoly) -> float:
    x = np.linspace(-1.0, 1.0, 2001)
    return float(np.max(np.abs(qsp.qsp_response(phi, x).real - poly(x).real)))


def qsvt_apply(be: BlockEncoding, poly: qsp.ChebyshevPoly,
               ledger: QueryLedger | None = None, tol: float = 1e-12) -> BlockEncoding:
    """Encode ``poly(A / lam)`` for a Hermitian encoded ``A``.

    Adds one ancilla and uses the input encoding ``degree(poly)`` times.
    The recorded error is the measured phase-fit error plus the input
    error scaled by the polynomial's Lipschitz bound on the grid.
    """
    _qsvt_check(be, poly)
    phi = qsp.find_phases(poly, tol)
    u = be.unitary
    uh = u.conj().T
    eye = np.eye(u.shape[0], dtype=complex)
    plus = _qsvt_columns(u, uh, be.sys_dim, reflection_phases(phi), eye)
    minus = _qsvt_columns(u, uh, be.sys_dim, reflection_phases(-phi), eye)
    out_u = _real_part_unitary(plus, minus)
    # reorder so the new ancilla is most significant: it already is, since
    # the averaging register wraps the whole (ancilla, system) space
    lip = float(np.max(np.abs(qsp.C.chebval(np.linspace(-1, 1, 2001), qsp.C.chebder(poly.coeffs)))))
    err = _phase_error(phi, poly) + lip * be.err / be.scale
    if ledger is not None:
        ledger.encoding_uses += phi.degree
        ledger.note_ancillas(be.ancilla_qubits + 1)
    return BlockEncoding(out_u, be.system_qubits, be.ancilla_qubits + 1, 1.0, err)


def qsvt_corner(be: BlockEncoding, poly: qsp.ChebyshevPoly,
                ledger: QueryLedger | None = None, tol: float = 1e-12):
    """Block of :func:`qsvt_apply` without materializing the full unitary.

    Only the ``2^s`` columns that start in the zero-ancilla subspace are
    propagated.  Returns ``(block, phase_error)``.
    """
    _qsvt_check(be, poly)
    if poly.is_zero():
        return np.zeros((be.sys_dim, be.sys_dim), dtype=complex), 0.0
    phi = qsp.find_phases(poly, tol)
    u = be.unitary
    uh = u.conj().T
    d = be.sys_dim
    cols = np.eye(u.shape[0], d, dtype=complex)
    plus = _qsvt_columns(u, uh, d, reflection_phases(phi), cols)[:d]
    minus = _qsvt_columns(u, uh, d, reflection_phases(-phi), cols)[:d]
    if ledger is not None:
        ledger.encoding_uses += phi.degree
        ledger.note_ancillas(be.ancilla_qubits + 1)
    return 0.5 * (plus + minus), _phase_error(phi, poly)


#: Margin for the arcsine transform in :func:`be_log_unitary`; the block
#: ``sin(H)`` has norm at most ``sin(1/2) < 0.48``.
LOG_MARGIN = 0.5


def be_log_unitary(u, eps: float, ledger: QueryLedger | None = None) -> BlockEncoding:
    """Encode ``(pi/2) H`` from ``U = exp(-iH)`` with ``||H|| <= 1/2``.

    ``(i/2) U - (i/2) U^dagger = sin(H)`` is a linear combination of two
    unitaries; the arcsine transform then yields ``(2/pi) H`` in the block.
    The record's scale is ``pi^2/4`` so the encoded operator is ``(pi/2) H``
    to within ``pi eps / 2``.
    """
    if not (0.0 < eps < 0.5):
        raise DomainError("eps must lie in (0, 1/2)")
    ube = be_from_unitary(u)
    sin_be = be_lcu([ube, be_from_unitary(ube.unitary.conj().T)], [0.5j, -0.5j], ledger)
    sin_norm = mk.spectral_norm(sin_be.block)
    if sin_norm > 1.0 - LOG_MARGIN:
        raise DomainError(
            f"||sin H|| = {sin_norm:.4f} exceeds {1 - LOG_MARGIN}; the generator norm is above 1/2"
        )
    poly = qsp.arcsin_poly(0.9 * 2.0 * eps / np.pi, LOG_MARGIN)
    out = qsvt_apply(sin_be, poly, ledger)
    x = np.linspace(-(1 - LOG_MARGIN), 1 - LOG_MARGIN, 2001)
    fit = float(np.max(np.abs(poly(x).real - (2 / np.pi) * np.arcsin(x))))
    lam = np.pi**2 / 4
    if ledger is not None:
        ledger.add_degree("arcsin", poly.degree)
    return BlockEncoding(out.unitary, out.system_qubits, out.ancilla_qubits, lam,
                         lam * (fit + out.err))


def be_simulate(be: BlockEncoding, t: float, eps: float,
                ledger: QueryLedger | None = None) -> BlockEncoding:
    """Encode ``exp(-i A t)`` where ``be`` encodes a Hermitian ``A``.

    Jacobi-Anger parts at ``t_eff = lam t`` with tolerance ``eps/4`` each
    are applied by QSVT and combined as ``cos - i sin``.  The block of that
    combination is re-unitarized by polar decomposition and re-embedded with
    no ancillas.  This polar step is a classical shortcut in place of
    amplitude amplification and is counted in ``ledger.polar_steps``.

    The recorded error is the sum of the measured polar displacement, the
    Jacobi-Anger tails of both parts, the phase-fit errors, and ``t`` times the input error.
    """
    if not (0.0 < eps < 0.5):
        raise DomainError("eps must lie in (0, 1/2)")
    if not (t >= 0 and np.isfinite(t)):
        raise DomainError("t must be finite and nonnegative")
    if t == 0:
        return be_identity(be.system_qubits)
    t_eff = be.scale * t
    ja = qsp.jacobi_anger(t_eff, eps / 4)
    # a common scale keeps both parts below 1 for the phase solver
    kappa = max(1.0, ja.cos_part.sup_bound, ja.sin_part.sup_bound) / (1.0 - qsp.PHASE_MARGIN)
    c_blk, c_err = qsvt_corner(be, ja.cos_part.scaled(1 / kappa), ledger)
    s_blk, s_err = qsvt_corner(be, ja.sin_part.scaled(1 / kappa), ledger)
    y = kappa * (c_blk - 1j * s_blk)
    v = mk.polar_unitary(y)
    polar_shift = mk.spectral_norm(v - y)
    err = polar_shift + 2 * ja.tail + kappa * (c_err + s_err) + t * be.err
    if ledger is not None:
        ledger.add_degree("jacobi_anger", ja.degree)
        ledger.note_ancillas(be.ancilla_qubits + 2)
        ledger.polar_steps += 1
    return BlockEncoding(v, be.system_qubits, 0, 1.0, err)
