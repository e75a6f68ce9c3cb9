"""Builders for the bundled model Hamiltonians.

* ``lattice``: a chain of two-site Pauli couplings whose neighbours share
  the middle Pauli, so all terms commute.
* ``floquet``: a time-periodic Hamiltonian with commuting Fourier modes.
* ``ising_quench``: a transverse-field Ising chain with a rectangular field
  pulse; it does not commute once ``J != 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import matkernel as mk
from .errors import ModelError
from .tdsim import CoefficientFn, TDHamiltonian, matrix_term, pauli_term

MODEL_NAMES = ("lattice", "floquet", "ising_quench")
LATTICE_MAX_SITES = 7
ISING_MAX_SITES = 6
_CYCLE = "XYZ"


@dataclass(frozen=True)
class ModelSpec:
    name: str
    parameters: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def expected_commuting(self) -> bool:
        if self.name == "ising_quench":
            return float(self.parameters.get("J", 1.0)) == 0.0
        return True


def lattice_labels(n: int) -> list:
    """Pauli labels of the chain terms: X0 Y1, Y1 Z2, Z2 X3, ..."""
    labels = []
    for j in range(n - 1):
        ops = ["I"] * n
        ops[j] = _CYCLE[j % 3]
        ops[j + 1] = _CYCLE[(j + 1) % 3]
        labels.append("".join(ops))
    return labels


def lattice_chain(n: int, coeffs, input_mode: str = "direct-encoding") -> TDHamiltonian:
    """Nearest-neighbour chain ``sum_j gamma_j(t) P_j P_{j+1}``."""
    if not (2 <= n <= LATTICE_MAX_SITES):
        raise ModelError(f"lattice size must be in [2, {LATTICE_MAX_SITES}], got {n}")
    coeffs = list(coeffs)
    if len(coeffs) != n - 1:
        raise ModelError(f"lattice of {n} sites needs {n - 1} coefficients, got {len(coeffs)}")
    terms = [pauli_term(c, lab, input_mode) for c, lab in zip(coeffs, lattice_labels(n))]
    return TDHamiltonian(n, terms)


def floquet_hamiltonian(T: float, m_max: int, h_terms: dict,
                        input_mode: str = "evolution-oracle") -> TDHamiltonian:
    """``H(t) = sum_{|m| <= m_max} exp(-i m omega t) H_m`` with ``omega = 2 pi / T``."""
    if not T > 0:
        raise ModelError("period must be positive")
    if m_max < 0:
        raise ModelError("m_max must be nonnegative")
    mats = {int(m): mk.as_matrix(h) for m, h in h_terms.items()}
    if any(abs(m) > m_max for m in mats):
        raise ModelError("Fourier mode beyond m_max")
    if not mats:
        raise ModelError("floquet model needs at least one mode")
    dims = {h.shape[0] for h in mats.values()}
    if len(dims) != 1:
        raise ModelError("Fourier modes have different dimensions")
    dim = dims.pop()
    zero = np.zeros((dim, dim), dtype=complex)
    for m in range(0, m_max + 1):
        hp, hm = mats.get(m, zero), mats.get(-m, zero)
        if np.max(np.abs(hm - hp.conj().T)) > 1e-10:
            raise ModelError(f"H_{-m} must equal H_{m}^dagger")
    keys = sorted(mats)
    for i, a in enumerate(keys):
        for b in keys[i + 1:]:
            if mk.spectral_norm(mk.commutator(mats[a], mats[b])) > 1e-10:
                raise ModelError(f"modes {a} and {b} do not commute")
    omega = 2 * np.pi / T
    terms = []
    for m in keys:
        h = mats[m]
        if not np.any(h):
            continue
        if not mk.is_hermitian(h):
            raise ModelError(
                f"mode {m} is not Hermitian; split it into Hermitian pieces with paired phases"
            )
        c = CoefficientFn.constant(1.0) if m == 0 else CoefficientFn.trig(m, omega)
        terms.append(matrix_term(c, h, input_mode))
    return TDHamiltonian(int(round(np.log2(dim))), terms)


def ising_quench(n: int, J: float, h_amp: float, rect, delta: float, eps_rect: float,
                 input_mode: str = "direct-encoding") -> TDHamiltonian:
    """``H(t) = -J sum Z_i Z_{i+1} - h_x(t) sum X_i`` with a rectangular ``h_x``.

    ``h_x(t) = h_amp`` on ``(t_on, t_off)`` up to the rectangle polynomial's
    bands.  The ZZ chain is left out when ``J = 0``.
    """
    if not (2 <= n <= ISING_MAX_SITES):
        raise ModelError(f"Ising chain size must be in [2, {ISING_MAX_SITES}], got {n}")
    if abs(J) > 1 or abs(h_amp) > 1:
        raise ModelError("|J| and |h_amp| must be at most 1")
    t_on, t_off = rect
    pulse = CoefficientFn.rect(t_on, t_off, -h_amp, delta, eps_rect)
    terms = []
    if J != 0:
        zz = CoefficientFn.constant(-J)
        for i in range(n - 1):
            lab = ["I"] * n
            lab[i] = lab[i + 1] = "Z"
            terms.append(pauli_term(zz, "".join(lab), input_mode))
    for i in range(n):
        lab = ["I"] * n
        lab[i] = "X"
        terms.append(pauli_term(pulse, "".join(lab), input_mode))
    return TDHamiltonian(n, terms)


def _coeff_from_dict(d) -> CoefficientFn:
    if isinstance(d, (int, float)):
        return CoefficientFn.constant(float(d))
    if not isinstance(d, dict) or "kind" not in d:
        raise ModelError(f"coefficient must be a number or an object with 'kind', got {d!r}")
    kind = d["kind"]
    allowed = {
        "constant": {"kind", "value"},
        "polynomial": {"kind", "coeffs"},
        "trig": {"kind", "m", "omega"},
        "rect": {"kind", "t_on", "t_off", "amplitude", "delta", "eps_rect"},
    }
    if kind not in allowed:
        raise ModelError(f"unknown coefficient kind {kind!r}")
    extra = set(d) - allowed[kind]
    if extra:
        raise ModelError(f"unknown keys for {kind} coefficient: {sorted(extra)}")
    try:
        if kind == "constant":
            return CoefficientFn.constant(float(d["value"]))
        if kind == "polynomial":
            return CoefficientFn.polynomial([float(c) for c in d["coeffs"]])
        if kind == "trig":
            return CoefficientFn.trig(int(d["m"]), float(d["omega"]))
        return CoefficientFn.rect(d["t_on"], d["t_off"], d["amplitude"], d["delta"], d["eps_rect"])
    except KeyError as exc:
        raise ModelError(f"{kind} coefficient missing {exc}") from None


def _coeff_to_dict(c: CoefficientFn) -> dict:
    if c.kind == "constant":
        return {"kind": "constant", "value": c.params[0]}
    if c.kind == "polynomial":
        return {"kind": "polynomial", "coeffs": list(c.params)}
    if c.kind == "trig":
        return {"kind": "trig", "m": c.params[0], "omega": c.params[1]}
    keys = ("t_on", "t_off", "amplitude", "delta", "eps_rect")
    return {"kind": "rect", **dict(zip(keys, c.params))}


_SCHEMAS = {
    "lattice": ({"n", "coeffs"}, {"input_mode"}),
    "floquet": ({"T", "m_max", "h_terms"}, {"input_mode"}),
    "ising_quench": ({"n", "J", "h_amp", "rect", "delta", "eps_rect"}, {"input_mode"}),
}


def validate_spec(spec: ModelSpec) -> None:
    if spec.name not in MODEL_NAMES:
        raise ModelError(f"unknown model {spec.name!r}; expected one of {MODEL_NAMES}")
    required, optional = _SCHEMAS[spec.name]
    keys = set(spec.parameters)
    missing = required - keys
    extra = keys - required - optional
    if missing:
        raise ModelError(f"{spec.name} model missing parameters {sorted(missing)}")
    if extra:
        raise ModelError(f"{spec.name} model has unknown parameters {sorted(extra)}")


def build_model(spec: ModelSpec) -> TDHamiltonian:
    """Validate a spec and construct its Hamiltonian."""
    validate_spec(spec)
    p = spec.parameters
    kw = {"input_mode": p["input_mode"]} if "input_mode" in p else {}
    try:
        if spec.name == "lattice":
            return lattice_chain(int(p["n"]), [_coeff_from_dict(c) for c in p["coeffs"]], **kw)
        if spec.name == "floquet":
            h_terms = {int(m): mk.pauli_sum(terms) for m, terms in p["h_terms"].items()}
            return floquet_hamiltonian(float(p["T"]), int(p["m_max"]), h_terms, **kw)
        return ising_quench(int(p["n"]), float(p["J"]), float(p["h_amp"]),
                            tuple(float(v) for v in p["rect"]), float(p["delta"]),
                            float(p["eps_rect"]), **kw)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"invalid {spec.name} parameters: {exc}") from None


def with_parameter(spec: ModelSpec, key: str, value) -> ModelSpec:
    """Copy of ``spec`` with one parameter replaced; resizing a lattice repeats its last coefficient."""
    params = dict(spec.parameters)
    params[key] = value
    if spec.name == "lattice" and key == "n":
        cs = list(params["coeffs"])
        n = int(value)
        params["coeffs"] = (cs + [cs[-1]] * n)[: n - 1]
    return ModelSpec(spec.name, params, spec.notes)
