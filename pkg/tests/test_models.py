import numpy as np
import pytest

from tdhsim import blockenc as B
from tdhsim import matkernel as mk
from tdhsim import models as M
from tdhsim import tdsim as T
from tdhsim.errors import ModelError
from tdhsim.tdsim import CoefficientFn as CF


def test_lattice_three_sites():
    td = M.lattice_chain(3, [CF.constant(0.5), CF.constant(0.5)])
    assert [t.pauli for t in td.terms] == ["XYI", "IYZ"]
    assert T.check_commuting(td).max_commutator_norm == 0


def test_lattice_two_sites():
    td = M.lattice_chain(2, [CF.constant(0.5)])
    assert len(td.terms) == 1 and T.check_commuting(td).passed


def test_lattice_four_sites_hand_built():
    td = M.lattice_chain(4, [CF.constant(0.5)] * 3)
    x, y, z, i = (mk.pauli_matrix(c) for c in "XYZI")
    hand = [np.kron(np.kron(np.kron(x, y), i), i), np.kron(np.kron(np.kron(i, y), z), i),
            np.kron(np.kron(np.kron(i, i), z), x)]
    for term, ref in zip(td.terms, hand):
        assert np.array_equal(term.operator, ref)
        assert mk.spectral_norm(term.h) == pytest.approx(0.5)


@pytest.mark.parametrize("n", range(2, 8))
def test_lattice_commutes_up_to_seven(n):
    assert T.check_commuting(M.lattice_chain(n, [CF.constant(0.3)] * (n - 1)), tol=1e-12).passed


def test_lattice_errors():
    with pytest.raises(ModelError):
        M.lattice_chain(3, [CF.constant(0.5)])
    with pytest.raises(ModelError):
        M.lattice_chain(8, [CF.constant(0.5)] * 7)


def test_floquet_static():
    h0 = 0.4 * mk.pauli_matrix("XZ")
    td = M.floquet_hamiltonian(1.0, 0, {0: h0})
    be = T.simulate_td(td, 0.6, 1e-6)
    assert B.be_verify(be, mk.expm_i(h0, 0.6)) <= 1e-6


def test_floquet_assembly():
    zz, zi = mk.pauli_matrix("ZZ"), mk.pauli_matrix("ZI")
    td = M.floquet_hamiltonian(1.0, 1, {0: 0.3 * zi, 1: 0.2 * zz, -1: 0.2 * zz})
    for t in np.linspace(0, 1, 11):
        h = td.at(t)
        assert mk.is_hermitian(h)
        assert np.allclose(h, 0.3 * zi + 0.4 * np.cos(2 * np.pi * t) * zz)


def test_floquet_invariants():
    zz, zi = mk.pauli_matrix("ZZ"), mk.pauli_matrix("ZI")
    td = M.floquet_hamiltonian(0.5, 2, {0: 0.3 * zi, 1: 0.2 * zz, -1: 0.2 * zz, 2: 0.1 * zi, -2: 0.1 * zi})
    ts = np.linspace(0, 1, 25)
    assert all(mk.is_hermitian(td.at(t)) for t in ts)
    ts5 = np.linspace(0, 1, 5)
    for a in ts5:
        for b in ts5:
            assert mk.spectral_norm(mk.commutator(td.at(a), td.at(b))) <= 1e-9


def test_floquet_errors():
    zz, zi, xi = (mk.pauli_matrix(p) for p in ("ZZ", "ZI", "XI"))
    with pytest.raises(ModelError):
        M.floquet_hamiltonian(1.0, 1, {0: zi * 0.3, 1: 0.2 * zz, -1: 0.3 * zz})
    with pytest.raises(ModelError):
        M.floquet_hamiltonian(1.0, 1, {0: zi * 0.3, 1: 0.2 * xi, -1: 0.2 * xi})
    with pytest.raises(ModelError):
        M.floquet_hamiltonian(1.0, 0, {1: zz, -1: zz})


def test_ising_commutativity_both_directions():
    assert T.check_commuting(M.ising_quench(3, 0.0, 0.8, (0.2, 0.7), 0.1, 1e-2)).passed
    r = T.check_commuting(M.ising_quench(3, 1.0, 0.8, (0.2, 0.7), 0.1, 1e-2))
    assert not r.passed and r.max_commutator_norm > 1


def test_ising_structure():
    td = M.ising_quench(4, 0.5, 0.8, (0.0, 0.6), 0.1, 1e-2)
    assert sum(t.pauli.count("Z") == 2 for t in td.terms) == 3
    assert sum(t.pauli.count("X") == 1 for t in td.terms) == 4
    with pytest.raises(ModelError):
        M.ising_quench(7, 0.5, 0.8, (0.2, 0.7), 0.1, 1e-2)
    with pytest.raises(Exception):
        M.ising_quench(3, 0.5, 0.8, (0.05, 0.7), 0.1, 1e-2)


def test_ising_force_flag_discrepancy_grows_with_j():
    d = []
    for J in (0.0, 0.1, 0.5):
        td = M.ising_quench(3, J, 0.8, (0.2, 0.7), 0.1, 1e-3)
        be = T.simulate_td(td, 1.0, 1e-6, force_noncommuting=True)
        assert B.be_verify(be, mk.expm_i(T.h_integral(td, 1.0), 1.0)) <= 1e-6
        d.append(B.be_verify(be, T.reference_propagator(td, 1.0, 4000)))
    assert d[0] < d[1] < d[2]


def test_build_model_schema():
    spec = M.ModelSpec("lattice", {"n": 3, "coeffs": [0.5, {"kind": "trig", "m": 0, "omega": 1.0}]})
    assert M.build_model(spec).system_qubits == 3
    with pytest.raises(ModelError):
        M.build_model(M.ModelSpec("lattice", {"n": 3}))
    with pytest.raises(ModelError):
        M.build_model(M.ModelSpec("lattice", {"n": 3, "coeffs": [0.5, 0.5], "bogus": 1}))
    with pytest.raises(ModelError):
        M.build_model(M.ModelSpec("maze", {}))
    with pytest.raises(ModelError):
        M.build_model(M.ModelSpec("lattice", {"n": 3, "coeffs": [0.5, {"kind": "nope"}]}))


def test_with_parameter_resizes_lattice():
    spec = M.ModelSpec("lattice", {"n": 3, "coeffs": [0.5, 0.25]})
    assert M.with_parameter(spec, "n", 5).parameters["coeffs"] == [0.5, 0.25, 0.25, 0.25]
    assert M.with_parameter(spec, "n", 2).parameters["coeffs"] == [0.5]
