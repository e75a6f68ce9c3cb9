import numpy as np
import pytest

from tdhsim import matkernel as mk
from tdhsim.errors import ContractError, DimensionError, DomainError, SizingError

from oracles import expm_taylor, kron_loops, power_norm, random_hermitian

X = mk.pauli_matrix("X")
Y = mk.pauli_matrix("Y")
Z = mk.pauli_matrix("Z")


def test_kron_identity_and_definition():
    assert np.array_equal(mk.kron(np.eye(2), np.eye(2)), np.eye(4))
    expected = np.array([[0, 0, 1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, -1, 0, 0]])
    assert np.array_equal(mk.kron(X, Z), expected)


def test_kron_matches_index_loops(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    # vectorized complex products may differ from scalar ones in the last bit
    assert np.allclose(mk.kron(a, b), kron_loops(a, b), rtol=1e-15, atol=1e-15)
    ai = rng.integers(-5, 6, size=(2, 2)) + 1j * rng.integers(-5, 6, size=(2, 2))
    bi = rng.integers(-5, 6, size=(3, 3)) + 1j * rng.integers(-5, 6, size=(3, 3))
    assert np.array_equal(mk.kron(ai, bi), kron_loops(ai, bi))


def test_kron_associative(rng):
    # exact when every product is representable; one rounding step otherwise
    a, b, c = (rng.integers(-9, 10, size=(2, 2)).astype(float) for _ in range(3))
    assert np.array_equal(mk.kron(mk.kron(a, b), c), mk.kron(a, mk.kron(b, c)))
    a, b, c = (rng.normal(size=(2, 2)) for _ in range(3))
    assert np.allclose(mk.kron(mk.kron(a, b), c), mk.kron(a, mk.kron(b, c)), rtol=4e-16, atol=0)


def test_kron_cap():
    with pytest.raises(SizingError):
        mk.kron(np.eye(2**8), np.eye(2**7))
    with pytest.raises(SizingError):
        mk.pauli_matrix("I" * 15)


def test_pauli_matrix_basic():
    assert np.array_equal(mk.pauli_matrix("X"), [[0, 1], [1, 0]])
    assert np.array_equal(mk.pauli_matrix("XY"), np.kron(X, Y))
    with pytest.raises(DomainError):
        mk.PauliString("XQ")


def test_commuting_lattice_pair():
    c = mk.commutator(mk.pauli_matrix("XYI"), mk.pauli_matrix("IYZ"))
    assert np.max(np.abs(c)) == 0


@pytest.mark.parametrize("a,b", [("XYI", "IYZ"), ("XX", "ZZ"), ("XZ", "ZI"), ("YZX", "XXX"), ("IIZ", "XYX")])
def test_pauli_commutator_norm_by_clash_parity(a, b):
    pa, pb = mk.PauliString(a), mk.PauliString(b)
    n = mk.spectral_norm(mk.commutator(mk.pauli_matrix(pa), mk.pauli_matrix(pb)))
    assert n == pytest.approx(2.0 if pa.anticommutes_with(pb) else 0.0, abs=1e-12)


def test_pauli_hermitian_unitary_norm_one(rng):
    for _ in range(10):
        lab = "".join(rng.choice(list("IXYZ"), size=3))
        p = mk.pauli_matrix(lab)
        assert mk.is_hermitian(p) and mk.is_unitary(p)
        assert mk.spectral_norm(p) == pytest.approx(1.0, abs=1e-12)


def test_eig_hermitian_known_spectra():
    w, v = mk.eig_hermitian(np.diag([1.0, 3.0]))
    assert np.allclose(w, [1, 3]) and np.allclose(np.abs(v), np.eye(2))
    w, _ = mk.eig_hermitian(X)
    assert np.allclose(w, [-1, 1])


def test_eig_hermitian_reconstruction(rng):
    h = random_hermitian(rng, 8)
    w, v = mk.eig_hermitian(h)
    assert np.all(np.diff(w) >= 0)
    assert mk.spectral_norm(h - (v * w) @ v.conj().T) <= 1e-9
    assert mk.is_unitary(v, 1e-10)


def test_eig_hermitian_rejects_nonhermitian():
    with pytest.raises(ContractError):
        mk.eig_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ContractError):
        mk.expm_i(np.array([[0, 1], [0, 0]]), 1.0)


def test_expm_i_identities(rng):
    assert np.allclose(mk.expm_i(np.zeros((3, 3)), 2.0), np.eye(3))
    assert np.allclose(mk.expm_i(X, np.pi / 2), -1j * X, atol=1e-14)
    h = random_hermitian(rng, 4)
    u = mk.expm_i(h, 0.7)
    assert mk.spectral_norm(u - expm_taylor(h, 0.7)) <= 1e-10
    assert mk.is_unitary(u, 1e-10)


def test_expm_i_group_property(rng):
    h = random_hermitian(rng, 5)
    lhs = mk.expm_i(h, 0.3) @ mk.expm_i(h, 1.1)
    assert mk.spectral_norm(lhs - mk.expm_i(h, 1.4)) <= 1e-9


def test_spectral_norm(rng):
    assert mk.spectral_norm(np.eye(3)) == pytest.approx(1.0)
    assert mk.spectral_norm(np.diag([1.0, -3.0])) == pytest.approx(3.0)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    assert abs(mk.spectral_norm(a) - power_norm(a)) <= 1e-8


def test_as_matrix_validation():
    with pytest.raises(DimensionError):
        mk.as_matrix(np.ones((2, 3)))
    with pytest.raises(DomainError):
        mk.as_matrix([[np.nan]])


def test_principal_log_and_polar(rng):
    h = random_hermitian(rng, 4, norm=1.0)
    assert mk.spectral_norm(mk.principal_log_hermitian(mk.expm_i(h, 1.0)) - h) <= 1e-10
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    assert mk.is_unitary(mk.polar_unitary(a))


def test_pauli_sum():
    m = mk.pauli_sum({"ZI": 0.3, "ZZ": 0.2})
    assert np.allclose(m, 0.3 * np.kron(Z, np.eye(2)) + 0.2 * np.kron(Z, Z))
    with pytest.raises(DimensionError):
        mk.pauli_sum({"Z": 1.0, "ZZ": 1.0})
