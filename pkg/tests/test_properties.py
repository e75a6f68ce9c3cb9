import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from tdhsim import blockenc as B
from tdhsim import matkernel as mk
from tdhsim import qsp
from tdhsim import tdsim as T
from tdhsim.tdsim import CoefficientFn as CF

from oracles import adaptive_simpson, random_hermitian, random_parity_poly

seeds = st.integers(0, 2**32 - 1)
FAST = settings(max_examples=25, deadline=None)


@FAST
@given(seeds, st.sampled_from([2, 4, 8]))
def test_expm_i_is_unitary_and_composes(seed, dim):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng, dim)
    u = mk.expm_i(h, 0.3)
    assert mk.is_unitary(u)
    assert mk.spectral_norm(mk.expm_i(h, 0.1) @ mk.expm_i(h, 0.2) - u) <= 1e-12


@FAST
@given(seeds)
def test_kron_mixed_product(seed):
    rng = np.random.default_rng(seed)
    a, b, c, d = (random_hermitian(rng, 2) for _ in range(4))
    lhs = mk.kron(a, b) @ mk.kron(c, d)
    assert np.allclose(lhs, mk.kron(a @ c, b @ d), atol=1e-12)


@FAST
@given(seeds, st.integers(0, 20))
def test_qsp_round_trip(seed, d):
    rng = np.random.default_rng(seed)
    p = random_parity_poly(rng, d, "even" if d % 2 == 0 else "odd", 1 - 1e-6)
    phi = qsp.find_phases(p)
    xs = qsp.verification_nodes(p.degree)
    assert np.max(np.abs(qsp.qsp_response(phi, xs).real - p(xs).real)) <= 1e-10


@FAST
@given(seeds)
def test_qsp_response_is_unitary(seed):
    rng = np.random.default_rng(seed)
    phi = rng.uniform(-np.pi, np.pi, size=int(rng.integers(1, 12)))
    for x in rng.uniform(-1, 1, size=5):
        u = qsp.apply_phases(phi, float(x))
        assert np.max(np.abs(u.conj().T @ u - np.eye(2))) <= 1e-12


@FAST
@given(st.floats(0.1, 8.0), st.sampled_from([1e-3, 1e-6, 1e-9]))
def test_jacobi_anger_within_eps(t_eff, eps):
    ja = qsp.jacobi_anger(t_eff, eps)
    x = np.linspace(-1, 1, 501)
    assert np.max(np.abs(ja.cos_part(x).real - np.cos(t_eff * x))) <= eps
    assert np.max(np.abs(ja.sin_part(x).real - np.sin(t_eff * x))) <= eps


@FAST
@given(seeds, st.floats(0.0, 1.0))
def test_polynomial_integral_matches_quadrature(seed, t):
    rng = np.random.default_rng(seed)
    c = CF.polynomial(rng.uniform(-0.25, 0.25, size=int(rng.integers(1, 5))))
    ref = adaptive_simpson(lambda s: complex(c.values(s)), 0.0, t)
    assert abs(T.coeff_integral(c, t) - ref) <= 1e-11


@FAST
@given(seeds)
def test_lcu_block_is_weighted_sum(seed):
    rng = np.random.default_rng(seed)
    us = [mk.expm_i(random_hermitian(rng, 2), 1.0) for _ in range(3)]
    w = rng.uniform(0.1, 1.0, size=3)
    be = B.be_lcu([B.be_from_unitary(u) for u in us], w)
    assert mk.is_unitary(be.unitary)
    assert B.be_verify(be, sum(wi * u for wi, u in zip(w, us))) <= 1e-12


@settings(max_examples=8, deadline=None)
@given(seeds, st.floats(0.05, 1.0))
def test_simulate_single_pauli_term(seed, t):
    rng = np.random.default_rng(seed)
    label = "".join(rng.choice(list("IXYZ"), size=2))
    if label == "II":
        label = "XZ"
    td = T.TDHamiltonian(2, [T.pauli_term(CF.polynomial([0.3, float(rng.uniform(-0.5, 0.5))]), label)])
    be = T.simulate_td(td, t, 1e-6)
    assert B.be_verify(be, mk.expm_i(T.h_integral(td, t), 1.0)) <= 1e-6
