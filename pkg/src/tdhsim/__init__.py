"""Block-encoding simulation of time-dependent Hamiltonians with commuting terms."""

from .blockenc import (
    BlockEncoding,
    QueryLedger,
    be_corner,
    be_from_unitary,
    be_lcu,
    be_log_unitary,
    be_product,
    be_scalar,
    be_scale_mul,
    be_simulate,
    be_verify,
    qsvt_apply,
)
from .errors import (
    CommutativityError,
    ContractError,
    ConvergenceError,
    DimensionError,
    DomainError,
    ModelError,
    ParityError,
    SizingError,
    TDHSimError,
)
from .kernels import BACKEND
from .models import ModelSpec, build_model, floquet_hamiltonian, ising_quench, lattice_chain
from .qsp import (
    ChebyshevPoly,
    PhaseSequence,
    apply_phases,
    arcsin_poly,
    cheb_fit,
    find_phases,
    jacobi_anger,
    rect_poly,
    signal_w,
)
from .tdsim import (
    CoefficientFn,
    TDHamiltonian,
    check_commuting,
    coeff_eval,
    coeff_integral,
    h_integral,
    query_report,
    reference_propagator,
    simulate_td,
    trotter1,
)

__version__ = "0.1.0"
