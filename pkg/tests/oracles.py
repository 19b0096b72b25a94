"""Independent oracles shared by the tests.

The matrix-form master equation here is assembled from the textbook
recipe (commutator plus jump-operator dissipator) out of its own Pauli
algebra and shares no code with the package internals.  Agreement between
this and the 16-coordinate generator is the backbone equivalence the
whole suite leans on.
"""

from __future__ import annotations

import numpy as np

from tlspurify.model import (InitialStateSpec, ModelParams, matrix_to_x,
                             min_eigenvalue, mu_max, xi_max)

# ====================================================================
# Pauli algebra and model operators
# ====================================================================

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SM = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # lowers |1> -> |0>
I2 = np.eye(2, dtype=complex)

#: in-phase exchange piece (coefficient J1)
H_EXCHANGE = -0.5 * (np.kron(SX, SX) + np.kron(SY, SY))
#: quadrature exchange piece (coefficient J2)
H_QUADRATURE = -0.5 * (np.kron(SY, SX) - np.kron(SX, SY))
#: frame term (coefficient alpha)
H_FRAME = np.kron(SZ, I2)
#: defect jump operators (unit rate; scaled by gamma1/gamma2 below)
L_EMIT = np.kron(I2, SM)
L_ABSORB = np.kron(I2, SM.conj().T)


def lindblad_rhs(params: ModelParams, rho: np.ndarray, j1: float, j2: float,
                 alpha: float = 0.0) -> np.ndarray:
    """drho/dt of the rotating-frame master equation, matrices only."""
    r = params.rates
    h = j1 * H_EXCHANGE + j2 * H_QUADRATURE + alpha * H_FRAME
    d = -1.0j * (h @ rho - rho @ h)
    for g, op in ((r.gamma1, L_EMIT), (r.gamma2, L_ABSORB)):
        opd = op.conj().T
        anticomm = opd @ op
        d = d + g * (op @ rho @ opd
                     - 0.5 * (anticomm @ rho + rho @ anticomm))
    return d


def partial_trace_defect(rho: np.ndarray) -> np.ndarray:
    """2x2 qubit state, tracing the defect out index-wise."""
    r = rho.reshape(2, 2, 2, 2)
    return np.einsum("ikjk->ij", r)


def partial_trace_qubit(rho: np.ndarray) -> np.ndarray:
    """2x2 defect state, tracing the qubit out index-wise."""
    r = rho.reshape(2, 2, 2, 2)
    return np.einsum("kikj->ij", r)


# ====================================================================
# Random states
# ====================================================================

def random_density_matrix(rng: np.random.Generator) -> np.ndarray:
    """Full-rank random 4x4 density matrix (A A^dag normalized)."""
    m = rng.normal(size=(4, 4)) + 1.0j * rng.normal(size=(4, 4))
    rho = m @ m.conj().T
    return rho / np.trace(rho).real


def random_density_x(rng: np.random.Generator) -> np.ndarray:
    return matrix_to_x(random_density_matrix(rng))


def random_family_spec(params: ModelParams,
                       rng: np.random.Generator) -> InitialStateSpec:
    """Random member of the preparable initial-state family, kept inside
    the positivity region by drawing fractions of the ceilings and
    shrinking the qubit coherence until the assembled state is physical."""
    phase = rng.uniform(0.0, 2.0 * np.pi)
    xi_mag = rng.uniform(0.0, 0.9) * xi_max(params)
    xi_re = xi_mag * np.cos(phase)
    xi_im = xi_mag * np.sin(phase)
    cap = mu_max(params, complex(xi_re, xi_im))
    scale = rng.uniform(0.0, 0.9) * cap
    angle = rng.uniform(0.0, 2.0 * np.pi)
    while True:
        spec = InitialStateSpec(mu_q=scale * np.cos(angle),
                                nu_q=scale * np.sin(angle),
                                xi_re=xi_re, xi_im=xi_im)
        x = _family_x(params, spec)
        if min_eigenvalue(x) >= -1e-11:
            return spec
        scale *= 0.8


def _family_x(params: ModelParams, spec: InitialStateSpec) -> np.ndarray:
    """Family state assembled directly from its definition (product of
    thermal factors, qubit coherence dressed by the defect populations,
    cross coherence i*xi on the (|01>, |10>) entry)."""
    a_q, b_q = params.qubit_populations
    a_t, b_t = params.tls_populations
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = a_q * a_t
    rho[1, 1] = a_q * b_t
    rho[2, 2] = b_q * a_t
    rho[3, 3] = b_q * b_t
    coh = complex(spec.mu_q, spec.nu_q)
    rho[0, 2] = coh * a_t
    rho[1, 3] = coh * b_t
    rho[1, 2] = 1.0j * spec.xi
    rho = rho + rho.conj().T - np.diag(rho.diagonal().real)
    return matrix_to_x(rho)
