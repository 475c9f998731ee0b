"""Brute-force validators independent of the spectral fast path.

Everything here works in the full 2^N Hilbert space built directly from the
Pauli terms of the chain Hamiltonian (dense eigendecomposition, N <= 12), or
integrates the one-excitation ODE system step by step.  None of it shares
code with the tridiagonal spectral engine, which is the point: agreement
between the two paths validates the sector reduction, Eq.-of-motion signs,
and the concurrence formulas.

Basis convention: site n maps to bit (N - n), so site 1 is the most
significant bit and the all-up state is index 0.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .chain import ChainSpec, FieldProfile, SingleExcitationHamiltonian, build_hamiltonian

_MAX_FULL_SITES = 12


def _check_size(n_sites: int) -> None:
    if n_sites > _MAX_FULL_SITES:
        raise ValueError(f"full-space oracle is capped at N = {_MAX_FULL_SITES}, got {n_sites}")


def site_index(n_sites: int, site: int) -> int:
    """Basis index of the state with the excitation on one 1-based site."""
    if not 1 <= site <= n_sites:
        raise ValueError(f"site {site} outside 1..{n_sites}")
    return 1 << (n_sites - site)


def all_up_state(spec: ChainSpec) -> np.ndarray:
    state = np.zeros(2**spec.n_sites, dtype=complex)
    state[0] = 1.0
    return state


def single_excitation_state(spec: ChainSpec, site: int) -> np.ndarray:
    state = np.zeros(2**spec.n_sites, dtype=complex)
    state[site_index(spec.n_sites, site)] = 1.0
    return state


def embed_amplitudes(n_sites: int, amplitudes: np.ndarray) -> np.ndarray:
    """Lift one-excitation site amplitudes to a full 2^N vector."""
    amplitudes = np.asarray(amplitudes, dtype=complex)
    state = np.zeros(2**n_sites, dtype=complex)
    for site in range(1, n_sites + 1):
        state[site_index(n_sites, site)] = amplitudes[site - 1]
    return state


def extract_amplitudes(n_sites: int, state: np.ndarray) -> tuple[np.ndarray, float]:
    """Project a full vector onto the one-excitation sector.

    Returns (site amplitudes, norm of the component outside the sector).
    """
    state = np.asarray(state, dtype=complex)
    amplitudes = np.array(
        [state[site_index(n_sites, site)] for site in range(1, n_sites + 1)]
    )
    outside = np.linalg.norm(state) ** 2 - np.linalg.norm(amplitudes) ** 2
    return amplitudes, float(np.sqrt(max(outside, 0.0)))


def full_hamiltonian(spec: ChainSpec, profile: FieldProfile) -> np.ndarray:
    """Dense 2^N matrix of -J [ 1/2 sum (sx sx + sy sy) + sum K_n sz ]."""
    _check_size(spec.n_sites)
    n = spec.n_sites
    j = spec.coupling
    dim = 2**n
    states = np.arange(dim)
    h = np.zeros((dim, dim))
    # sz eigenvalue is +1 for bit 0 (spin up), -1 for bit 1.
    diag = np.zeros(dim)
    for site in range(1, n + 1):
        bit = (states >> (n - site)) & 1
        diag -= j * profile.field(site) * (1.0 - 2.0 * bit)
    h[states, states] = diag
    # 1/2 (sx sx + sy sy) = s+ s- + s- s+ flips adjacent (1,0) <-> (0,1) pairs.
    for site in range(1, n):
        hi = n - site
        lo = n - site - 1
        mask_hi = 1 << hi
        mask_lo = 1 << lo
        movable = states[((states >> hi) & 1).astype(bool) & ~((states >> lo) & 1).astype(bool)]
        partner = movable - mask_hi + mask_lo
        h[partner, movable] -= j
        h[movable, partner] -= j
    return h


class FullDecomposition:
    """Dense eigendecomposition of the full Hamiltonian, reusable across times."""

    def __init__(self, spec: ChainSpec, profile: FieldProfile):
        _check_size(spec.n_sites)
        self.spec = spec
        self.profile = profile
        self.eigenvalues, self.eigenvectors = scipy.linalg.eigh(full_hamiltonian(spec, profile))

    def evolve(self, state: np.ndarray, t: float) -> np.ndarray:
        coeffs = self.eigenvectors.conj().T @ np.asarray(state, dtype=complex)
        return self.eigenvectors @ (np.exp(-1j * self.eigenvalues * t) * coeffs)


def full_evolve(spec: ChainSpec, profile: FieldProfile, initial: np.ndarray, t: float) -> np.ndarray:
    """One-shot evolution of a full 2^N state vector."""
    return FullDecomposition(spec, profile).evolve(initial, t)


def total_magnetization(state: np.ndarray) -> float:
    """Expectation of sum_n sz_n."""
    state = np.asarray(state, dtype=complex)
    n = int(np.log2(state.size))
    states = np.arange(state.size)
    popcount = np.array([bin(s).count("1") for s in states])
    return float(np.sum(np.abs(state) ** 2 * (n - 2.0 * popcount)))


def reduced_state(state: np.ndarray, kept_sites, n_qubits: int | None = None) -> np.ndarray:
    """Partial trace of a pure state onto one or two 1-based sites."""
    state = np.asarray(state, dtype=complex)
    n = int(np.log2(state.size)) if n_qubits is None else n_qubits
    if 2**n != state.size:
        raise ValueError("state dimension is not a power of two")
    kept = [int(s) for s in kept_sites]
    if len(kept) not in (1, 2) or len(set(kept)) != len(kept):
        raise ValueError("kept_sites must name one or two distinct sites")
    for site in kept:
        if not 1 <= site <= n:
            raise ValueError(f"site {site} outside 1..{n}")
    tensor = state.reshape((2,) * n)
    axes = [site - 1 for site in kept]
    moved = np.moveaxis(tensor, axes, range(len(axes)))
    block = moved.reshape(2 ** len(kept), -1)
    return block @ block.conj().T


def wootters_concurrence(rho: np.ndarray) -> float:
    """Two-qubit concurrence max(0, mu1 - mu2 - mu3 - mu4)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("expected a 4x4 two-qubit density matrix")
    if not np.allclose(rho, rho.conj().T, atol=1e-8):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > 1e-8:
        raise ValueError("density matrix trace must be 1")
    if scipy.linalg.eigvalsh(rho).min() < -1e-10:
        raise ValueError("density matrix has a negative eigenvalue")
    yy = np.array(
        [
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0, 0.0],
        ]
    )
    # mu_i = sqrt(eigvals(rho @ yy @ rho* @ yy)) are the singular values of
    # sqrt(rho) @ yy @ conj(sqrt(rho)); the SVD keeps the near-zero ones at
    # machine precision instead of sqrt(eigenvalue noise)
    w, v = scipy.linalg.eigh(rho)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    mu = np.linalg.svd(root @ yy @ root.conj(), compute_uv=False)
    mu.sort()
    return float(max(0.0, mu[-1] - mu[-2] - mu[-3] - mu[-4]))


def external_singlet_state(spec: ChainSpec) -> np.ndarray:
    """(|0>_a sigma_1^+ |vac> + |1>_a |vac>)/sqrt2 on an (N+1)-qubit register.

    Qubit 1 is an idle external ancilla; chain sites occupy qubits 2..N+1.
    """
    n = spec.n_sites
    state = np.zeros(2 ** (n + 1), dtype=complex)
    state[site_index(n, 1)] = 1.0 / np.sqrt(2.0)   # ancilla up, excitation on site 1
    state[1 << n] = 1.0 / np.sqrt(2.0)             # ancilla flipped, chain vacuum
    return state


def evolve_with_idle_ancilla(spec: ChainSpec, profile: FieldProfile, joint_state: np.ndarray, t: float) -> np.ndarray:
    """Evolve an (N+1)-qubit state whose first qubit is decoupled."""
    joint_state = np.asarray(joint_state, dtype=complex)
    decomp = FullDecomposition(spec, profile)
    blocks = joint_state.reshape(2, -1)
    return np.vstack([decomp.evolve(block, t) for block in blocks]).reshape(-1)


def _tridiag_matvec(diagonal: np.ndarray, off_diagonal: np.ndarray, vec: np.ndarray) -> np.ndarray:
    out = diagonal * vec
    out[:-1] += off_diagonal * vec[1:]
    out[1:] += off_diagonal * vec[:-1]
    return out


def rk4_evolve(h: SingleExcitationHamiltonian, initial: np.ndarray, t: float, n_steps: int = 4096) -> np.ndarray:
    """Classical fixed-step RK4 on i d(beta)/dt = H beta."""
    return rk4_evolve_driven(lambda _t: h.diagonal, h.off_diagonal, initial, 0.0, t, n_steps)


def rk4_evolve_driven(
    diagonal_at,
    off_diagonal: np.ndarray,
    initial: np.ndarray,
    t_start: float,
    t_end: float,
    n_steps: int,
) -> np.ndarray:
    """RK4 for a tridiagonal Hamiltonian with a time-dependent diagonal."""
    off_diagonal = np.asarray(off_diagonal, dtype=float)
    beta = np.asarray(initial, dtype=complex).copy()
    h = (t_end - t_start) / n_steps

    def deriv(t: float, b: np.ndarray) -> np.ndarray:
        return -1j * _tridiag_matvec(np.asarray(diagonal_at(t), dtype=float), off_diagonal, b)

    t = t_start
    for _ in range(n_steps):
        k1 = deriv(t, beta)
        k2 = deriv(t + h / 2.0, beta + (h / 2.0) * k1)
        k3 = deriv(t + h / 2.0, beta + (h / 2.0) * k2)
        k4 = deriv(t + h, beta + h * k3)
        beta = beta + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return beta


def oracle_transition_amplitude(spec: ChainSpec, profile: FieldProfile, from_site: int, to_site: int, t: float) -> complex:
    """f_{to,from}(t) via the full 2^N path, phase-referenced to the vacuum.

    The one-excitation block used by the fast path drops the constant
    vacuum energy, so full-space amplitudes carry an extra global phase
    exp(-i E_vac t); dividing it out makes the two paths comparable as
    complex numbers, not just in magnitude.
    """
    decomp = FullDecomposition(spec, profile)
    evolved = decomp.evolve(single_excitation_state(spec, from_site), t)
    vacuum_phase = decomp.evolve(all_up_state(spec), t)[0]
    return complex(evolved[site_index(spec.n_sites, to_site)] / vacuum_phase)
