"""Stationary states, symmetrized correlators, LGI combinations, and QFI.

For a stationary state rho = sum_n p_n |n><n| diagonal in the energy
eigenbasis, the symmetrized two-time correlator of an observable Q is

    C(tau) = (1/2) <{Q(tau), Q}> = sum_{n,m} (1/2)(p_n + p_m) |Q_nm|^2
             * cos(omega_nm tau),            omega_nm = E_n - E_m.

The three-time Leggett-Garg combination is K(tau) = 2 C(tau) - C(2 tau) with
macrorealist ceiling 1, and its p-time generalization is
K_p(tau) = (p-1) C(tau) - C((p-1) tau) with ceiling p - 2.  The quantum
Fisher information of rho with respect to Q is

    F_Q = sum_{n,m} 2 (p_n - p_m)^2 / (p_n + p_m) * |Q_nm|^2,

which for pure states reduces to four times the variance of Q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation
from .kernels import h_kernel
from .linalg import Eigensystem, Operator, to_eigenbasis

__all__ = [
    "StationaryState",
    "SpectralData",
    "make_state",
    "spectral_data",
    "correlator",
    "lgi_K",
    "lgi_Kp",
    "kappa_terms",
    "qfi",
    "f_terms",
    "qfi_pure",
]

#: Absolute window around the minimum energy that counts as the ground manifold.
GROUND_WINDOW = 1e-10

#: Weight-sum floor below which a QFI term is skipped as numerically empty.
WEIGHT_FLOOR = 1e-14


@dataclass(frozen=True)
class StationaryState:
    """Stationary weights over an energy eigenbasis.

    ``kind`` is 'thermal' (Gibbs weights at inverse temperature ``beta``,
    with beta = inf meaning the uniform mixture over the numerically
    degenerate ground manifold) or 'pure' (one-hot weights on eigenlevel
    ``index``).  Weights are read-only and sum to 1 within 1e-12.
    """

    kind: str
    weights: np.ndarray
    beta: float | None = None
    index: int | None = None

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    @property
    def is_pure(self) -> bool:
        return self.kind == "pure"


def make_state(eig: Eigensystem, *, beta: float | None = None,
               index: int | None = None) -> StationaryState:
    """Construct a stationary state over ``eig``: thermal or pure.

    Exactly one of ``beta`` (inverse temperature in (0, inf]) or ``index``
    (eigenlevel, 0-based) must be given.  beta = inf yields the uniform
    mixture over all levels within 1e-10 of the minimum energy, which is the
    T -> 0 limit of the Gibbs weights.
    """
    if (beta is None) == (index is None):
        raise ValueError("specify exactly one of beta (thermal) or index (pure)")
    energies = eig.energies
    dim = energies.shape[0]
    if index is not None:
        if not isinstance(index, (int, np.integer)) or isinstance(index, bool):
            raise ValueError(f"eigenlevel index must be an integer, got {index!r}")
        if not 0 <= index < dim:
            raise ValueError(f"eigenlevel index {index} outside [0, {dim - 1}]")
        weights = np.zeros(dim)
        weights[index] = 1.0
        return StationaryState(kind="pure", weights=_frozen(weights), index=int(index))

    beta = float(beta)
    if not beta > 0.0:
        raise ValueError(f"inverse temperature beta must be in (0, inf], got {beta}")
    if math.isinf(beta):
        mask = energies - energies[0] <= GROUND_WINDOW
        weights = mask / np.count_nonzero(mask)
    else:
        shifted = -beta * (energies - energies[0])
        weights = np.exp(shifted)
        weights /= weights.sum()
    total = float(weights.sum())
    if abs(total - 1.0) > 1e-12:
        raise InvariantViolation(f"stationary weights sum to {total}, not 1")
    return StationaryState(kind="thermal", weights=_frozen(weights), beta=beta)


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SpectralData:
    """Everything needed to evaluate correlators and QFI for one instance.

    ``elements`` holds Q in the energy eigenbasis, ``omega[n, m]`` the Bohr
    frequency E_n - E_m; flattened weight/frequency arrays for the correlator
    sum are precomputed once.  ``q2_expect`` is <Q^2> = Tr[rho Q^2].
    """

    energies: np.ndarray
    elements: np.ndarray
    omega: np.ndarray
    state: StationaryState
    q2_expect: float
    _weight_flat: np.ndarray
    _omega_flat: np.ndarray

    @property
    def dim(self) -> int:
        return self.energies.shape[0]


def spectral_data(eig: Eigensystem, q: Operator, state: StationaryState) -> SpectralData:
    """Assemble :class:`SpectralData` from an eigensystem, observable, and state."""
    if state.dim != eig.dim:
        raise ValueError(
            f"dimension mismatch: state has dim {state.dim}, eigensystem {eig.dim}"
        )
    weight_sum = float(np.sum(state.weights))
    if abs(weight_sum - 1.0) > 1e-12:
        raise InvariantViolation(
            f"stationary weights sum to {weight_sum!r}, expected 1"
        )
    elements = to_eigenbasis(q, eig)
    herm_dev = float(np.max(np.abs(elements - elements.conj().T)))
    if herm_dev > 1e-10:
        raise InvariantViolation(
            f"observable lost Hermiticity in the eigenbasis (deviation {herm_dev:.3e})"
        )
    energies = np.asarray(eig.energies, dtype=np.float64)
    omega = energies[:, None] - energies[None, :]
    abs_sq = np.abs(elements) ** 2
    p = state.weights
    weight = 0.5 * (p[:, None] + p[None, :]) * abs_sq
    q2 = float(np.sum(p[:, None] * abs_sq))
    return SpectralData(
        energies=_frozen(energies),
        elements=elements,
        omega=omega,
        state=state,
        q2_expect=q2,
        _weight_flat=_frozen(weight.ravel()),
        _omega_flat=_frozen(omega.ravel()),
    )


def correlator(sd: SpectralData, tau):
    """Symmetrized correlator C(tau); accepts a scalar or an array of times.

    C(0) = <Q^2> and C is even in tau; |C(tau)| never exceeds <Q^2>.
    """
    tau_arr = np.asarray(tau, dtype=np.float64)
    scalar = tau_arr.ndim == 0
    phases = np.multiply.outer(np.atleast_1d(tau_arr), sd._omega_flat)
    values = np.cos(phases) @ sd._weight_flat
    return float(values[0]) if scalar else values


def lgi_Kp(sd: SpectralData, p: int, tau: float) -> float:
    """p-time Leggett-Garg combination K_p(tau) = (p-1) C(tau) - C((p-1) tau).

    Macrorealism at the p + 1 equally spaced times 0, tau, ..., (p-1) tau
    caps this at p - 2 (for dichotomic Q); p = 3 gives the standard
    three-time combination.
    """
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise ValueError(f"p must be an integer, got {p!r}")
    if p < 3:
        raise ValueError(f"p must be at least 3, got {p}")
    return float((p - 1) * correlator(sd, tau) - correlator(sd, (p - 1) * tau))


def lgi_K(sd: SpectralData, tau: float) -> float:
    """Three-time Leggett-Garg combination K(tau) = 2 C(tau) - C(2 tau)."""
    return lgi_Kp(sd, 3, tau)


def kappa_terms(sd: SpectralData, tau: float) -> np.ndarray:
    """Level-pair decomposition of K(tau) - <Q^2>.

    Returns the matrix kappa_nm = (1/2)(p_n + p_m) |Q_nm|^2 h(omega_nm tau),
    whose sum over all ordered pairs equals K(tau) - <Q^2> identically.
    """
    weight = sd._weight_flat.reshape(sd.omega.shape)
    return weight * h_kernel(sd.omega * tau)


def qfi(sd: SpectralData) -> float:
    """Quantum Fisher information of the stationary state with respect to Q.

    Terms with p_n + p_m <= 1e-14 are skipped (numerically empty support).
    Postconditions 0 <= F_Q <= 4 <Q^2> are enforced.
    """
    total = float(np.sum(f_terms(sd)))
    if total < -1e-12 or total > 4.0 * sd.q2_expect + 1e-9:
        raise InvariantViolation(
            f"QFI value {total} outside [0, 4 <Q^2>] with <Q^2> = {sd.q2_expect}"
        )
    return max(total, 0.0)


def f_terms(sd: SpectralData) -> np.ndarray:
    """Level-pair decomposition of the QFI.

    Returns the matrix f_nm = 2 (p_n - p_m)^2 / (p_n + p_m) |Q_nm|^2 (zero
    where the weight sum is numerically empty); F_Q is its total sum.
    """
    p = sd.state.weights
    p_sum = p[:, None] + p[None, :]
    p_diff = p[:, None] - p[None, :]
    abs_sq = np.abs(sd.elements) ** 2
    out = np.zeros_like(p_sum)
    mask = p_sum > WEIGHT_FLOOR
    out[mask] = 2.0 * (p_diff[mask] ** 2 / p_sum[mask]) * abs_sq[mask]
    return out


def qfi_pure(psi: np.ndarray, q: Operator | np.ndarray) -> float:
    """QFI of a pure state: F_Q = 4 (<Q^2> - <Q>^2).

    ``psi`` must be normalized within 1e-10.  Accepts an
    :class:`~lgqfi.linalg.Operator` or a raw Hermitian matrix.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.ndim != 1:
        raise ValueError(f"state vector must be one-dimensional, got shape {psi.shape}")
    norm = float(np.linalg.norm(psi))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"state vector norm {norm} deviates from 1 beyond 1e-10")
    matrix = q.matrix if isinstance(q, Operator) else np.asarray(q, dtype=np.complex128)
    if matrix.shape != (psi.shape[0], psi.shape[0]):
        raise ValueError(
            f"dimension mismatch: state has dim {psi.shape[0]}, observable shape "
            f"{matrix.shape}"
        )
    q_psi = matrix @ psi
    mean = float(np.real(np.vdot(psi, q_psi)))
    second = float(np.real(np.vdot(q_psi, q_psi)))
    return 4.0 * (second - mean * mean)
