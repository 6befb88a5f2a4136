"""Measurement protocols for temporal correlations.

Three routes to the two-time correlator are provided:

* exact projective statistics: the joint outcome distribution of ideal
  projective measurements of Q at two times, with the correlator read off
  from it.  For dichotomic observables this equals the symmetrized
  correlator used throughout the rest of the package.
* Monte Carlo sampling of the same joint distribution with a counter-based
  generator, so results are reproducible for a fixed seed and independent
  of shot-evaluation order.
* a weak two-meter scheme: both times are read out through Gaussian meters
  of coupling ``lam`` and position spread ``delta_x``; the expectation of
  the product of pointer readings is computed in closed form.  For
  dichotomic observables it is exactly meter-independent; in general it
  approaches the symmetrized correlator quadratically as the meters widen.

A macrorealist oracle evaluates K directly from any explicit joint
probability table, certifying that classical (non-invasively measurable)
statistics can never violate the three-time inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation
from .linalg import Operator, hermitian_eig

__all__ = [
    "MeterConfig",
    "ProtocolEstimate",
    "JointDistribution",
    "cluster_eigenvalues",
    "projective_joint",
    "projective_mc",
    "symmetrized_correlator",
    "weak_two_meter",
    "lgi_from_protocol",
    "macrorealist_oracle",
    "noisy_readout_correlator",
]

#: Eigenvalues of Q closer than this are treated as one measurement outcome.
OUTCOME_TOL = 1e-9

_MAX_SEED = 2**64


@dataclass(frozen=True)
class MeterConfig:
    """Gaussian meter parameters for the weak two-meter scheme."""

    coupling: float
    width: float

    def __post_init__(self) -> None:
        if not self.coupling > 0.0:
            raise ValueError(f"meter coupling must be positive, got {self.coupling}")
        if self.width < 0.0:
            raise ValueError(f"meter width must be nonnegative, got {self.width}")


@dataclass(frozen=True)
class ProtocolEstimate:
    """A correlator estimate with its statistical error and exact reference.

    ``stderr`` is zero for exact (non-sampled) protocols.  ``within_gate``
    reports whether a sampled estimate sits within five standard errors of
    the exact reference; it is None for exact protocols, where the
    comparison carries no statistical meaning.
    """

    value: float
    stderr: float
    shots: int
    exact_ref: float
    seed: int | None
    times: tuple[float, float]

    @property
    def within_gate(self) -> bool | None:
        if self.seed is None:
            return None
        return abs(self.value - self.exact_ref) <= 5.0 * self.stderr


@dataclass(frozen=True)
class JointDistribution:
    """Joint outcome probabilities of projective Q measurements at two times."""

    outcomes_first: np.ndarray
    outcomes_second: np.ndarray
    probs: np.ndarray
    times: tuple[float, float]

    def correlator(self) -> float:
        """E[q(t1) q(t2)] under this joint distribution."""
        return float(np.einsum("a,b,ab->", self.outcomes_first,
                               self.outcomes_second, self.probs).real)


def cluster_eigenvalues(values: np.ndarray, tol: float = OUTCOME_TOL):
    """Group sorted eigenvalues into measurement outcomes within ``tol``.

    Returns (outcome values, list of index arrays into ``values``).
    """
    values = np.asarray(values, dtype=float)
    order = np.argsort(values, kind="stable")
    clusters: list[list[int]] = []
    for idx in order:
        if clusters and values[idx] - values[clusters[-1][0]] <= tol:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])
    outcomes = np.array([values[c].mean() for c in clusters])
    members = [np.array(c, dtype=int) for c in clusters]
    return outcomes, members


def _as_density_matrix(rho0: np.ndarray, dim: int) -> np.ndarray:
    rho = np.asarray(rho0, dtype=complex)
    if rho.ndim == 1:
        if rho.shape != (dim,):
            raise ValueError(f"state vector has length {rho.shape[0]}, expected {dim}")
        norm = np.linalg.norm(rho)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state vector norm {norm!r} differs from 1")
        return np.outer(rho, rho.conj())
    if rho.shape != (dim, dim):
        raise ValueError(f"density matrix has shape {rho.shape}, expected ({dim}, {dim})")
    if np.max(np.abs(rho - rho.conj().T)) > 1e-10:
        raise ValueError("density matrix is not Hermitian within 1e-10")
    trace = np.trace(rho).real
    if abs(trace - 1.0) > 1e-10:
        raise ValueError(f"density matrix trace {trace!r} differs from 1")
    eigvals = np.linalg.eigvalsh(rho)
    if eigvals.min() < -1e-10:
        raise ValueError(f"density matrix has negative eigenvalue {eigvals.min()!r}")
    return rho


def _propagator(h_eig, dt: float) -> np.ndarray:
    basis = h_eig.basis
    phases = np.exp(-1j * h_eig.energies * dt)
    return (basis * phases) @ basis.conj().T


def projective_joint(h: Operator, q: Operator, rho0: np.ndarray,
                     t1: float, t2: float) -> JointDistribution:
    """Exact joint statistics of projective Q measurements at t1 then t2.

    The first measurement collapses the state onto the outcome eigenspace;
    the collapsed state evolves to t2 and is measured again:

        p(a, b) = Tr[ P_b U P_a U_1 rho U_1^+ P_a U^+ ],   U = U(t2 - t1).
    """
    if h.dim != q.dim:
        raise ValueError(f"H has dimension {h.dim} but Q has dimension {q.dim}")
    t1, t2 = float(t1), float(t2)
    if t2 < t1:
        raise ValueError(f"measurement times must be ordered, got t1={t1} > t2={t2}")
    rho = _as_density_matrix(rho0, h.dim)

    h_eig = hermitian_eig(h)
    q_eig = hermitian_eig(q)
    outcomes, members = cluster_eigenvalues(q_eig.energies)
    projectors = [q_eig.basis[:, idx] @ q_eig.basis[:, idx].conj().T
                  for idx in members]

    rho_t1 = _propagator(h_eig, t1) @ rho @ _propagator(h_eig, -t1)
    u_gap = _propagator(h_eig, t2 - t1)

    probs = np.empty((len(outcomes), len(outcomes)))
    for a, p_a in enumerate(projectors):
        collapsed = u_gap @ (p_a @ rho_t1 @ p_a) @ u_gap.conj().T
        for b, p_b in enumerate(projectors):
            probs[a, b] = np.trace(p_b @ collapsed).real
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1.0) > 1e-10:
        raise InvariantViolation(
            f"projective joint probabilities sum to {total!r}, expected 1"
        )
    return JointDistribution(outcomes_first=outcomes, outcomes_second=outcomes,
                             probs=probs, times=(t1, t2))


def projective_mc(h: Operator, q: Operator, rho0: np.ndarray,
                  t1: float, t2: float, shots: int, seed: int) -> ProtocolEstimate:
    """Monte Carlo estimate of the projective two-time correlator.

    Sampling uses a counter-based generator keyed by ``seed``: each shot
    consumes a fixed amount of counter stream, so the estimate is bitwise
    reproducible for the same seed regardless of how the draw is batched.
    The returned standard error uses the unbiased sample variance.
    """
    if not isinstance(shots, (int, np.integer)) or isinstance(shots, bool):
        raise ValueError(f"shots must be an integer, got {shots!r}")
    shots = int(shots)
    if shots < 1:
        raise ValueError(f"shots must be at least 1, got {shots}")
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ValueError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed < _MAX_SEED:
        raise ValueError(f"seed must be in [0, 2^64), got {seed}")

    joint = projective_joint(h, q, rho0, t1, t2)
    flat_probs = joint.probs.ravel()
    flat_products = np.outer(joint.outcomes_first, joint.outcomes_second).ravel()
    cdf = np.cumsum(flat_probs)
    cdf[-1] = 1.0

    rng = np.random.Generator(np.random.Philox(key=seed))
    draws = rng.random(shots)
    samples = flat_products[np.searchsorted(cdf, draws, side="right")]

    value = float(samples.mean())
    stderr = float(samples.std(ddof=1) / math.sqrt(shots)) if shots > 1 else 0.0
    return ProtocolEstimate(value=value, stderr=stderr, shots=shots,
                            exact_ref=joint.correlator(), seed=seed,
                            times=(float(t1), float(t2)))


def symmetrized_correlator(h: Operator, q: Operator, rho0: np.ndarray,
                           t1: float, t2: float) -> float:
    """Symmetrized correlator (1/2) Tr[rho {Q(t1), Q(t2)}] for any state."""
    if h.dim != q.dim:
        raise ValueError(f"H has dimension {h.dim} but Q has dimension {q.dim}")
    rho = _as_density_matrix(rho0, h.dim)
    h_eig = hermitian_eig(h)

    def heisenberg(t: float) -> np.ndarray:
        u = _propagator(h_eig, t)
        return u.conj().T @ q.matrix @ u

    q1 = heisenberg(float(t1))
    q2 = heisenberg(float(t2))
    return float(0.5 * np.trace(rho @ (q1 @ q2 + q2 @ q1)).real)


def weak_two_meter(h: Operator, q: Operator, rho0: np.ndarray, tau: float,
                   cfg: MeterConfig) -> ProtocolEstimate:
    """Closed-form weak two-meter correlator estimate at times (0, tau).

    Both readouts couple Q to the position of a Gaussian meter of spread
    ``cfg.width``; the rescaled product of pointer readings has expectation

        C~ = Re sum_{nm} Q(tau)_nm rho_mn (q_n + q_m)/2
             * exp[-lam^2 (q_n - q_m)^2 DX^2 / 2]

    in the Q eigenbasis.  The Gaussian factor encodes the measurement
    back-action; it disappears for dichotomic observables, where the weak
    scheme reproduces the symmetrized correlator at any meter strength.
    """
    if h.dim != q.dim:
        raise ValueError(f"H has dimension {h.dim} but Q has dimension {q.dim}")
    tau = float(tau)
    rho = _as_density_matrix(rho0, h.dim)
    h_eig = hermitian_eig(h)
    q_eig = hermitian_eig(q)

    w = q_eig.basis
    qvals = q_eig.energies
    u = _propagator(h_eig, tau)
    q_tau_w = w.conj().T @ (u.conj().T @ q.matrix @ u) @ w
    rho_w = w.conj().T @ rho @ w

    half_sum = 0.5 * (qvals[:, None] + qvals[None, :])
    gap = qvals[:, None] - qvals[None, :]
    damping = np.exp(-0.5 * (cfg.coupling * cfg.width * gap) ** 2)

    value_c = np.sum(q_tau_w * rho_w.T * half_sum * damping)
    if abs(value_c.imag) > 1e-10:
        raise InvariantViolation(
            f"weak-meter correlator has imaginary part {value_c.imag!r}"
        )
    exact = symmetrized_correlator(h, q, rho0, 0.0, tau)
    return ProtocolEstimate(value=float(value_c.real), stderr=0.0, shots=0,
                            exact_ref=exact, seed=None, times=(0.0, tau))


def lgi_from_protocol(e12: ProtocolEstimate, e23: ProtocolEstimate,
                      e13: ProtocolEstimate) -> ProtocolEstimate:
    """Combine three pair estimates into K = C12 + C23 - C13.

    The three estimates must come from equally spaced times: t2 - t1 and
    t3 - t2 equal within 1e-12, and the (1,3) pair spanning their sum.
    Standard errors combine in quadrature (independent runs assumed).
    """
    gap12 = e12.times[1] - e12.times[0]
    gap23 = e23.times[1] - e23.times[0]
    gap13 = e13.times[1] - e13.times[0]
    if abs(gap12 - gap23) > 1e-12:
        raise ValueError(
            f"time spacings differ: t2-t1 = {gap12!r}, t3-t2 = {gap23!r}"
        )
    if abs(gap13 - (gap12 + gap23)) > 1e-12:
        raise ValueError(
            f"outer spacing {gap13!r} is not the sum of the inner spacings"
        )
    value = e12.value + e23.value - e13.value
    stderr = math.sqrt(e12.stderr**2 + e23.stderr**2 + e13.stderr**2)
    exact = e12.exact_ref + e23.exact_ref - e13.exact_ref
    shots = e12.shots + e23.shots + e13.shots
    seed = e12.seed if (e12.seed == e23.seed == e13.seed) else None
    return ProtocolEstimate(value=value, stderr=stderr, shots=shots,
                            exact_ref=exact, seed=seed,
                            times=(e12.times[0], e13.times[1]))


def macrorealist_oracle(probs: np.ndarray, outcomes1: np.ndarray,
                        outcomes2: np.ndarray, outcomes3: np.ndarray):
    """Evaluate K for an explicit three-time joint probability table.

    ``probs[a, b, c]`` is the probability of outcomes
    (outcomes1[a], outcomes2[b], outcomes3[c]); all outcome magnitudes must
    be at most 1.  Returns (K, satisfied) where ``satisfied`` certifies
    K <= 1 within 1e-12 — guaranteed for any valid table, which is the
    defining property of macrorealist statistics.
    """
    probs = np.asarray(probs, dtype=float)
    q1 = np.asarray(outcomes1, dtype=float)
    q2 = np.asarray(outcomes2, dtype=float)
    q3 = np.asarray(outcomes3, dtype=float)
    if probs.shape != (q1.size, q2.size, q3.size):
        raise ValueError(
            f"probability table shape {probs.shape} does not match outcome "
            f"grid sizes ({q1.size}, {q2.size}, {q3.size})"
        )
    for name, q in (("first", q1), ("second", q2), ("third", q3)):
        if np.max(np.abs(q)) > 1.0 + 1e-12:
            raise ValueError(f"{name} outcome grid exceeds magnitude 1")
    if probs.min() < -1e-15:
        raise ValueError(f"negative probability {probs.min()!r} in table")
    total = probs.sum()
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"probability table sums to {total!r}, expected 1")

    c12 = float(np.einsum("abc,a,b->", probs, q1, q2))
    c23 = float(np.einsum("abc,b,c->", probs, q2, q3))
    c13 = float(np.einsum("abc,a,c->", probs, q1, q3))
    k_value = c12 + c23 - c13
    return k_value, bool(k_value <= 1.0 + 1e-12)


def noisy_readout_correlator(q0: np.ndarray, qtau: np.ndarray,
                             noise_variance: float, seed: int,
                             noise: tuple[np.ndarray, np.ndarray] | None = None
                             ) -> ProtocolEstimate:
    """Correlator of readout records m_i = q(t_i) + xi_i with additive noise.

    Independent zero-mean readout noise leaves the product correlator
    unbiased: E[m1 m2] = E[q(0) q(tau)].  ``noise`` may supply an explicit
    pair of noise records (overriding the generator) so correlated-noise
    bias can be demonstrated directly.
    """
    q0 = np.asarray(q0, dtype=float)
    qtau = np.asarray(qtau, dtype=float)
    if q0.shape != qtau.shape or q0.ndim != 1:
        raise ValueError("readout records must be 1-D arrays of equal length")
    if noise_variance < 0.0:
        raise ValueError(f"noise variance must be nonnegative, got {noise_variance}")
    shots = q0.size
    if shots < 2:
        raise ValueError(f"need at least 2 shots, got {shots}")
    if noise is None:
        rng = np.random.Generator(np.random.Philox(key=int(seed)))
        sigma = math.sqrt(noise_variance)
        xi1 = rng.normal(0.0, sigma, size=shots)
        xi2 = rng.normal(0.0, sigma, size=shots)
    else:
        xi1 = np.asarray(noise[0], dtype=float)
        xi2 = np.asarray(noise[1], dtype=float)
        if xi1.shape != q0.shape or xi2.shape != q0.shape:
            raise ValueError("explicit noise records must match the readout shape")
    products = (q0 + xi1) * (qtau + xi2)
    value = float(products.mean())
    stderr = float(products.std(ddof=1) / math.sqrt(shots))
    return ProtocolEstimate(value=value, stderr=stderr, shots=shots,
                            exact_ref=float(np.mean(q0 * qtau)), seed=int(seed),
                            times=(0.0, math.nan))
