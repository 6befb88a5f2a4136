"""Transition spectra, response-based QFI, sum rules, and the Holevo weight.

For a stationary state with weights p_n the two-point function of Q defines
a discrete transition spectrum: at each positive Bohr frequency
Delta = E_m - E_n (level n below m) the absorption weight and the
dissipative response weight are

    w_S(Delta)   = sum p_n |Q_nm|^2        (structure-factor line)
    w_chi(Delta) = -pi (p_n - p_m) |Q_nm|^2   (chi'' line, <= 0 thermally)

with diagonal and degenerate-pair contributions carried on a separate
zero-frequency line.  Everything downstream is a weighted sum over lines:

* QFI through the fluctuation-dissipation identity
  F_Q = -(4/pi) sum tanh(beta Delta / 2) w_chi(Delta), exact for thermal
  states;
* the f-sum upper bound F_Q <= -(2 beta / pi) sum Delta w_chi(Delta),
  which also equals the high-frequency tail beta lim omega^2 chi'(omega)
  by Kramers-Kronig (documented identity, single implementation);
* zero-temperature spectral moments M_n = -(1/pi) sum Delta^n w_chi and the
  gap bound M_n >= Delta_IR^(n-2) M_2;
* the Holevo weight H_QQ = sum w_S(Delta) * beta Delta / (e^(beta Delta)-1),
  bounded below by correlation data through the termwise factor gamma_H.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation
from .kernels import _golden_max, h_kernel
from .linalg import Operator
from .spectral import GROUND_WINDOW, SpectralData

__all__ = [
    "TransitionSpectrum",
    "HolevoBound",
    "build_spectrum",
    "qfi_response",
    "fsum_upper",
    "m2_moment",
    "m2_commutator",
    "mn_moment",
    "mn_gapped_lower",
    "holevo",
    "gamma_H",
    "holevo_bound",
    "export_spectrum",
]

#: Frequencies closer than this are merged into a single line.
LINE_MERGE_TOL = 1e-10

#: Weight floor below which a line does not count for the infrared gap.
LINE_WEIGHT_FLOOR = 1e-14


@dataclass(frozen=True)
class TransitionSpectrum:
    """Discrete transition lines of one (state, observable) instance.

    ``delta`` is ascending with ``delta[0] = 0`` holding the zero-frequency
    line (diagonal plus degenerate-pair weight; its w_chi is identically 0).
    ``thermal`` marks states with Gibbs weights (including the beta = inf
    ground-manifold limit when that manifold is nondegenerate); ``ground``
    marks states supported on the ground manifold.  ``delta_ir`` is the
    smallest positive line frequency carrying weight, or 0.0 if there is
    none.
    """

    delta: np.ndarray
    w_s: np.ndarray
    w_chi: np.ndarray
    beta: float | None
    thermal: bool
    ground: bool
    delta_ir: float

    @property
    def n_lines(self) -> int:
        return self.delta.shape[0]


def _frozen(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.float64, copy=True)
    out.setflags(write=False)
    return out


def build_spectrum(sd: SpectralData) -> TransitionSpectrum:
    """Aggregate a :class:`~lgqfi.spectral.SpectralData` into transition lines.

    Per unordered level pair (n below m) with Delta = E_m - E_n above the
    merge tolerance, the positive-frequency line collects w_S = p_n |Q_nm|^2
    and w_chi = -pi (p_n - p_m) |Q_nm|^2; lines within 1e-10 in Delta are
    merged.  Diagonal terms and both orderings of numerically degenerate
    pairs are carried on the zero-frequency line.
    """
    energies = sd.energies
    p = sd.state.weights
    abs_sq = np.abs(sd.elements) ** 2
    dim = energies.shape[0]

    w_s_zero = float(np.sum(p * np.diag(abs_sq)))
    i_idx, j_idx = np.triu_indices(dim, k=1)
    deltas = energies[j_idx] - energies[i_idx]
    pair_sq = abs_sq[i_idx, j_idx]
    zero_mask = deltas <= LINE_MERGE_TOL
    w_s_zero += float(np.sum((p[i_idx] + p[j_idx])[zero_mask] * pair_sq[zero_mask]))

    pos = ~zero_mask
    pos_delta = deltas[pos]
    pos_ws = p[i_idx][pos] * pair_sq[pos]
    pos_wchi = -math.pi * (p[i_idx][pos] - p[j_idx][pos]) * pair_sq[pos]

    order = np.argsort(pos_delta, kind="stable")
    pos_delta = pos_delta[order]
    pos_ws = pos_ws[order]
    pos_wchi = pos_wchi[order]

    merged_delta: list[float] = [0.0]
    merged_ws: list[float] = [w_s_zero]
    merged_wchi: list[float] = [0.0]
    start = 0
    n_pos = pos_delta.shape[0]
    while start < n_pos:
        stop = start + 1
        while stop < n_pos and pos_delta[stop] - pos_delta[stop - 1] <= LINE_MERGE_TOL:
            stop += 1
        merged_delta.append(float(np.mean(pos_delta[start:stop])))
        merged_ws.append(float(np.sum(pos_ws[start:stop])))
        merged_wchi.append(float(np.sum(pos_wchi[start:stop])))
        start = stop

    state = sd.state
    if state.kind == "thermal":
        beta = state.beta
        thermal = True
        ground = math.isinf(beta)
    else:
        manifold = energies - energies[0] <= GROUND_WINDOW
        ground = bool(manifold[state.index])
        thermal = ground and int(np.count_nonzero(manifold)) == 1
        beta = math.inf if thermal else None

    delta_ir = 0.0
    for k in range(1, len(merged_delta)):
        if max(merged_ws[k], abs(merged_wchi[k]) / math.pi) > LINE_WEIGHT_FLOOR:
            delta_ir = merged_delta[k]
            break

    return TransitionSpectrum(
        delta=_frozen(np.array(merged_delta)),
        w_s=_frozen(np.array(merged_ws)),
        w_chi=_frozen(np.array(merged_wchi)),
        beta=beta,
        thermal=thermal,
        ground=ground,
        delta_ir=delta_ir,
    )


def _require_thermal(ts: TransitionSpectrum, what: str) -> float:
    if not ts.thermal or ts.beta is None:
        raise ValueError(
            f"{what} requires Gibbs weights; this spectrum was built from a "
            "non-thermal stationary state"
        )
    return ts.beta


def qfi_response(ts: TransitionSpectrum) -> float:
    """QFI from the dissipative response:
    F_Q = -(4/pi) sum tanh(beta Delta / 2) w_chi(Delta).

    Exact for thermal states (beta = inf included); raises ``ValueError``
    for spectra built from non-thermal states, where the identity fails.
    """
    beta = _require_thermal(ts, "the response-based QFI")
    delta = ts.delta[1:]
    w_chi = ts.w_chi[1:]
    factor = np.ones_like(delta) if math.isinf(beta) else np.tanh(0.5 * beta * delta)
    return float(-(4.0 / math.pi) * np.sum(factor * w_chi))


def fsum_upper(ts: TransitionSpectrum) -> float:
    """f-sum upper bound on the QFI: -(2 beta / pi) sum Delta w_chi(Delta).

    Follows from tanh(z) <= z applied linewise, so it always dominates
    :func:`qfi_response`.  Equal to the high-frequency response tail
    beta lim omega^2 chi'(omega) by Kramers-Kronig.  Diverges (returns inf)
    at beta = inf.
    """
    beta = _require_thermal(ts, "the f-sum bound")
    if math.isinf(beta):
        return math.inf
    return float(-(2.0 * beta / math.pi) * np.sum(ts.delta[1:] * ts.w_chi[1:]))


def _require_ground(ts: TransitionSpectrum, what: str) -> None:
    if not ts.ground:
        raise ValueError(
            f"{what} is a zero-temperature quantity; build the spectrum from a "
            "ground-manifold state"
        )


def m2_moment(ts: TransitionSpectrum) -> float:
    """Second spectral moment M_2 = -(1/pi) sum Delta^2 w_chi at T = 0.

    Equals the commutator expectation <[H, Q]^dag [H, Q]> in the ground
    state (see :func:`m2_commutator` for the independent evaluation).
    """
    _require_ground(ts, "M_2")
    return float(-(1.0 / math.pi) * np.sum(ts.delta[1:] ** 2 * ts.w_chi[1:]))


def m2_commutator(h_op: Operator, q_op: Operator, state: np.ndarray) -> float:
    """M_2 evaluated directly as <[H, Q]^dag [H, Q]> in the original basis.

    ``state`` may be a normalized vector or a density matrix supported on
    the ground manifold.  This path never touches the eigendecomposition,
    so it cross-checks the spectral sum in :func:`m2_moment`.
    """
    if h_op.dim != q_op.dim:
        raise ValueError(
            f"dimension mismatch: H is dim {h_op.dim}, Q is dim {q_op.dim}"
        )
    comm = h_op.matrix @ q_op.matrix - q_op.matrix @ h_op.matrix
    state = np.asarray(state, dtype=np.complex128)
    if state.ndim == 1:
        if state.shape[0] != h_op.dim:
            raise ValueError(
                f"dimension mismatch: state has dim {state.shape[0]}, H is dim {h_op.dim}"
            )
        image = comm @ state
        return float(np.real(np.vdot(image, image)))
    if state.shape != (h_op.dim, h_op.dim):
        raise ValueError(
            f"state must be a vector or a dim-{h_op.dim} density matrix, "
            f"got shape {state.shape}"
        )
    return float(np.real(np.trace(state @ comm.conj().T @ comm)))


def mn_moment(ts: TransitionSpectrum, order: int) -> float:
    """n-th spectral moment M_n = -(1/pi) sum Delta^n w_chi at T = 0.

    Requires integer order >= 2; order 2 reproduces :func:`m2_moment`.
    """
    if not isinstance(order, (int, np.integer)) or isinstance(order, bool):
        raise ValueError(f"moment order must be an integer, got {order!r}")
    if order < 2:
        raise ValueError(f"moment order must be at least 2, got {order}")
    _require_ground(ts, f"M_{order}")
    return float(-(1.0 / math.pi) * np.sum(ts.delta[1:] ** order * ts.w_chi[1:]))


def mn_gapped_lower(ts: TransitionSpectrum, order: int) -> float | None:
    """Gap lower bound Delta_IR^(n-2) M_2 on M_n, or None when gapless.

    The bound applies only when the spectrum has an infrared gap
    (delta_ir > 0); gapless instances return None so callers can skip the
    comparison explicitly.
    """
    if ts.delta_ir <= LINE_MERGE_TOL:
        return None
    return float(ts.delta_ir ** (order - 2) * m2_moment(ts))


def holevo(ts: TransitionSpectrum, include_zero: bool = True) -> float:
    """Holevo spectral weight H_QQ = sum w_S(Delta) beta Delta / (e^(beta Delta) - 1).

    The thermal kernel weights each structure-factor line by the detailed
    balance factor; the zero-frequency line enters with kernel value 1 and
    is included by default (``include_zero=False`` drops it, which matters
    for observables with diagonal weight).  At beta = inf every positive
    line is exponentially suppressed to zero.
    """
    beta = _require_thermal(ts, "the Holevo weight")
    delta = ts.delta[1:]
    if math.isinf(beta):
        total = 0.0
    else:
        with np.errstate(over="ignore"):
            kernel = np.where(delta > 0.0, beta * delta / np.expm1(beta * delta), 1.0)
        total = float(np.sum(ts.w_s[1:] * kernel))
    if include_zero:
        total += float(ts.w_s[0])
    return total


def gamma_H(beta: float, tau: float, omega_star: float) -> float:
    """Termwise conversion factor between correlation data and H_QQ.

    gamma_H = max over omega in (0, omega_star] of
    (1 + e^(-beta omega)) * max(h(omega tau), 0) * (e^(beta omega) - 1) / (beta omega),
    built so that each line satisfies
    (p_n + p_m) |Q_nm|^2 h(Delta tau) <= gamma_H * w_S(Delta) * kernel(Delta)
    for Gibbs weights, giving H_QQ >= [K(tau) - <Q^2>] / gamma_H whenever
    the spectrum lies below omega_star.
    """
    beta = float(beta)
    tau = float(tau)
    omega_star = float(omega_star)
    if not (beta > 0.0 and math.isfinite(beta)):
        raise ValueError(f"beta must be positive and finite, got {beta}")
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    if not omega_star > 0.0:
        raise ValueError(f"omega_star must be positive, got {omega_star}")

    def phi(omega):
        omega = np.asarray(omega, dtype=np.float64)
        z = beta * omega
        h_pos = np.maximum(h_kernel(omega * tau), 0.0)
        with np.errstate(over="ignore", invalid="ignore"):
            out = (1.0 + np.exp(-z)) * h_pos * np.expm1(z) / z
        return out if out.ndim else float(out)

    omegas = np.linspace(0.0, omega_star, 100_001)[1:]
    values = np.asarray(phi(omegas), dtype=np.float64)
    best = int(np.argmax(values))
    lo = omegas[best - 1] if best > 0 else 0.5 * omegas[0]
    hi = omegas[best + 1] if best + 1 < omegas.shape[0] else omega_star
    _, refined = _golden_max(lambda w: float(phi(np.float64(w))), lo, hi)
    return max(float(values[best]), refined, 0.0)


@dataclass(frozen=True)
class HolevoBound:
    """Outcome of the correlation-based lower bound on the Holevo weight."""

    applicable: bool
    gamma_h: float
    lower: float


def holevo_bound(ts: TransitionSpectrum, tau: float, omega_star: float,
                 k_value: float, q2: float) -> HolevoBound:
    """Correlation lower bound H_QQ >= [K(tau) - <Q^2>] / gamma_H.

    The construction covers the spectrum only up to ``omega_star``; when a
    line lies above it the bound is reported inapplicable rather than
    evaluated.
    """
    beta = _require_thermal(ts, "the Holevo bound")
    if math.isinf(beta):
        raise ValueError("the Holevo bound requires a finite inverse temperature")
    top = float(ts.delta[-1]) if ts.n_lines > 1 else 0.0
    if omega_star < top - 1e-12:
        return HolevoBound(applicable=False, gamma_h=math.nan, lower=math.nan)
    g = gamma_H(beta, tau, omega_star)
    if g <= 0.0:
        # every pair kernel is non-positive, so K - <Q^2> <= 0 and any
        # nonnegative H_QQ satisfies the bound trivially
        return HolevoBound(applicable=True, gamma_h=g, lower=0.0)
    return HolevoBound(applicable=True, gamma_h=g, lower=(k_value - q2) / g)


def export_spectrum(ts: TransitionSpectrum, path: str) -> None:
    """Write the transition lines to ``path`` as CSV (delta, w_S, w_chi)."""
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        stream.write("delta,w_S,w_chi\n")
        for k in range(ts.n_lines):
            stream.write(
                f"{ts.delta[k]:.17g},{ts.w_s[k]:.17g},{ts.w_chi[k]:.17g}\n"
            )
