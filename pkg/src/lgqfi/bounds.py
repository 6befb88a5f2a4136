"""Certified lower bounds on quantum Fisher information from temporal data.

Each bound converts measured correlation combinations into a device-relevant
lower bound on F_Q through a kernel maximum from :mod:`lgqfi.kernels`:

    pure eigenstate:   F_Q >= 8 [K(tau) - <Q^2>]
    thermal state:     F_Q >= [K(tau) - <Q^2>] / gamma(2 tau / beta)
    weak variant:      F_Q >= [K(tau) - 1] / gamma(2 tau / beta)   (<Q^2> <= 1)
    thermal time:      F_Q >= 7 [K(z tau_th) - <Q^2>] / (2 z^2),  z >= 1,
                       with tau_th = sqrt(2/7) beta
    p-time family:     F_Q >= [K_p(tau) - (p-2) <Q^2>] / gamma_p(p, 2 tau / beta)
    two-time:          F_Q >= [<Q^2> - C(tau)] / gamma_tilde(2 tau / beta)

For pure stationary states the same formulas hold with the zero-temperature
kernel limits (gamma -> 1/8, gamma_tilde -> 1/2, gamma_p -> h_p^max / 4).
Negative bound values are uninformative, never wrong; reports clamp them to
zero and flag the family.  A violated bound (lower above the actual F_Q
beyond tolerance) raises :class:`~lgqfi.errors.InvariantViolation`, since it
signals an implementation bug, not a physics outcome.

The module also hosts the entanglement-depth witness based on the
k-producibility ceiling of the rescaled collective generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import InvariantViolation
from .kernels import (
    gamma,
    gamma_p,
    gamma_p_zero_temperature,
    gamma_tilde,
    gamma_tilde_zero_temperature,
    gamma_zero_temperature,
)
from .response import build_spectrum, fsum_upper
from .spectral import SpectralData, correlator, lgi_K, lgi_Kp, qfi

__all__ = [
    "BoundReport",
    "BestBound",
    "thermal_time",
    "bound_pure",
    "bound_thermal",
    "bound_thermal_weak",
    "bound_thermal_time",
    "bound_two_time",
    "bound_Kp",
    "depth_witness",
    "build_report",
    "best_bound",
]

#: Slack allowed before declaring a bound violated (implementation bug).
THEOREM_TOL = 1e-9


def _check_tau(tau: float) -> float:
    tau = float(tau)
    if not tau > 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    return tau


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not beta > 0.0:
        raise ValueError(f"beta must be in (0, inf], got {beta}")
    return beta


def _gamma_at(tau: float, beta: float) -> float:
    if math.isinf(beta):
        return gamma_zero_temperature()
    return gamma(2.0 * tau / beta).value


def thermal_time(beta: float) -> float:
    """Thermal time scale tau_th = sqrt(2/7) beta (finite beta only)."""
    beta = _check_beta(beta)
    if math.isinf(beta):
        raise ValueError("the thermal time is defined for finite beta only")
    return math.sqrt(2.0 / 7.0) * beta


def bound_pure(k_value: float, q2: float) -> float:
    """Pure-eigenstate bound F_Q >= 8 [K(tau) - <Q^2>]."""
    return 8.0 * (float(k_value) - float(q2))


def bound_thermal(k_value: float, q2: float, tau: float, beta: float) -> float:
    """Thermal bound F_Q >= [K(tau) - <Q^2>] / gamma(2 tau / beta).

    beta = inf uses the zero-temperature kernel limit 1/8 and reduces to the
    pure-eigenstate bound.
    """
    tau = _check_tau(tau)
    beta = _check_beta(beta)
    return (float(k_value) - float(q2)) / _gamma_at(tau, beta)


def bound_thermal_weak(k_value: float, tau: float, beta: float) -> float:
    """Observable-independent variant F_Q >= [K(tau) - 1] / gamma(2 tau / beta).

    Valid when <Q^2> <= 1 (guaranteed for unit-norm observables); never
    stronger than :func:`bound_thermal` in that regime.
    """
    tau = _check_tau(tau)
    beta = _check_beta(beta)
    return (float(k_value) - 1.0) / _gamma_at(tau, beta)


def bound_thermal_time(k_value: float, q2: float, z: float, beta: float) -> float:
    """Thermal bound in thermal-time units: F_Q >= 7 [K(z tau_th) - <Q^2>] / (2 z^2).

    ``k_value`` must be evaluated at tau = z * tau_th with z >= 1, where the
    kernel maximum is in closed form: gamma(2 z tau_th / beta) = 2 z^2 / 7.
    """
    z = float(z)
    if z < 1.0:
        raise ValueError(f"the thermal-time form requires z >= 1, got {z}")
    _check_beta(beta)
    return 7.0 * (float(k_value) - float(q2)) / (2.0 * z * z)


def bound_two_time(q2: float, c_tau: float, tau: float, beta: float) -> float:
    """Two-time bound F_Q >= [<Q^2> - C(tau)] / gamma_tilde(2 tau / beta).

    The numerator is nonnegative for any stationary state, so this bound is
    never negative (up to rounding).  beta = inf uses the zero-temperature
    limit gamma_tilde -> 1/2.
    """
    tau = _check_tau(tau)
    beta = _check_beta(beta)
    divisor = (gamma_tilde_zero_temperature() if math.isinf(beta)
               else gamma_tilde(2.0 * tau / beta).value)
    return (float(q2) - float(c_tau)) / divisor


def bound_Kp(kp_value: float, q2: float, p: int, tau: float, beta: float) -> float:
    """p-time bound F_Q >= [K_p(tau) - (p-2) <Q^2>] / gamma_p(p, 2 tau / beta).

    p = 3 coincides bitwise with :func:`bound_thermal` because gamma_p
    delegates to gamma there.  At fixed tau and beta the bound decays like
    1/p^2, so small p carry the information.
    """
    tau = _check_tau(tau)
    beta = _check_beta(beta)
    divisor = (gamma_p_zero_temperature(p) if math.isinf(beta)
               else gamma_p(p, 2.0 * tau / beta).value)
    return (float(kp_value) - (p - 2) * float(q2)) / divisor


def depth_witness(f_q_tilde: float, n: int) -> int | None:
    """Entanglement depth certified by the rescaled collective QFI.

    A k-producible N-qubit state satisfies F_Q[Q_tilde] <= s k^2 + r^2 with
    s = floor(N/k) and r = N - s k.  The witness returns the certified depth
    k + 1 for the largest k in [1, N-1] whose ceiling is exceeded, or None
    when no product structure is excluded (F_Q[Q_tilde] <= N).
    """
    if not isinstance(n, (int, float)) or isinstance(n, bool):
        raise ValueError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    f_q_tilde = float(f_q_tilde)
    if f_q_tilde < 0.0:
        raise ValueError(f"F_Q must be nonnegative, got {f_q_tilde}")
    for k in range(n - 1, 0, -1):
        s, r = divmod(n, k)
        if f_q_tilde > s * k * k + r * r:
            return k + 1
    return None


@dataclass(frozen=True)
class BoundReport:
    """All bound families evaluated for one (instance, tau) point.

    Lower bounds are clamped to zero; families whose raw value was negative
    are listed in ``uninformative`` and their raw values kept in
    ``raw_lower`` for debugging.  ``slack`` holds F_Q minus each raw lower
    (and f-sum minus F_Q under the key 'fsum'); every entry is nonnegative
    up to the theorem tolerance by construction.  Bounds that do not apply
    to the state kind (the pure bound for finite-temperature states, the
    weak variant when <Q^2> > 1, the f-sum at infinite beta) are None.
    """

    tau: float
    beta: float | None
    tau_th: float | None
    q2_expect: float
    c_tau: float
    c_2tau: float
    k_tau: float
    kp_values: Mapping[int, float]
    f_q: float
    lower_pure: float | None
    lower_thermal: float
    lower_thermal_weak: float | None
    lower_two_time: float
    lower_kp: Mapping[int, float]
    fsum: float | None
    slack: Mapping[str, float]
    raw_lower: Mapping[str, float]
    uninformative: tuple[str, ...]
    depth: int | None


def build_report(sd: SpectralData, tau: float, *, kp: Sequence[int] = (3, 4, 5),
                 include_fsum: bool = True,
                 collective_n: int | None = None) -> BoundReport:
    """Evaluate every applicable bound family at one tau and certify them.

    ``kp`` selects the p-time family members.  When ``collective_n`` is
    given the observable is taken to be the unit-norm collective
    magnetization of that many qubits, F_Q of the rescaled generator is
    obtained by exact quadratic scaling (N^2 F_Q / 4), and the
    entanglement-depth witness is evaluated.

    Raises :class:`~lgqfi.errors.InvariantViolation` when any computed lower
    bound exceeds F_Q beyond tolerance (or the f-sum falls below it); that
    is an implementation-bug signal, never a physics outcome.
    """
    tau = _check_tau(tau)
    state = sd.state
    pure_like = state.is_pure or (state.beta is not None and math.isinf(state.beta))
    beta = state.beta if state.kind == "thermal" else None
    kernel_beta = math.inf if pure_like else beta
    if kernel_beta is None:
        raise ValueError("cannot build a report for a state with no defined beta")

    q2 = sd.q2_expect
    c_tau = float(correlator(sd, tau))
    c_2tau = float(correlator(sd, 2.0 * tau))
    k_tau = lgi_K(sd, tau)
    kp_vals = {int(p): lgi_Kp(sd, int(p), tau) for p in kp}
    f_q = qfi(sd)

    raw: dict[str, float] = {}
    if pure_like:
        raw["pure"] = bound_pure(k_tau, q2)
    raw["thermal"] = bound_thermal(k_tau, q2, tau, kernel_beta)
    if q2 <= 1.0 + 1e-9:
        raw["thermal_weak"] = bound_thermal_weak(k_tau, tau, kernel_beta)
    raw["two_time"] = bound_two_time(q2, c_tau, tau, kernel_beta)
    for p, kp_val in kp_vals.items():
        raw[f"kp_{p}"] = bound_Kp(kp_val, q2, p, tau, kernel_beta)

    for name, value in raw.items():
        if value > f_q + THEOREM_TOL:
            raise InvariantViolation(
                f"lower bound '{name}' = {value!r} exceeds F_Q = {f_q!r} "
                f"at tau = {tau}: implementation bug"
            )

    fsum = None
    if include_fsum and state.kind == "thermal" and not math.isinf(state.beta):
        fsum = fsum_upper(build_spectrum(sd))
        if fsum < f_q - THEOREM_TOL:
            raise InvariantViolation(
                f"f-sum upper bound {fsum!r} fell below F_Q = {f_q!r}: "
                "implementation bug"
            )

    slack = {name: f_q - value for name, value in raw.items()}
    if fsum is not None:
        slack["fsum"] = fsum - f_q
    uninformative = tuple(sorted(name for name, value in raw.items() if value < 0.0))
    clamped = {name: max(value, 0.0) for name, value in raw.items()}

    depth = None
    if collective_n is not None:
        f_tilde = collective_n * collective_n * f_q / 4.0
        depth = depth_witness(f_tilde, collective_n)

    return BoundReport(
        tau=tau,
        beta=beta,
        tau_th=(thermal_time(beta) if beta is not None and not math.isinf(beta)
                else None),
        q2_expect=q2,
        c_tau=c_tau,
        c_2tau=c_2tau,
        k_tau=k_tau,
        kp_values=kp_vals,
        f_q=f_q,
        lower_pure=clamped.get("pure"),
        lower_thermal=clamped["thermal"],
        lower_thermal_weak=clamped.get("thermal_weak"),
        lower_two_time=clamped["two_time"],
        lower_kp={p: clamped[f"kp_{p}"] for p in kp_vals},
        fsum=fsum,
        slack=slack,
        raw_lower=raw,
        uninformative=uninformative,
        depth=depth,
    )


@dataclass(frozen=True)
class BestBound:
    """Best certified lower bound over a tau grid, with all per-tau reports."""

    value: float
    tau: float
    reports: tuple[BoundReport, ...]


def _report_score(report: BoundReport) -> float:
    candidates = [report.lower_thermal, report.lower_two_time]
    if report.lower_pure is not None:
        candidates.append(report.lower_pure)
    if report.lower_thermal_weak is not None:
        candidates.append(report.lower_thermal_weak)
    candidates.extend(report.lower_kp.values())
    return max(candidates)


def best_bound(sd: SpectralData, tau_grid: Sequence[float], *,
               kp: Sequence[int] = (3, 4, 5), include_fsum: bool = True,
               collective_n: int | None = None) -> BestBound:
    """Scan a tau grid and return the strongest certified lower bound.

    The score of each grid point is the largest clamped lower bound among
    the evaluated families.  Ties resolve to the earliest tau in grid
    order, so the result is deterministic for a fixed grid.
    """
    taus = [float(t) for t in tau_grid]
    if not taus:
        raise ValueError("tau_grid must contain at least one time")
    reports = tuple(
        build_report(sd, t, kp=kp, include_fsum=include_fsum,
                     collective_n=collective_n)
        for t in taus
    )
    best_value = -math.inf
    best_tau = taus[0]
    for report in reports:
        score = _report_score(report)
        if score > best_value:
            best_value = score
            best_tau = report.tau
    return BestBound(value=best_value, tau=best_tau, reports=reports)
