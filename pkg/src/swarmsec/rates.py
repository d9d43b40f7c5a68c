"""Secrecy-throughput evaluation: closed form via a log-domain fixed point, and
Monte Carlo reference estimators over the small-scale fading.

The closed form rests on a deterministic equivalent of the ergodic log-det
rate: each of the four receiver/power combinations contributes a ``rate_term``
evaluated at the minimizer of a scalar auxiliary variable, and that minimizer
is the unique root of a monotone fixed-point residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import sample_small_scale
from .errors import NumericalError
from .scenario import PowerSchedule, Scenario

LOG2E = math.log2(math.e)

#: residual magnitude the fixed-point solver must reach (and is verified against)
FIXED_POINT_TOL = 1e-12


@dataclass(frozen=True)
class AuxVariables:
    """Per-slot auxiliary minimizers for the four rate terms.

    Field naming is (receiver, power matrix): ``bob_total`` is the aux value
    for the scheduled user's rate under total power, ``bob_an`` under the
    artificial-noise power alone, and likewise ``eve_total`` / ``eve_an`` for
    the eavesdropper. Each is a length-N vector.
    """

    bob_total: np.ndarray
    bob_an: np.ndarray
    eve_total: np.ndarray
    eve_an: np.ndarray

    def __post_init__(self):
        for name in ("bob_total", "bob_an", "eve_total", "eve_an"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.ndim != 1 or np.any(v < 0.0) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be a 1-D vector of nonnegative finite values")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class RateEstimate:
    """Monte Carlo estimate: sample mean, standard error, and sample count."""

    mean: float
    std_error: float
    samples: int


def _check_term_inputs(p, losses, noise) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=float)
    losses = np.asarray(losses, dtype=float)
    if p.shape != losses.shape or p.ndim != 1:
        raise ValueError("powers and losses must be 1-D vectors of equal length")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0):
        raise ValueError("powers must be nonnegative and finite")
    if not np.all(np.isfinite(losses)) or np.any(losses <= 0.0):
        raise ValueError("losses must be positive and finite")
    if not (np.isfinite(noise) and noise > 0.0):
        raise ValueError(f"noise power must be positive, got {noise}")
    return p, losses


def rate_term(p, n_antennas: int, losses, aux: float, noise: float) -> float:
    """Deterministic-equivalent rate term at auxiliary value ``aux`` (bits/s/Hz).

    Sum of per-transmitter log terms with the SNR damped by e^aux, plus the
    convex penalty n_antennas*log2(e)*(aux - 1 + e^-aux). Minimizing over
    aux >= 0 approximates the ergodic MIMO log-det rate.
    """
    p, losses = _check_term_inputs(p, losses, noise)
    if not (np.isfinite(aux) and aux >= 0.0):
        raise ValueError(f"aux must be nonnegative and finite, got {aux}")
    snr = n_antennas * p / (losses * noise * math.exp(aux))
    logsum = float(np.sum(np.log1p(snr))) * LOG2E
    return logsum + n_antennas * LOG2E * (aux - 1.0 + math.exp(-aux))


def fixed_point_residual(p, n_antennas: int, losses, aux: float, noise: float) -> float:
    """Stationarity residual of ``rate_term`` in aux; positive left of the root.

    Strictly decreasing in aux, nonnegative at aux = 0, with a unique root at
    the minimizer. Equals the relative residual of the equivalent fixed-point
    equation in w = e^aux.
    """
    p, losses = _check_term_inputs(p, losses, noise)
    x = p / losses
    damp = math.exp(-aux)
    s = float(np.sum(x * damp / (noise + n_antennas * x * damp)))
    return s - 1.0 + damp


def _residual_slope(x: np.ndarray, n_antennas: int, aux: float, noise: float) -> float:
    damp = math.exp(-aux)
    den = noise + n_antennas * x * damp
    return float(-np.sum(noise * x * damp / (den * den)) - damp)


def solve_fixed_point(p, n_antennas: int, losses, noise: float) -> float:
    """Minimizing auxiliary value for ``rate_term``: root of the residual.

    Brackets the root by doubling, bisects, then polishes with a few Newton
    steps. Guarantees |residual| <= 1e-12 at the returned value (raises
    NumericalError otherwise); equivalently the w = e^aux fixed-point equation
    holds to 1e-12 relative. All-zero powers return exactly 0.
    """
    p, losses = _check_term_inputs(p, losses, noise)
    if not np.any(p > 0.0):
        return 0.0
    x = p / losses

    def resid(t: float) -> float:
        damp = math.exp(-t)
        return float(np.sum(x * damp / (noise + n_antennas * x * damp))) - 1.0 + damp

    if resid(0.0) <= 0.0:
        # residual at 0 is sum(x/(noise + n x)) >= 0; only vanishing powers land here
        return 0.0

    lo, hi = 0.0, 1.0
    while resid(hi) > 0.0:
        lo, hi = hi, hi * 2.0
        if hi > 1e6:
            raise NumericalError("failed to bracket the fixed point",
                                 {"hi": hi, "residual": resid(lo)})

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if resid(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * max(1.0, hi):
            break

    t = 0.5 * (lo + hi)
    s = resid(t)
    for _ in range(8):
        if abs(s) <= 1e-13:
            break
        slope = _residual_slope(x, n_antennas, t, noise)
        step = s / slope
        t_next = t - step
        if not (lo <= t_next <= hi):  # keep Newton inside the bisection bracket
            t_next = 0.5 * (lo + hi)
        t = t_next
        s = resid(t)
        if s > 0.0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)

    if abs(s) > FIXED_POINT_TOL:
        raise NumericalError("fixed-point residual above tolerance",
                             {"aux": t, "residual": s})
    return max(t, 0.0)


def _logdet2_quadratic(h: np.ndarray, p: np.ndarray, noise: float) -> np.ndarray:
    """log2 det(I + H diag(p) H^H / noise) for a batch of channels h: (M, Nq, L)."""
    nq = h.shape[1]
    a = np.einsum("mil,l,mkl->mik", h, p / noise, h.conj(), optimize=True)
    idx = np.arange(nq)
    a[:, idx, idx] += 1.0
    _, logabs = np.linalg.slogdet(a)
    return logabs * LOG2E


def ergodic_rate_mc(losses, p_num, p_den, noise: float, n_antennas: int,
                    samples: int, rng: np.random.Generator) -> RateEstimate:
    """Monte Carlo ergodic rate of a receiver treating ``p_den`` power as interference.

    Per fading draw the rate is
    log2 det(I + H P_num H^H (H P_den H^H + noise I)^-1), evaluated through the
    equivalent difference of two log-dets against the noise floor.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    p_num = np.asarray(p_num, dtype=float)
    p_den, losses = _check_term_inputs(p_den, losses, noise)
    if p_num.shape != p_den.shape or np.any(p_num < 0.0) or not np.all(np.isfinite(p_num)):
        raise ValueError("p_num must be a nonnegative vector matching p_den")

    s = sample_small_scale(rng, n_antennas, losses.size, samples)
    h = s / np.sqrt(losses)
    vals = (_logdet2_quadratic(h, p_num + p_den, noise)
            - _logdet2_quadratic(h, p_den, noise))
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    return RateEstimate(mean=mean, std_error=stderr, samples=samples)


def _check_pair(scenario: Scenario, schedule: PowerSchedule, tau) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    if schedule.shape != (scenario.n_uavs, scenario.n_slots):
        raise ValueError(f"schedule shape {schedule.shape} does not match the scenario "
                         f"({scenario.n_uavs} UAVs, {scenario.n_slots} slots)")
    if tau.shape != (scenario.n_slots,):
        raise ValueError(f"tau must have one entry per slot, got shape {tau.shape}")
    if np.any(tau < 0.0) or not np.all(np.isfinite(tau)):
        raise ValueError("durations must be nonnegative and finite")
    return tau


def secrecy_throughput_closed_form(scenario: Scenario, schedule: PowerSchedule,
                                   tau) -> tuple[float, AuxVariables, np.ndarray]:
    """Closed-form average secrecy throughput in bits/s/Hz.

    Solves the four per-slot fixed points, forms the per-slot secrecy rate
    (scheduled user's rate minus the eavesdropper's), and averages weighted by
    slot durations over the scheduling period. Returns the throughput, the
    auxiliary minimizers, and the per-slot secrecy rates before weighting.
    """
    tau = _check_pair(scenario, schedule, tau)
    nb, ne = scenario.bob_antennas, scenario.eve_antennas
    noise = scenario.noise_w
    n = scenario.n_slots

    bob_total = np.empty(n)
    bob_an = np.empty(n)
    eve_total = np.empty(n)
    eve_an = np.empty(n)
    per_slot = np.empty(n)
    for i in range(n):
        qb, qe = scenario.loss_bob[i], scenario.loss_eve[i]
        pu, pa = schedule.p_u[:, i], schedule.p_a[:, i]
        bob_total[i] = solve_fixed_point(pu, nb, qb, noise)
        bob_an[i] = solve_fixed_point(pa, nb, qb, noise)
        eve_total[i] = solve_fixed_point(pu, ne, qe, noise)
        eve_an[i] = solve_fixed_point(pa, ne, qe, noise)
        per_slot[i] = (rate_term(pu, nb, qb, bob_total[i], noise)
                       - rate_term(pa, nb, qb, bob_an[i], noise)
                       - rate_term(pu, ne, qe, eve_total[i], noise)
                       + rate_term(pa, ne, qe, eve_an[i], noise))

    aux = AuxVariables(bob_total, bob_an, eve_total, eve_an)
    value = float(np.dot(tau, per_slot) / scenario.budgets.t_period_s)
    return value, aux, per_slot


def secrecy_throughput_mc(scenario: Scenario, schedule: PowerSchedule, tau,
                          samples: int, rng: np.random.Generator,
                          clip: bool = False) -> RateEstimate:
    """Monte Carlo average secrecy throughput over independent per-slot fading.

    Per slot the scheduled user's ergodic rate (artificial noise as
    interference) minus the eavesdropper's is estimated from ``samples``
    draws; ``clip`` zeroes negative per-slot differences before duration
    weighting. Standard errors propagate through the weighted sum.
    """
    tau = _check_pair(scenario, schedule, tau)
    nb, ne = scenario.bob_antennas, scenario.eve_antennas
    noise = scenario.noise_w
    streams = rng.spawn(2 * scenario.n_slots)

    diffs = np.empty(scenario.n_slots)
    variances = np.empty(scenario.n_slots)
    for i in range(scenario.n_slots):
        pu, pa = schedule.p_u[:, i], schedule.p_a[:, i]
        ps = np.maximum(pu - pa, 0.0)
        bob = ergodic_rate_mc(scenario.loss_bob[i], ps, pa, noise, nb,
                              samples, streams[2 * i])
        eve = ergodic_rate_mc(scenario.loss_eve[i], ps, pa, noise, ne,
                              samples, streams[2 * i + 1])
        diffs[i] = bob.mean - eve.mean
        variances[i] = bob.std_error ** 2 + eve.std_error ** 2

    if clip:
        diffs = np.maximum(diffs, 0.0)
    period = scenario.budgets.t_period_s
    mean = float(np.dot(tau, diffs) / period)
    stderr = float(math.sqrt(np.dot(tau ** 2, variances)) / period)
    return RateEstimate(mean=mean, std_error=stderr, samples=samples)
