"""Benchmark scheme: fixed power split with null-space artificial noise.

The swarm spends a fixed fraction of its pooled power budget on the
confidential signal, spread uniformly over the scheduled user's channel row
space, and the rest on artificial noise spread uniformly over the channel's
null space, so the user hears no noise at all. Requires instantaneous channel
knowledge toward the user and more swarm members than user antennas.
"""

from __future__ import annotations

import math

import numpy as np

from ..channel import sample_small_scale
from ..rates import LOG2E, RateEstimate
from ..scenario import Scenario


def baseline_power_split(bob_antennas: int, eve_antennas: int) -> float:
    """Signal fraction of the pooled power budget: N_B / (N_B + N_E)."""
    if bob_antennas < 1 or eve_antennas < 1:
        raise ValueError("antenna counts must be positive")
    return bob_antennas / (bob_antennas + eve_antennas)


def _batch_logdet2(a: np.ndarray) -> np.ndarray:
    _, logabs = np.linalg.slogdet(a)
    return logabs * LOG2E


def baseline_null_space(scenario: Scenario, tau, samples: int,
                        rng: np.random.Generator,
                        signal_fraction: float | None = None) -> RateEstimate:
    """Monte Carlo throughput of the null-space artificial-noise benchmark.

    Per fading draw, signal power ``phi * L * p_max`` is split equally over
    the user channel's right-singular directions and noise power
    ``(1 - phi) * L * p_max`` equally over its null space. Negative per-slot
    secrecy rates are clipped to zero before duration weighting.
    """
    tau = np.asarray(tau, dtype=float)
    if tau.shape != (scenario.n_slots,):
        raise ValueError("tau must have one entry per slot")
    if samples < 2:
        raise ValueError("need at least two samples")
    n_uavs, nb, ne = scenario.n_uavs, scenario.bob_antennas, scenario.eve_antennas
    if n_uavs <= nb:
        raise ValueError("null-space noise needs more swarm members than user antennas")
    phi = baseline_power_split(nb, ne) if signal_fraction is None else float(signal_fraction)
    if not 0.0 <= phi <= 1.0:
        raise ValueError(f"signal fraction must lie in [0, 1], got {phi}")

    pooled = n_uavs * scenario.budgets.p_max_w
    c_sig = phi * pooled / nb
    c_an = (1.0 - phi) * pooled / (n_uavs - nb)
    noise = scenario.noise_w
    streams = rng.spawn(scenario.n_slots)

    diffs = np.empty(scenario.n_slots)
    variances = np.empty(scenario.n_slots)
    for n in range(scenario.n_slots):
        stream = streams[n]
        h_bob = sample_small_scale(stream, nb, n_uavs, samples) / np.sqrt(scenario.loss_bob[n])
        h_eve = sample_small_scale(stream, ne, n_uavs, samples) / np.sqrt(scenario.loss_eve[n])

        # row-space/null-space split of the user channel, one SVD per draw
        _, sv, vh = np.linalg.svd(h_bob, full_matrices=True)
        r_bob = np.sum(np.log1p(c_sig * sv ** 2 / noise), axis=1) * LOG2E

        row_mix = np.einsum("mel,mrl->mer", h_eve, vh[:, :nb, :].conj(), optimize=True)
        null_mix = np.einsum("mel,mrl->mer", h_eve, vh[:, nb:, :].conj(), optimize=True)
        sig_cov = c_sig * np.einsum("mer,mfr->mef", row_mix, row_mix.conj(), optimize=True)
        an_cov = c_an * np.einsum("mer,mfr->mef", null_mix, null_mix.conj(), optimize=True)
        idx = np.arange(ne)
        an_cov[:, idx, idx] += noise
        r_eve = _batch_logdet2(sig_cov + an_cov) - _batch_logdet2(an_cov)

        vals = r_bob - r_eve
        diffs[n] = float(vals.mean())
        variances[n] = float(vals.var(ddof=1) / samples)

    period = scenario.budgets.t_period_s
    mean = float(np.dot(tau, np.maximum(diffs, 0.0)) / period)
    stderr = float(math.sqrt(np.dot(tau ** 2, variances)) / period)
    return RateEstimate(mean=mean, std_error=stderr, samples=samples)
