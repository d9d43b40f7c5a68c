"""Block-coordinate ascent for the secrecy-throughput design problem.

Each outer iteration cycles four blocks: the two auxiliary-variable blocks
(scalar fixed points per slot), the transmit-power block (a concave surrogate
obtained by linearizing the two rate terms that enter the objective through
their difference), and the slot-duration block (a plain LP). The power block
decomposes per UAV and is solved to KKT stationarity by bisection on the
energy-budget multiplier with closed-form per-slot solutions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import NumericalError
from .rates import (LOG2E, AuxVariables, _check_term_inputs, rate_term,
                    secrecy_throughput_closed_form, solve_fixed_point)
from .scenario import PowerSchedule, Scenario


# ---------------------------------------------------------------------------
# auxiliary-variable blocks

def solve_aux_block_min(schedule: PowerSchedule, tau, scenario: Scenario):
    """Auxiliary minimizers for the rate terms entering the objective with + sign.

    Returns (bob_total, eve_an), each length N. Slots with zero duration are
    still solved; the later blocks may re-activate them.
    """
    _check_block_inputs(schedule, tau, scenario)
    nb, ne, noise = scenario.bob_antennas, scenario.eve_antennas, scenario.noise_w
    bob_total = np.array([solve_fixed_point(schedule.p_u[:, n], nb, scenario.loss_bob[n], noise)
                          for n in range(scenario.n_slots)])
    eve_an = np.array([solve_fixed_point(schedule.p_a[:, n], ne, scenario.loss_eve[n], noise)
                       for n in range(scenario.n_slots)])
    return bob_total, eve_an


def solve_aux_block_max(schedule: PowerSchedule, tau, scenario: Scenario):
    """Auxiliary values for the negatively-signed rate terms.

    These maximize the objective over their block, which reduces to minimizing
    each negated rate term, i.e. the same per-slot fixed points. Returns
    (bob_an, eve_total).
    """
    _check_block_inputs(schedule, tau, scenario)
    nb, ne, noise = scenario.bob_antennas, scenario.eve_antennas, scenario.noise_w
    bob_an = np.array([solve_fixed_point(schedule.p_a[:, n], nb, scenario.loss_bob[n], noise)
                       for n in range(scenario.n_slots)])
    eve_total = np.array([solve_fixed_point(schedule.p_u[:, n], ne, scenario.loss_eve[n], noise)
                          for n in range(scenario.n_slots)])
    return bob_an, eve_total


def _check_block_inputs(schedule: PowerSchedule, tau, scenario: Scenario) -> np.ndarray:
    tau = np.asarray(tau, dtype=float)
    if schedule.shape != (scenario.n_uavs, scenario.n_slots):
        raise ValueError("schedule shape does not match the scenario")
    if tau.shape != (scenario.n_slots,):
        raise ValueError("tau must have one entry per slot")
    return tau


# ---------------------------------------------------------------------------
# surrogate pieces

def rate_term_gradient(p, n_antennas: int, losses, aux: float, noise: float) -> np.ndarray:
    """Gradient of ``rate_term`` in the power vector, elementwise (bits/s/Hz per W)."""
    p, losses = _check_term_inputs(p, losses, noise)
    if not (np.isfinite(aux) and aux >= 0.0):
        raise ValueError(f"aux must be nonnegative and finite, got {aux}")
    c = n_antennas / (noise * np.exp(aux))
    scaled = c / losses
    return LOG2E * scaled / (1.0 + scaled * p)


def rate_term_tangent(p, n_antennas: int, losses, aux: float, noise: float,
                      anchor_p) -> float:
    """First-order expansion of ``rate_term`` around ``anchor_p``.

    The term is concave in the powers, so the tangent is a global upper bound,
    exact at the anchor.
    """
    p = np.asarray(p, dtype=float)
    anchor_p = np.asarray(anchor_p, dtype=float)
    base = rate_term(anchor_p, n_antennas, losses, aux, noise)
    grad = rate_term_gradient(anchor_p, n_antennas, losses, aux, noise)
    return base + float(np.dot(grad, p - anchor_p))


def per_slot_secrecy(scenario: Scenario, schedule: PowerSchedule,
                     aux: AuxVariables) -> np.ndarray:
    """Per-slot secrecy rates evaluated at fixed auxiliary values."""
    nb, ne, noise = scenario.bob_antennas, scenario.eve_antennas, scenario.noise_w
    out = np.empty(scenario.n_slots)
    for n in range(scenario.n_slots):
        qb, qe = scenario.loss_bob[n], scenario.loss_eve[n]
        pu, pa = schedule.p_u[:, n], schedule.p_a[:, n]
        out[n] = (rate_term(pu, nb, qb, aux.bob_total[n], noise)
                  - rate_term(pa, nb, qb, aux.bob_an[n], noise)
                  - rate_term(pu, ne, qe, aux.eve_total[n], noise)
                  + rate_term(pa, ne, qe, aux.eve_an[n], noise))
    return out


def throughput_at_aux(scenario: Scenario, schedule: PowerSchedule, tau,
                      aux: AuxVariables) -> float:
    """Objective value with all four auxiliary vectors held fixed."""
    tau = _check_block_inputs(schedule, tau, scenario)
    return float(np.dot(tau, per_slot_secrecy(scenario, schedule, aux))
                 / scenario.budgets.t_period_s)


def sca_surrogate_value(scenario: Scenario, schedule: PowerSchedule, tau,
                        aux: AuxVariables, anchor: PowerSchedule) -> float:
    """Value of the concave power-block surrogate at ``schedule``.

    The two rate terms that would make the objective a difference of concave
    functions are replaced by tangents at the anchor schedule, which makes the
    surrogate concave and a global lower bound on the fixed-aux objective that
    is exact at the anchor.
    """
    tau = _check_block_inputs(schedule, tau, scenario)
    nb, ne, noise = scenario.bob_antennas, scenario.eve_antennas, scenario.noise_w
    total = 0.0
    for n in range(scenario.n_slots):
        qb, qe = scenario.loss_bob[n], scenario.loss_eve[n]
        pu, pa = schedule.p_u[:, n], schedule.p_a[:, n]
        bracket = (rate_term(pu, nb, qb, aux.bob_total[n], noise)
                   - rate_term_tangent(pa, nb, qb, aux.bob_an[n], noise,
                                       anchor.p_a[:, n])
                   - rate_term_tangent(pu, ne, qe, aux.eve_total[n], noise,
                                       anchor.p_u[:, n])
                   + rate_term(pa, ne, qe, aux.eve_an[n], noise))
        total += tau[n] * bracket
    return total / scenario.budgets.t_period_s


# ---------------------------------------------------------------------------
# power block

def _slot_powers(beta_b, beta_e, gamma_b, gamma_e, lam, p_max):
    """Per-slot maximizers of the surrogate given the energy multiplier.

    Solves, elementwise over (UAV, slot) grids,
        max  log2(1 + beta_b*u) - gamma_e*u - lam*u + log2(1 + beta_e*a) - gamma_b*a
        s.t. 0 <= a <= u <= p_max.
    The unconstrained pair has closed forms; when they cross (a would exceed
    u), the coupling binds and the common value solves a quadratic.
    """
    with np.errstate(divide="ignore", over="ignore"):
        u_hat = LOG2E / (gamma_e + lam) - 1.0 / beta_b
        a_hat = LOG2E / gamma_b - 1.0 / beta_e
    u = np.clip(u_hat, 0.0, p_max)
    a = np.clip(a_hat, 0.0, p_max)

    coupled = a > u
    if np.any(coupled):
        kappa = gamma_b + gamma_e + lam
        c2 = kappa * beta_b * beta_e
        c1 = kappa * (beta_b + beta_e) - 2.0 * LOG2E * beta_b * beta_e
        c0 = kappa - LOG2E * (beta_b + beta_e)
        disc = np.maximum(c1 * c1 - 4.0 * c2 * c0, 0.0)
        denom = c1 + np.sqrt(disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            # c0 < 0 guarantees one positive root; this form avoids cancellation
            s = np.where(c0 < 0.0, -2.0 * c0 / denom, 0.0)
        s = np.where(kappa <= 0.0, p_max, s)  # no linear cost at all: slope stays positive
        s = np.clip(np.nan_to_num(s, nan=0.0, posinf=p_max), 0.0, p_max)
        u = np.where(coupled, s, u)
        a = np.where(coupled, s, a)
    return u, a


def _power_rows(beta_b, beta_e, gamma_b, gamma_e, tau, p_max, e_max):
    """Energy-constrained surrogate maximization, one independent row per UAV."""
    n_rows = beta_b.shape[0]

    def used(lam):
        u, _ = _slot_powers(beta_b, beta_e, gamma_b, gamma_e, lam[:, None], p_max)
        return u @ tau

    lam = np.zeros(n_rows)
    need = used(lam) > e_max
    if np.any(need):
        hi = np.ones(n_rows)
        for _ in range(200):
            over = need & (used(hi) > e_max)
            if not over.any():
                break
            hi[over] *= 2.0
        else:
            raise NumericalError("failed to bracket the energy multiplier",
                                 {"hi": float(hi.max())})
        lo = np.zeros(n_rows)
        for _ in range(120):
            mid = 0.5 * (lo + hi)
            over = used(np.where(need, mid, 0.0)) > e_max
            lo = np.where(need & over, mid, lo)
            hi = np.where(need & ~over, mid, hi)
        # the hi side is certified feasible throughout the bisection
        lam = np.where(need, hi, 0.0)

    u, a = _slot_powers(beta_b, beta_e, gamma_b, gamma_e, lam[:, None], p_max)
    return u, a, lam


def _power_kkt_residual(beta_b, beta_e, gamma_b, gamma_e, tau, p_max, e_max,
                        u, a, lam):
    """Max projected-gradient/feasibility residual over energy-active rows."""
    active = tau > 0.0
    if not active.any():
        return 0.0
    gu = LOG2E * beta_b / (1.0 + beta_b * u) - gamma_e - lam[:, None]
    ga = LOG2E * beta_e / (1.0 + beta_e * a) - gamma_b
    # unit-step projection; the feasible interval of u is [a, p_max], of a is [0, u]
    r_u = np.abs(u - np.clip(u + gu, a, p_max))
    r_a = np.abs(a - np.clip(a + ga, 0.0, u))
    r_proj = max(float(r_u[:, active].max()), float(r_a[:, active].max()))
    energy = u @ tau
    r_energy = float(np.maximum(energy - e_max, 0.0).max())
    r_comp = float((lam * np.maximum(e_max - energy, 0.0)).max())
    return max(r_proj, r_energy, r_comp)


def solve_power_subproblem(aux: AuxVariables, tau_prev, schedule_prev: PowerSchedule,
                           scenario: Scenario, tol: float = 1e-8) -> PowerSchedule:
    """Maximize the linearized power surrogate under power and energy budgets.

    The surrogate keeps the scheduled user's total-power term and the
    eavesdropper's noise term exact (concave) and linearizes the other two at
    ``schedule_prev``. The problem separates across UAVs; each row is solved
    by bisection on its energy multiplier with closed-form slot solutions.
    Slots with zero duration keep their previous powers verbatim. Raises
    NumericalError if the KKT residual audit exceeds ``tol``.
    """
    tau = _check_block_inputs(schedule_prev, tau_prev, scenario)
    b = scenario.budgets
    nb, ne, noise = scenario.bob_antennas, scenario.eve_antennas, scenario.noise_w

    # coefficient grids, shaped (L, N)
    qb = scenario.loss_bob.T
    qe = scenario.loss_eve.T
    beta_b = nb / (qb * noise * np.exp(aux.bob_total)[None, :])
    beta_e = ne / (qe * noise * np.exp(aux.eve_an)[None, :])
    cb = nb / (noise * np.exp(aux.bob_an))[None, :] / qb
    ce = ne / (noise * np.exp(aux.eve_total))[None, :] / qe
    gamma_b = LOG2E * cb / (1.0 + cb * schedule_prev.p_a)
    gamma_e = LOG2E * ce / (1.0 + ce * schedule_prev.p_u)

    u, a, lam = _power_rows(beta_b, beta_e, gamma_b, gamma_e, tau, b.p_max_w, b.e_max_j)

    residual = _power_kkt_residual(beta_b, beta_e, gamma_b, gamma_e, tau,
                                   b.p_max_w, b.e_max_j, u, a, lam)
    if residual > tol:
        raise NumericalError("power block failed its KKT audit",
                             {"residual": residual, "tol": tol})

    idle = tau == 0.0
    if idle.any():
        u[:, idle] = schedule_prev.p_u[:, idle]
        a[:, idle] = schedule_prev.p_a[:, idle]
    return PowerSchedule(u, a)


# ---------------------------------------------------------------------------
# duration block

def solve_duration_lp(aux: AuxVariables, schedule: PowerSchedule,
                      scenario: Scenario) -> np.ndarray:
    """Optimal slot durations at fixed powers and auxiliary values.

    Maximizes the duration-weighted per-slot secrecy rates subject to the
    per-slot cap, the total transmission time, and each UAV's energy budget.
    Solved as an LP with a simplex method, so the result is a vertex.
    """
    b = scenario.budgets
    coeff = per_slot_secrecy(scenario, schedule, aux) / b.t_period_s
    n = scenario.n_slots
    a_ub = np.vstack([schedule.p_u, np.ones((1, n))])
    b_ub = np.concatenate([np.full(scenario.n_uavs, b.e_max_j), [b.t_total_s]])
    res = linprog(-coeff, A_ub=a_ub, b_ub=b_ub, bounds=[(0.0, b.tau_max_s)] * n,
                  method="highs-ds")
    if not res.success:
        raise NumericalError(f"duration LP failed: {res.message}",
                             {"status": res.status})
    return np.clip(res.x, 0.0, b.tau_max_s)


# ---------------------------------------------------------------------------
# feasibility audit and the outer loop

def audit_feasibility(scenario: Scenario, schedule: PowerSchedule, tau) -> dict:
    """Constraint-violation magnitudes (all zero for a feasible point)."""
    tau = np.asarray(tau, dtype=float)
    b = scenario.budgets
    return {
        "an_nonneg": float(max(0.0, -schedule.p_a.min())),
        "an_le_total": float(max(0.0, (schedule.p_a - schedule.p_u).max())),
        "power_cap": float(max(0.0, (schedule.p_u - b.p_max_w).max())),
        "energy": float(max(0.0, (schedule.p_u @ tau - b.e_max_j).max())),
        "tau_nonneg": float(max(0.0, -tau.min())),
        "tau_cap": float(max(0.0, (tau - b.tau_max_s).max())),
        "time_total": float(max(0.0, tau.sum() - b.t_total_s)),
    }


@dataclass
class IterationRecord:
    """State after one outer iteration."""

    objective: float
    objective_clipped: float
    schedule: PowerSchedule
    tau: np.ndarray
    aux: AuxVariables
    diagnostics: dict = field(default_factory=dict)


@dataclass
class SolutionTrace:
    """Outcome of a block-coordinate run."""

    initial_objective: float
    iterations: list[IterationRecord]
    converged: bool
    stop_reason: str

    @property
    def objectives(self) -> list[float]:
        return [it.objective for it in self.iterations]

    @property
    def final(self) -> IterationRecord:
        return self.iterations[-1]

    def is_monotone(self, tol: float = 1e-8) -> bool:
        """True when no step decreased the objective beyond tol*(1+|previous|)."""
        values = [self.initial_objective] + self.objectives
        return all(b >= a - tol * (1.0 + abs(a)) for a, b in zip(values, values[1:]))


def _power_sca_step(aux: AuxVariables, tau, schedule: PowerSchedule,
                    scenario: Scenario, power_tol: float, inner_tol: float,
                    max_inner: int) -> tuple[PowerSchedule, int]:
    """Successive convex approximation on the power block at fixed aux values.

    Repeatedly maximizes the linearized surrogate, re-anchoring at each new
    schedule, until the fixed-aux objective stalls. Every re-anchored solve
    can only increase that objective (tangency plus global upper bound), so
    this converges the difference-of-concave power problem instead of taking
    a single tangent step, which would crawl when the noise powers sit in the
    steep region of the eavesdropper's rate.
    """
    value = throughput_at_aux(scenario, schedule, tau, aux)
    inner = 0
    for inner in range(1, max_inner + 1):
        schedule = solve_power_subproblem(aux, tau, schedule, scenario, tol=power_tol)
        new_value = throughput_at_aux(scenario, schedule, tau, aux)
        if new_value - value <= inner_tol * (1.0 + abs(value)):
            value = new_value
            break
        value = new_value
    return schedule, inner


def run_bcd(scenario: Scenario, init_schedule: PowerSchedule, init_tau,
            epsilon: float = 1e-3, max_iter: int = 50, power_tol: float = 1e-8,
            monotone_tol: float = 1e-8, inner_tol: float = 1e-7,
            max_inner: int = 200) -> SolutionTrace:
    """Block-coordinate ascent from a feasible starting point.

    Stops once the fractional objective increase drops below ``epsilon``
    (with a 1e-12 floor on the denominator) or after ``max_iter`` iterations.
    Every iterate is audited for feasibility; an objective decrease beyond
    ``monotone_tol`` relative is flagged in the iteration diagnostics rather
    than raised, since the surrogate-ascent guarantee is exact only to solver
    tolerance.
    """
    eps_floor = 1e-12
    tau = np.asarray(init_tau, dtype=float).copy()
    _check_block_inputs(init_schedule, tau, scenario)
    start_violation = max(audit_feasibility(scenario, init_schedule, tau).values())
    if start_violation > 1e-9:
        raise ValueError(f"initial point infeasible by {start_violation:.3e}")

    schedule = init_schedule.copy()
    r_prev, _, _ = secrecy_throughput_closed_form(scenario, schedule, tau)
    initial_objective = r_prev

    iterations: list[IterationRecord] = []
    converged = False
    stop_reason = "max_iter"
    for _ in range(max_iter):
        bob_total, eve_an = solve_aux_block_min(schedule, tau, scenario)
        bob_an, eve_total = solve_aux_block_max(schedule, tau, scenario)
        aux = AuxVariables(bob_total, bob_an, eve_total, eve_an)

        schedule, inner_iters = _power_sca_step(aux, tau, schedule, scenario,
                                                power_tol, inner_tol, max_inner)
        tau = solve_duration_lp(aux, schedule, scenario)

        r_new, aux_fresh, per_slot = secrecy_throughput_closed_form(scenario, schedule, tau)
        r_clip = float(np.dot(tau, np.maximum(per_slot, 0.0))
                       / scenario.budgets.t_period_s)
        violations = audit_feasibility(scenario, schedule, tau)
        non_monotone = r_new < r_prev - monotone_tol * (1.0 + abs(r_prev))
        iterations.append(IterationRecord(
            objective=r_new,
            objective_clipped=r_clip,
            schedule=schedule.copy(),
            tau=tau.copy(),
            aux=aux_fresh,
            diagnostics={
                "max_violation": max(violations.values()),
                "violations": violations,
                "non_monotone": bool(non_monotone),
                "power_inner_iters": inner_iters,
            },
        ))

        if (r_new - r_prev) / max(r_prev, eps_floor) < epsilon:
            converged = True
            stop_reason = "fractional_increase_below_epsilon"
            break
        r_prev = r_new

    return SolutionTrace(initial_objective=initial_objective, iterations=iterations,
                         converged=converged, stop_reason=stop_reason)
