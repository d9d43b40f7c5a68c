"""Shared builders: small deterministic scenarios with hand-placed nodes."""

import numpy as np
import pytest

from swarmsec.channel import environment_preset
from swarmsec.geometry import Position3D, SlotGeometry
from swarmsec.scenario import Budgets, PowerSchedule, Scenario


def make_slot(bob_xy, uav_offsets, eve_xy, slot_index=0):
    """One slot from plain coordinate tuples; uav_offsets are (dx, dy, z) from bob."""
    bob = Position3D(float(bob_xy[0]), float(bob_xy[1]), 0.0)
    uavs = tuple(Position3D(bob.x + dx, bob.y + dy, z) for dx, dy, z in uav_offsets)
    eve = Position3D(float(eve_xy[0]), float(eve_xy[1]), 0.0)
    return SlotGeometry(uavs, bob, eve, slot_index=slot_index)


def default_budgets(p_max_w=1.0, e_max_j=300.0, t_total_s=100.0, tau_max_s=8.0,
                    t_period_s=210.0):
    return Budgets(p_max_w=p_max_w, e_max_j=e_max_j, t_total_s=t_total_s,
                   tau_max_s=tau_max_s, t_period_s=t_period_s)


def small_scenario(n_uavs=3, n_slots=2, bob_antennas=2, eve_antennas=2,
                   noise_w=1e-13, budgets=None, env_name="suburban",
                   eve_distance_m=100.0, rng_seed=0):
    """Deterministic multi-slot scenario: swarm hovers near each user, eve on a ring.

    Node placement uses a seeded generator so different seeds give different
    geometries while the same seed always rebuilds the same instance.
    """
    rng = np.random.default_rng(rng_seed)
    env = environment_preset(env_name)
    slots = []
    for n in range(n_slots):
        bob_xy = rng.uniform(0.0, 1000.0, size=2)
        offsets = [(rng.uniform(-40, 40), rng.uniform(-40, 40), rng.uniform(100, 200))
                   for _ in range(n_uavs)]
        theta = rng.uniform(0.0, 2.0 * np.pi)
        eve_xy = (bob_xy[0] + eve_distance_m * np.cos(theta),
                  bob_xy[1] + eve_distance_m * np.sin(theta))
        slots.append(make_slot(bob_xy, offsets, eve_xy, slot_index=n))
    return Scenario(env=env, slots=tuple(slots), bob_antennas=bob_antennas,
                    eve_antennas=eve_antennas, noise_w=noise_w,
                    budgets=budgets or default_budgets())


def feasible_schedule(scenario, p_u_frac=0.5, p_a_frac=0.2):
    """Uniform feasible schedule at fractions of the power cap."""
    shape = (scenario.n_uavs, scenario.n_slots)
    p_max = scenario.budgets.p_max_w
    return PowerSchedule(np.full(shape, p_u_frac * p_max),
                         np.full(shape, p_a_frac * p_max))


@pytest.fixture
def scenario_2slot():
    return small_scenario()
