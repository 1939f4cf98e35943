"""Diffusion/oracle operators and Grover iteration, full and reduced.

One iterate with angles (alpha, beta) is G = -D(alpha) U_f(beta):
the oracle exponential acts first, then the diffusion exponential, and the
overall minus sign is tracked as a global phase (it never affects success
probabilities, but operator-identity checks keep it).

In the {psi0, psi0_perp} basis the operators are 2x2:

    D(alpha) = diag(e^{i alpha}, 1)
    U_f(beta) = X(r) diag(e^{i beta}, 1) X(r),   r = sqrt(e0)

with the reflection X(r) = [[r, sqrt(1-r^2)], [sqrt(1-r^2), -r]].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EmptyMarkedSet, NumericalDomain
from .pf_compiler import AngleSchedule, Generator, Pulse
from .search_core import (
    ReducedState,
    SearchInstance,
    make_initial,
    make_solution,
)

NORM_DRIFT_LIMIT = 1e-10


def reflection_matrix(x: float) -> np.ndarray:
    """Signal reflection [[x, sqrt(1-x^2)], [sqrt(1-x^2), -x]]; involutive."""
    r = math.sqrt(max(0.0, 1.0 - x * x))
    return np.array([[x, r], [r, -x]], dtype=complex)


def sz_matrix(phi: float) -> np.ndarray:
    """Processing rotation diag(e^{i phi}, e^{-i phi})."""
    return np.diag([np.exp(1j * phi), np.exp(-1j * phi)])


def diffusion_reduced(alpha: float) -> np.ndarray:
    return np.diag([np.exp(1j * alpha), 1.0 + 0.0j])


def oracle_reduced(e0: float, beta: float) -> np.ndarray:
    x = reflection_matrix(math.sqrt(e0))
    return x @ diffusion_reduced(beta) @ x


def diffusion(inst: SearchInstance, alpha: float, state):
    """Apply exp(i alpha |psi0><psi0|); accepts a full vector or ReducedState."""
    if isinstance(state, ReducedState):
        return ReducedState.from_array(diffusion_reduced(alpha) @ state.to_array())
    state = np.asarray(state, dtype=complex)
    psi0 = make_initial(inst)
    return state + (np.exp(1j * alpha) - 1.0) * psi0 * np.vdot(psi0, state)


def oracle(inst: SearchInstance, beta: float, state):
    """Apply exp(i beta H_f); accepts a full vector or ReducedState."""
    if isinstance(state, ReducedState):
        inst.require_nondegenerate()
        return ReducedState.from_array(oracle_reduced(inst.e0, beta) @ state.to_array())
    out = np.array(state, dtype=complex)
    out[list(inst.marked)] *= np.exp(1j * beta)
    return out


def grover_iterate(inst: SearchInstance, alpha: float, beta: float, state):
    """One iterate -D(alpha) U_f(beta) applied to the state."""
    out = diffusion(inst, alpha, oracle(inst, beta, state))
    if isinstance(out, ReducedState):
        return ReducedState(-out.c0, -out.c1)
    return -out


def reduced_iterate_product(e0: float, pairs) -> np.ndarray:
    """2x2 product of iterates (first pair applied first), including (-1)^N."""
    u = np.eye(2, dtype=complex)
    for alpha, beta in pairs:
        u = -(diffusion_reduced(alpha) @ oracle_reduced(e0, beta)) @ u
    return u


@dataclass(frozen=True)
class NamedSchedule:
    """One of the literature angle schedules, by name."""

    kind: str  # "original-pi" | "pi-over-three" | "fixed-point-chebyshev"
    iterations: int
    delta2: float | None = None

    def angle_pairs(self) -> list[tuple[float, float]]:
        if self.iterations < 1:
            raise DomainError("iterations must be >= 1")
        if self.kind == "original-pi":
            return [(math.pi, math.pi)] * self.iterations
        if self.kind == "pi-over-three":
            return [(math.pi / 3.0, math.pi / 3.0)] * self.iterations
        if self.kind == "fixed-point-chebyshev":
            if self.delta2 is None:
                raise DomainError("fixed-point-chebyshev needs delta2")
            return fixed_point_angles(self.iterations, math.sqrt(self.delta2)).grover_pairs()
        raise DomainError(f"unknown named schedule {self.kind!r}")


def fixed_point_angles(iterations: int, delta: float) -> AngleSchedule:
    """Fixed-point schedule with terminal fidelity >= 1 - delta^2.

    Uses the quasi-Chebyshev construction with L = 2*iterations + 1 reflections:
    gamma = cosh(arccosh(1/delta) / L) (the fractional-order Chebyshev value
    T_{1/L}(1/delta)), and

        alpha_k = beta_{N-k+1} = -2 arccot(tan(2 pi k / L) sqrt(1 - 1/gamma^2)).

    The arccot is evaluated as atan2(1, .), range (0, pi), so the angle stays
    defined at the tan poles; the alpha/beta reversal symmetry is exact by
    construction.
    """
    if iterations < 1:
        raise DomainError("iterations must be >= 1")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0, 1), got {delta!r}")
    big_l = 2 * iterations + 1
    gamma = math.cosh(math.acosh(1.0 / delta) / big_l)
    omega = math.sqrt(max(0.0, 1.0 - 1.0 / gamma ** 2))
    alphas = [
        -2.0 * math.atan2(1.0, math.tan(2.0 * math.pi * k / big_l) * omega)
        for k in range(1, iterations + 1)
    ]
    betas = alphas[::-1]
    pulses = []
    for alpha, beta in zip(alphas, betas):
        pulses.append(Pulse(Generator.ORACLE, beta))
        pulses.append(Pulse(Generator.DIFFUSION, alpha))
    return AngleSchedule(tuple(pulses))


def success_probability(inst: SearchInstance, state) -> float:
    """|<solution|state>|^2."""
    if inst.n_marked == 0:
        raise EmptyMarkedSet("no marked items")
    if isinstance(state, ReducedState):
        target = np.array([math.sqrt(inst.e0), math.sqrt(1.0 - inst.e0)])
        return float(abs(np.vdot(target, state.to_array())) ** 2)
    return float(abs(np.vdot(make_solution(inst), np.asarray(state))) ** 2)


def run_schedule(inst: SearchInstance, schedule, mode: str = "full"):
    """Run a schedule from psi0; returns (final state, per-step success trace).

    ``schedule`` is an AngleSchedule or NamedSchedule.  Alternating schedules
    run as Grover iterates (one trace entry per iterate, global (-1) applied);
    non-alternating pulse lists run pulse by pulse.  Norm drift beyond 1e-10
    is an error rather than a silent renormalization.
    """
    if mode not in ("full", "reduced"):
        raise DomainError(f"mode must be 'full' or 'reduced', got {mode!r}")
    if isinstance(schedule, NamedSchedule):
        pairs = schedule.angle_pairs()
        steps = [("pair", ab) for ab in pairs]
    else:
        try:
            steps = [("pair", ab) for ab in schedule.grover_pairs()]
        except Exception:
            steps = [("pulse", p) for p in schedule.canonical().pulses]

    if mode == "reduced":
        inst.require_nondegenerate()
        state = ReducedState(1.0 + 0.0j, 0.0 + 0.0j)
    else:
        state = make_initial(inst)

    trace = []
    for tag, step in steps:
        if tag == "pair":
            alpha, beta = step
            state = grover_iterate(inst, alpha, beta, state)
        else:
            if step.generator is Generator.ORACLE:
                state = oracle(inst, step.angle, state)
            else:
                state = diffusion(inst, step.angle, state)
        nrm = state.norm if isinstance(state, ReducedState) else float(np.linalg.norm(state))
        if abs(nrm - 1.0) > NORM_DRIFT_LIMIT:
            raise NumericalDomain(f"norm drift {abs(nrm - 1.0):.2e} beyond limit")
        trace.append(success_probability(inst, state))
    return state, trace
