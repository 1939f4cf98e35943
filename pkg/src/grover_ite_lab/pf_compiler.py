"""Pulse-schedule compiler for exp(s [H_f, |psi0><psi0|]).

A schedule is an ordered list of pulses, each a diffusion exp(i theta P0) or
oracle exp(i theta H_f) exponential, stored in application order (first entry
acts on the state first).  Written as an operator product the list reads right
to left.

The group-commutator fragment with duration s is, in product order,

    D(+sqrt s) O(+sqrt s) D(-sqrt s) O(-sqrt s)  ->  exp(s [H_f, P0]) + O(s^{3/2})

and fragmentation into F pieces runs F copies at duration s/F.  Higher-order
kinds recursively rescale a base schedule; angles inside every construction
are linear in sqrt(s), so rescaling a formula is just rescaling its angles.
``claimed_order`` records the error exponent numerator m in O(s^{m/2}).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from . import geometry
from .errors import (
    DepthExceeded,
    DomainError,
    InsufficientData,
    NegativeDuration,
    NonAlternatingSchedule,
)
from .ite_flow import exact_commutator_exponential
from .search_core import SearchInstance, make_initial


class Generator(str, Enum):
    DIFFUSION = "D"
    ORACLE = "O"


@dataclass(frozen=True)
class Pulse:
    generator: Generator
    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise DomainError(f"pulse angle must be finite, got {self.angle!r}")


@dataclass(frozen=True)
class AngleSchedule:
    """Ordered pulses (application order) with compiler metadata."""

    pulses: tuple[Pulse, ...]
    claimed_order: int = 0
    s_target: float = 0.0

    def _merged(self) -> tuple[Pulse, ...]:
        """Adjacent same-generator pulses merged (angles add); zeros kept."""
        out: list[Pulse] = []
        for p in self.pulses:
            if out and out[-1].generator == p.generator:
                out[-1] = Pulse(p.generator, out[-1].angle + p.angle)
            else:
                out.append(p)
        return tuple(out)

    def canonical(self) -> "AngleSchedule":
        """Merge adjacent same-generator pulses (angles add), drop zero angles."""
        pulses = list(self.pulses)
        while True:
            merged = AngleSchedule(tuple(pulses))._merged()
            pulses = [p for p in merged if p.angle != 0.0]
            if len(pulses) == len(merged):
                break
        return AngleSchedule(tuple(pulses), self.claimed_order, self.s_target)

    def inverse(self) -> "AngleSchedule":
        """Reversed pulses with negated angles; exact at the schedule level."""
        inv = tuple(Pulse(p.generator, -p.angle) for p in reversed(self.pulses))
        return AngleSchedule(inv, self.claimed_order, -self.s_target)

    def grover_pairs(self) -> list[tuple[float, float]]:
        """(alpha_k, beta_k) pairs: iterate k applies O(beta_k) then D(alpha_k).

        Requires the merged form (zero angles kept, so deliberate zero pulses
        survive) to alternate starting with an oracle pulse, even pulse count.
        """
        pulses = self._merged()
        if len(pulses) % 2 != 0:
            raise NonAlternatingSchedule("odd canonical pulse count")
        pairs = []
        for k in range(0, len(pulses), 2):
            o, d = pulses[k], pulses[k + 1]
            if o.generator is not Generator.ORACLE or d.generator is not Generator.DIFFUSION:
                raise NonAlternatingSchedule(
                    "canonical form must alternate oracle/diffusion starting with oracle"
                )
            pairs.append((d.angle, o.angle))
        return pairs

    @property
    def grover_phase(self) -> complex:
        """Global phase (-1)^N separating the iterate product from bare pulses."""
        return (-1.0 + 0.0j) ** (len(self._merged()) // 2)

    def to_json(self) -> str:
        payload = {
            "s_target": self.s_target,
            "claimed_order": self.claimed_order,
            "pulses": [{"g": p.generator.value, "theta": p.angle} for p in self.pulses],
        }
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "AngleSchedule":
        payload = json.loads(text)
        pulses = tuple(
            Pulse(Generator(p["g"]), float(p["theta"])) for p in payload["pulses"]
        )
        return cls(pulses, int(payload["claimed_order"]), float(payload["s_target"]))


# ---------------------------------------------------------------------------
# Formula kinds

@dataclass(frozen=True)
class GroupCommutator:
    pass


@dataclass(frozen=True)
class ThirdOrder:
    pass


@dataclass(frozen=True)
class TwoCopies:
    base: "FormulaKind"


@dataclass(frozen=True)
class JeanKoseleff:
    base: "FormulaKind"


@dataclass(frozen=True)
class FiveCopies:
    base: "FormulaKind"


FormulaKind = Union[GroupCommutator, ThirdOrder, TwoCopies, JeanKoseleff, FiveCopies]

MAX_RECURSION_DEPTH = 6


def formula_depth(kind: FormulaKind) -> int:
    if isinstance(kind, (GroupCommutator, ThirdOrder)):
        return 0
    return 1 + formula_depth(kind.base)


def formula_order(kind: FormulaKind) -> int:
    """Claimed error exponent numerator m, so the error is O(s^{m/2})."""
    if isinstance(kind, GroupCommutator):
        return 3
    if isinstance(kind, ThirdOrder):
        return 4
    return formula_order(kind.base) + 1


def _scale(pulses: tuple[Pulse, ...], c: float) -> tuple[Pulse, ...]:
    return tuple(Pulse(p.generator, c * p.angle) for p in pulses)


def _invert(pulses: tuple[Pulse, ...]) -> tuple[Pulse, ...]:
    return tuple(Pulse(p.generator, -p.angle) for p in reversed(pulses))


def _base_pulses(kind: FormulaKind, sigma: float) -> tuple[Pulse, ...]:
    """Pulse list for one formula evaluation with sqrt-duration sigma."""
    O, D = Generator.ORACLE, Generator.DIFFUSION
    if isinstance(kind, GroupCommutator):
        return (Pulse(O, -sigma), Pulse(D, -sigma), Pulse(O, sigma), Pulse(D, sigma))
    if isinstance(kind, ThirdOrder):
        phi = (math.sqrt(5.0) - 1.0) / 2.0
        return (
            Pulse(O, sigma),
            Pulse(D, (1.0 - phi) * sigma),
            Pulse(O, -(phi + 1.0) * sigma),
            Pulse(D, -sigma),
            Pulse(O, phi * sigma),
            Pulse(D, phi * sigma),
        )

    base = _base_pulses(kind.base, sigma)
    # Recursion constants are expressed in terms of the squared-time order of
    # the base formula, n = m - 1.
    n = formula_order(kind.base) - 1
    if isinstance(kind, TwoCopies):
        if n % 2 != 0:
            raise DomainError("two-copies recursion needs an even-order base")
        left = _scale(base, 1.0 / math.sqrt(2.0))
        right = _scale(base, -1.0 / math.sqrt(2.0))
        return right + left
    if isinstance(kind, JeanKoseleff):
        if n % 2 == 0:
            t = (2.0 + 2.0 ** (2.0 / (n + 1))) ** -0.5
            w = -(2.0 ** (1.0 / (n + 1))) * t
            return _scale(base, t) + _scale(base, w) + _scale(base, t)
        u = (2.0 - 2.0 ** (2.0 / (n + 1))) ** -0.5
        v = (2.0 ** (1.0 / (n + 1))) * u
        return _scale(base, u) + _invert(_scale(base, v)) + _scale(base, u)
    if isinstance(kind, FiveCopies):
        sig = 4.0 ** (2.0 / (n + 1)) / (4.0 * (4.0 - 4.0 ** (2.0 / (n + 1))))
        mu = (4.0 * sig) ** 0.5
        nu = (0.25 + sig) ** 0.5
        block = _scale(base, nu)
        return block + block + _invert(_scale(base, mu)) + block + block
    raise TypeError(f"unknown formula kind {kind!r}")


def compile_formula(kind: FormulaKind, s: float, fragments: int = 1) -> AngleSchedule:
    """Schedule approximating exp(s [H_f, P0]) as `fragments` copies at s/fragments."""
    if s < 0:
        raise NegativeDuration(f"duration must be nonnegative, got {s!r}")
    if fragments < 1:
        raise DomainError("fragments must be >= 1")
    if formula_depth(kind) > MAX_RECURSION_DEPTH:
        raise DepthExceeded(f"recursion depth > {MAX_RECURSION_DEPTH}")
    sigma = math.sqrt(s / fragments)
    fragment = _base_pulses(kind, sigma)
    return AngleSchedule(fragment * fragments, formula_order(kind), float(s))


def schedule_unitary(inst: SearchInstance, schedule: AngleSchedule) -> np.ndarray:
    """Dense ordered product of the schedule's pulse exponentials."""
    inst.require_dense()
    n = inst.n_states
    psi0 = make_initial(inst)
    marked = list(inst.marked)
    u = np.eye(n, dtype=complex)
    for p in schedule.pulses:
        phase = np.exp(1j * p.angle)
        if p.generator is Generator.ORACLE:
            u[marked, :] *= phase
        else:
            # rank-1 update: u <- u + (e^{i theta} - 1) psi0 (psi0^dag u)
            u += (phase - 1.0) * np.outer(psi0, psi0.conj() @ u)
    return u


def measure_formula_error(inst, kind: FormulaKind, s_grid, fragments: int = 1):
    """(s, operator-norm error) pairs of the compiled schedule vs the exact flow."""
    inst.require_dense(512)
    out = []
    for s in s_grid:
        sched = compile_formula(kind, float(s), fragments)
        err = geometry.operator_norm(
            schedule_unitary(inst, sched) - exact_commutator_exponential(inst, float(s))
        )
        out.append((float(s), err))
    return out


def fit_order(points) -> float:
    """Least-squares slope of log(error) against log(s).

    Points with s <= 0 or error <= 1e-14 (noise floor) are dropped; at least
    four must survive.
    """
    usable = [(s, e) for s, e in points if s > 0 and e > 1e-14]
    if len(usable) < 4:
        raise InsufficientData(f"need >= 4 usable points, have {len(usable)}")
    ls = np.log([s for s, _ in usable])
    le = np.log([e for _, e in usable])
    a = np.vstack([ls, np.ones_like(ls)]).T
    slope, _ = np.linalg.lstsq(a, le, rcond=None)[0]
    return float(slope)
