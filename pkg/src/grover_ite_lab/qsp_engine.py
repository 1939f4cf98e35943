"""Two-dimensional signal-processing engine and the Grover phase mapping.

Sequences here interleave a signal reflection with z-phase rotations.  In the
reflection ("R") convention the operator for phases (phi_0 .. phi_K) is

    U = S_Z(phi_K) X(x) S_Z(phi_{K-1}) ... X(x) S_Z(phi_1) X(x) S_Z(phi_0)

with K signal reflections; phi_0 acts first.  The (0,0) entry is a degree-K
polynomial in x with parity K mod 2.

An N-iterate Grover product with angles (alpha_k, beta_k), first iterate
applied first, equals exactly such a sequence at x = sqrt(e0) with K = 2N and

    phi_0      = N pi + sum_k (alpha_k + beta_k) / 2
    phi_{2l-1} = beta_l / 2
    phi_{2l}   = alpha_l / 2

(the N pi absorbs the (-1)^N of the iterates; the identity is exact as an
action on psi0, with no leftover phase).  The equivalent "W" convention swaps
the reflection for w(x) = [[x, i sqrt(1-x^2)], [i sqrt(1-x^2), x]]; conversion
shifts phi_0 by -pi/4, interior phases by -pi/2 and phi_K by +(2K-1)pi/4, after
which the (0,0) rows agree exactly and the full matrices differ only by
diag(1, (-1)^K).

Phase fitting follows the penalized least-squares route: a sequence of
D(a_j) X(x) factors (a_j = 2 phi_j) is optimized against a target polynomial
on x in [0, 1] with penalties on the imaginary part of the (0,0) entry and on
the relative phase between the two column entries.  Gradients are computed
analytically by a forward/backward sweep through the 2x2 product, and restarts
are seeded for determinism.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from numpy.polynomial import chebyshev as _cheb
from numpy.polynomial import polynomial as _poly
from scipy.optimize import minimize, minimize_scalar
from scipy.special import erf, erfinv, jv

from .errors import (
    DegreeTooSmall,
    DomainError,
    NonAlternatingSchedule,
    NumericalDomain,
    OptimizerDiverged,
)
from .grover_engine import reflection_matrix, sz_matrix
from .pf_compiler import AngleSchedule, Generator, Pulse

# ---------------------------------------------------------------------------
# Phase lists and sequence evaluation


@dataclass(frozen=True)
class QspPhases:
    phases: tuple[float, ...]
    convention: str = "R"  # "R" | "W"

    def __post_init__(self):
        if self.convention not in ("R", "W"):
            raise DomainError(f"convention must be 'R' or 'W', got {self.convention!r}")
        if len(self.phases) < 1:
            raise DomainError("need at least phi_0")
        object.__setattr__(self, "phases", tuple(float(p) for p in self.phases))

    @property
    def k(self) -> int:
        """Number of signal operators in the sequence."""
        return len(self.phases) - 1

    def to_json(self) -> str:
        return json.dumps({"convention": self.convention, "phases": list(self.phases)})

    @classmethod
    def from_json(cls, text: str) -> "QspPhases":
        payload = json.loads(text)
        return cls(tuple(payload["phases"]), payload["convention"])


def _w_matrix(x: float) -> np.ndarray:
    r = math.sqrt(max(0.0, 1.0 - x * x))
    return np.array([[x, 1j * r], [1j * r, x]], dtype=complex)


def qsp_matrix(phases: QspPhases, x: float) -> np.ndarray:
    """Full 2x2 sequence operator at signal value x in [-1, 1]."""
    if not -1.0 <= x <= 1.0:
        raise DomainError(f"signal value {x!r} outside [-1, 1]")
    signal = reflection_matrix(x) if phases.convention == "R" else _w_matrix(x)
    u = sz_matrix(phases.phases[0])
    for phi in phases.phases[1:]:
        u = sz_matrix(phi) @ signal @ u
    return u


def qsp_value(phases: QspPhases, x: float) -> complex:
    """(0,0) entry of the sequence operator; a polynomial in x of degree <= K."""
    return complex(qsp_matrix(phases, x)[0, 0])


def convert_convention(phases: QspPhases) -> QspPhases:
    """Switch between the reflection and W conventions.

    The (0,0) matrix entry is preserved exactly; the second row flips sign for
    odd K (diag(1, (-1)^K) relates the two full matrices).  Round-tripping
    restores the original phases.
    """
    k = phases.k
    p = list(phases.phases)
    if k == 0:
        return QspPhases(tuple(p), "R" if phases.convention == "W" else "W")
    if phases.convention == "W":
        p[0] -= math.pi / 4.0
        for j in range(1, k):
            p[j] -= math.pi / 2.0
        p[k] += (2 * k - 1) * math.pi / 4.0
        return QspPhases(tuple(p), "R")
    p[0] += math.pi / 4.0
    for j in range(1, k):
        p[j] += math.pi / 2.0
    p[k] -= (2 * k - 1) * math.pi / 4.0
    return QspPhases(tuple(p), "W")


# ---------------------------------------------------------------------------
# Grover <-> sequence phase mapping


def _as_pairs(schedule) -> list[tuple[float, float]]:
    if isinstance(schedule, AngleSchedule):
        return schedule.grover_pairs()
    return [(float(a), float(b)) for a, b in schedule]


def grover_to_qsp(schedule) -> QspPhases:
    """Phases of the sequence realized by an alternating Grover schedule."""
    pairs = _as_pairs(schedule)
    n = len(pairs)
    phis = [n * math.pi + sum(a + b for a, b in pairs) / 2.0]
    for alpha, beta in pairs:
        phis.append(beta / 2.0)
        phis.append(alpha / 2.0)
    return QspPhases(tuple(phis), "R")


def qsp_to_grover(phases: QspPhases) -> AngleSchedule:
    """Exact inverse of grover_to_qsp on the (alpha, beta) part.

    phi_0 carries only a global phase and is not representable in the
    schedule; the mapping uses phi_{2l-1} and phi_{2l} alone.
    """
    if phases.convention != "R":
        raise DomainError("expect reflection-convention phases; convert first")
    if phases.k % 2 != 0:
        raise NonAlternatingSchedule("need an even signal-operator count")
    pulses = []
    p = phases.phases
    for l in range(1, phases.k // 2 + 1):
        beta = 2.0 * p[2 * l - 1]
        alpha = 2.0 * p[2 * l]
        pulses.append(Pulse(Generator.ORACLE, beta))
        pulses.append(Pulse(Generator.DIFFUSION, alpha))
    return AngleSchedule(tuple(pulses))


# ---------------------------------------------------------------------------
# Chebyshev-basis polynomials


@dataclass(frozen=True)
class ChebyshevPoly:
    """Polynomial in the Chebyshev-T basis, evaluated by Clenshaw recurrence.

    ``halfwidth`` scales the basis argument: p(x) = sum_n c_n T_n(x / halfwidth),
    so polynomials certified on a wider interval keep a well-conditioned
    evaluation there.
    """

    coeffs: tuple[float, ...]
    parity: str = "none"  # "even" | "odd" | "none"
    halfwidth: float = 1.0

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            coeffs = (0.0,)
        object.__setattr__(self, "coeffs", coeffs)
        if self.parity not in ("even", "odd", "none"):
            raise DomainError(f"parity must be even/odd/none, got {self.parity!r}")
        if self.halfwidth <= 0:
            raise DomainError("halfwidth must be positive")
        if self.parity == "even" and any(c != 0.0 for c in coeffs[1::2]):
            raise DomainError("declared even parity but odd coefficients present")
        if self.parity == "odd" and any(c != 0.0 for c in coeffs[0::2]):
            raise DomainError("declared odd parity but even coefficients present")

    @property
    def degree(self) -> int:
        d = len(self.coeffs) - 1
        while d > 0 and self.coeffs[d] == 0.0:
            d -= 1
        return d

    def __call__(self, x):
        return _cheb.chebval(np.asarray(x) / self.halfwidth, np.asarray(self.coeffs))

    def to_json(self) -> str:
        payload = {
            "basis": "chebyshev-T",
            "parity": self.parity,
            "coeffs": list(self.coeffs),
        }
        if self.halfwidth != 1.0:
            payload["halfwidth"] = self.halfwidth
        return json.dumps(payload)

    @classmethod
    def from_json(cls, text: str) -> "ChebyshevPoly":
        payload = json.loads(text)
        if payload.get("basis") != "chebyshev-T":
            raise DomainError(f"unsupported basis {payload.get('basis')!r}")
        return cls(
            tuple(payload["coeffs"]),
            payload.get("parity", "none"),
            float(payload.get("halfwidth", 1.0)),
        )


# ---------------------------------------------------------------------------
# Achievability checking


@dataclass(frozen=True)
class ConditionVerdict:
    condition: str
    satisfied: bool
    witness_x: float
    margin: float


@dataclass(frozen=True)
class AchievabilityReport:
    verdicts: tuple[ConditionVerdict, ...]

    @property
    def all_pass(self) -> bool:
        return all(v.satisfied for v in self.verdicts)


def _critical_points(poly: ChebyshevPoly) -> np.ndarray:
    der = _cheb.chebder(np.asarray(poly.coeffs))
    if len(der) <= 1:
        return np.array([])
    roots = _cheb.chebroots(der)
    real = roots[np.abs(roots.imag) < 1e-9].real
    return real * poly.halfwidth


def check_achievability(poly: ChebyshevPoly, k: int, tol: float = 1e-6) -> AchievabilityReport:
    """Verdicts for the five sequence-realizability conditions of a degree-K slot.

    Bound conditions are evaluated at the polynomial's exact critical points
    (roots of the derivative) plus dense-grid backstops, each with tolerance
    ``tol``; the report records the worst point and its margin either way.
    """
    verdicts = []

    deg = poly.degree
    verdicts.append(
        ConditionVerdict("degree <= K", deg <= k, math.nan, float(k - deg))
    )

    want = "even" if k % 2 == 0 else "odd"
    coeffs = np.asarray(poly.coeffs)
    wrong = coeffs[1::2] if want == "even" else coeffs[0::2]
    wrong_mag = float(np.abs(wrong).max()) if wrong.size else 0.0
    verdicts.append(
        ConditionVerdict(f"parity == K mod 2 ({want})", wrong_mag <= tol, math.nan, -wrong_mag)
    )

    crit = _critical_points(poly)
    inside = np.concatenate([crit[np.abs(crit) <= 1.0], [-1.0, 1.0], np.linspace(-1, 1, 801)])
    vals = np.abs(poly(inside))
    i = int(np.argmax(vals))
    verdicts.append(
        ConditionVerdict(
            "|p| <= 1 on [-1,1]", vals[i] <= 1.0 + tol, float(inside[i]), float(1.0 - vals[i])
        )
    )

    hi = max(2.0, 2.0 * poly.halfwidth)
    outside = np.concatenate(
        [crit[(np.abs(crit) >= 1.0) & (np.abs(crit) <= hi)], [1.0, -1.0, hi, -hi],
         np.linspace(1.0, hi, 401), -np.linspace(1.0, hi, 401)]
    )
    ovals = np.abs(poly(outside))
    j = int(np.argmin(ovals))
    verdicts.append(
        ConditionVerdict(
            "|p| >= 1 off [-1,1]", ovals[j] >= 1.0 - tol, float(outside[j]), float(ovals[j] - 1.0)
        )
    )

    if k % 2 == 0:
        # |p(i t)|^2 >= 1 on the real line (real coefficients assumed).
        ts = np.linspace(0.0, hi, 1201)
        f = np.abs(poly(1j * ts)) ** 2
        jm = int(np.argmin(f))
        lo, hi_b = max(0, jm - 1), min(len(ts) - 1, jm + 1)
        refine = minimize_scalar(
            lambda t: float(np.abs(poly(1j * t)) ** 2),
            bounds=(ts[lo], ts[hi_b]),
            method="bounded",
        )
        fmin, tmin = float(refine.fun), float(refine.x)
        if f[jm] < fmin:
            fmin, tmin = float(f[jm]), float(ts[jm])
        verdicts.append(
            ConditionVerdict(
                "|p(ix) p*(ix)| >= 1", fmin >= 1.0 - tol, tmin, float(fmin - 1.0)
            )
        )
    else:
        verdicts.append(
            ConditionVerdict("|p(ix) p*(ix)| >= 1 (odd K: vacuous)", True, math.nan, math.inf)
        )
    return AchievabilityReport(tuple(verdicts))


# ---------------------------------------------------------------------------
# Polynomial targets

_GRID = np.linspace(-1.0, 1.0, 2001)
_MAX_SERIES_DEGREE = 4096


def jacobi_anger(kind: str, s: float, eps: float) -> ChebyshevPoly:
    """Truncated Bessel series for cos(s x) or sin(s x) on [-1, 1].

    cos(s x) = J_0(s) + 2 sum_l (-1)^l J_{2l}(s) T_{2l}(x)
    sin(s x) = 2 sum_l (-1)^l J_{2l+1}(s) T_{2l+1}(x)

    The truncation degree is grown by doubling until the sup error on a
    2001-point grid is <= eps, then trimmed to the smallest degree that still
    meets the criterion.
    """
    if kind not in ("cos", "sin"):
        raise DomainError(f"kind must be 'cos' or 'sin', got {kind!r}")
    if not 0.0 < eps < 1.0 / math.e:
        raise DomainError(f"eps must be in (0, 1/e), got {eps!r}")
    if s < 0:
        raise DomainError("s must be nonnegative")
    ref = np.cos(s * _GRID) if kind == "cos" else np.sin(s * _GRID)

    def coeffs_up_to(degree: int) -> np.ndarray:
        c = np.zeros(degree + 1)
        if kind == "cos":
            ls = np.arange(0, degree // 2 + 1)
            c[2 * ls] = 2.0 * (-1.0) ** ls * jv(2 * ls, s)
            c[0] = jv(0, s)
        else:
            ls = np.arange(0, (degree - 1) // 2 + 1)
            c[2 * ls + 1] = 2.0 * (-1.0) ** ls * jv(2 * ls + 1, s)
        return c

    def grid_ok(c: np.ndarray) -> bool:
        return float(np.abs(_cheb.chebval(_GRID, c) - ref).max()) <= eps

    degree = 4
    while degree <= _MAX_SERIES_DEGREE:
        full = coeffs_up_to(degree)
        if grid_ok(full):
            break
        degree *= 2
    else:
        raise DegreeTooSmall("series did not meet eps below the degree cap")

    step = 2
    low = 0 if kind == "cos" else 1
    for d in range(low, degree + 1, step):
        if grid_ok(full[: d + 1]):
            return ChebyshevPoly(tuple(full[: d + 1]), "even" if kind == "cos" else "odd")
    raise DegreeTooSmall("unreachable: full series passed but no prefix did")


def target_ite_component(s: float, eps: float) -> ChebyshevPoly:
    """Polynomial approximation of cos(s x sqrt(1 - x^2)) on [-1, 1].

    Built by expanding the cosine series in the power basis (even powers only)
    and substituting x^2 (1 - x^2) for the squared argument, which doubles the
    degree; verified against the target on the standard grid.
    """
    if s < 0:
        raise DomainError("s must be nonnegative")
    target = np.cos(s * _GRID * np.sqrt(1.0 - _GRID ** 2))
    inner_eps = eps / 2.0
    for _ in range(4):
        base = jacobi_anger("cos", s, inner_eps)
        power = _cheb.cheb2poly(np.asarray(base.coeffs))
        even = power[0::2]  # coefficients of t^{2l}
        # compose sum_l even_l u^l with u = x^2 - x^4
        u = _poly.Polynomial([0.0, 0.0, 1.0, 0.0, -1.0])
        composed = _poly.Polynomial([0.0])
        u_pow = _poly.Polynomial([1.0])
        for c in even:
            composed = composed + c * u_pow
            u_pow = u_pow * u
        coeffs = _cheb.poly2cheb(composed.coef)
        coeffs[1::2] = 0.0  # even by construction; kill roundoff dust
        cand = ChebyshevPoly(tuple(coeffs), "even")
        if float(np.abs(cand(_GRID) - target).max()) <= eps:
            return cand
        inner_eps /= 4.0
    raise NumericalDomain("substituted series failed grid verification")


def _sign_series(eta: float, cap: float, halfwidth: float, max_degree: int):
    """Odd Chebyshev coefficients approximating sgn on [-halfwidth, halfwidth].

    Expands a scaled error-function step erf(kappa x) and returns the smallest
    odd degree whose truncation satisfies |p - sgn| <= cap for |x| >= eta and
    |p| <= 1 everywhere on the domain, or None if max_degree is not enough.
    """
    kappa = erfinv(1.0 - cap / 2.0) / eta
    scale = 1.0 - cap / 4.0
    grid = np.linspace(-1.0, 1.0, 4001)
    x = halfwidth * grid
    outside = np.abs(x) >= eta
    sgn = np.sign(x)

    def ok(c: np.ndarray) -> bool:
        vals = _cheb.chebval(grid, c)
        return (
            float(np.abs(vals - sgn)[outside].max()) <= cap
            and float(np.abs(vals).max()) <= 1.0
        )

    degree = 32
    full = None
    while degree <= _MAX_SERIES_DEGREE:
        full = _cheb.chebinterpolate(lambda u: scale * erf(kappa * halfwidth * u), degree)
        full[0::2] = 0.0
        if ok(full):
            break
        degree *= 2
    else:
        return None
    for d in range(1, min(degree, max_degree) + 1, 2):
        if ok(full[: d + 1]):
            return np.array(full[: d + 1])
    return None


def sign_poly(eta: float, delta_cap: float) -> ChebyshevPoly:
    """Odd polynomial close to sgn(x) away from the origin.

    Satisfies |p(x) - sgn(x)| <= delta_cap for eta <= |x| <= 2 and |p| <= 1 on
    [-2, 2]; the evaluation domain is stored via halfwidth = 2.
    """
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must be in (0, 1), got {eta!r}")
    if not 0.0 < delta_cap < 0.5:
        raise DomainError(f"delta_cap must be in (0, 1/2), got {delta_cap!r}")
    coeffs = _sign_series(eta, delta_cap, 2.0, _MAX_SERIES_DEGREE)
    if coeffs is None:
        raise DegreeTooSmall("sign approximant did not converge below the degree cap")
    return ChebyshevPoly(tuple(coeffs), "odd", halfwidth=2.0)


# ---------------------------------------------------------------------------
# Phase fitting


def _dr_forward(a: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Prefix states of the product of D(a_j) X(x) factors applied to (1, 0)."""
    k, n = len(a), len(xs)
    r = np.sqrt(1.0 - xs ** 2)
    ph = np.exp(1j * a)
    pre = np.empty((k + 1, n, 2), dtype=complex)
    st = np.zeros((n, 2), dtype=complex)
    st[:, 0] = 1.0
    pre[0] = st
    for j in range(k):
        v0 = xs * st[:, 0] + r * st[:, 1]
        v1 = r * st[:, 0] - xs * st[:, 1]
        st = np.empty_like(st)
        st[:, 0] = ph[j] * v0
        st[:, 1] = v1
        pre[j + 1] = st
    return pre


def _dr_backward(pre: np.ndarray, seed: np.ndarray, a: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Reverse sweep: gradient of a real cost with cochain `seed` w.r.t. angles."""
    k = len(a)
    r = np.sqrt(1.0 - xs ** 2)
    ph = np.exp(1j * a)
    grad = np.empty(k)
    m = seed
    for j in range(k - 1, -1, -1):
        grad[j] = -np.sum(np.imag(np.conj(m[:, 0]) * pre[j + 1][:, 0]))
        t0 = np.conj(ph[j]) * m[:, 0]
        t1 = m[:, 1]
        m = np.empty_like(m)
        m[:, 0] = xs * t0 + r * t1
        m[:, 1] = r * t0 - xs * t1
    return grad


def contract_cost_grad(a, xs, target_vals, lam1: float, lam2: float):
    """Penalized fit cost and its analytic gradient.

    mean (target - Re p)^2 + lam1 mean (Im p)^2 + lam2 mean arg(p / q)^2,
    with p, q the two components of the sequence state.  arg(0) counts as 0.
    """
    a = np.asarray(a, dtype=float)
    n = len(xs)
    pre = _dr_forward(a, xs)
    p = pre[-1][:, 0]
    q = pre[-1][:, 1]
    res = p.real - target_vals
    w = p * np.conj(q)
    phi = np.angle(w)
    cost = float(np.mean(res ** 2) + lam1 * np.mean(p.imag ** 2) + lam2 * np.mean(phi ** 2))

    seed = np.zeros((n, 2), dtype=complex)
    seed[:, 0] = (2.0 / n) * res + 1j * (2.0 * lam1 / n) * p.imag
    absp2 = np.abs(p) ** 2
    absq2 = np.abs(q) ** 2
    ok = (absp2 > 1e-300) & (absq2 > 1e-300)
    coef = np.where(ok, (2.0 * lam2 / n) * phi, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        dphi_dp = np.where(ok, (-p.imag + 1j * p.real) / np.where(ok, absp2, 1.0), 0.0)
        dphi_dq = np.where(ok, (q.imag - 1j * q.real) / np.where(ok, absq2, 1.0), 0.0)
    seed[:, 0] += coef * dphi_dp
    seed[:, 1] += coef * dphi_dq
    return cost, _dr_backward(pre, seed, a, xs)


def _mse_cost_grad(a, xs, target_vals, lam1: float):
    """Fit cost without the relative-phase term; used for exploration stages."""
    a = np.asarray(a, dtype=float)
    n = len(xs)
    pre = _dr_forward(a, xs)
    p = pre[-1][:, 0]
    res = p.real - target_vals
    cost = float(np.mean(res ** 2) + lam1 * np.mean(p.imag ** 2))
    seed = np.zeros((n, 2), dtype=complex)
    seed[:, 0] = (2.0 / n) * res + 1j * (2.0 * lam1 / n) * p.imag
    return cost, _dr_backward(pre, seed, a, xs)


def _statematch_cost_grad(a, xs, theta_vals):
    """mean || state - (cos theta, sin theta) ||^2; phase-pinned guide cost."""
    a = np.asarray(a, dtype=float)
    n = len(xs)
    pre = _dr_forward(a, xs)
    v = pre[-1]
    t = np.stack([np.cos(theta_vals), np.sin(theta_vals)], axis=1).astype(complex)
    d = v - t
    cost = float(np.sum(np.abs(d) ** 2) / n)
    return cost, _dr_backward(pre, (2.0 / n) * d, a, xs)


def _lbfgs(fg, x0, maxiter: int = 4000):
    return minimize(
        fg, x0, jac=True, method="L-BFGS-B",
        options={"maxiter": maxiter, "ftol": 1e-18, "gtol": 1e-15},
    )


def dr_angles_to_phases(a: Sequence[float], grover_pairs: bool = False) -> QspPhases:
    """Phases of the sequence equal (on the initial state) to the D-X product.

    With grover_pairs=True the leading phase also absorbs the (-1)^N of N
    Grover iterates, matching grover_to_qsp.
    """
    a = [float(v) for v in a]
    offset = (len(a) // 2) * math.pi if grover_pairs else 0.0
    phis = [offset + sum(a) / 2.0] + [v / 2.0 for v in a]
    return QspPhases(tuple(phis), "R")


def phases_to_dr_angles(phases: QspPhases) -> np.ndarray:
    if phases.convention != "R":
        raise DomainError("expect reflection-convention phases")
    return 2.0 * np.asarray(phases.phases[1:])


TargetLike = Union[ChebyshevPoly, Callable[[np.ndarray], np.ndarray]]


def fit_phases(
    target: TargetLike,
    k: int,
    lambda1: float = 0.01,
    lambda2: float = 0.1,
    n_d: int = 50,
    seed: int = 0,
    restarts: int = 8,
) -> tuple[QspPhases, float]:
    """Fit K sequence phases to a target polynomial on x in [0, 1].

    Seeded multi-start local descent: each start runs an exploration solve
    without the relative-phase term, then polishes on the full cost; the
    winner is chosen by (cost, restart index).  Deterministic for fixed seed.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if n_d < k:
        raise DomainError(f"need n_d >= k, got n_d={n_d} < k={k}")
    xs = np.linspace(0.0, 1.0, n_d)
    tv = np.asarray(target(xs), dtype=float)
    full = lambda a: contract_cost_grad(a, xs, tv, lambda1, lambda2)
    explore = lambda a: _mse_cost_grad(a, xs, tv, lambda1)
    rng = np.random.default_rng(seed)

    best_a, best_cost = None, math.inf
    for r in range(restarts):
        x0 = 0.01 * rng.normal(size=k) if r == 0 else rng.normal(0.0, 0.5, k)
        for path in (lambda: _lbfgs(full, _lbfgs(explore, x0).x), lambda: _lbfgs(full, x0)):
            res = path()
            if not math.isfinite(res.fun):
                continue
            if res.fun < best_cost:
                best_a, best_cost = res.x, float(res.fun)
        if best_cost < 1e-10:
            break
    if best_a is None:
        raise OptimizerDiverged("no restart produced a finite cost")
    return dr_angles_to_phases(best_a), best_cost


def fit_ite_phases(
    s: float,
    k: int,
    lambda1: float = 0.01,
    lambda2: float = 0.1,
    n_d: int = 50,
    seed: int = 0,
    restarts: int = 8,
) -> tuple[QspPhases, float]:
    """Fit phases for the flow target cos(s x sqrt(1 - x^2)).

    Same contract cost and selection rule as fit_phases, with two additions
    that matter for larger s: a continuation ladder over intermediate
    durations (step 1) warm-starting each rung from the previous one, and a
    phase-pinned full-state guide stage before each polish.
    """
    if s < 0:
        raise DomainError("s must be nonnegative")
    if k < 1:
        raise DomainError("k must be >= 1")
    if n_d < k:
        raise DomainError(f"need n_d >= k, got n_d={n_d} < k={k}")
    xs = np.linspace(0.0, 1.0, n_d)
    rungs = [float(v) for v in np.arange(1.0, s, 1.0)] + [float(s)]
    rng = np.random.default_rng(seed)

    warm = None
    best_a, best_cost = None, math.inf
    for i, sl in enumerate(rungs):
        theta = sl * xs * np.sqrt(1.0 - xs ** 2)
        tv = np.cos(theta)
        full = lambda a: contract_cost_grad(a, xs, tv, lambda1, lambda2)
        guide = lambda a: _statematch_cost_grad(a, xs, theta)
        last = i == len(rungs) - 1
        budget = restarts if last else max(2, restarts // 3)
        goal = 1e-10 if last else 1e-7

        best_a, best_cost = None, math.inf
        stall = 0
        for r in range(budget):
            if r == 0:
                x0 = warm if warm is not None else 0.01 * rng.normal(size=k)
            else:
                base = warm if warm is not None else np.zeros(k)
                x0 = base + rng.normal(0.0, 0.4, k)
            improved = False
            for path in (lambda: _lbfgs(full, _lbfgs(guide, x0).x), lambda: _lbfgs(full, x0)):
                res = path()
                if math.isfinite(res.fun) and res.fun < best_cost:
                    best_a, best_cost = res.x, float(res.fun)
                    improved = True
            stall = 0 if improved else stall + 1
            if best_cost < goal or stall >= 3:
                break
        if best_a is None:
            raise OptimizerDiverged("no restart produced a finite cost")
        warm = best_a
    return dr_angles_to_phases(best_a), best_cost


def fixed_point_via_sign(
    iterations: int,
    eta: float,
    delta_cap: float,
    seed: int = 0,
    restarts: int = 8,
) -> AngleSchedule:
    """Grover schedule whose first 2N-1 reflections realize a sign-like entry.

    The odd-length prefix W is fitted so <0|W|0> tracks an odd sign
    approximant (within delta_cap for x >= eta); appending a zero diffusion
    angle then lands the iterate product on the solution state, with terminal
    fidelity 1 - delta^2 for delta^2 = 2 delta_cap on the covered overlap
    range.  The final success probability equals |<0|W|0>|^2 exactly, so the
    fit cost drops the relative-phase term and keeps the imaginary-part
    penalty; an eta ladder provides warm starts.
    """
    if iterations < 1:
        raise DomainError("iterations must be >= 1")
    if not 0.0 < eta < 1.0 or not 0.0 < delta_cap < 0.5:
        raise DomainError("need eta in (0,1) and delta_cap in (0, 1/2)")
    k = 2 * iterations - 1
    final_coeffs = _sign_series(eta, delta_cap, 1.0, k)
    if final_coeffs is None:
        raise DegreeTooSmall(
            f"sign approximant at eta={eta}, cap={delta_cap} needs degree > {k}"
        )

    xs = np.linspace(0.0, 1.0, max(50, k + 1))
    rng = np.random.default_rng(seed)
    ladder = [e for e in (0.5, 0.35, 0.25, 0.18, 0.13) if e > eta] + [eta]
    warm = None
    best_a, best_cost = None, math.inf
    for i, el in enumerate(ladder):
        coeffs = final_coeffs if el == eta else _sign_series(el, delta_cap, 1.0, k)
        if coeffs is None:
            continue
        tv = _cheb.chebval(xs, coeffs)
        fg = lambda a: _mse_cost_grad(a, xs, tv, 0.01)
        last = i == len(ladder) - 1
        budget = restarts if last else max(2, restarts // 3)
        best_a, best_cost = None, math.inf
        stall = 0
        for r in range(budget):
            if r == 0:
                x0 = warm if warm is not None else 0.01 * rng.normal(size=k)
            else:
                x0 = (warm if warm is not None else np.zeros(k)) + rng.normal(0.0, 0.4, k)
            res = _lbfgs(fg, x0, maxiter=6000)
            if math.isfinite(res.fun) and res.fun < best_cost:
                best_a, best_cost = res.x, float(res.fun)
                stall = 0
            else:
                stall += 1
            if best_cost < (2e-6 if last else 1e-5) or stall >= 3:
                break
        if best_a is None:
            raise OptimizerDiverged("no restart produced a finite cost")
        warm = best_a
    a_full = np.concatenate([best_a, [0.0]])
    return qsp_to_grover(dr_angles_to_phases(a_full, grover_pairs=True))
