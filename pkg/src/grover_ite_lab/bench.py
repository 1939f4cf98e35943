"""Benchmark harness: deterministic experiment sweeps with CSV output.

Every run writes a diff-able CSV: first a comment line

    # grover-ite-lab v<semver> config=<sha256-prefix> seed=<u64>

then a header row and data rows with floats in shortest round-trip form.
Row order is canonical (sorted sweep keys), so identical config + seed gives
bitwise-identical bytes.  Phase fits are cached on disk keyed by the fit
inputs; the cache stores the phase-list JSON, whose floats round-trip exactly,
so warm runs reproduce cold runs bit for bit.

Experiments:

* fig-a  -- infidelity of the fitted 2N-reflection sequence against the flow
            target, swept over the marked count at fixed n.
* fig-b  -- the same infidelity averaged over marked counts, swept over n,
            demonstrating system-size independence (phases are shared).
* fig-c  -- averaged infidelity against the flow duration s at fixed budget,
            showing degradation for large s.
* fixed-point -- terminal overlap of the original pi schedule, the
            quasi-Chebyshev fixed-point schedule, and the sign-route schedule.
* custom -- generic sweep over the same row schemas.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigInvalid
from .grover_engine import NamedSchedule, run_schedule
from .pf_compiler import AngleSchedule
from .qsp_engine import (
    QspPhases,
    _dr_forward,
    fit_ite_phases,
    fixed_point_via_sign,
    grover_to_qsp,
    phases_to_dr_angles,
    qsp_to_grover,
)
from .search_core import SearchInstance

CACHE_ENV_VAR = "GROVER_ITE_CACHE_DIR"

_EXPERIMENTS = ("fig-a", "fig-b", "fig-c", "fixed-point", "custom")

_DEFAULTS = {
    "fig-a": dict(n_qubits=(8,), iterations=16, s_values=(0.5, 1.0, 3.0)),
    "fig-b": dict(n_qubits=(4, 6, 8), iterations=8, s_values=(1.0, 3.0, 4.0)),
    # the s grid endpoints here are a harness choice, not a quoted setting
    "fig-c": dict(n_qubits=(6,), iterations=20,
                  s_values=(0.25, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0)),
    "fixed-point": dict(n_qubits=(8,), iterations=20, s_values=()),
    "custom": dict(n_qubits=(8,), iterations=16, s_values=()),
}

_SCHEDULE_NAMES = ("original-pi", "pi-over-three", "fixed-point-chebyshev", "sign-qsp")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    n_qubits: tuple[int, ...]
    iterations: int
    s_values: tuple[float, ...]
    delta2: float = 0.1
    seed: int = 0
    out: str | None = None
    schedule: str | None = None
    marked_counts: tuple[int, ...] | None = None
    eta: float = 0.1
    restarts: int = 8

    def __post_init__(self):
        if self.experiment not in _EXPERIMENTS:
            raise ConfigInvalid(f"unknown experiment {self.experiment!r}")
        if self.iterations < 1:
            raise ConfigInvalid("iterations must be >= 1")
        if not 0.0 < self.delta2 < 1.0:
            raise ConfigInvalid("delta2 must be in (0, 1)")
        if self.seed < 0:
            raise ConfigInvalid("seed must be a nonnegative integer")
        if any(n < 1 or n > 14 for n in self.n_qubits):
            raise ConfigInvalid("n_qubits entries must be in 1..14")
        if any(s < 0 for s in self.s_values):
            raise ConfigInvalid("s_values must be nonnegative")
        object.__setattr__(self, "n_qubits", tuple(int(n) for n in self.n_qubits))
        object.__setattr__(self, "s_values", tuple(float(s) for s in self.s_values))

    @classmethod
    def for_experiment(cls, experiment: str, **overrides) -> "ExperimentConfig":
        if experiment not in _EXPERIMENTS:
            raise ConfigInvalid(f"unknown experiment {experiment!r}")
        params = dict(_DEFAULTS[experiment])
        params.update({k: v for k, v in overrides.items() if v is not None})
        known = set(cls.__dataclass_fields__)
        unknown = set(params) - known
        if unknown:
            raise ConfigInvalid(f"unknown config fields: {sorted(unknown)}")
        return cls(experiment=experiment, **params)

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()[:12]


def cache_dir() -> Path:
    override = os.environ.get(CACHE_ENV_VAR)
    base = Path(override) if override else Path.home() / ".cache" / "grover-ite-lab"
    base.mkdir(parents=True, exist_ok=True)
    return base


def _cache_key(payload: dict) -> str:
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()[:32]


def _cached_phases(payload: dict, compute) -> QspPhases:
    path = cache_dir() / f"{_cache_key(payload)}.json"
    if path.exists():
        return QspPhases.from_json(path.read_text())
    phases = compute()
    path.write_text(phases.to_json())
    return phases


def fitted_ite_phases(s: float, iterations: int, seed: int, restarts: int = 8) -> QspPhases:
    """Phase list for the flow target at duration s, disk-cached."""
    k = 2 * iterations
    payload = {
        "target": "ite-cos", "algo": "ladder-v1", "s": repr(float(s)), "k": k,
        "n_d": 50, "lam1": 0.01, "lam2": 0.1, "seed": seed, "restarts": restarts,
    }
    return _cached_phases(payload, lambda: fit_ite_phases(s, k, seed=seed, restarts=restarts)[0])


def fitted_sign_schedule(iterations: int, eta: float, delta_cap: float, seed: int,
                         restarts: int = 8) -> AngleSchedule:
    """Sign-route fixed-point schedule, disk-cached via its phase list."""
    payload = {
        "target": "sign", "algo": "ladder-v1", "eta": repr(float(eta)),
        "cap": repr(float(delta_cap)), "iters": iterations, "seed": seed,
        "restarts": restarts,
    }

    def compute():
        sched = fixed_point_via_sign(iterations, eta, delta_cap, seed=seed, restarts=restarts)
        return grover_to_qsp(sched)

    return qsp_to_grover(_cached_phases(payload, compute))


# ---------------------------------------------------------------------------
# Row computations


def _ite_infidelities(phases: QspPhases, s: float, n: int) -> list[tuple[int, float, float]]:
    """(M, e0, infidelity) over all marked counts for one fitted phase list."""
    big_n = 1 << n
    ms = np.arange(1, big_n)
    e0s = ms / big_n
    xs = np.sqrt(e0s)
    a = phases_to_dr_angles(phases)
    states = _dr_forward(a, xs)[-1]
    theta = s * xs * np.sqrt(1.0 - xs ** 2)
    overlap = np.cos(theta) * states[:, 0] + np.sin(theta) * states[:, 1]
    inf = 1.0 - np.abs(overlap) ** 2
    return [(int(m), float(e), float(i)) for m, e, i in zip(ms, e0s, inf)]


def fig_a_rows(config: ExperimentConfig) -> list[tuple]:
    n = config.n_qubits[0]
    rows = []
    for s in sorted(config.s_values):
        phases = fitted_ite_phases(s, config.iterations, config.seed, config.restarts)
        for m, e0, inf in _ite_infidelities(phases, s, n):
            rows.append((s, m, e0, inf))
    return rows


def fig_b_rows(config: ExperimentConfig) -> list[tuple]:
    phase_by_s = {
        s: fitted_ite_phases(s, config.iterations, config.seed, config.restarts)
        for s in sorted(config.s_values)
    }
    rows = []
    for n in sorted(config.n_qubits):
        for s in sorted(config.s_values):
            infs = [inf for _, _, inf in _ite_infidelities(phase_by_s[s], s, n)]
            rows.append((n, s, float(np.mean(infs))))
    return rows


def _pav_nondecreasing(y: np.ndarray) -> np.ndarray:
    """Pool-adjacent-violators fit of a nondecreasing sequence."""
    vals = [float(v) for v in y]
    weights = [1.0] * len(vals)
    i = 0
    while i < len(vals) - 1:
        if vals[i] > vals[i + 1] + 1e-15:
            merged = (vals[i] * weights[i] + vals[i + 1] * weights[i + 1]) / (
                weights[i] + weights[i + 1]
            )
            vals[i] = merged
            weights[i] += weights[i + 1]
            del vals[i + 1], weights[i + 1]
            i = max(i - 1, 0)
        else:
            i += 1
    out = []
    for v, w in zip(vals, weights):
        out.extend([v] * int(w))
    return np.array(out)


def fig_c_rows(config: ExperimentConfig):
    """Rows (s, mean infidelity) plus the isotonic-trend flag on s >= 1."""
    n = config.n_qubits[0]
    rows = []
    for s in sorted(config.s_values):
        phases = fitted_ite_phases(s, config.iterations, config.seed, config.restarts)
        infs = [inf for _, _, inf in _ite_infidelities(phases, s, n)]
        rows.append((s, float(np.mean(infs))))
    tail = np.array([inf for s, inf in rows if s >= 1.0])
    if len(tail) >= 2 and tail.max() > tail.min():
        fit = _pav_nondecreasing(tail)
        residual = float(np.sqrt(np.mean((tail - fit) ** 2)))
        trend_ok = residual <= 0.1 * float(tail.max() - tail.min())
    else:
        trend_ok = True
    return rows, trend_ok


def resolve_schedule(token: str, config: ExperimentConfig):
    """Schedule object for a name or a schedule-JSON path."""
    if token in ("original-pi", "pi-over-three"):
        return NamedSchedule(token, config.iterations)
    if token == "fixed-point-chebyshev":
        return NamedSchedule(token, config.iterations, delta2=config.delta2)
    if token == "sign-qsp":
        return fitted_sign_schedule(
            config.iterations, config.eta, config.delta2 / 2.0, config.seed, config.restarts
        )
    if token.endswith(".json") and Path(token).exists():
        return AngleSchedule.from_json(Path(token).read_text())
    raise ConfigInvalid(f"unknown schedule {token!r}")


def _overlap_rows(config: ExperimentConfig, names: list[str]) -> list[tuple]:
    n = config.n_qubits[0]
    big_n = 1 << n
    ms = config.marked_counts or tuple(range(1, big_n))
    if any(not 1 <= m <= big_n - 1 for m in ms):
        raise ConfigInvalid("marked_counts must lie in 1..N-1")
    rows = []
    for name in sorted(names):
        schedule = resolve_schedule(name, config)
        for m in sorted(ms):
            inst = SearchInstance(n, tuple(range(m)))
            _, trace = run_schedule(inst, schedule, mode="reduced")
            rows.append((name, int(m), m / big_n, float(trace[-1])))
    return rows


def fixed_point_rows(config: ExperimentConfig):
    """Rows (schedule, M, e0, final overlap) plus the Chebyshev valid range."""
    rows = _overlap_rows(
        config, ["original-pi", "fixed-point-chebyshev", "sign-qsp"]
    )
    cheb = [(m, ov) for name, m, _, ov in rows if name == "fixed-point-chebyshev"]
    level = 1.0 - config.delta2
    valid_from = None
    overlaps = [ov for _, ov in cheb]
    for i in range(len(overlaps)):
        if all(ov >= level - 1e-9 for ov in overlaps[i:]):
            valid_from = cheb[i][0] / (1 << config.n_qubits[0])
            break
    return rows, valid_from


def custom_rows(config: ExperimentConfig):
    """Generic sweep: schedule-overlap rows, or flow-infidelity rows, or empty."""
    if config.schedule is not None:
        return "overlap", _overlap_rows(config, [config.schedule])
    if not config.s_values:
        return "infidelity", []
    n = config.n_qubits[0]
    big_n = 1 << n
    ms = config.marked_counts or tuple(range(1, big_n))
    if any(not 1 <= m <= big_n - 1 for m in ms):
        raise ConfigInvalid("marked_counts must lie in 1..N-1")
    wanted = set(int(m) for m in ms)
    rows = []
    for s in sorted(config.s_values):
        phases = fitted_ite_phases(s, config.iterations, config.seed, config.restarts)
        for m, e0, inf in _ite_infidelities(phases, s, n):
            if m in wanted:
                rows.append((s, m, e0, inf))
    return "infidelity", rows


# ---------------------------------------------------------------------------
# CSV assembly


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def render_csv(config: ExperimentConfig, header: list[str], rows: list[tuple],
               trailing_comments: list[str] | None = None) -> str:
    lines = [
        f"# grover-ite-lab v{__version__} config={config.config_hash()} seed={config.seed}",
        ",".join(header),
    ]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    lines.extend(trailing_comments or [])
    return "\n".join(lines) + "\n"


def run_fig_a(config: ExperimentConfig) -> str:
    return render_csv(config, ["s", "M", "e0", "infidelity"], fig_a_rows(config))


def run_fig_b(config: ExperimentConfig) -> str:
    return render_csv(config, ["n", "s", "mean_infidelity"], fig_b_rows(config))


def run_fig_c(config: ExperimentConfig) -> str:
    rows, trend_ok = fig_c_rows(config)
    return render_csv(
        config, ["s", "mean_infidelity"], rows,
        [f"# monotone_trend_s_ge_1={trend_ok}"],
    )


def run_fixed_point(config: ExperimentConfig) -> str:
    rows, valid_from = fixed_point_rows(config)
    comment = f"# chebyshev_valid_e0_min={_fmt(valid_from) if valid_from is not None else 'none'}"
    return render_csv(config, ["schedule", "M", "e0", "final_overlap"], rows, [comment])


def run_custom(config: ExperimentConfig) -> str:
    kind, rows = custom_rows(config)
    if kind == "overlap":
        return render_csv(config, ["schedule", "M", "e0", "final_overlap"], rows)
    return render_csv(config, ["s", "M", "e0", "infidelity"], rows)


RUNNERS = {
    "fig-a": run_fig_a,
    "fig-b": run_fig_b,
    "fig-c": run_fig_c,
    "fixed-point": run_fixed_point,
    "custom": run_custom,
}


# ---------------------------------------------------------------------------
# Threshold checks for --strict runs


def check_fig_a(config: ExperimentConfig) -> tuple[bool, str]:
    rows = fig_a_rows(config)
    problems = []
    for s in sorted(config.s_values):
        infs = np.array([inf for ss, _, _, inf in rows if ss == s])
        med, p95 = float(np.median(infs)), float(np.quantile(infs, 0.95))
        if med > 1e-2 or p95 > 2e-2:
            problems.append(f"s={s}: median={med:.3e} p95={p95:.3e}")
    return (not problems, "; ".join(problems) or "fig-a thresholds met")


def check_fig_b(config: ExperimentConfig) -> tuple[bool, str]:
    rows = fig_b_rows(config)
    problems = []
    for s in sorted(config.s_values):
        means = [mean for _, ss, mean in rows if ss == s]
        lo, hi = min(means), max(means)
        if hi - lo > 10.0 * lo:
            problems.append(f"s={s}: spread {hi - lo:.3e} > 10x min {lo:.3e}")
    return (not problems, "; ".join(problems) or "fig-b spread within 10x of min")


def check_fig_c(config: ExperimentConfig) -> tuple[bool, str]:
    rows, _ = fig_c_rows(config)
    by_s = dict(rows)
    s_max = max(by_s)
    ok = by_s[s_max] > by_s.get(1.0, min(by_s.values()))
    return ok, f"infidelity(s={s_max})={by_s[s_max]:.3e} vs s=1 {by_s.get(1.0):.3e}"


def check_fixed_point(config: ExperimentConfig) -> tuple[bool, str]:
    rows, valid_from = fixed_point_rows(config)
    if valid_from is None:
        return False, "chebyshev schedule has no valid range"
    level = 1.0 - config.delta2
    by = {}
    for name, m, e0, ov in rows:
        by.setdefault(name, []).append((e0, ov))
    cheb_ok = all(ov >= level - 1e-9 for e0, ov in by["fixed-point-chebyshev"] if e0 >= valid_from)
    pi_overshoot = any(ov < 0.5 for _, ov in by["original-pi"])
    sign_valid = [ov for e0, ov in by["sign-qsp"] if e0 >= valid_from]
    sign_ok = bool(np.mean([ov >= 0.85 for ov in sign_valid]) >= 0.9)
    ok = cheb_ok and pi_overshoot and sign_ok
    return ok, (
        f"cheb>= {level} on e0>={valid_from}: {cheb_ok}; "
        f"pi overshoot: {pi_overshoot}; sign>=0.85 on 90% of range: {sign_ok}"
    )


CHECKS = {
    "fig-a": check_fig_a,
    "fig-b": check_fig_b,
    "fig-c": check_fig_c,
    "fixed-point": check_fixed_point,
}
