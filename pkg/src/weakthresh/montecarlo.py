"""Planted sparse-recovery trials and empirical phase maps.

Every random quantity is drawn from a generator seeded per trial, with the
seed derived from ``(master_seed, alpha index, beta index, trial index)``
through :class:`numpy.random.SeedSequence`.  A cell's outcome therefore does
not depend on the rest of the grid or on how cells are scheduled.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import warnings
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .lp import LpStatus
from .recovery import RecoveryProblem, SupportInfo, recover, recovery_error
from .thresholds import Mode, beta_threshold

__all__ = [
    "Amplitude",
    "InstanceSpec",
    "ProblemInstance",
    "PhaseMapSpec",
    "Cell",
    "PhaseMap",
    "round_half_up",
    "trial_seed",
    "gen_instance",
    "run_trial",
    "phase_map",
    "beta_window",
    "empirical_transition",
    "write_phase_map_csv",
    "read_phase_map_csv",
    "write_instance_json",
    "read_instance_json",
    "write_curve_csv",
    "PHASE_MAP_HEADER",
    "CURVE_HEADER",
]

log = logging.getLogger(__name__)

PHASE_MAP_HEADER = ("alpha", "beta", "eta", "mode", "n", "trials", "successes", "seed")
CURVE_HEADER = ("alpha", "beta", "theta_hat", "residual_theta", "residual_informal", "eta", "mode")
DEFAULT_TOLERANCE = 1e-4


class Amplitude:
    GAUSSIAN_UNIT = "gaussian_unit"
    ONES_NEGATIVE = "ones_negative"
    ALL = (GAUSSIAN_UNIT, ONES_NEGATIVE)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def fmt(x: float) -> str:
    """Locale-independent, 17 significant digits."""
    return format(float(x), ".17g")


def trial_seed(master_seed: int, alpha_index: int, beta_index: int, trial_index: int) -> int:
    """64-bit seed for one trial, a stable hash of its grid coordinates."""
    ss = np.random.SeedSequence([int(master_seed), alpha_index, beta_index, trial_index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    m: int
    k: int
    eta: float = 0.0
    mode: Mode = Mode.STANDARD
    amplitude: str = Amplitude.GAUSSIAN_UNIT
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        if self.mode is Mode.STANDARD:
            object.__setattr__(self, "eta", 0.0)
        if not 0 <= self.k <= self.m <= self.n or self.n < 1:
            raise ValueError(f"need 0 <= k <= m <= n, got n={self.n}, m={self.m}, k={self.k}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")
        if self.amplitude not in Amplitude.ALL:
            raise ValueError(f"unknown amplitude tag {self.amplitude!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.mode is Mode.HIDDEN and self.k - self.known > self.n - self.k:
            raise ValueError("not enough off-support coordinates to fill kappa")

    @property
    def known(self) -> int:
        """Number of support indices revealed (partial) or hidden in kappa."""
        return round_half_up(self.eta * self.k) if self.mode is not Mode.STANDARD else 0


@dataclass
class ProblemInstance:
    spec: InstanceSpec
    A: np.ndarray
    x_true: np.ndarray
    y: np.ndarray
    support_info: SupportInfo
    K: tuple[int, ...]

    @property
    def problem(self) -> RecoveryProblem:
        return RecoveryProblem(self.A, self.y, self.support_info)


def gen_instance(spec: InstanceSpec) -> ProblemInstance:
    """Draw one planted instance.

    Draw order from ``default_rng(spec.seed)``: A, K, the revealed or hidden
    part of K, the off-support part of kappa (hidden), the amplitudes.
    """
    rng = np.random.default_rng(spec.seed)
    n, m, k = spec.n, spec.m, spec.k
    A = rng.standard_normal((m, n))
    K = np.sort(rng.choice(n, size=k, replace=False))
    j = spec.known
    if spec.mode is Mode.PARTIAL:
        info = SupportInfo(Mode.PARTIAL, pi=rng.choice(K, size=j, replace=False))
    elif spec.mode is Mode.HIDDEN:
        inside = rng.choice(K, size=j, replace=False)
        outside = rng.choice(np.setdiff1d(np.arange(n), K), size=k - j, replace=False)
        info = SupportInfo(Mode.HIDDEN, kappa=np.concatenate([inside, outside]))
    else:
        info = SupportInfo(Mode.STANDARD)
    x = np.zeros(n)
    if spec.amplitude == Amplitude.GAUSSIAN_UNIT:
        x[K] = rng.standard_normal(k)
    else:
        x[K] = -1.0
    return ProblemInstance(spec, A, x, A @ x, info, tuple(int(i) for i in K))


def _trial_outcome(instance: ProblemInstance, success_tolerance: float) -> str:
    if instance.spec.k == 0 and not np.any(instance.y):
        return "success"
    result = recover(instance.problem)
    if result.lp_status is LpStatus.NUMERICAL_FAILURE:
        return "numerical_failure"
    if result.optimal and recovery_error(result.x_hat, instance.x_true) <= success_tolerance:
        return "success"
    return "failure"


def run_trial(
    instance: ProblemInstance,
    success_tolerance: float = DEFAULT_TOLERANCE,
    diagnostics: Counter | None = None,
) -> bool:
    """True iff the LP is optimal and the relative l2 error is within tolerance.

    An LP numerical failure counts as a failure and increments
    ``diagnostics["numerical_failure"]`` when a counter is supplied.
    """
    outcome = _trial_outcome(instance, success_tolerance)
    if diagnostics is not None:
        diagnostics[outcome] += 1
    return outcome == "success"


# ---------------------------------------------------------------------------
# phase maps


@dataclass(frozen=True)
class PhaseMapSpec:
    """Grid and trial configuration of a phase-map sweep.

    ``betas`` overrides the default window: when given, the same beta values
    are used for every alpha.  Otherwise each alpha row gets ``window_count``
    equispaced betas spanning ``(1 +- window_halfwidth) * beta_w(alpha)``.
    """

    n: int
    alphas: tuple[float, ...]
    trials: int = 100
    eta: float = 0.0
    mode: Mode = Mode.STANDARD
    master_seed: int = 0
    success_tolerance: float = DEFAULT_TOLERANCE
    window_count: int = 9
    window_halfwidth: float = 0.4
    betas: tuple[float, ...] | None = None
    amplitude: str = Amplitude.GAUSSIAN_UNIT

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode.parse(self.mode))
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.betas is not None:
            object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        if self.mode is Mode.STANDARD:
            object.__setattr__(self, "eta", 0.0)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not self.alphas or not all(0.0 < a <= 1.0 for a in self.alphas):
            raise ValueError("alphas must be a nonempty subset of (0, 1]")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {self.eta!r}")
        if self.window_count < 1 or not 0.0 <= self.window_halfwidth < 1.0:
            raise ValueError("window_count >= 1 and 0 <= window_halfwidth < 1 required")
        if self.betas is not None and not all(0.0 <= b <= 1.0 for b in self.betas):
            raise ValueError("betas must lie in [0, 1]")
        if self.amplitude not in Amplitude.ALL:
            raise ValueError(f"unknown amplitude tag {self.amplitude!r}")

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["mode"] = self.mode.value
        d["alphas"] = list(self.alphas)
        d["betas"] = None if self.betas is None else list(self.betas)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PhaseMapSpec":
        d = dict(d)
        d["alphas"] = tuple(d["alphas"])
        if d.get("betas") is not None:
            d["betas"] = tuple(d["betas"])
        return cls(**d)


@dataclass(frozen=True)
class Cell:
    """Aggregated outcome at one grid point; alpha = m/n and beta = k/n."""

    alpha: float
    beta: float
    trials: int
    successes: int
    numerical_failures: int = 0
    m: int = 0
    k: int = 0

    @property
    def frequency(self) -> float:
        return self.successes / self.trials


@dataclass
class PhaseMap:
    cells: list[Cell]
    spec: PhaseMapSpec
    diagnostics: list[str] = field(default_factory=list)


def beta_window(alpha: float, spec: PhaseMapSpec) -> list[float]:
    if spec.betas is not None:
        return list(spec.betas)
    center = beta_threshold(alpha, spec.eta, spec.mode).beta
    return list(center * np.linspace(1.0 - spec.window_halfwidth, 1.0 + spec.window_halfwidth, spec.window_count))


def _cell_jobs(spec: PhaseMapSpec) -> list[tuple]:
    jobs = []
    for ai, alpha in enumerate(spec.alphas):
        m = max(1, min(spec.n, round_half_up(alpha * spec.n)))
        for bi, beta in enumerate(beta_window(alpha, spec)):
            k = max(0, min(m, round_half_up(beta * spec.n)))
            if spec.mode is Mode.HIDDEN:
                # kappa needs k - round(eta k) coordinates off the support
                while k > 0 and k - round_half_up(spec.eta * k) > spec.n - k:
                    k -= 1
            jobs.append((spec, ai, bi, m, k))
    return jobs


def _run_cell(job: tuple) -> tuple[Cell, str | None]:
    spec, ai, bi, m, k = job
    counts: Counter = Counter()
    for ti in range(spec.trials):
        inst = gen_instance(InstanceSpec(
            n=spec.n, m=m, k=k, eta=spec.eta, mode=spec.mode,
            amplitude=spec.amplitude, seed=trial_seed(spec.master_seed, ai, bi, ti),
        ))
        run_trial(inst, spec.success_tolerance, counts)
    cell = Cell(
        alpha=m / spec.n, beta=k / spec.n, trials=spec.trials,
        successes=counts["success"], numerical_failures=counts["numerical_failure"], m=m, k=k,
    )
    note = None
    if cell.numerical_failures:
        note = f"cell (m={m}, k={k}): {cell.numerical_failures} LP numerical failures"
    return cell, note


def phase_map(spec: PhaseMapSpec, jobs: int = 1) -> PhaseMap:
    """Run every cell of ``spec``; ``jobs > 1`` spreads cells over processes.

    The result is identical for every ``jobs`` value.
    """
    cell_jobs = _cell_jobs(spec)
    if jobs > 1 and len(cell_jobs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_cell, cell_jobs))
    else:
        results = [_run_cell(j) for j in cell_jobs]
    notes = [note for _, note in results if note]
    for note in notes:
        log.warning(note)
    return PhaseMap(cells=[c for c, _ in results], spec=spec, diagnostics=notes)


def _pooled_rows(cells: Iterable[Cell]) -> dict[float, list[tuple[float, float]]]:
    # cells sharing (alpha, beta) after rounding k are pooled
    pooled: dict[tuple[float, float], list[int]] = {}
    for c in cells:
        acc = pooled.setdefault((c.alpha, c.beta), [0, 0])
        acc[0] += c.successes
        acc[1] += c.trials
    rows: dict[float, list[tuple[float, float]]] = {}
    for (a, b), (s, t) in sorted(pooled.items()):
        rows.setdefault(a, []).append((b, s / t))
    return rows


def empirical_transition(pmap: PhaseMap | Sequence[Cell], level: float = 0.5) -> list[tuple[float, float]]:
    """50%-crossing in beta for every alpha row, by linear interpolation.

    Uses the first pair of beta-adjacent cells (in increasing beta) whose
    success frequencies straddle ``level``.  Rows without a straddle are
    omitted with a :class:`RuntimeWarning`.
    """
    cells = pmap.cells if isinstance(pmap, PhaseMap) else list(pmap)
    if not cells:
        raise ValueError("empty phase map")
    out = []
    for alpha, row in _pooled_rows(cells).items():
        crossing = None
        for (b0, f0), (b1, f1) in zip(row, row[1:]):
            if f0 >= level >= f1 and f0 > f1:
                crossing = b0 + (f0 - level) / (f0 - f1) * (b1 - b0)
                break
        if crossing is None:
            warnings.warn(f"alpha={alpha!r}: success frequencies do not straddle {level}", RuntimeWarning, stacklevel=2)
            continue
        out.append((alpha, crossing))
    return out


# ---------------------------------------------------------------------------
# file formats


def _comment_lines(config: dict) -> str:
    return "".join(f"# {key}={json.dumps(value, sort_keys=True)}\n" for key, value in config.items())


def phase_map_csv(pmap: PhaseMap, extra: dict | None = None) -> str:
    spec = pmap.spec
    buf = io.StringIO()
    header = {"spec": spec.to_dict(), **(extra or {})}
    header["numerical_failures"] = sum(c.numerical_failures for c in pmap.cells)
    buf.write(_comment_lines(header))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(PHASE_MAP_HEADER)
    for c in pmap.cells:
        w.writerow([fmt(c.alpha), fmt(c.beta), fmt(spec.eta), spec.mode.value, spec.n,
                    c.trials, c.successes, spec.master_seed])
    return buf.getvalue()


def write_phase_map_csv(pmap: PhaseMap, path: str | Path, extra: dict | None = None) -> None:
    Path(path).write_text(phase_map_csv(pmap, extra), encoding="utf-8", newline="")


def _split_comments(text: str) -> tuple[dict, list[str]]:
    config, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            config[key] = json.loads(value) if value else None
        elif line.strip():
            body.append(line)
    return config, body


def read_phase_map_csv(path: str | Path) -> PhaseMap:
    config, body = _split_comments(Path(path).read_text(encoding="utf-8"))
    reader = csv.DictReader(body)
    if tuple(reader.fieldnames or ()) != PHASE_MAP_HEADER:
        raise ValueError(f"unexpected phase-map header {reader.fieldnames}")
    spec = PhaseMapSpec.from_dict(config["spec"])
    cells = []
    for row in reader:
        alpha, beta = float(row["alpha"]), float(row["beta"])
        cells.append(Cell(alpha, beta, int(row["trials"]), int(row["successes"]),
                          m=round_half_up(alpha * spec.n), k=round_half_up(beta * spec.n)))
    return PhaseMap(cells=cells, spec=spec)


def instance_to_dict(inst: ProblemInstance) -> dict:
    s = inst.spec
    return {
        "n": s.n, "m": s.m, "k": s.k, "eta": s.eta, "mode": s.mode.value, "seed": s.seed,
        "amplitude": s.amplitude,
        "A": inst.A.tolist(), "x_true": inst.x_true.tolist(), "y": inst.y.tolist(),
        "pi": list(inst.support_info.pi), "kappa": list(inst.support_info.kappa), "K": list(inst.K),
    }


def instance_from_dict(d: dict) -> ProblemInstance:
    spec = InstanceSpec(n=d["n"], m=d["m"], k=d["k"], eta=d["eta"], mode=d["mode"],
                        amplitude=d.get("amplitude", Amplitude.GAUSSIAN_UNIT), seed=d["seed"])
    A = np.asarray(d["A"], dtype=float).reshape(spec.m, spec.n)
    info = SupportInfo(spec.mode, pi=d.get("pi", ()), kappa=d.get("kappa", ()))
    info.validate(spec.n)
    return ProblemInstance(spec, A, np.asarray(d["x_true"], dtype=float),
                           np.asarray(d["y"], dtype=float), info, tuple(d["K"]))


def write_instance_json(inst: ProblemInstance, path: str | Path) -> None:
    # json emits shortest round-trip reprs, so floats survive exactly
    Path(path).write_text(json.dumps(instance_to_dict(inst)) + "\n", encoding="utf-8")


def read_instance_json(path: str | Path) -> ProblemInstance:
    return instance_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def curve_csv(points: Iterable, eta: float, mode: Mode | str, config: dict | None = None) -> str:
    mode = Mode.parse(mode)
    buf = io.StringIO()
    if config:
        buf.write(_comment_lines(config))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for p in points:
        w.writerow([fmt(p.alpha), fmt(p.beta), fmt(p.theta_hat), fmt(p.residual_theta),
                    fmt(p.residual_informal), fmt(eta), mode.value])
    return buf.getvalue()


def write_curve_csv(points: Iterable, path: str | Path, eta: float, mode: Mode | str,
                    config: dict | None = None) -> None:
    Path(path).write_text(curve_csv(points, eta, mode, config), encoding="utf-8", newline="")
