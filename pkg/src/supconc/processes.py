"""Finite classes of centered functions over independent discrete coordinates.

A :class:`Scenario` fixes n independent coordinates X_k with finite support and
m functions s_i = (s_i^1, ..., s_i^n).  The object of interest is
``Z = max_i sum_k s_i^k(X_k)``.  This module builds scenarios, computes V_n and
Talagrand's factor V, enumerates the exact law of Z and samples it with
counter-based randomness.
"""

from __future__ import annotations

import dataclasses
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, NamedTuple, Sequence

import jsonschema
import numpy as np
from scipy import stats
from scipy.special import logsumexp

CENTERING_TOL = 1e-10
PROB_SUM_TOL = 1e-12
ENUMERATION_CAP = 20_000_000
_CHUNK = 1 << 16


class EnumerationCapExceeded(ValueError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"enumeration needs {required} outcomes, cap is {cap}")
        self.required = required
        self.cap = cap


class ScenarioFormatError(ValueError):
    pass


@dataclass(frozen=True)
class CoordinateDist:
    """Law of one coordinate: atoms ``values[a]`` with probabilities ``probs[a]``.

    Atom values are labels for the functions' tables; they only need to lie in
    [-1, 1] when used as multipliers of a randomized process.
    """

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        if not values or len(values) != len(probs):
            raise ValueError("need a nonempty list of atoms with one probability each")
        if not all(math.isfinite(v) for v in values):
            raise ValueError("atom values must be finite")
        if not all(0.0 < p <= 1.0 for p in probs):
            raise ValueError(f"atom probabilities must lie in (0, 1], got {probs}")
        if abs(math.fsum(probs) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, not 1")

    @classmethod
    def from_atoms(cls, atoms: Sequence[tuple[float, float]]) -> "CoordinateDist":
        return cls(tuple(a[0] for a in atoms), tuple(a[1] for a in atoms))

    @classmethod
    def signs(cls) -> "CoordinateDist":
        return cls((-1.0, 1.0), (0.5, 0.5))

    @property
    def size(self) -> int:
        return len(self.values)

    def expect(self, g: np.ndarray) -> float:
        """E g(X) for g given as one value per atom."""
        return math.fsum(p * x for p, x in zip(self.probs, np.asarray(g, dtype=float)))

    @property
    def mean(self) -> float:
        return self.expect(self.values)


@dataclass(frozen=True, eq=False)
class Scenario:
    """n coordinates and m functions; ``tables[k][i, a] = s_i^k(atom a of X_k)``."""

    coords: tuple[CoordinateDist, ...]
    tables: tuple[np.ndarray, ...]
    kind: str = "general"
    source: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        coords = tuple(self.coords)
        if not coords:
            raise ValueError("a scenario needs at least one coordinate")
        tables = []
        for k, (c, tab) in enumerate(zip(coords, self.tables)):
            arr = np.array(tab, dtype=float, copy=True)
            if arr.ndim != 2 or arr.shape[1] != c.size:
                raise ValueError(
                    f"table for coordinate {k} has shape {arr.shape}, expected (m, {c.size})"
                )
            arr.setflags(write=False)
            tables.append(arr)
        if len(tables) != len(coords):
            raise ValueError("need one table per coordinate")
        ms = {t.shape[0] for t in tables}
        if len(ms) != 1 or 0 in ms:
            raise ValueError(f"inconsistent or empty function counts across coordinates: {ms}")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "tables", tuple(tables))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def m(self) -> int:
        return self.tables[0].shape[0]

    @property
    def outcome_count(self) -> int:
        return math.prod(c.size for c in self.coords)

    def value(self, i: int, k: int) -> np.ndarray:
        """s_i^k as one value per atom of coordinate k."""
        return self.tables[k][i]


class Violation(NamedTuple):
    kind: str  # "centering" | "range" | "nonfinite"
    function: int
    coordinate: int
    detail: float


def validate(s: Scenario) -> list[Violation]:
    """Report every (function, coordinate) breaking centering or the [-1, 1] range."""
    out = []
    for k, (c, tab) in enumerate(zip(s.coords, s.tables)):
        for i in range(s.m):
            row = tab[i]
            if not np.all(np.isfinite(row)):
                out.append(Violation("nonfinite", i, k, float("nan")))
                continue
            mean = c.expect(row)
            if abs(mean) > CENTERING_TOL:
                out.append(Violation("centering", i, k, mean))
            worst = float(np.max(np.abs(row)))
            if worst > 1.0:
                out.append(Violation("range", i, k, worst))
    return out


def build_rademacher(
    zeta: Sequence[Sequence[float]], coord_dists: Sequence[CoordinateDist] | None = None
) -> Scenario:
    """Randomized process s_i^k(x) = x * zeta[i][k]; default coordinates are fair signs."""
    z = np.asarray(zeta, dtype=float)
    if z.ndim != 2 or z.size == 0:
        raise ValueError("zeta must be a nonempty m x n matrix")
    m, n = z.shape
    coords = tuple(coord_dists) if coord_dists is not None else (CoordinateDist.signs(),) * n
    if len(coords) != n:
        raise ValueError(f"zeta has {n} columns but {len(coords)} coordinate laws were given")
    tables = []
    for k, c in enumerate(coords):
        if abs(c.mean) > CENTERING_TOL:
            raise ValueError(f"coordinate {k} is not centered (mean {c.mean!r})")
        tab = np.outer(z[:, k], np.asarray(c.values))
        if np.max(np.abs(tab)) > 1.0:
            raise ValueError(f"|zeta * x| exceeds 1 on coordinate {k}")
        tables.append(tab)
    source = {"kind": "rademacher", "zeta": z.tolist()}
    if coord_dists is not None:
        source["coordinates"] = [_coord_to_dict(c) for c in coords]
    return Scenario(coords, tuple(tables), kind="rademacher", source=source)


def build_set_indexed(
    space_size: int, coord_probs: Sequence[Sequence[float]], sets: Sequence[Sequence[int]]
) -> Scenario:
    """Set-indexed process s^k(x) = 1{x in S} - P(X_k in S), one function per set.

    Points of zero probability are dropped from the coordinate laws.
    """
    if space_size < 1:
        raise ValueError("space_size must be >= 1")
    if not sets:
        raise ValueError("need at least one set")
    if not coord_probs:
        raise ValueError("need at least one coordinate")
    masks = []
    for j, S in enumerate(sets):
        mask = np.zeros(space_size, dtype=bool)
        for idx in S:
            if not (isinstance(idx, (int, np.integer)) and 0 <= idx < space_size):
                raise ValueError(f"set {j} has index {idx!r} outside [0, {space_size})")
            mask[idx] = True
        masks.append(mask)
    coords, tables = [], []
    for k, probs in enumerate(coord_probs):
        p = np.asarray(probs, dtype=float)
        if p.shape != (space_size,) or np.any(p < 0) or not np.all(np.isfinite(p)):
            raise ValueError(f"coordinate {k}: need {space_size} nonnegative probabilities")
        if abs(math.fsum(p) - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"coordinate {k}: probabilities sum to {math.fsum(p)!r}")
        keep = np.flatnonzero(p > 0)
        coords.append(CoordinateDist(tuple(float(a) for a in keep), tuple(p[keep])))
        tab = np.array([mask[keep] - math.fsum(p[mask]) for mask in masks])
        tables.append(tab)
    source = {
        "kind": "set_indexed",
        "space_size": int(space_size),
        "coordinate_probs": [list(map(float, p)) for p in coord_probs],
        "sets": [sorted(int(i) for i in S) for S in sets],
    }
    return Scenario(tuple(coords), tuple(tables), kind="set_indexed", source=source)


def compute_Vn(s: Scenario) -> float:
    """max_i sum_k Var s_i^k(X_k), exact over the atoms."""
    best = 0.0
    for i in range(s.m):
        total = 0.0
        for c, tab in zip(s.coords, s.tables):
            row = tab[i]
            mean = c.expect(row)
            total += c.expect((row - mean) ** 2)
        best = max(best, total)
    return best


@dataclass(frozen=True, eq=False)
class ExactSummary:
    """Exact law of Z: sorted distinct values ``support`` with masses ``probs``."""

    support: np.ndarray
    probs: np.ndarray
    mean_z: float
    var_z: float
    median_z: float
    talagrand_v: float
    outcomes: int
    tail: dict[float, float] = field(default_factory=dict)

    @property
    def support_size(self) -> int:
        return int(self.support.size)

    def prob_ge(self, a: float) -> float:
        i = int(np.searchsorted(self.support, a, side="left"))
        return math.fsum(self.probs[i:])

    def prob_le(self, a: float) -> float:
        i = int(np.searchsorted(self.support, a, side="right"))
        return math.fsum(self.probs[:i])

    def log_mgf(self, t: float) -> float:
        """log E exp(tZ)."""
        return float(logsumexp(t * self.support, b=self.probs))


def _outcome_chunks(s: Scenario, cap: int):
    total = s.outcome_count
    if total > cap:
        raise EnumerationCapExceeded(total, cap)
    shape = tuple(c.size for c in s.coords)
    probs = [np.asarray(c.probs) for c in s.coords]
    for start in range(0, total, _CHUNK):
        idx = np.unravel_index(np.arange(start, min(start + _CHUNK, total)), shape)
        yield idx, probs


def _sums(s: Scenario, idx) -> tuple[np.ndarray, np.ndarray]:
    """S_n(s_i) and sum_k s_i^k(X_k)^2 for every function and outcome, shape (m, N)."""
    S = np.zeros((s.m, idx[0].size))
    Q = np.zeros_like(S)
    for k, tab in enumerate(s.tables):
        vals = tab[:, idx[k]]
        S += vals
        Q += vals * vals
    return S, Q


def enumerate_exact(
    s: Scenario, thresholds: Sequence[float] = (), cap: int = ENUMERATION_CAP
) -> ExactSummary:
    """Exact law of Z by streaming over the product space in fixed-size chunks."""
    masses: dict[float, float] = {}
    v_parts = []
    for idx, probs in _outcome_chunks(s, cap):
        w = np.ones(idx[0].size)
        for k, p in enumerate(probs):
            w = w * p[idx[k]]
        S, Q = _sums(s, idx)
        Z = S.max(axis=0)
        v_parts.append(math.fsum(w * Q.max(axis=0)))
        vals, inv = np.unique(Z, return_inverse=True)
        acc = np.bincount(inv.ravel(), weights=w, minlength=vals.size)
        for z, q in zip(vals.tolist(), acc.tolist()):
            masses[z] = masses.get(z, 0.0) + q
    support = np.array(sorted(masses))
    probs = np.array([masses[z] for z in support])
    mean = math.fsum(probs * support)
    if -1e-12 < mean < 0.0:
        # E(Z) >= E(S_n(s_1)) = 0; anything below is rounding
        mean = 0.0
    var = math.fsum(probs * (support - mean) ** 2)
    cdf = np.cumsum(probs)
    median = float(support[int(np.searchsorted(cdf, 0.5 - 1e-12, side="left"))])
    summary = ExactSummary(
        support=support,
        probs=probs,
        mean_z=mean,
        var_z=var,
        median_z=median,
        talagrand_v=math.fsum(v_parts),
        outcomes=s.outcome_count,
    )
    for a in thresholds:
        summary.tail[float(a)] = summary.prob_ge(float(a))
    return summary


def compute_talagrand_V(s: Scenario, cap: int = ENUMERATION_CAP) -> float:
    """V = E max_i sum_k s_i^k(X_k)^2, by enumeration."""
    return enumerate_exact(s, cap=cap).talagrand_v


def evaluate_Z(s: Scenario, atom_indices: Sequence[int]) -> float:
    """Z at the outcome where coordinate k sits on atom ``atom_indices[k]``."""
    if len(atom_indices) != s.n:
        raise ValueError(f"need {s.n} atom indices")
    total = np.zeros(s.m)
    for tab, a in zip(s.tables, atom_indices):
        total += tab[:, a]
    return float(total.max())


# --- counter-based randomness -------------------------------------------------
#
# Each uniform is a pure function of (seed, trial index, coordinate index):
#   u = top53(mix(mix(mix(seed) ^ trial) ^ coordinate)) / 2^53
# where mix is the SplitMix64 output function applied to x + 0x9E3779B97F4A7C15.
# Draws therefore do not depend on how trials are split across workers.

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def mix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = np.asarray(x, dtype=np.uint64) + _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def uniforms(seed: int, trials: np.ndarray, coordinate: int) -> np.ndarray:
    base = mix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))
    h = mix64(base ^ np.asarray(trials, dtype=np.uint64))
    h = mix64(h ^ np.uint64(coordinate))
    return (h >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def sample_Z_batch(s: Scenario, seed: int, start: int, stop: int) -> np.ndarray:
    """Draws of Z for trial indices start, ..., stop - 1."""
    trials = np.arange(start, stop, dtype=np.uint64)
    S = np.zeros((s.m, trials.size))
    for k, (c, tab) in enumerate(zip(s.coords, s.tables)):
        cdf = np.cumsum(c.probs)
        u = uniforms(seed, trials, k)
        atom = np.minimum(np.searchsorted(cdf, u, side="right"), c.size - 1)
        S += tab[:, atom]
    return S.max(axis=0)


def sample_Z(s: Scenario, seed: int, trial_index: int) -> float:
    return float(sample_Z_batch(s, seed, trial_index, trial_index + 1)[0])


# --- Monte Carlo summaries ----------------------------------------------------


def binomial_lower_radius(successes: int, trials: int, sigmas: float = 3.0) -> float:
    """p_hat minus a one-sided lower confidence bound at the ``sigmas`` normal level.

    Uses the normal approximation, or exact Clopper-Pearson below 50 successes.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p_hat = successes / trials
    if successes == 0:
        return 0.0
    if successes < 50:
        alpha = stats.norm.sf(sigmas)
        lower = float(stats.beta.ppf(alpha, successes, trials - successes + 1))
        return p_hat - lower
    return sigmas * math.sqrt(p_hat * (1.0 - p_hat) / trials)


@dataclass(frozen=True)
class TailEstimate:
    threshold: float
    upper_freq: float  # fraction of draws with Z >= threshold
    upper_radius: float
    lower_freq: float  # fraction of draws with Z <= threshold
    lower_radius: float


@dataclass(frozen=True, eq=False)
class SimResult:
    """Monte Carlo estimates.  Standard errors are None when undefined (one trial)."""

    trials: int
    seed: int
    mean_z: float
    mean_se: float | None
    var_z: float
    var_se: float | None
    median_z: float
    median_se: float | None
    tails: tuple[TailEstimate, ...]
    samples: np.ndarray = field(repr=False)

    def tail_at(self, threshold: float, sigmas: float = 3.0) -> TailEstimate:
        n = self.samples.size
        up = int(np.count_nonzero(self.samples >= threshold))
        lo = int(np.count_nonzero(self.samples <= threshold))
        return TailEstimate(
            float(threshold),
            up / n,
            binomial_lower_radius(up, n, sigmas),
            lo / n,
            binomial_lower_radius(lo, n, sigmas),
        )

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "mean_z": self.mean_z,
            "mean_se": self.mean_se,
            "var_z": self.var_z,
            "var_se": self.var_se,
            "median_z": self.median_z,
            "median_se": self.median_se,
            "tails": [dataclasses.asdict(t) for t in self.tails],
        }


def estimate_stats(
    s: Scenario,
    trials: int,
    seed: int,
    thresholds: Sequence[float] = (),
    workers: int = 1,
    sigmas: float = 3.0,
) -> SimResult:
    """Monte Carlo estimates of E(Z), Var Z, the median and tail frequencies.

    Trials are cut into fixed chunks that are merged in chunk order, so the
    result does not depend on ``workers``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    bounds = [(a, min(a + _CHUNK, trials)) for a in range(0, trials, _CHUNK)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: sample_Z_batch(s, seed, *b), bounds))
    else:
        parts = [sample_Z_batch(s, seed, *b) for b in bounds]
    z = np.concatenate(parts)

    mean = float(np.mean(z))
    if trials > 1:
        var = float(np.var(z, ddof=1))
        mean_se = math.sqrt(var / trials)
        m4 = float(np.mean((z - mean) ** 4))
        var_se = math.sqrt(max(m4 - var * var, 0.0) / trials)
        ordered = np.sort(z)
        half = 1.959963984540054 * math.sqrt(trials) / 2.0
        j = max(int(math.floor(trials / 2 - half)), 0)
        k = min(int(math.ceil(trials / 2 + half)), trials - 1)
        median_se = float(ordered[k] - ordered[j]) / (2 * 1.959963984540054)
        median = float(np.median(z))
    else:
        var, mean_se, var_se, median_se, median = 0.0, None, None, None, mean
    result = SimResult(
        trials=trials,
        seed=seed,
        mean_z=mean,
        mean_se=mean_se,
        var_z=var,
        var_se=var_se,
        median_z=median,
        median_se=median_se,
        tails=(),
        samples=z,
    )
    tails = tuple(result.tail_at(a, sigmas) for a in thresholds)
    object.__setattr__(result, "tails", tails)
    return result


def default_workers() -> int:
    return os.cpu_count() or 1


# --- scenario files -----------------------------------------------------------

_NUM = {"type": "number"}
_ATOM = {
    "type": "object",
    "properties": {"value": _NUM, "prob": _NUM},
    "required": ["value", "prob"],
    "additionalProperties": False,
}
_COORD = {
    "type": "object",
    "properties": {"atoms": {"type": "array", "items": _ATOM, "minItems": 1}},
    "required": ["atoms"],
    "additionalProperties": False,
}
_MATRIX = {"type": "array", "minItems": 1, "items": {"type": "array", "minItems": 1, "items": _NUM}}
_SCHEMAS = {
    "general": {
        "type": "object",
        "properties": {
            "kind": {"const": "general"},
            "coordinates": {"type": "array", "minItems": 1, "items": _COORD},
            "functions": {
                "type": "array",
                "minItems": 1,
                "items": {"type": "array", "minItems": 1, "items": {"type": "array", "items": _NUM}},
            },
        },
        "required": ["kind", "coordinates", "functions"],
        "additionalProperties": False,
    },
    "rademacher": {
        "type": "object",
        "properties": {
            "kind": {"const": "rademacher"},
            "zeta": _MATRIX,
            "coordinates": {"type": "array", "minItems": 1, "items": _COORD},
        },
        "required": ["kind", "zeta"],
        "additionalProperties": False,
    },
    "set_indexed": {
        "type": "object",
        "properties": {
            "kind": {"const": "set_indexed"},
            "space_size": {"type": "integer", "minimum": 1},
            "coordinate_probs": _MATRIX,
            "sets": {
                "type": "array",
                "minItems": 1,
                "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            },
        },
        "required": ["kind", "space_size", "coordinate_probs", "sets"],
        "additionalProperties": False,
    },
}


def _coord_to_dict(c: CoordinateDist) -> dict:
    return {"atoms": [{"value": v, "prob": p} for v, p in zip(c.values, c.probs)]}


def _coord_from_dict(d: dict) -> CoordinateDist:
    return CoordinateDist.from_atoms([(a["value"], a["prob"]) for a in d["atoms"]])


def _field_path(path) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in path)


def scenario_from_dict(doc: Any) -> Scenario:
    """Build a scenario from its JSON document form; raises ScenarioFormatError."""
    if not isinstance(doc, dict):
        raise ScenarioFormatError("$: scenario must be a JSON object")
    kind = doc.get("kind")
    if kind not in _SCHEMAS:
        raise ScenarioFormatError(f"$.kind: expected one of {sorted(_SCHEMAS)}, got {kind!r}")
    err = jsonschema.exceptions.best_match(jsonschema.Draft7Validator(_SCHEMAS[kind]).iter_errors(doc))
    if err is not None:
        raise ScenarioFormatError(f"{_field_path(err.absolute_path)}: {err.message}")
    try:
        if kind == "rademacher":
            coords = None
            if "coordinates" in doc:
                coords = [_coord_from_dict(c) for c in doc["coordinates"]]
            return build_rademacher(doc["zeta"], coords)
        if kind == "set_indexed":
            return build_set_indexed(doc["space_size"], doc["coordinate_probs"], doc["sets"])
        coords = [_coord_from_dict(c) for c in doc["coordinates"]]
        funcs = doc["functions"]
        n = len(coords)
        for i, row in enumerate(funcs):
            if len(row) != n:
                raise ScenarioFormatError(
                    f"$.functions[{i}]: expected {n} per-coordinate lists, got {len(row)}"
                )
            for k, vals in enumerate(row):
                if len(vals) != coords[k].size:
                    raise ScenarioFormatError(
                        f"$.functions[{i}][{k}]: expected {coords[k].size} values, got {len(vals)}"
                    )
        tables = tuple(np.array([funcs[i][k] for i in range(len(funcs))]) for k in range(n))
        return Scenario(tuple(coords), tables, kind="general", source=doc)
    except ScenarioFormatError:
        raise
    except ValueError as exc:
        raise ScenarioFormatError(f"$: {exc}") from exc


def scenario_to_dict(s: Scenario) -> dict:
    if s.source is not None:
        return json.loads(json.dumps(s.source))
    return {
        "kind": "general",
        "coordinates": [_coord_to_dict(c) for c in s.coords],
        "functions": [[s.tables[k][i].tolist() for k in range(s.n)] for i in range(s.m)],
    }


def load_scenario(path: str | os.PathLike) -> Scenario:
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return scenario_from_dict(doc)


# --- random enumerable scenarios ----------------------------------------------


def _random_probs(rng: np.random.Generator, size: int) -> np.ndarray:
    p = rng.dirichlet(np.ones(size)) * 0.9 + 0.1 / size
    return p / p.sum()


def _random_centered_row(rng: np.random.Generator, probs: np.ndarray) -> np.ndarray:
    raw = rng.uniform(-1.0, 1.0, probs.size)
    row = raw - math.fsum(probs * raw)
    return row / max(1.0, float(np.max(np.abs(row))))


def _random_centered_dist(rng: np.random.Generator, atoms: int) -> CoordinateDist:
    probs = _random_probs(rng, atoms)
    values = _random_centered_row(rng, probs)
    return CoordinateDist(tuple(values), tuple(probs))


def random_scenario(
    rng: np.random.Generator,
    kind: str | None = None,
    max_n: int = 6,
    max_atoms: int = 4,
    max_m: int = 8,
) -> Scenario:
    """A random valid scenario small enough to enumerate."""
    kind = kind or rng.choice(["general", "rademacher", "set_indexed"])
    n = int(rng.integers(1, max_n + 1))
    m = int(rng.integers(1, max_m + 1))
    if kind == "rademacher":
        zeta = rng.uniform(-1.0, 1.0, (m, n))
        if rng.random() < 0.5:
            return build_rademacher(zeta)
        coords = [_random_centered_dist(rng, int(rng.integers(2, max_atoms + 1))) for _ in range(n)]
        return build_rademacher(zeta, coords)
    if kind == "set_indexed":
        size = int(rng.integers(2, max_atoms + 1))
        probs = [_random_probs(rng, size) for _ in range(n)]
        sets = []
        for _ in range(m):
            mask = rng.random(size) < 0.5
            if not mask.any():
                mask[rng.integers(size)] = True
            sets.append([int(i) for i in np.flatnonzero(mask)])
        return build_set_indexed(size, [p.tolist() for p in probs], sets)
    if kind == "general":
        coords, tables = [], []
        for _ in range(n):
            atoms = int(rng.integers(2, max_atoms + 1))
            probs = _random_probs(rng, atoms)
            coords.append(CoordinateDist(tuple(float(a) for a in range(atoms)), tuple(probs)))
            tables.append(np.array([_random_centered_row(rng, probs) for _ in range(m)]))
        return Scenario(tuple(coords), tuple(tables), kind="general")
    raise ValueError(f"unknown scenario kind {kind!r}")
