"""Experiment drivers: tightness and noise scans, simulation, estimation with subset search."""
from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .coherence import (
    ALL_MEASURES,
    CoherenceReport,
    Family,
    Measure,
    exact_cg_pure,
    exact_cl1,
    exact_cl2,
    exact_cr,
    exact_robustness_pure,
    family_exact,
    spectrum_bounds,
)
from .errors import ConfigError, NoFeasibleSolution
from .majorization import meet_over_polytope
from .measurement import ExpectationRecord, build_constraints, group_records
from .stabilizers import StabilizerGroup, expand_group, ghz_generators, graph_generators
from .states import PureState, depolarize, ghz, linear_cluster, path_edges

log = logging.getLogger(__name__)

OUTPUT_COLUMNS = ("family", "n", "eta", "measure", "exact", "lower", "ratio", "subset", "w", "shots", "seed")
POLICIES = ("generators", "group", "search")
MAX_SEARCH_ITEMS = 15


@dataclass
class RunConfig:
    family: str = "ghz"
    n: int = 3
    n_max: int | None = None
    eta: list[float] = field(default_factory=lambda: [0.0])
    eta_steps: int | None = None
    shots: int = 0
    w: float = 3.0
    subsets: str = "group"
    seed: int = 0
    out: str | None = None
    format: str = "csv"

    def validate(self) -> "RunConfig":
        try:
            Family(self.family)
        except ValueError:
            raise ConfigError(f"unknown family {self.family!r}") from None
        low = 2 if self.family == "ghz" else 3
        if self.n < low:
            raise ConfigError(f"{self.family} needs n >= {low}")
        if self.n_max is not None and self.n_max < self.n:
            raise ConfigError("n-max below n")
        if max(self.n, self.n_max or 0) > 10:
            raise ConfigError("n above 10 is out of range")
        if any(not 0.0 <= e <= 1.0 for e in self.eta):
            raise ConfigError("eta must lie in [0, 1]")
        if self.eta_steps is not None and self.eta_steps < 1:
            raise ConfigError("eta-steps must be positive")
        if self.shots < 0 or self.shots == 1:
            raise ConfigError("shots must be 0 (exact) or at least 2")
        if self.w < 0:
            raise ConfigError("w must be nonnegative")
        if self.subsets not in POLICIES:
            raise ConfigError(f"subset policy must be one of {POLICIES}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        return self

    @property
    def n_range(self) -> range:
        return range(self.n, (self.n_max or self.n) + 1)

    @property
    def eta_grid(self) -> list[float]:
        if self.eta_steps:
            return [i / self.eta_steps for i in range(self.eta_steps)]
        return list(self.eta)


def target_state(family: str, n: int) -> PureState:
    return ghz(n) if Family(family) is Family.NOISY_GHZ else linear_cluster(n)


def target_group(family: str, n: int) -> StabilizerGroup:
    if Family(family) is Family.NOISY_GHZ:
        return expand_group(ghz_generators(n))
    return expand_group(graph_generators(n, path_edges(n)))


def effective_policy(policy: str, n: int) -> str:
    """Exhaustive search is only run while 2^n - 1 <= MAX_SEARCH_ITEMS; above that the full group is used."""
    if policy == "search" and 2**n - 1 > MAX_SEARCH_ITEMS:
        log.warning("n=%d too large for exhaustive subset search; using the full group", n)
        return "group"
    return policy


def policy_labels(group: StabilizerGroup, policy: str) -> list[int]:
    if policy == "generators":
        return [1 << (group.n - 1 - j) for j in range(group.n)]
    return list(range(1, group.d))


def subset_text(group: StabilizerGroup, labels: Iterable[int]) -> str:
    return "|".join(str(group.elements[a]) for a in sorted(labels))


def bounds_from_records(records: Sequence[ExpectationRecord], group: StabilizerGroup, diag,
                        subset: Iterable[int] | None = None, w: float = 3.0) -> dict[Measure, float]:
    """Build the polytope, take its meet, and return every lower bound."""
    x = build_constraints(records, group, subset, w)
    meet = meet_over_polytope(x)
    return spectrum_bounds(diag, meet)


def exact_values(family: str, n: int, eta: float) -> dict[Measure, tuple[float | None, bool]]:
    """measure -> (exact value or None, surrogate flag).

    C_r, C_l1 and C_l2 come from the density matrix; the robustness of the
    mixed members uses the family closed form; C_f and the concurrence fall
    back to C_r and C_l1 (flagged) when the state is mixed.
    """
    psi = target_state(family, n)
    if eta == 0.0:
        cr, cl1 = exact_cr(psi), exact_cl1(psi)
        return {
            Measure.CR_ENTROPY: (cr, False),
            Measure.CL1: (cl1, False),
            Measure.CL2: (exact_cl2(psi), False),
            Measure.CG: (exact_cg_pure(psi), False),
            Measure.ROBUSTNESS: (exact_robustness_pure(psi), False),
            Measure.FORMATION: (cr, False),
            Measure.CONCURRENCE: (cl1, False),
        }
    rho = depolarize(psi, eta)
    cr, cl1 = exact_cr(rho), exact_cl1(rho)
    return {
        Measure.CR_ENTROPY: (cr, False),
        Measure.CL1: (cl1, False),
        Measure.CL2: (exact_cl2(rho), False),
        Measure.CG: (None, False),
        Measure.ROBUSTNESS: (family_exact(family, n, eta, Measure.ROBUSTNESS), False),
        Measure.FORMATION: (cr, True),
        Measure.CONCURRENCE: (cl1, True),
    }


def _row(family, n, eta, measure, lower, exact, subset, w, shots, seed) -> dict:
    ex, surrogate = exact.get(measure, (None, False)) if exact else (None, False)
    rep = CoherenceReport(measure, lower, ex, surrogate=surrogate)
    return {
        "family": family, "n": n, "eta": eta, "measure": measure.value,
        "exact": rep.exact, "lower": rep.lower_bound, "ratio": rep.ratio,
        "subset": subset, "w": w, "shots": shots, "seed": seed,
    }


def _rows(family, n, eta, bounds, exact, subset, w, shots, seed) -> list[dict]:
    return [_row(family, n, eta, m, bounds[m], exact, subset, w, shots, seed) for m in ALL_MEASURES]


def _search_rows(result, group, family, n, eta, exact, w, shots, seed) -> list[dict]:
    rows = []
    for m in ALL_MEASURES:
        value, best = result.best[m]
        rows.append(_row(family, n, eta, m, value, exact, subset_text(group, best), w, shots, seed))
    return rows


def analyze(family: str, n: int, eta: float, policy: str = "group", shots: int = 0,
            w: float = 3.0, seed: int = 0) -> list[dict]:
    """One (family, n, eta) cell: simulate or compute records, bound, compare to exact."""
    policy = effective_policy(policy, n)
    psi = target_state(family, n)
    rho = depolarize(psi, eta)
    group = target_group(family, n)
    labels = policy_labels(group, policy)
    records = group_records(rho, group, labels, shots, seed)
    diag = rho.diagonal()
    if policy == "search":
        result = search_subsets(records, group, diag, w)
        return _search_rows(result, group, family, n, eta, exact_values(family, n, eta), w, shots, seed)
    bounds = bounds_from_records(records, group, diag, labels, w)
    return _rows(family, n, eta, bounds, exact_values(family, n, eta), policy, w, shots, seed)


@dataclass
class SearchResult:
    # measure -> (max lower bound, maximizing subset labels)
    best: dict[Measure, tuple[float, tuple[int, ...]]]
    # subset labels -> "feasible" | "infeasible" | "dominated"
    status: dict[tuple[int, ...], str]
    bounds: dict[tuple[int, ...], dict[Measure, float]]

    @property
    def n_infeasible(self) -> int:
        return sum(1 for s in self.status.values() if s == "infeasible")


def search_subsets(records: Sequence[ExpectationRecord], group: StabilizerGroup, diag,
                   w: float = 3.0, prune: bool = True) -> SearchResult:
    """Maximize every lower bound over all nonempty subsets of the measured operators.

    Shrinking the polytope can only raise its meet, and every bound is
    monotone in the meet, so a subset of a feasible subset never beats it.
    With ``prune`` such subsets are marked ``dominated`` without solving;
    the maxima are unchanged.

    Raises:
        NoFeasibleSolution: if every subset is infeasible.
    """
    items = sorted({group.lookup(r.pauli)[0] for r in records} - {0})
    m = len(items)
    if m == 0:
        raise ValueError("no non-identity records to search over")
    if m > MAX_SEARCH_ITEMS:
        raise ConfigError(f"{m} operators; exhaustive search is capped at {MAX_SEARCH_ITEMS}")
    masks = sorted(range(1, 2**m), key=lambda s: (-bin(s).count("1"), s))
    feasible_masks: list[int] = []
    status: dict[tuple[int, ...], str] = {}
    bounds: dict[tuple[int, ...], dict[Measure, float]] = {}
    for mask in masks:
        labels = tuple(items[i] for i in range(m) if (mask >> (m - 1 - i)) & 1)
        if prune and any(mask & ~f == 0 for f in feasible_masks):
            status[labels] = "dominated"
            continue
        try:
            bounds[labels] = bounds_from_records(records, group, diag, labels, w)
        except NoFeasibleSolution:
            status[labels] = "infeasible"
            continue
        status[labels] = "feasible"
        feasible_masks.append(mask)
    if not bounds:
        raise NoFeasibleSolution(f"all {len(masks)} subsets are infeasible")
    best = {}
    for meas in ALL_MEASURES:
        top = max(b[meas] for b in bounds.values())
        cands = [s for s, b in bounds.items() if b[meas] >= top - 1e-12]
        choice = min(cands, key=lambda s: (-len(s), s))
        best[meas] = (bounds[choice][meas], choice)
    log.info("subset search: %d feasible, %d infeasible, %d dominated",
             sum(v == "feasible" for v in status.values()),
             sum(v == "infeasible" for v in status.values()),
             sum(v == "dominated" for v in status.values()))
    return SearchResult(best, status, bounds)


def cmd_tightness_scan(config: RunConfig) -> list[dict]:
    config.validate()
    if config.shots != 0:
        raise ConfigError("tightness-scan runs on exact expectations (shots=0)")
    rows = []
    for n in config.n_range:
        rows += analyze(config.family, n, 0.0, config.subsets, 0, config.w, config.seed)
    return rows


def cmd_noise_scan(config: RunConfig) -> list[dict]:
    config.validate()
    rows = []
    for eta in config.eta_grid:
        rows += analyze(config.family, config.n, eta, config.subsets, config.shots, config.w, config.seed)
    return rows


def cmd_simulate(config: RunConfig) -> list[ExpectationRecord]:
    config.validate()
    if config.shots < 2:
        raise ConfigError("simulate needs shots >= 2")
    eta = config.eta[0]
    rho = depolarize(target_state(config.family, config.n), eta)
    group = target_group(config.family, config.n)
    return group_records(rho, group, policy_labels(group, config.subsets), config.shots, config.seed)


def cmd_estimate(config: RunConfig, records: Sequence[ExpectationRecord], diag=None,
                 eta_known: bool = False) -> tuple[list[dict], SearchResult | None]:
    """Bound every measure from ingested records.

    ``diag`` defaults to the populations of the configured synthetic state.
    Exact values are filled in only when ``eta_known``.
    """
    config.validate()
    group = target_group(config.family, config.n)
    eta = config.eta[0]
    if diag is None:
        diag = depolarize(target_state(config.family, config.n), eta).diagonal()
    diag = np.asarray(diag, dtype=float)
    if diag.size != group.d:
        raise ConfigError(f"diagonal has {diag.size} entries, expected {group.d}")
    for r in records:
        group.lookup(r.pauli)
    exact = exact_values(config.family, config.n, eta) if eta_known else None
    shots = max((r.shots for r in records), default=0)
    eta_col = eta if eta_known else None
    policy = effective_policy(config.subsets, config.n)
    if policy == "search":
        result = search_subsets(records, group, diag, config.w)
        rows = _search_rows(result, group, config.family, config.n, eta_col, exact, config.w,
                            shots, config.seed)
        return rows, result
    present = sorted({group.lookup(r.pauli)[0] for r in records} - {0})
    labels = present
    if policy == "generators":
        gens = set(policy_labels(group, "generators"))
        labels = [a for a in present if a in gens]
    bounds = bounds_from_records(records, group, diag, labels, config.w)
    return _rows(config.family, config.n, eta_col, bounds, exact, policy, config.w,
                 shots, config.seed), None


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def format_rows(rows: Sequence[dict], fmt: str = "csv") -> str:
    if fmt == "json":
        return json.dumps([{k: r[k] for k in OUTPUT_COLUMNS} for r in rows], indent=2) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(OUTPUT_COLUMNS)
    for r in rows:
        w.writerow([_fmt(r[k]) for k in OUTPUT_COLUMNS])
    return buf.getvalue()
