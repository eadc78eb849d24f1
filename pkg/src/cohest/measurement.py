"""Expectation records (simulated or ingested) and the constraint polytope.

The polytope over graph-basis distributions ``p`` is::

    p >= 0,   lower <= B @ p <= upper

where row 0 of ``B`` is the identity (all ones) pinned to exactly 1, and the
remaining rows are characters of the selected stabilizer elements with
bounds ``mean -/+ w * sigma`` clipped to [-1, 1].
"""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, ParseError, UnknownLabel, UnknownOperator
from .stabilizers import PauliString, StabilizerGroup, character_matrix, expectation

CSV_FIELDS = ("operator", "mean", "sigma", "shots")


@dataclass(frozen=True)
class ExpectationRecord:
    operator: str
    mean: float
    sigma: float = 0.0
    shots: int = 0

    def __post_init__(self):
        if not -1.0 <= self.mean <= 1.0:
            raise ValueError(f"mean {self.mean!r} outside [-1, 1]")
        if self.sigma < 0 or math.isnan(self.sigma):
            raise ValueError(f"sigma {self.sigma!r} must be nonnegative")
        if self.shots < 0:
            raise ValueError("shots must be nonnegative")

    @property
    def pauli(self) -> PauliString:
        return PauliString.parse(self.operator)


def exact_record(rho, p: PauliString) -> ExpectationRecord:
    e = float(np.clip(expectation(rho, p), -1.0, 1.0))
    return ExpectationRecord(str(p), e, 0.0, 0)


def simulate_record(rho, p: PauliString, shots: int, seed) -> ExpectationRecord:
    """Sample ``shots`` +/-1 outcomes of ``p`` on ``rho``.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts, including
    a Generator (which is then advanced).
    """
    if shots < 2:
        raise ValueError("need at least 2 shots")
    rng = np.random.default_rng(seed)
    e = float(np.clip(expectation(rho, p), -1.0, 1.0))
    n_plus = int(rng.binomial(shots, (1.0 + e) / 2.0))
    mean = (2 * n_plus - shots) / shots
    sigma = math.sqrt(max(1.0 - mean * mean, 0.0) / shots)
    return ExpectationRecord(str(p), mean, sigma, shots)


def group_records(rho, group: StabilizerGroup, labels: Iterable[int] | None = None,
                  shots: int = 0, seed=None) -> list[ExpectationRecord]:
    """Records for ``labels`` (default: all non-identity elements), identity first.

    ``shots=0`` gives exact analytic records. A single generator seeded with
    ``seed`` is consumed in label order, so output is reproducible.
    """
    if labels is None:
        labels = range(1, group.d)
    labels = [a for a in labels if a != 0]
    out = [ExpectationRecord(str(group.elements[0]), 1.0, 0.0, shots)]
    rng = np.random.default_rng(seed)
    for a in labels:
        p = group.elements[a]
        out.append(exact_record(rho, p) if shots == 0 else simulate_record(rho, p, shots, rng))
    return out


def write_csv(records: Sequence[ExpectationRecord], dest) -> None:
    """Write ``operator,mean,sigma,shots`` with a header; ``dest`` is a path or stream."""
    def _dump(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_FIELDS)
        for r in records:
            w.writerow([r.operator, repr(float(r.mean)), repr(float(r.sigma)), int(r.shots)])

    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", newline="") as fh:
            _dump(fh)
    else:
        _dump(dest)


def parse_csv(text: str, group: StabilizerGroup | None = None) -> list[ExpectationRecord]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ParseError("empty file", 1)
    header = [h.strip().lower() for h in rows[0]]
    if tuple(header) != CSV_FIELDS:
        raise ParseError(f"expected header {','.join(CSV_FIELDS)}, got {','.join(rows[0])}", 1)
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 fields, got {len(row)}", lineno)
        op, mean_s, sigma_s, shots_s = (c.strip() for c in row)
        if not op:
            raise ParseError("empty operator", lineno)
        try:
            pauli = PauliString.parse(op)
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
        try:
            mean = float(mean_s)
            sigma = float(sigma_s)
            shots = int(shots_s)
        except ValueError:
            raise ParseError("non-numeric mean, sigma or shots", lineno) from None
        if not -1.0 <= mean <= 1.0:
            raise ParseError(f"mean {mean} out of range [-1, 1]", lineno)
        if not sigma >= 0.0:
            raise ParseError(f"sigma {sigma} must be nonnegative", lineno)
        if shots < 0:
            raise ParseError(f"shots {shots} must be nonnegative", lineno)
        if group is not None:
            try:
                group.lookup(pauli)
            except UnknownOperator as exc:
                raise UnknownOperator(f"line {lineno}: {exc.args[0]}") from None
        out.append(ExpectationRecord(str(pauli), mean, sigma, shots))
    return out


def ingest_csv(path, group: StabilizerGroup | None = None) -> list[ExpectationRecord]:
    with open(path, newline="") as fh:
        return parse_csv(fh.read(), group)


@dataclass(frozen=True)
class ConstraintSet:
    d: int
    B: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    labels: tuple[int, ...]

    def __post_init__(self):
        if self.B.shape != (len(self.labels), self.d):
            raise DimensionMismatch("B rows do not match labels")
        if np.any(self.lower > self.upper):
            raise ValueError("lower bound above upper bound")

    @property
    def n_rows(self) -> int:
        return len(self.labels)

    def contains(self, p, tol: float = 1e-9) -> bool:
        p = np.asarray(p, dtype=float)
        bp = self.B @ p
        return bool(np.all(p >= -tol) and np.all(bp >= self.lower - tol) and np.all(bp <= self.upper + tol))

    def lp_parts(self):
        """(n_aux, a_eq, b_eq, a_ineq, lo, hi, aux_lower, aux_upper) over [p, aux]."""
        return 0, np.zeros((0, self.d)), np.zeros(0), self.B, self.lower, self.upper, np.zeros(0), np.zeros(0)


def simplex_constraints(d: int) -> ConstraintSet:
    """Only nonnegativity and normalization: the full probability simplex."""
    return ConstraintSet(d, np.ones((1, d)), np.ones(1), np.ones(1), (0,))


def build_constraints(records: Sequence[ExpectationRecord], group: StabilizerGroup,
                      subset: Iterable[int] | None = None, w: float = 3.0) -> ConstraintSet:
    """Assemble the relaxed polytope from the records whose labels are in ``subset``.

    ``subset=None`` uses every non-identity label with a record. Several
    records may share a label (e.g. ``YY`` and ``-YY``); each becomes a row.
    """
    if w < 0:
        raise ValueError("w must be nonnegative")
    by_label: dict[int, list[tuple[int, ExpectationRecord]]] = {}
    for r in records:
        a, sign = group.lookup(r.pauli)
        if a == 0:
            continue
        by_label.setdefault(a, []).append((sign, r))
    if subset is None:
        chosen = sorted(by_label)
    else:
        chosen = sorted(set(int(a) for a in subset) - {0})
        for a in chosen:
            if not 0 < a < group.d:
                raise UnknownLabel(f"label {a} not in a group of order {group.d}")
            if a not in by_label:
                raise UnknownLabel(f"no record for label {a} ({group.elements[a]})")
    labels = [0]
    lower = [1.0]
    upper = [1.0]
    for a in chosen:
        for sign, r in by_label[a]:
            # a record of -S_a measures -<S_a>
            mean = sign * r.mean
            labels.append(a)
            lower.append(min(max(mean - w * r.sigma, -1.0), 1.0))
            upper.append(min(max(mean + w * r.sigma, -1.0), 1.0))
    B = character_matrix(group, labels)
    return ConstraintSet(group.d, B, np.array(lower), np.array(upper), tuple(labels))
