import json

import pytest

from cohest.coherence import Measure
from cohest.errors import ConfigError, NoFeasibleSolution
from cohest.harness import (
    OUTPUT_COLUMNS,
    RunConfig,
    analyze,
    cmd_estimate,
    cmd_noise_scan,
    cmd_simulate,
    cmd_tightness_scan,
    exact_values,
    format_rows,
    search_subsets,
    target_group,
)
from cohest.measurement import ExpectationRecord, group_records
from cohest.states import depolarize, ghz


def by_measure(rows, n=None, eta=None):
    return {r["measure"]: r for r in rows
            if (n is None or r["n"] == n) and (eta is None or r["eta"] == eta)}


def test_config_validation():
    with pytest.raises(ConfigError):
        RunConfig(family="w").validate()
    with pytest.raises(ConfigError):
        RunConfig(family="cluster", n=2).validate()
    with pytest.raises(ConfigError):
        RunConfig(n=3, n_max=11).validate()
    with pytest.raises(ConfigError):
        RunConfig(shots=1).validate()
    with pytest.raises(ConfigError):
        RunConfig(eta=[1.5]).validate()
    assert RunConfig(eta_steps=4).eta_grid == [0.0, 0.25, 0.5, 0.75]


def test_tightness_scan_ghz():
    rows = cmd_tightness_scan(RunConfig(family="ghz", n=3, n_max=5))
    assert len(rows) == 3 * 7
    for n in (3, 4, 5):
        m = by_measure(rows, n)
        for meas in ("Cr", "Cl1", "CR", "Cl2"):
            assert m[meas]["ratio"] == pytest.approx(1.0, abs=1e-7)
        assert 0.5858 < m["Cg"]["ratio"] < 0.62


def test_tightness_scan_requires_exact_mode():
    with pytest.raises(ConfigError):
        cmd_tightness_scan(RunConfig(shots=100))


def test_noise_scan_values():
    rows = cmd_noise_scan(RunConfig(family="ghz", n=4, eta=[0.3]))
    assert by_measure(rows)["Cl1"]["lower"] == pytest.approx(0.7)
    rows = cmd_noise_scan(RunConfig(family="cluster", n=4, eta=[0.5]))
    assert 0.48 <= by_measure(rows)["Cl1"]["ratio"] <= 0.52
    for family in ("ghz", "cluster"):
        rows = cmd_noise_scan(RunConfig(family=family, n=3, eta=[1.0]))
        assert all(abs(r["lower"]) < 1e-9 for r in rows)
        assert all(r["ratio"] is None for r in rows)


def test_surrogate_and_missing_exact_values():
    ex = exact_values("cluster", 4, 0.2)
    assert ex[Measure.FORMATION][1] and ex[Measure.CONCURRENCE][1]
    assert ex[Measure.CG][0] is None
    assert not exact_values("cluster", 4, 0.0)[Measure.FORMATION][1]


def test_lower_never_exceeds_exact(rng):
    # 200 random cells, half exact and half 3-sigma relaxed from 10^4 shots
    for i in range(200):
        family = str(rng.choice(["ghz", "cluster"]))
        n = int(rng.integers(3, 5))
        eta = float(rng.uniform(0, 1))
        shots = 0 if i % 2 else 10_000
        try:
            rows = analyze(family, n, eta, "group", shots, 3.0, int(rng.integers(1 << 30)))
        except NoFeasibleSolution:
            continue
        for r in rows:
            if r["exact"] is not None:
                assert r["lower"] <= r["exact"] + 1e-7, (family, n, eta, r["measure"])


def test_simulate_row_counts():
    recs = cmd_simulate(RunConfig(family="ghz", n=3, shots=10_000))
    assert len(recs) == 8
    assert recs[0].mean == 1.0 and recs[0].sigma == 0.0
    recs = cmd_simulate(RunConfig(family="cluster", n=4, shots=10_000, subsets="generators"))
    assert len(recs) == 5


def test_subset_monotonicity_exact_ghz3():
    group = target_group("ghz", 3)
    rho = depolarize(ghz(3), 0.2)
    recs = group_records(rho.matrix, group)
    result = search_subsets(recs, group, rho.diagonal(), prune=False)
    assert len(result.status) == 127
    assert all(s == "feasible" for s in result.status.values())
    for a, ba in result.bounds.items():
        for b, bb in result.bounds.items():
            if set(a) < set(b):
                assert all(bb[m] >= ba[m] - 1e-9 for m in ba)


def test_pruned_search_matches_full_search(rng):
    group = target_group("ghz", 3)
    rho = depolarize(ghz(3), 0.1)
    recs = group_records(rho.matrix, group, shots=2000, seed=4)
    full = search_subsets(recs, group, rho.diagonal(), prune=False)
    pruned = search_subsets(recs, group, rho.diagonal())
    for m in full.best:
        assert pruned.best[m][0] == pytest.approx(full.best[m][0], abs=1e-12)


def test_inconsistent_records_reported_per_subset():
    group = target_group("ghz", 3)
    recs = group_records(ghz(3).projector(), group)
    recs.append(ExpectationRecord("-ZZI", 1.0))
    result = search_subsets(recs, group, ghz(3).diagonal())
    bad = group.label_of("ZZI")
    for labels, status in result.status.items():
        if bad in labels:
            assert status == "infeasible"
    assert result.best[Measure.CR_ENTROPY][0] == pytest.approx(1.0)


def test_all_subsets_infeasible():
    group = target_group("ghz", 3)
    recs = [ExpectationRecord("ZZI", 1.0), ExpectationRecord("-ZZI", 1.0)]
    with pytest.raises(NoFeasibleSolution):
        search_subsets(recs, group, ghz(3).diagonal())


def test_estimate_exact_ghz3_full_group_maximizes():
    group = target_group("ghz", 3)
    recs = group_records(ghz(3).projector(), group)
    rows, result = cmd_estimate(RunConfig(subsets="search"), recs, eta_known=True)
    m = by_measure(rows)
    assert m["Cr"]["lower"] == pytest.approx(1.0)
    assert result.best[Measure.CR_ENTROPY][1] == tuple(range(1, 8))


def test_estimate_simulated_search_calibration():
    good = 0
    seeds = range(40)
    for seed in seeds:
        rows = analyze("ghz", 3, 0.0, "search", 10_000, 3.0, seed)
        lcr = by_measure(rows)["Cr"]["lower"]
        assert lcr <= 1.0 + 1e-9
        good += lcr >= 0.95
    assert good >= 0.95 * len(seeds)


def test_search_falls_back_above_four_qubits():
    rows = analyze("ghz", 5, 0.0, "search")
    assert {r["subset"] for r in rows} == {"group"}


def test_format_rows():
    rows = analyze("ghz", 3, 0.0)
    text = format_rows(rows)
    assert text.splitlines()[0] == ",".join(OUTPUT_COLUMNS)
    assert len(text.splitlines()) == 8
    data = json.loads(format_rows(rows, "json"))
    assert list(data[0]) == list(OUTPUT_COLUMNS)
