import numpy as np
import pytest

from cohest.errors import NoFeasibleSolution, ParseError, UnknownLabel, UnknownOperator
from cohest.measurement import (
    ExpectationRecord,
    build_constraints,
    exact_record,
    group_records,
    ingest_csv,
    parse_csv,
    simulate_record,
    write_csv,
)
from cohest.coherence import spectrum_bounds
from cohest.majorization import meet_over_polytope
from cohest.stabilizers import PauliString, expand_group, ghz_generators, graph_generators
from cohest.states import depolarize, ghz, linear_cluster, path_edges

GHZ3 = expand_group(ghz_generators(3))


def test_exact_records_for_ghz():
    recs = group_records(ghz(3).projector(), GHZ3)
    assert len(recs) == 8
    assert recs[0].operator == "III"
    assert all(r.mean == pytest.approx(1.0) and r.sigma == 0 for r in recs)


def test_simulated_record_statistics():
    rho = depolarize(ghz(3), 0.2).matrix
    p = PauliString("XXX")
    r = simulate_record(rho, p, 10_000, seed=5)
    assert r.shots == 10_000
    assert r.sigma == pytest.approx(np.sqrt((1 - r.mean**2) / 10_000))
    assert simulate_record(rho, p, 10_000, seed=5) == r


def test_three_sigma_coverage():
    rho = depolarize(ghz(3), 0.3).matrix
    p = PauliString("XXX")
    truth = exact_record(rho, p).mean
    rng = np.random.default_rng(11)
    hits = 0
    trials = 2000
    for _ in range(trials):
        r = simulate_record(rho, p, 1000, rng)
        hits += abs(r.mean - truth) <= 3 * r.sigma
    # two-sided normal coverage at 3 sigma is 99.73%
    assert hits / trials >= 0.99


def test_group_records_reproducible_and_ordered():
    rho = depolarize(linear_cluster(4), 0.1).matrix
    group = expand_group(graph_generators(4, path_edges(4)))
    gens = [8, 4, 2, 1]
    a = group_records(rho, group, gens, shots=500, seed=3)
    b = group_records(rho, group, gens, shots=500, seed=3)
    assert a == b
    assert len(a) == 5
    assert [r.operator for r in a[1:]] == [str(group.elements[g]) for g in gens]


def test_csv_round_trip(tmp_path):
    recs = group_records(depolarize(ghz(3), 0.1).matrix, GHZ3, shots=100, seed=1)
    path = tmp_path / "r.csv"
    write_csv(recs, path)
    assert path.read_text().splitlines()[0] == "operator,mean,sigma,shots"
    assert ingest_csv(path, GHZ3) == recs


@pytest.mark.parametrize("text,line", [
    ("", 1),
    ("op,mean,sigma,shots\n", 1),
    ("operator,mean,sigma,shots\nXXX,0.5,0.1\n", 2),
    ("operator,mean,sigma,shots\nZZI,1.0,0,0\nXXX,abc,0.1,10\n", 3),
    ("operator,mean,sigma,shots\nXXX,1.5,0.1,10\n", 2),
    ("operator,mean,sigma,shots\nXXX,0.5,-0.1,10\n", 2),
    ("operator,mean,sigma,shots\nXQX,0.5,0.1,10\n", 2),
])
def test_csv_parse_errors(text, line):
    with pytest.raises(ParseError) as err:
        parse_csv(text)
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_csv_unknown_operator():
    with pytest.raises(UnknownOperator, match="line 2"):
        parse_csv("operator,mean,sigma,shots\nXZX,0.5,0.1,10\n", GHZ3)


def test_constraint_rows_and_sign_flip():
    recs = [ExpectationRecord("III", 1.0), ExpectationRecord("ZZI", 0.9, 0.01, 100),
            ExpectationRecord("-YXY", 0.8, 0.01, 100), ExpectationRecord("YXY", -0.7, 0.01, 100)]
    x = build_constraints(recs, GHZ3, w=3)
    a = GHZ3.label_of("YXY")
    assert x.labels[0] == 0 and x.lower[0] == x.upper[0] == 1.0
    assert x.n_rows == 4
    # YXY is -1 times its group element for GHZ_3, so -YXY records +<S_a>
    assert str(GHZ3.elements[a]) == "-YXY"
    rows = [i for i, lab in enumerate(x.labels) if lab == a]
    assert sorted(x.lower[rows] + 0.03) == pytest.approx([0.7, 0.8])


def test_constraint_bounds_are_clipped():
    x = build_constraints([ExpectationRecord("ZZI", 0.99, 0.01, 100)], GHZ3, w=3)
    assert x.upper[1] == 1.0
    assert x.lower[1] == pytest.approx(0.96)


def test_subset_errors():
    recs = [ExpectationRecord("ZZI", 1.0)]
    assert GHZ3.label_of("ZZI") == 2
    with pytest.raises(UnknownLabel):
        build_constraints(recs, GHZ3, subset=[1])
    with pytest.raises(UnknownLabel):
        build_constraints(recs, GHZ3, subset=[9])


def test_larger_w_gives_smaller_bounds():
    rho = depolarize(ghz(3), 0.1)
    recs = group_records(rho.matrix, GHZ3, shots=10_000, seed=2)
    diag = rho.diagonal()
    prev = None
    for w in (0.0, 1.0, 3.0, 6.0):
        try:
            b = spectrum_bounds(diag, meet_over_polytope(build_constraints(recs, GHZ3, w=w)))
        except NoFeasibleSolution:
            continue
        if prev is not None:
            assert all(b[m] <= prev[m] + 1e-9 for m in b)
        prev = b
    assert prev is not None
