import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwalk import experiments as ex
from qwalk.errors import BasisMismatch, TrialsExhausted, ZeroCoupling
from qwalk.graph_model import Side, build_graph
from qwalk.operators import build_step_operator
from qwalk.spectral import Branch, analyze
from qwalk.walk import (
    evolve,
    find_optimal_m,
    initial_state,
    is_anomaly_edge,
    measurement_distribution,
    optimal_step_count,
    prepare_search,
    sample_measurement,
    sample_measurements,
    search_until_found,
    side_probabilities,
    success_probability,
    write_trajectory_csv,
)

TWO_PI = 2 * np.pi
C = 2 / np.sqrt(7)


@pytest.mark.parametrize("branch", ["+", "-"])
def test_initial_state_amplitudes(branch):
    g, b = build_graph(ex.triangle_spec(16))
    psi = initial_state(b, 16, 0.8, branch).amplitudes
    sign = 1 if branch == "+" else -1
    j = b.index_of
    assert np.isclose(np.linalg.norm(psi), 1)
    assert np.isclose(psi[j[("5", "0")]] / psi[j[("0", "5")]], sign * np.exp(0.4j))
    # nothing inside G, weight 1/N on the attachment spoke
    assert np.allclose(psi[[j[e] for e in [("1", "a"), ("a", "b")]]], 0)
    assert success_probability(psi, b) == pytest.approx(1 / 16)


def test_initial_state_collective_agrees():
    spec = ex.triangle_spec(16)
    g, full = build_graph(spec)
    _, col = build_graph(spec, collective=True)
    a = initial_state(full, 16, 1.0).amplitudes
    c = initial_state(col, 16, 1.0).amplitudes
    assert np.isclose(np.vdot(full.out_vector(), a), c[col.index_of[("0", "*")]])
    assert np.isclose(np.vdot(full.in_vector(), a), c[col.index_of[("*", "0")]])
    assert success_probability(c, col) == pytest.approx(1 / 16)


def test_initial_state_rejects_wrong_n():
    _, b = build_graph(ex.triangle_spec(8))
    with pytest.raises(BasisMismatch):
        initial_state(b, 9, 0.0)


@pytest.mark.parametrize("c, n, m", [(C, 64, 17), (C, 256, 33), (C, 1024, 66), (1.0, 100, 16)])
def test_optimal_step_count(c, n, m):
    assert optimal_step_count(c, n) == m


@pytest.mark.parametrize("c", [0.0, -1.0])
def test_optimal_step_count_needs_coupling(c):
    with pytest.raises(ZeroCoupling):
        optimal_step_count(c, 64)


def test_zero_steps_is_identity(triangle):
    g, b = triangle
    U = build_step_operator(g, b)
    psi = initial_state(b, 64, TWO_PI)
    out = evolve(U, psi, 0)
    assert np.array_equal(out.amplitudes, psi.amplitudes) and out.step == 0
    with pytest.raises(ValueError):
        evolve(U, psi, -1)


@pytest.mark.parametrize("phi, branch", [(TWO_PI, "+"), (TWO_PI, "-"), (1.0, "+"), (0.3, "-")])
def test_no_anomaly_two_step_revival(phi, branch):
    # the left spokes only see the hub coin and the leaf phase; U^2 psi_init = e^{i phi} psi_init
    g, b = build_graph(ex.star_spec(32))
    U = build_step_operator(g, b, phi=phi)
    psi = initial_state(b, 32, phi, branch)
    out = evolve(U, psi, 2)
    fid = abs(np.vdot(psi.amplitudes, out.amplitudes))
    assert fid == pytest.approx(1, abs=1e-10)


def test_r0_has_target_weight(triangle):
    g, b = triangle
    cls = analyze(g, b, TWO_PI)
    assert success_probability(cls.R0, b) == pytest.approx(4 / 7, abs=1e-12)


def test_trajectory_rows_and_sides(triangle):
    g, b = triangle
    U = build_step_operator(g, b)
    out, rows = evolve(U, initial_state(b, 64, TWO_PI), 17, record=True)
    assert len(rows) == 18 and rows[0][0] == 0 and rows[-1][0] == 17
    for _, p, left, right in rows:
        assert left + right == pytest.approx(1, abs=1e-12)
        assert p <= right + 1e-15
    assert rows[-1][1] == pytest.approx(success_probability(out, b))
    assert side_probabilities(out.amplitudes, b)[1] > 0.9


def test_search_peaks_near_predicted_step(triangle):
    g, b = triangle
    U = build_step_operator(g, b)
    m, p = find_optimal_m(U, initial_state(b, 64, TWO_PI), b, 34)
    assert abs(m - 17) <= 2
    assert p == pytest.approx(4 / 7, abs=0.08)


def test_find_optimal_m_prefers_the_earlier_tie():
    g, b = build_graph(ex.star_spec(8))
    U = build_step_operator(g, b)
    # 2-periodic success probability: first maximum wins
    m, _ = find_optimal_m(U, initial_state(b, 8, 0.0), b, 10)
    assert m <= 2


@settings(max_examples=20, deadline=None)
@given(st.integers(4, 40), st.floats(0, 4 * np.pi), st.sampled_from(["+", "-"]), st.integers(1, 60))
def test_evolution_preserves_norm(n, phi, branch, m):
    g, b = build_graph(ex.triangle_spec(n))
    out = evolve(build_step_operator(g, b, phi=phi), initial_state(b, n, phi, branch), m)
    assert abs(out.norm - 1) < 1e-12


def test_long_run_norm_drift():
    g, b = build_graph(ex.triangle_spec(64), collective=True)
    out = evolve(build_step_operator(g, b), initial_state(b, 64, TWO_PI), 10_000)
    assert abs(out.norm - 1) < 1e-10


def test_sampling_matches_distribution():
    g, b = build_graph(ex.triangle_spec(16))
    psi = evolve(build_step_operator(g, b), initial_state(b, 16, TWO_PI), 8)
    p = measurement_distribution(psi)
    n = 100_000
    counts = np.bincount(sample_measurements(psi, b, n, rng_seed=11), minlength=b.dim)
    sigma = np.sqrt(n * p * (1 - p))
    assert np.all(np.abs(counts - n * p) <= 3 * sigma + 1)


def test_sampling_is_deterministic(triangle):
    g, b = triangle
    psi = initial_state(b, 64, TWO_PI)
    assert sample_measurement(psi, b, 5) == sample_measurement(psi, b, 5)
    assert np.array_equal(sample_measurements(psi, b, 50, 3), sample_measurements(psi, b, 50, 3))


def test_collective_sample_resolves_to_a_spoke():
    g, b = build_graph(ex.triangle_spec(1000), collective=True)
    psi = initial_state(b, 1000, TWO_PI)
    edges = {sample_measurement(psi, b, s) for s in range(20)}
    assert all("*" not in e for e in edges)
    assert len(edges) > 10


def test_anomaly_edge_check(triangle):
    g, _ = triangle
    assert is_anomaly_edge(g, ("0", "1")) and is_anomaly_edge(g, ("1", "0"))
    assert not is_anomaly_edge(g, ("0", "7"))
    # inside G is not a spoke; a trial succeeds only on the attachment edge
    assert not is_anomaly_edge(g, ("1", "a")) and not is_anomaly_edge(g, ("a", "b"))
    g0, _ = build_graph(ex.star_spec(8))
    assert not any(is_anomaly_edge(g0, e) for e in [("0", "1"), ("1", "0"), ("0", "2")])


def test_search_finds_triangle():
    g, _ = build_graph(ex.triangle_spec(256))
    out = search_until_found(g, TWO_PI, "+", rng_seed=7)
    assert out.found and out.trials <= 50
    assert out.steps_per_trial == 33
    again = search_until_found(g, TWO_PI, "+", rng_seed=7)
    assert again == out


def test_search_fails_without_anomaly():
    g, _ = build_graph(ex.star_spec(64))
    with pytest.raises(TrialsExhausted) as info:
        search_until_found(g, TWO_PI, "+", rng_seed=1, steps=13)
    assert info.value.trials == 50


def test_prepare_search_computes_steps():
    g, _ = build_graph(ex.triangle_spec(64))
    setup = prepare_search(g, TWO_PI, Branch.PLUS)
    assert setup.steps == 17
    assert setup.distribution.sum() == pytest.approx(1)


def test_trajectory_csv(tmp_path, triangle):
    g, b = triangle
    _, rows = evolve(build_step_operator(g, b), initial_state(b, 64, TWO_PI), 3, record=True)
    path = tmp_path / "t.csv"
    write_trajectory_csv(rows, path)
    back = list(csv.reader(path.open()))
    assert back[0][0] == "step" and len(back) == 5
    assert float(back[1][1]) == rows[0][1]
