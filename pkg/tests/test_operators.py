import csv

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwalk import experiments as ex
from qwalk.errors import BasisMismatch, DimensionMismatch
from qwalk.graph_model import AnomalyGraphSpec, Side, build_graph
from qwalk.operators import (
    build_limit_operator,
    build_perturbation,
    build_step_operator,
    unitarity_error,
    write_matrix_csv,
)

TWO_PI = 2 * np.pi


def ket(b, u, v):
    e = np.zeros(b.dim, dtype=complex)
    e[b.index_of[(u, v)]] = 1.0
    return e


@pytest.mark.parametrize("n", [2, 3, 4, 64])
@pytest.mark.parametrize("collective", [False, True])
def test_unitarity(n, collective):
    g, b = build_graph(ex.triangle_spec(n), collective=collective)
    for phi in (0.0, 1.3, TWO_PI):
        assert build_step_operator(g, b, phi=phi).unitarity_error < 1e-12
        assert build_limit_operator(g, b, phi=phi).unitarity_error < 1e-12


def test_two_spokes_transmit_fully():
    # N = 2: r = 0, t = 1
    g, b = build_graph(AnomalyGraphSpec(n_spokes=2))
    U = build_step_operator(g, b)
    assert np.allclose(U.apply(ket(b, "1", "0")), ket(b, "0", "2"), atol=1e-15)


def test_hub_coin_amplitudes(triangle):
    g, b = triangle
    U = build_step_operator(g, b)
    out = U.apply(ket(b, "5", "0"))
    assert np.isclose(out[b.index_of[("0", "5")]], -(1 - 2 / 64))
    assert np.isclose(out[b.index_of[("0", "9")]], 2 / 64)


def test_limit_reflects_attachment_with_minus_one(triangle):
    g, b = triangle
    U0 = build_limit_operator(g, b)
    assert np.allclose(U0.apply(ket(b, "1", "0")), -ket(b, "0", "1"))


def test_grover_at_triangle_vertex(triangle):
    g, b = triangle
    U = build_step_operator(g, b)
    out = U.apply(ket(b, "1", "a"))
    # degree-2 vertex a transmits into the far triangle edge
    assert np.allclose(out, ket(b, "a", "b"))
    out = U.apply(ket(b, "a", "1"))
    assert np.isclose(out[b.index_of[("1", "a")]], -1 / 3)
    assert np.isclose(out[b.index_of[("1", "0")]], 2 / 3)


def test_leaves_reflect_with_phase():
    g, b = build_graph(ex.triangle_spec(8))
    U = build_step_operator(g, b, phi=0.7)
    assert np.allclose(U.apply(ket(b, "0", "4")), np.exp(0.7j) * ket(b, "4", "0"))


@pytest.mark.parametrize("n", [4, 16, 64, 1000])
def test_perturbation_closed_forms(n):
    g, b = build_graph(ex.triangle_spec(n))
    U, U0 = build_step_operator(g, b), build_limit_operator(g, b)
    U1 = build_perturbation(U, U0)
    eps = 1 / n
    s = 2 * np.sqrt(eps - eps ** 2)
    assert np.allclose(U1 @ b.in_vector(), -2 * eps * b.out_vector() + s * ket(b, "0", "1"), atol=1e-13)
    assert np.allclose(U1 @ ket(b, "1", "0"), 2 * eps * ket(b, "0", "1") + s * b.out_vector(), atol=1e-13)


def test_in_maps_to_out_in_the_limit(triangle):
    g, b = triangle
    U0 = build_limit_operator(g, b)
    assert np.allclose(U0.apply(b.in_vector()), b.out_vector())


@pytest.mark.parametrize("collective", [False, True])
def test_limit_is_block_diagonal(collective):
    g, b = build_graph(ex.triangle_spec(32), collective=collective)
    assert build_limit_operator(g, b).cross_block_max() == 0.0
    assert build_step_operator(g, b).cross_block_max() > 0.0


def test_collective_matches_full_basis():
    spec = ex.triangle_spec(32)
    g, full = build_graph(spec)
    _, col = build_graph(spec, collective=True)
    U = build_step_operator(g, full, phi=0.4).matrix
    V = build_step_operator(g, col, phi=0.4).matrix
    # express the collective basis vectors in the full basis
    E = np.zeros((full.dim, col.dim), dtype=complex)
    for k, edge in enumerate(col.directed_edges):
        if edge == ("0", "*"):
            E[:, k] = full.out_vector()
        elif edge == ("*", "0"):
            E[:, k] = full.in_vector()
        else:
            E[full.index_of[edge], k] = 1
    assert np.allclose(U @ E, E @ V, atol=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 40), st.floats(0, 4 * np.pi), st.lists(st.complex_numbers(max_magnitude=5), min_size=1))
def test_norm_preserved(n, phi, seed_amps):
    g, b = build_graph(ex.triangle_spec(n))
    U = build_step_operator(g, b, phi=phi)
    psi = np.resize(np.array(seed_amps, dtype=complex), b.dim)
    if np.linalg.norm(psi) < 1e-6:
        return
    psi /= np.linalg.norm(psi)
    assert abs(np.linalg.norm(U.apply(psi)) - 1) < 1e-12


def test_wrong_epsilon_rejected(triangle):
    g, b = triangle
    with pytest.raises(DimensionMismatch):
        build_step_operator(g, b, epsilon=0.1)


def test_mismatched_bases_rejected():
    g, b = build_graph(ex.triangle_spec(8))
    _, c = build_graph(ex.triangle_spec(8), collective=True)
    with pytest.raises(BasisMismatch):
        build_perturbation(build_step_operator(g, b), build_limit_operator(g, c))
    with pytest.raises(BasisMismatch):
        build_perturbation(build_step_operator(g, b, phi=0.0), build_limit_operator(g, b, phi=1.0))
    with pytest.raises(DimensionMismatch):
        build_step_operator(build_graph(ex.triangle_spec(9))[0], b)


def test_matrix_is_read_only(triangle):
    g, b = triangle
    with pytest.raises(ValueError):
        build_step_operator(g, b).matrix[0, 0] = 1


def test_unitarity_error_flags_non_unitary():
    assert unitarity_error(np.eye(3)) == 0
    assert unitarity_error(2 * np.eye(3)) == pytest.approx(3)


def test_csv_dump(tmp_path, triangle_small):
    g, b = triangle_small
    U = build_step_operator(g, b)
    path = tmp_path / "u.csv"
    write_matrix_csv(U, path)
    rows = list(csv.DictReader(path.open()))
    M = np.zeros((b.dim, b.dim), dtype=complex)
    for r in rows:
        M[int(r["row"]), int(r["col"])] = float(r["re"]) + 1j * float(r["im"])
    assert np.array_equal(M, U.matrix)
    assert {r["col_edge"] for r in rows} == {"->".join(e) for e in b.directed_edges}


def test_sides_partition(triangle):
    _, b = triangle
    left, right = set(b.indices(Side.LEFT)), set(b.indices(Side.RIGHT))
    assert not left & right and len(left | right) == b.dim


def test_perturbation_lives_on_hub_columns():
    g, b = build_graph(ex.triangle_spec(16))
    U, U0 = build_step_operator(g, b, phi=0.9), build_limit_operator(g, b, phi=0.9)
    U1 = build_perturbation(U, U0)
    hub_in = {b.index_of[(j, "0")] for j in g.spokes}
    other = [k for k in range(b.dim) if k not in hub_in]
    assert np.array_equal(U.matrix[:, other], U0.matrix[:, other])
    assert np.allclose(U1 @ ket(b, "0", "1"), 0)
    assert np.allclose(U1 @ b.out_vector(), 0)
    assert np.allclose(U1 @ ket(b, "a", "b"), 0)


def test_limit_left_block_action():
    g, b = build_graph(ex.triangle_spec(16))
    U0 = build_limit_operator(g, b, phi=0.9)
    assert np.allclose(U0.apply(b.out_vector()), np.exp(0.9j) * b.in_vector())


def test_perturbation_vanishes_with_eps():
    norms = []
    for n in (16, 256, 4096):
        g, b = build_graph(ex.triangle_spec(n), collective=True)
        U1 = build_perturbation(build_step_operator(g, b), build_limit_operator(g, b))
        norms.append(np.linalg.norm(U1, 2) * np.sqrt(n))
    # ||U1|| = O(sqrt(eps))
    assert np.allclose(norms, 2, rtol=0.05)
