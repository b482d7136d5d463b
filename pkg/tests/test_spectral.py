import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwalk import experiments as ex
from qwalk.errors import AmbiguousMatch, FitDivergence, NoMatch, PhaseDegeneracy, ZeroDelta
from qwalk.graph_model import AnomalyGraphSpec, Reflect, Side, build_graph
from qwalk.operators import build_limit_operator, build_step_operator
from qwalk.spectral import (
    Activity,
    Branch,
    analyze,
    classify_spectrum,
    compute_spectrum,
    coupling_constant_limit,
    fix_global_phase,
    perturbative_pair_prediction,
    tune_phase,
)

TWO_PI = 2 * np.pi
C_TRIANGLE = 2 / np.sqrt(7)


@pytest.fixture(scope="module")
def tri_cls():
    g, b = build_graph(ex.triangle_spec(8))
    return g, b, analyze(g, b, TWO_PI)


def test_triangle_match(tri_cls):
    _, _, cls = tri_cls
    assert abs(cls.matched_lambda0 + 1) < 1e-9
    assert cls.branch is Branch.PLUS
    assert abs(abs(cls.delta) ** 2 + abs(cls.gamma) ** 2 - 4 / 7) < 1e-9
    assert abs(cls.c - C_TRIANGLE) < 1e-9


def test_triangle_r0_components(tri_cls):
    _, b, cls = tri_cls
    R0 = cls.R0
    assert np.isclose(R0[b.index_of[("0", "1")]], np.sqrt(2 / 7))
    for e in [("1", "a"), ("a", "1"), ("1", "b"), ("b", "1")]:
        assert np.isclose(R0[b.index_of[e]], -1 / np.sqrt(14))
    for e in [("a", "b"), ("b", "a")]:
        assert np.isclose(R0[b.index_of[e]], 1 / np.sqrt(14))
    assert np.allclose(R0[b.indices(Side.LEFT)], 0)


def test_l0_is_the_uniform_state(tri_cls):
    _, b, cls = tri_cls
    v = (b.out_vector() - b.in_vector()) / np.sqrt(2)
    assert abs(abs(np.vdot(v, cls.L0)) - 1) < 1e-10


def test_gamma_delta_relation(tri_cls):
    _, _, cls = tri_cls
    assert abs(-cls.gamma - cls.matched_lambda0 * cls.delta) < 1e-12


def test_bound_vectors_stay_put(tri_cls):
    _, _, cls = tri_cls
    assert cls.bound_residual < 1e-12
    bound_right = cls.select("right", Activity.BOUND)
    assert sorted(np.round(np.angle([p.value for p in bound_right]), 6)) == pytest.approx(
        [-2 * np.pi / 3, 0, 2 * np.pi / 3])


def test_spectrum_is_an_eigendecomposition():
    g, b = build_graph(ex.triangle_spec(16))
    U0 = build_limit_operator(g, b, TWO_PI)
    for p in compute_spectrum(U0):
        assert np.linalg.norm(U0.matrix @ p.vector - p.value * p.vector) < 1e-12
        assert abs(abs(p.value) - 1) < 1e-12


def test_left_eigenvalues_follow_phase():
    g, b = build_graph(ex.triangle_spec(8))
    cls = analyze(g, b, 1.1, require_match=False)
    active = [p.value for p in cls.select("left", Activity.ACTIVE)]
    assert sorted(np.angle(active)) == pytest.approx(sorted(np.angle([np.exp(0.55j), -np.exp(0.55j)])))


@pytest.mark.parametrize("lam, plus, minus", [
    (-1, TWO_PI, 0.0),
    (1j, np.pi, 3 * np.pi),
    (1, 0.0, TWO_PI),
    (np.exp(-0.5j), 4 * np.pi - 1.0, TWO_PI - 1.0),
])
def test_tune_phase_examples(lam, plus, minus):
    got = {c.branch: c.phi for c in tune_phase(lam)}
    assert got[Branch.PLUS] == pytest.approx(plus, abs=1e-12)
    assert got[Branch.MINUS] == pytest.approx(minus, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-np.pi, np.pi))
def test_tuned_phase_reproduces_eigenvalue(theta):
    lam = np.exp(1j * theta)
    for cand in tune_phase(lam):
        assert 0 <= cand.phi < 4 * np.pi
        assert abs(cand.branch.sign * np.exp(0.5j * cand.phi) - lam) < 1e-9


def test_tune_phase_rejects_off_circle():
    with pytest.raises(ValueError):
        tune_phase(0.5)


@pytest.mark.parametrize("phi", [0.0, 0.9, TWO_PI, 3.0])
def test_empty_anomaly_is_degenerate(phi):
    # right block {|0,1>, |1,0>} is [[0, -1], [e^{i phi}, 0]], eigenvalues +-i e^{i phi/2}
    g, b = build_graph(ex.star_spec(8))
    U0 = build_limit_operator(g, b, phi)
    i, j = b.attachment_edges
    block = U0.matrix[np.ix_([i, j], [i, j])]
    assert np.allclose(block, [[0, -1], [np.exp(1j * phi), 0]])
    oracle = np.linalg.eigvals(block)
    assert np.allclose(np.exp(1j * phi) + oracle ** 2, 0)
    with pytest.raises(PhaseDegeneracy) as info:
        analyze(g, b, phi)
    assert len(info.value.lambdas) == 2


def test_no_match_lists_tuning_suggestions():
    g, b = build_graph(ex.triangle_spec(8))
    with pytest.raises(NoMatch) as info:
        analyze(g, b, 1.0)
    exc = info.value
    assert len(exc.right_eigenvalues) == 5
    phis = [c["phi"] for s in exc.suggestions for c in s["phi"]]
    assert any(abs(p - TWO_PI) < 1e-9 for p in phis)


def test_no_match_can_be_reported_softly():
    g, b = build_graph(ex.triangle_spec(8))
    cls = analyze(g, b, 1.0, require_match=False)
    assert cls.matched_lambda0 is None and cls.c is None


def test_ambiguous_match_needs_lambda0():
    # path 1-a-b with b reflecting at phase 0: right spectrum is symmetric under lambda -> -lambda,
    # so both +-exp(i phi/2) find a partner at phi = pi/3
    spec = AnomalyGraphSpec(n_spokes=8, anomaly_edges=(("1", "a"), ("a", "b")), vertex_behaviors={"b": Reflect(0.0)})
    g, b = build_graph(spec)
    with pytest.raises(AmbiguousMatch) as info:
        analyze(g, b, np.pi / 3)
    cands = info.value.candidates
    assert len(cands) == 2 and abs(cands[0] + cands[1]) < 1e-9
    for chosen in cands:
        cls = analyze(g, b, np.pi / 3, lambda0=chosen)
        assert abs(cls.matched_lambda0 - chosen) < 1e-9
    assert {analyze(g, b, np.pi / 3, lambda0=z).branch for z in cands} == {Branch.PLUS, Branch.MINUS}
    with pytest.raises(NoMatch):
        analyze(g, b, np.pi / 3, lambda0=1.0)


def test_coupling_limit_recovers_closed_form(tri_cls):
    g, b, cls = tri_cls
    est = coupling_constant_limit(g, TWO_PI, cls.L0, cls.R0, [4.0 ** -k for k in range(5, 10)], basis=b)
    assert abs(est.c - C_TRIANGLE) / C_TRIANGLE < 0.02
    # the raw ratio at eps <= 1e-3 already sits within 2 %
    assert abs(est.values[0] - C_TRIANGLE) / C_TRIANGLE < 0.02


def test_coupling_limit_bound_vector_diverges(tri_cls):
    g, b, cls = tri_cls
    bound = cls.select("right", Activity.BOUND)[0].vector
    with pytest.raises(FitDivergence):
        coupling_constant_limit(g, TWO_PI, cls.L0, bound, [1 / 64, 1 / 256, 1 / 1024])


def test_pair_prediction_splits_evenly(tri_cls):
    _, b, cls = tri_cls
    pred = perturbative_pair_prediction(cls.L0, cls.R0, cls.matched_lambda0, cls.delta, 1 / 256)
    left = b.indices(Side.LEFT)
    for v in (pred.v_plus, pred.v_minus):
        assert np.sum(np.abs(v[left]) ** 2) == pytest.approx(0.5, abs=1e-12)
    assert abs(np.vdot(pred.v_plus, pred.v_minus)) < 1e-12
    # delta real: coefficient of R0 is -i for the plus vector
    assert np.isreal(cls.delta) or abs(cls.delta.imag) < 1e-12
    assert pred.split_magnitude == pytest.approx(np.sqrt(2) * abs(cls.delta) / 16)


def test_pair_prediction_needs_delta(tri_cls):
    _, _, cls = tri_cls
    with pytest.raises(ZeroDelta):
        perturbative_pair_prediction(cls.L0, cls.R0, -1, 0.0, 0.01)


def test_global_phase_convention():
    v = np.exp(0.7j) * np.array([0.1, -0.9, 0.3j])
    w = fix_global_phase(v)
    assert w[1].real > 0 and abs(w[1].imag) < 1e-15
    assert np.allclose(np.abs(w), np.abs(v))


def test_result_does_not_depend_on_spoke_count():
    vals = []
    for n in (4, 32, 512):
        g, b = build_graph(ex.triangle_spec(n), collective=n > 32)
        vals.append(analyze(g, b, TWO_PI).c)
    assert np.ptp(vals) < 1e-12


def test_fixed_reflect_dead_end_spectrum_is_phase_independent():
    spec = AnomalyGraphSpec(n_spokes=8, anomaly_edges=(("1", "a"),), vertex_behaviors={"a": Reflect(0.4)})
    g, b = build_graph(spec)
    a = analyze(g, b, 0.3, require_match=False).right_active_values()
    c = analyze(g, b, 2.9, require_match=False).right_active_values()
    assert np.allclose(sorted(a, key=np.angle), sorted(c, key=np.angle))
