"""Initial state, evolution, measurement and the repeat-until-found search."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BasisMismatch, TrialsExhausted, ZeroCoupling
from .graph_model import COLLECTIVE, HUB, EdgeBasis, Side, StarGraph, build_graph
from .operators import WalkUnitary, build_step_operator
from .spectral import Branch, analyze


@dataclass(frozen=True, eq=False)
class WalkState:
    amplitudes: np.ndarray
    step: int = 0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class SearchOutcome:
    measured_edge: tuple[str, str]
    found: bool
    trials: int
    steps_per_trial: int

    def to_dict(self) -> dict:
        return {"measured_edge": list(self.measured_edge), "found": self.found,
                "trials": self.trials, "steps_per_trial": self.steps_per_trial}


def initial_state(basis: EdgeBasis, n: int, phi: float, branch="+") -> WalkState:
    """Uniform superposition over all N spokes: 1 on |0,j>, +-exp(i phi/2) on |j,0>, normalized."""
    if n != basis.n:
        raise BasisMismatch(f"basis has N={basis.n}, asked for N={n}")
    beta = Branch.parse(branch).sign * np.exp(0.5j * phi)
    psi = np.zeros(basis.dim, dtype=complex)
    a = basis.attachment
    if basis.collective:
        # spokes other than a are carried by |out>, |in> with weight sqrt(N-1)
        w = np.sqrt(n - 1)
        psi[basis.index_of[(HUB, COLLECTIVE)]] = w
        psi[basis.index_of[(COLLECTIVE, HUB)]] = w * beta
        psi[basis.index_of[(HUB, a)]] = 1.0
        psi[basis.index_of[(a, HUB)]] = beta
    else:
        for j in range(1, n + 1):
            psi[basis.index_of[(HUB, str(j))]] = 1.0
            psi[basis.index_of[(str(j), HUB)]] = beta
    psi /= np.linalg.norm(psi)
    return WalkState(psi, 0)


def optimal_step_count(c: float, n: int) -> int:
    """m = pi / (2 c sqrt(eps)) rounded, with eps = 1/N."""
    if not c > 0:
        raise ZeroCoupling(f"coupling constant must be positive, got {c}")
    if n < 2:
        raise ValueError(f"N must be at least 2, got {n}")
    return max(1, int(round(np.pi * np.sqrt(n) / (2.0 * c))))


def side_probabilities(amplitudes: np.ndarray, basis: EdgeBasis) -> tuple[float, float]:
    p = np.abs(amplitudes) ** 2
    return float(p[basis.indices(Side.LEFT)].sum()), float(p[basis.indices(Side.RIGHT)].sum())


def success_probability(state: WalkState | np.ndarray, basis: EdgeBasis) -> float:
    """Weight on the attachment edge, both directions."""
    amps = state.amplitudes if isinstance(state, WalkState) else np.asarray(state)
    i, j = basis.attachment_edges
    return float(abs(amps[i]) ** 2 + abs(amps[j]) ** 2)


def evolve(U: WalkUnitary, state: WalkState, m: int, record: bool = False):
    """Apply U m times.  With ``record=True`` also return per-step
    (step, success, left, right) probability rows, starting at the input state.
    """
    if state.amplitudes.shape != (U.basis.dim,):
        raise BasisMismatch(f"state has {state.amplitudes.shape[0]} amplitudes, operator dim is {U.basis.dim}")
    if m < 0:
        raise ValueError("m must be non-negative")
    M = U.matrix
    psi = state.amplitudes
    rows = []
    if record:
        rows.append((state.step, success_probability(psi, U.basis), *side_probabilities(psi, U.basis)))
    for k in range(1, m + 1):
        psi = M @ psi
        if record:
            rows.append((state.step + k, success_probability(psi, U.basis), *side_probabilities(psi, U.basis)))
    out = WalkState(psi, state.step + m)
    return (out, rows) if record else out


def find_optimal_m(U: WalkUnitary, psi_init: WalkState, basis: EdgeBasis, m_max: int) -> tuple[int, float]:
    """Brute force: step the walk up to m_max times and keep the best success probability.

    Ties go to the smaller m.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    M = U.matrix
    psi = psi_init.amplitudes
    best_m, best_p = 0, success_probability(psi, basis)
    for k in range(1, m_max + 1):
        psi = M @ psi
        p = success_probability(psi, basis)
        if p > best_p:
            best_m, best_p = k, p
    return best_m, best_p


def measurement_distribution(state: WalkState | np.ndarray) -> np.ndarray:
    amps = state.amplitudes if isinstance(state, WalkState) else np.asarray(state)
    p = np.abs(amps) ** 2
    return p / p.sum()


def _resolve(edge: tuple[str, str], basis: EdgeBasis, rng: np.random.Generator) -> tuple[str, str]:
    """A collective pseudo-edge stands for a uniformly random left spoke."""
    if COLLECTIVE not in edge:
        return edge
    left = [str(j) for j in range(1, basis.n + 1) if str(j) != basis.attachment]
    j = left[int(rng.integers(len(left)))]
    return (HUB, j) if edge[0] == HUB else (j, HUB)


def sample_measurement(state: WalkState | np.ndarray, basis: EdgeBasis, rng_seed=None) -> tuple[str, str]:
    """Measure which directed edge the walker is on.  ``rng_seed`` may be an int or a Generator."""
    rng = np.random.default_rng(rng_seed)
    k = int(rng.choice(basis.dim, p=measurement_distribution(state)))
    return _resolve(basis.directed_edges[k], basis, rng)


def sample_measurements(state: WalkState | np.ndarray, basis: EdgeBasis, size: int, rng_seed=None) -> np.ndarray:
    """Vectorized sampling; returns basis indices."""
    rng = np.random.default_rng(rng_seed)
    return rng.choice(basis.dim, size=size, p=measurement_distribution(state))


def is_anomaly_edge(graph: StarGraph, edge: tuple[str, str]) -> bool:
    """The check from the search: does the outer end of this spoke have neighbours besides the hub?

    Edges inside G are not spokes and count as a miss, so one trial succeeds
    with the attachment-edge probability only.
    """
    outer = edge[1] if edge[0] == HUB else edge[0]
    if edge[0] != HUB and edge[1] != HUB:
        return False
    return len(graph.anomaly_adjacency.get(outer, ())) > 0


@dataclass(frozen=True, eq=False)
class SearchSetup:
    """Everything a trial needs; the evolution is deterministic, so it is computed once."""

    graph: StarGraph
    basis: EdgeBasis
    distribution: np.ndarray
    steps: int


def prepare_search(graph: StarGraph, phi: float, branch="+", steps: int | None = None,
                   lambda0: complex | None = None) -> SearchSetup:
    """Evolve the initial state for ``steps`` (default: from the closed-form c) in the full basis."""
    g, basis = build_graph(graph.spec, collective=False)
    if steps is None:
        cls = analyze(g, basis, phi, lambda0=lambda0)
        steps = optimal_step_count(cls.c, g.n)
    U = build_step_operator(g, basis, phi=phi)
    final = evolve(U, initial_state(basis, g.n, phi, branch), steps)
    return SearchSetup(graph=g, basis=basis, distribution=measurement_distribution(final), steps=int(steps))


def search_until_found(graph: StarGraph, phi: float, branch="+", rng_seed=None, max_trials: int = 50,
                       steps: int | None = None, setup: SearchSetup | None = None) -> SearchOutcome:
    """Prepare, evolve, measure and check the adjacency list; repeat until the anomaly turns up."""
    if setup is None:
        setup = prepare_search(graph, phi, branch, steps)
    rng = np.random.default_rng(rng_seed)
    edge = None
    for trial in range(1, max_trials + 1):
        k = int(rng.choice(setup.basis.dim, p=setup.distribution))
        edge = setup.basis.directed_edges[k]
        if is_anomaly_edge(setup.graph, edge):
            return SearchOutcome(measured_edge=edge, found=True, trials=trial, steps_per_trial=setup.steps)
    raise TrialsExhausted(f"anomaly not found in {max_trials} trials of {setup.steps} steps "
                          f"(last measured {edge})", trials=max_trials)


def write_trajectory_csv(rows, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "success_probability", "left_probability", "right_probability"])
        for step, p, left, right in rows:
            w.writerow([step, repr(float(p)), repr(float(left)), repr(float(right))])
