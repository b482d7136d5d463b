"""Step operators U(eps), the decoupled limit U0 and the perturbation U1 = U - U0.

Columns are input states and rows are output states, so ``U[i, j]`` is the
amplitude for the walker to go from directed edge ``j`` to directed edge
``i`` in one step.

The hub coin at finite N is the Grover coin over all N spokes:
U|j,0> = -r|0,j> + t sum_{k != j} |0,k> with t = 2/N.  In the limit operator
the hub still mixes the N-1 left spokes with their own Grover coin, so that
U0|in> = |out>.  It reflects the attachment spoke back with phase pi, so that
U0|a,0> = -|0,a>.  This choice keeps U0 exactly block-diagonal, and
U1 = U - U0 then obeys the closed forms

    U1|in>  = -2 eps |out> + 2 sqrt(eps - eps^2) |0,a>
    U1|a,0> =  2 eps |0,a> + 2 sqrt(eps - eps^2) |out>

exactly, not just to leading order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BasisMismatch, DimensionMismatch, NonUnitaryResult
from .graph_model import COLLECTIVE, HUB, EdgeBasis, Side, StarGraph, local_matrix

UNITARITY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class WalkUnitary:
    matrix: np.ndarray
    epsilon: float
    phase: float
    basis: EdgeBasis
    unitarity_error: float

    @property
    def is_limit(self) -> bool:
        return self.epsilon == 0.0

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return self.matrix @ psi

    def cross_block_max(self) -> float:
        """Largest |element| connecting a left index to a right index."""
        left = self.basis.indices(Side.LEFT)
        right = self.basis.indices(Side.RIGHT)
        if len(left) == 0 or len(right) == 0:
            return 0.0
        m = self.matrix
        return float(max(np.abs(m[np.ix_(left, right)]).max(), np.abs(m[np.ix_(right, left)]).max()))


def unitarity_error(m: np.ndarray) -> float:
    return float(np.abs(m.conj().T @ m - np.eye(m.shape[0])).max())


def _fill_vertices(m: np.ndarray, graph: StarGraph, basis: EdgeBasis, phi: float) -> None:
    """Every column except the hub-incoming ones; these never depend on eps."""
    idx = basis.index_of
    if basis.collective:
        m[idx[(COLLECTIVE, HUB)], idx[(HUB, COLLECTIVE)]] = np.exp(1j * phi)
    else:
        for j in graph.left_spokes:
            m[idx[(j, HUB)], idx[(HUB, j)]] = np.exp(1j * phi)
    for v, behavior in graph.behaviors.items():
        nbs = graph.neighbors(v)
        b = local_matrix(behavior, len(nbs), phi)
        rows = [idx[(v, w)] for w in nbs]
        cols = [idx[(w, v)] for w in nbs]
        m[np.ix_(rows, cols)] = b


def _fill_hub(m: np.ndarray, graph: StarGraph, basis: EdgeBasis, epsilon: float) -> None:
    idx = basis.index_of
    a = graph.attachment
    n = graph.n
    if basis.collective:
        i_in, i_out = idx[(COLLECTIVE, HUB)], idx[(HUB, COLLECTIVE)]
        a_in, a_out = idx[(a, HUB)], idx[(HUB, a)]
        if epsilon == 0.0:
            m[i_out, i_in] = 1.0
            m[a_out, a_in] = -1.0
        else:
            s = 2.0 * np.sqrt(epsilon - epsilon ** 2)
            m[i_out, i_in] = 1.0 - 2.0 * epsilon
            m[a_out, i_in] = s
            m[i_out, a_in] = s
            m[a_out, a_in] = -(1.0 - 2.0 * epsilon)
        return

    if epsilon == 0.0:
        spokes = graph.left_spokes
        m[idx[(HUB, a)], idx[(a, HUB)]] = -1.0
    else:
        spokes = graph.spokes
    d = len(spokes)
    coin = (2.0 / d) * np.ones((d, d)) - np.eye(d)
    rows = [idx[(HUB, j)] for j in spokes]
    cols = [idx[(j, HUB)] for j in spokes]
    m[np.ix_(rows, cols)] = coin


def _assemble(graph: StarGraph, basis: EdgeBasis, epsilon: float, phi: float) -> WalkUnitary:
    if basis.n != graph.n or basis.attachment != graph.attachment:
        raise DimensionMismatch(f"basis built for N={basis.n}, graph has N={graph.n}")
    m = np.zeros((basis.dim, basis.dim), dtype=complex)
    _fill_vertices(m, graph, basis, phi)
    _fill_hub(m, graph, basis, epsilon)
    err = unitarity_error(m)
    if err >= UNITARITY_TOL:
        raise NonUnitaryResult(f"assembled operator is not unitary (error {err:.3e})")
    m.setflags(write=False)
    return WalkUnitary(matrix=m, epsilon=epsilon, phase=float(phi), basis=basis, unitarity_error=err)


def build_step_operator(graph: StarGraph, basis: EdgeBasis, epsilon: float | None = None,
                        phi: float | None = None) -> WalkUnitary:
    """One step of the walk on the finite star, eps = 1/N."""
    if epsilon is None:
        epsilon = graph.epsilon
    if not np.isclose(epsilon, 1.0 / graph.n, rtol=1e-12, atol=0):
        raise DimensionMismatch(f"epsilon={epsilon} does not equal 1/N for N={graph.n}")
    if phi is None:
        phi = graph.spec.leaf_phase
    return _assemble(graph, basis, 1.0 / graph.n, phi)


def build_limit_operator(graph: StarGraph, basis: EdgeBasis, phi: float | None = None) -> WalkUnitary:
    """U0: left and right sides decoupled at the hub."""
    if phi is None:
        phi = graph.spec.leaf_phase
    return _assemble(graph, basis, 0.0, phi)


def build_perturbation(U: WalkUnitary, U0: WalkUnitary) -> np.ndarray:
    if not U.basis.same_as(U0.basis):
        raise BasisMismatch("U and U0 are expressed in different bases")
    if U.phase != U0.phase:
        raise BasisMismatch(f"U built with phi={U.phase}, U0 with phi={U0.phase}")
    if U.is_limit or not U0.is_limit:
        raise BasisMismatch("expected (U(eps > 0), U0)")
    return U.matrix - U0.matrix


def operators_for(graph: StarGraph, basis: EdgeBasis, phi: float | None = None) -> tuple[WalkUnitary, WalkUnitary]:
    return build_step_operator(graph, basis, phi=phi), build_limit_operator(graph, basis, phi=phi)


def write_matrix_csv(U: WalkUnitary, path, tol: float = 0.0) -> None:
    """Dump nonzero entries as (row, col, re, im), also naming the edges."""
    m = U.matrix
    rows, cols = np.nonzero(np.abs(m) > tol)
    edges = U.basis.directed_edges
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["row", "col", "re", "im", "row_edge", "col_edge"])
        for r, c in zip(rows, cols):
            z = m[r, c]
            w.writerow([int(r), int(c), repr(float(z.real)), repr(float(z.imag)),
                        "->".join(edges[r]), "->".join(edges[c])])
