"""Star-plus-anomaly graphs and the directed-edge basis of the walk.

Vertex labels are strings.  The hub is ``"0"`` and the spoke tips are
``"1" .. "N"``.  The anomaly graph G hangs off the tip of the attachment spoke
and may use any other labels.

A basis can be built in two flavours.  The full basis has one state per
directed edge.  The collective basis replaces the 2(N-1) left spoke states by
the two normalized uniform superpositions |in> and |out>.  They are written
as the pseudo-edges ``("*", "0")`` and ``("0", "*")``.  The collective span is
invariant under U and U0 and holds every state the search uses, so the
collective basis gives exact spectra at any N without building an N x N hub.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from enum import Enum
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    DisconnectedAnomaly,
    DuplicateEdge,
    GraphError,
    NonUnitaryBehavior,
    NTooSmall,
    ParseError,
)

HUB = "0"
COLLECTIVE = "*"
UNITARY_TOL = 1e-12


# --------------------------------------------------------------------------- behaviours

@dataclass(frozen=True)
class Reflect:
    """Send every incoming state back where it came from, times exp(i phase).

    ``phase=None`` means "use the leaf phase phi of the operator being built".
    """

    phase: float | None = None


@dataclass(frozen=True)
class Transmit:
    """Degree-2 vertex that passes the walker straight through."""


@dataclass(frozen=True)
class GroverCoin:
    """Reflection amplitude r = 1 - 2/d on the way back, t = 2/d onto every other edge."""


@dataclass(frozen=True, eq=False)
class CustomUnitary:
    """Arbitrary local unitary B with B[k, j] = amplitude from neighbour j to neighbour k.

    Neighbours are taken in :func:`label_key` order.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise NonUnitaryBehavior(f"custom unitary must be square, got shape {m.shape}")
        err = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max() if m.size else 0.0
        if err >= UNITARY_TOL:
            raise NonUnitaryBehavior(f"custom matrix is not unitary (|B^H B - I|_max = {err:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __eq__(self, other):
        return isinstance(other, CustomUnitary) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())


Behavior = Union[Reflect, Transmit, GroverCoin, CustomUnitary]


def local_matrix(behavior: Behavior, degree: int, phi: float) -> np.ndarray:
    """Vertex scattering matrix over the vertex's ordered neighbours."""
    if isinstance(behavior, Reflect):
        phase = phi if behavior.phase is None else behavior.phase
        return np.exp(1j * phase) * np.eye(degree, dtype=complex)
    if isinstance(behavior, Transmit):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if isinstance(behavior, GroverCoin):
        return (2.0 / degree) * np.ones((degree, degree), dtype=complex) - np.eye(degree)
    if isinstance(behavior, CustomUnitary):
        return np.array(behavior.matrix, dtype=complex)
    raise TypeError(f"unknown behavior {behavior!r}")


# --------------------------------------------------------------------------- spec

def _is_spoke(label: str, n: int) -> bool:
    return label.isdigit() and not label.startswith("0") and 1 <= int(label) <= n


def label_key(label: str):
    """Numeric labels first in numeric order, then the rest alphabetically."""
    return (0, int(label), "") if label.isdigit() else (1, 0, label)


@dataclass(frozen=True)
class AnomalyGraphSpec:
    n_spokes: int
    attachment_spoke: str = "1"
    anomaly_edges: tuple[tuple[str, str], ...] = ()
    vertex_behaviors: dict[str, Behavior] = field(default_factory=dict)
    leaf_phase: float = 0.0

    def with_n(self, n: int) -> "AnomalyGraphSpec":
        return replace(self, n_spokes=int(n))

    def with_phase(self, phi: float) -> "AnomalyGraphSpec":
        return replace(self, leaf_phase=float(phi))


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"


# --------------------------------------------------------------------------- validated graph

@dataclass(frozen=True, eq=False)
class StarGraph:
    """Validated star + anomaly; immutable."""

    spec: AnomalyGraphSpec
    n: int
    attachment: str
    anomaly_adjacency: dict[str, tuple[str, ...]]
    behaviors: dict[str, Behavior]
    flags: tuple[str, ...] = ()

    @property
    def epsilon(self) -> float:
        return 1.0 / self.n

    @cached_property
    def spokes(self) -> tuple[str, ...]:
        return tuple(str(j) for j in range(1, self.n + 1))

    @cached_property
    def left_spokes(self) -> tuple[str, ...]:
        return tuple(s for s in self.spokes if s != self.attachment)

    def is_spoke(self, label: str) -> bool:
        return _is_spoke(label, self.n)

    @property
    def has_anomaly(self) -> bool:
        return bool(self.anomaly_adjacency)

    def neighbors(self, v: str) -> tuple[str, ...]:
        """Ordered neighbour list; this order indexes CustomUnitary matrices."""
        if v == HUB:
            return self.spokes
        nb = set(self.anomaly_adjacency.get(v, ()))
        if self.is_spoke(v):
            nb.add(HUB)
        if not nb:
            raise KeyError(v)
        return tuple(sorted(nb, key=label_key))

    def anomaly_edges(self) -> list[tuple[str, str]]:
        edges = {tuple(sorted((u, v), key=label_key))
                 for u, nbs in self.anomaly_adjacency.items() for v in nbs}
        return sorted(edges, key=lambda e: (label_key(e[0]), label_key(e[1])))


def build_graph(spec: AnomalyGraphSpec, collective: bool = False) -> tuple[StarGraph, "EdgeBasis"]:
    """Validate ``spec`` and return the graph with its edge basis."""
    n = int(spec.n_spokes)
    if n < 2:
        raise NTooSmall(f"need at least 2 spokes, got {n}")
    att = str(spec.attachment_spoke)
    if not _is_spoke(att, n):
        raise GraphError(f"attachment spoke {att!r} is not one of 1..{n}")

    adjacency: dict[str, set[str]] = {}
    seen: set[frozenset] = set()
    for edge in spec.anomaly_edges:
        if len(edge) != 2:
            raise GraphError(f"edge {edge!r} must have two endpoints")
        u, v = str(edge[0]), str(edge[1])
        if u == v:
            raise GraphError(f"self-loop at {u!r} is not supported")
        for w in (u, v):
            if w == HUB or (_is_spoke(w, n) and w != att):
                raise GraphError(f"anomaly vertex {w!r} collides with a star label")
        key = frozenset((u, v))
        if key in seen:
            raise DuplicateEdge(f"edge {u}-{v} listed more than once")
        seen.add(key)
        adjacency.setdefault(u, set()).add(v)
        adjacency.setdefault(v, set()).add(u)

    if adjacency:
        if att not in adjacency:
            raise DisconnectedAnomaly(f"anomaly does not touch attachment vertex {att!r}")
        reached = {att}
        queue = deque([att])
        while queue:
            for w in adjacency[queue.popleft()]:
                if w not in reached:
                    reached.add(w)
                    queue.append(w)
        missing = sorted(set(adjacency) - reached, key=label_key)
        if missing:
            raise DisconnectedAnomaly(f"vertices {missing} not reachable from {att!r}")

    frozen_adj = {v: tuple(sorted(nb, key=label_key)) for v, nb in sorted(adjacency.items(), key=lambda kv: label_key(kv[0]))}
    g_vertices = list(frozen_adj) or [att]

    for v in spec.vertex_behaviors:
        if v not in g_vertices:
            raise GraphError(f"behaviour given for {v!r}, which is not a vertex of the anomaly")

    behaviors: dict[str, Behavior] = {}
    flags: list[str] = []
    for v in g_vertices:
        degree = len(frozen_adj.get(v, ())) + (1 if v == att else 0)
        b = spec.vertex_behaviors.get(v)
        if b is None:
            if degree == 1:
                b = Reflect()
                if v != att:
                    flags.append(f"vertex {v} is a dead end inside G; defaulted to Reflect(phi)")
            elif degree == 2:
                b = Transmit()
            else:
                b = GroverCoin()
        if isinstance(b, Transmit) and degree != 2:
            raise GraphError(f"Transmit at {v!r} needs degree 2, vertex has degree {degree}")
        if isinstance(b, CustomUnitary) and b.matrix.shape[0] != degree:
            raise NonUnitaryBehavior(
                f"custom unitary at {v!r} is {b.matrix.shape[0]}x{b.matrix.shape[0]}, degree is {degree}")
        behaviors[v] = b

    graph = StarGraph(spec=spec, n=n, attachment=att,
                      anomaly_adjacency=frozen_adj, behaviors=behaviors, flags=tuple(flags))
    return graph, make_basis(graph, collective=collective)


# --------------------------------------------------------------------------- basis

@dataclass(frozen=True, eq=False)
class EdgeBasis:
    directed_edges: tuple[tuple[str, str], ...]
    index_of: dict[tuple[str, str], int]
    side_of: tuple[Side, ...]
    n: int
    attachment: str
    collective: bool

    @property
    def dim(self) -> int:
        return len(self.directed_edges)

    def indices(self, side: Side) -> np.ndarray:
        return np.array([i for i, s in enumerate(self.side_of) if s is side], dtype=int)

    @property
    def attachment_edges(self) -> tuple[int, int]:
        """Indices of |0,a> and |a,0> for the attachment spoke a."""
        return self.index_of[(HUB, self.attachment)], self.index_of[(self.attachment, HUB)]

    def in_vector(self) -> np.ndarray:
        """|in>: uniform over the left spokes, heading into the hub."""
        return self._uniform(incoming=True)

    def out_vector(self) -> np.ndarray:
        return self._uniform(incoming=False)

    def _uniform(self, incoming: bool) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        if self.collective:
            v[self.index_of[(COLLECTIVE, HUB) if incoming else (HUB, COLLECTIVE)]] = 1.0
            return v
        left = [str(j) for j in range(1, self.n + 1) if str(j) != self.attachment]
        for j in left:
            v[self.index_of[(j, HUB) if incoming else (HUB, j)]] = 1.0 / np.sqrt(len(left))
        return v

    def same_as(self, other: "EdgeBasis") -> bool:
        return self is other or (self.directed_edges == other.directed_edges and self.n == other.n)


def make_basis(graph: StarGraph, collective: bool = False) -> EdgeBasis:
    """Spoke edges first in label order, then G edges in canonical order; each edge then its reversal."""
    edges: list[tuple[str, str]] = []
    sides: list[Side] = []
    if collective:
        edges += [(HUB, COLLECTIVE), (COLLECTIVE, HUB)]
        sides += [Side.LEFT, Side.LEFT]
        edges += [(HUB, graph.attachment), (graph.attachment, HUB)]
        sides += [Side.RIGHT, Side.RIGHT]
    else:
        for j in graph.spokes:
            edges += [(HUB, j), (j, HUB)]
            s = Side.RIGHT if j == graph.attachment else Side.LEFT
            sides += [s, s]
    for u, v in graph.anomaly_edges():
        edges += [(u, v), (v, u)]
        sides += [Side.RIGHT, Side.RIGHT]
    index_of = {e: i for i, e in enumerate(edges)}
    if len(index_of) != len(edges):
        raise DuplicateEdge("basis contains a repeated directed edge")
    return EdgeBasis(directed_edges=tuple(edges), index_of=index_of, side_of=tuple(sides),
                     n=graph.n, attachment=graph.attachment, collective=collective)


# --------------------------------------------------------------------------- file format

def behavior_to_json(b: Behavior):
    if isinstance(b, Transmit):
        return "transmit"
    if isinstance(b, GroverCoin):
        return "grover"
    if isinstance(b, Reflect):
        return {"reflect": b.phase}
    if isinstance(b, CustomUnitary):
        return {"unitary": [[[float(z.real), float(z.imag)] for z in row] for row in b.matrix]}
    raise TypeError(b)


def behavior_from_json(value, field_name: str) -> Behavior:
    if value == "transmit":
        return Transmit()
    if value == "grover":
        return GroverCoin()
    if isinstance(value, dict) and len(value) == 1:
        (kind, arg), = value.items()
        if kind == "reflect":
            if arg is not None and not isinstance(arg, (int, float)):
                raise ParseError("reflect phase must be a number or null", field=field_name)
            return Reflect(None if arg is None else float(arg))
        if kind == "unitary":
            try:
                m = np.array([[complex(re, im) for re, im in row] for row in arg])
            except (TypeError, ValueError) as exc:
                raise ParseError(f"unitary must be rows of [re, im] pairs ({exc})", field=field_name) from exc
            return CustomUnitary(m)
    raise ParseError(f"unrecognised behaviour {value!r}", field=field_name)


def spec_to_dict(spec: AnomalyGraphSpec) -> dict:
    return {
        "n_spokes": spec.n_spokes,
        "attachment_spoke": spec.attachment_spoke,
        "anomaly_edges": [list(e) for e in spec.anomaly_edges],
        "leaf_phase": spec.leaf_phase,
        "vertex_behaviors": {v: behavior_to_json(b) for v, b in spec.vertex_behaviors.items()},
    }


def _edges_from_json(raw) -> list[tuple[str, str]]:
    """Accept [[u, v], ...] undirected pairs or a {vertex: [neighbours]} adjacency list."""
    if isinstance(raw, dict):
        for v, nbs in raw.items():
            if not isinstance(nbs, list) or not all(isinstance(w, str) for w in nbs):
                raise ParseError("neighbours must be a list of strings", field=f"anomaly_edges.{v}")
            for w in nbs:
                if v not in raw.get(w, []):
                    raise ParseError(f"adjacency list is not symmetric: {v}->{w} has no {w}->{v}",
                                     field=f"anomaly_edges.{v}")
        pairs = {tuple(sorted((v, w), key=label_key)) for v, nbs in raw.items() for w in nbs}
        return sorted(pairs, key=lambda e: (label_key(e[0]), label_key(e[1])))
    if not isinstance(raw, list):
        raise ParseError("must be a list of pairs or an adjacency object", field="anomaly_edges")
    edges = []
    for k, e in enumerate(raw):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)):
            raise ParseError("each edge must be a [u, v] pair of strings", field=f"anomaly_edges[{k}]")
        edges.append((e[0], e[1]))
    return edges


def spec_from_dict(data: dict) -> AnomalyGraphSpec:
    if not isinstance(data, dict):
        raise ParseError("top level must be a JSON object")
    unknown = set(data) - {"n_spokes", "attachment_spoke", "anomaly_edges", "leaf_phase", "vertex_behaviors"}
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}")
    if "n_spokes" not in data:
        raise ParseError("missing required key", field="n_spokes")
    n = data["n_spokes"]
    if not isinstance(n, int) or isinstance(n, bool):
        raise ParseError("must be an integer", field="n_spokes")

    edges = _edges_from_json(data.get("anomaly_edges", []))

    phase = data.get("leaf_phase", 0.0)
    if not isinstance(phase, (int, float)) or isinstance(phase, bool):
        raise ParseError("must be a number (radians)", field="leaf_phase")
    att = data.get("attachment_spoke", "1")
    if not isinstance(att, str):
        raise ParseError("must be a string label", field="attachment_spoke")
    raw_behaviors = data.get("vertex_behaviors", {})
    if not isinstance(raw_behaviors, dict):
        raise ParseError("must be an object", field="vertex_behaviors")
    behaviors = {}
    for v, b in raw_behaviors.items():
        try:
            behaviors[v] = behavior_from_json(b, f"vertex_behaviors.{v}")
        except NonUnitaryBehavior as exc:
            raise ParseError(str(exc), field=f"vertex_behaviors.{v}") from exc
    return AnomalyGraphSpec(n_spokes=n, attachment_spoke=att, anomaly_edges=tuple(edges),
                            vertex_behaviors=behaviors, leaf_phase=float(phase))


def parse_graph_file(path) -> AnomalyGraphSpec:
    """Read a graph spec file and validate it with :func:`build_graph`."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from exc
    spec = spec_from_dict(data)
    build_graph(spec)
    return spec


def write_graph_file(spec: AnomalyGraphSpec, path) -> None:
    Path(path).write_text(json.dumps(spec_to_dict(spec), indent=2) + "\n")
