"""Spectrum of U0, left/right and bound/active labels, phase tuning, and search constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from .errors import (
    AmbiguousMatch,
    EigensolverFailure,
    FitDivergence,
    NoMatch,
    PhaseDegeneracy,
    ZeroDelta,
)
from .graph_model import HUB, EdgeBasis, Side, StarGraph, build_graph
from .operators import WalkUnitary, build_step_operator

ACTIVITY_TOL = 1e-8
MATCHING_TOL = 1e-9
DEGENERACY_TOL = 1e-6
CLUSTER_TOL = 1e-8
SUPPORT_TOL = 1e-10


class Activity(str, Enum):
    BOUND = "bound"
    ACTIVE = "active"


class Branch(str, Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.PLUS else -1

    @classmethod
    def parse(cls, value) -> "Branch":
        if isinstance(value, Branch):
            return value
        if value in ("+", "plus", 1, "1", "+1"):
            return cls.PLUS
        if value in ("-", "minus", -1, "-1"):
            return cls.MINUS
        raise ValueError(f"branch must be '+' or '-', got {value!r}")


@dataclass(eq=False)
class Eigenpair:
    value: complex
    vector: np.ndarray
    side: str = "mixed"           # "left", "right" or "mixed"
    activity: Activity | None = None
    hub_amplitude: float = 0.0


@dataclass(eq=False)
class SpectralClassification:
    eigenpairs: list[Eigenpair]
    phase: float
    matched_lambda0: complex | None = None
    L0: np.ndarray | None = None
    R0: np.ndarray | None = None
    delta: complex | None = None
    gamma: complex | None = None
    c: float | None = None
    candidates: list[complex] = field(default_factory=list)
    bound_residual: float | None = None

    @property
    def branch(self) -> Branch | None:
        """Which left eigenvalue +-exp(i phi/2) the match sits on."""
        if self.matched_lambda0 is None:
            return None
        plus = np.exp(0.5j * self.phase)
        return Branch.PLUS if abs(self.matched_lambda0 - plus) < abs(self.matched_lambda0 + plus) else Branch.MINUS

    def select(self, side: str, activity: Activity | None = None) -> list[Eigenpair]:
        return [p for p in self.eigenpairs
                if p.side == side and (activity is None or p.activity is activity)]

    def right_active_values(self) -> list[complex]:
        return _distinct([p.value for p in self.select("right", Activity.ACTIVE)])

    def to_dict(self) -> dict:
        def cx(z):
            return None if z is None else [float(np.real(z)), float(np.imag(z))]

        return {
            "phase": self.phase,
            "matched_lambda0": cx(self.matched_lambda0),
            "branch": None if self.branch is None else self.branch.value,
            "delta": cx(self.delta),
            "gamma": cx(self.gamma),
            "c": self.c,
            "p_target": None if self.delta is None else float(abs(self.delta) ** 2 + abs(self.gamma) ** 2),
            "candidates": [cx(z) for z in self.candidates],
            "bound_residual": self.bound_residual,
            "eigenpairs": [
                {"eigenvalue": cx(p.value), "side": p.side,
                 "activity": None if p.activity is None else p.activity.value,
                 "hub_amplitude": p.hub_amplitude}
                for p in self.eigenpairs
            ],
        }


@dataclass(frozen=True)
class PairPrediction:
    lambda_plus: complex
    lambda_minus: complex
    v_plus: np.ndarray
    v_minus: np.ndarray
    split_magnitude: float


@dataclass(frozen=True)
class PhaseCandidate:
    phi: float
    branch: Branch


@dataclass(frozen=True)
class CouplingEstimate:
    c: float
    residual: float
    epsilons: tuple[float, ...]
    values: tuple[float, ...]


# --------------------------------------------------------------------------- helpers

def _distinct(values, tol: float = CLUSTER_TOL) -> list[complex]:
    out: list[complex] = []
    for z in values:
        if all(abs(z - w) > tol for w in out):
            out.append(z)
    return out


def fix_global_phase(v: np.ndarray) -> np.ndarray:
    """Rotate so the first largest-magnitude component is real positive."""
    mags = np.abs(v)
    k = int(np.argmax(mags >= mags.max() - 1e-9))
    if mags[k] == 0:
        return v
    return v * (abs(v[k]) / v[k])


def _clusters(values: np.ndarray, tol: float = CLUSTER_TOL) -> list[list[int]]:
    order = np.argsort(np.angle(values), kind="stable")
    groups: list[list[int]] = []
    for i in order:
        for g in groups:
            if abs(values[g[0]] - values[i]) < tol:
                g.append(int(i))
                break
        else:
            groups.append([int(i)])
    return groups


def _schur_eig(block: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    try:
        T, Z = scipy.linalg.schur(block, output="complex")
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigensolverFailure(str(exc)) from exc
    off = np.abs(np.triu(T, 1)).max() if T.shape[0] > 1 else 0.0
    if not np.all(np.isfinite(T)) or off > 1e-8:
        raise EigensolverFailure(f"Schur form not diagonal (off-diagonal {off:.2e}); operator is not normal")
    return np.diag(T).copy(), Z


def _side_label(v: np.ndarray, basis: EdgeBasis) -> str:
    left = basis.indices(Side.LEFT)
    right = basis.indices(Side.RIGHT)
    wl = float(np.sum(np.abs(v[left]) ** 2)) if len(left) else 0.0
    wr = float(np.sum(np.abs(v[right]) ** 2)) if len(right) else 0.0
    if wr < SUPPORT_TOL:
        return "left"
    if wl < SUPPORT_TOL:
        return "right"
    return "mixed"


def hub_projector(basis: EdgeBasis, side: str) -> np.ndarray:
    """Rows spanning the states through which ``side`` talks to the hub.

    Right: |0,a> and |a,0>.  Left: the collective |in> and |out>; U1 annihilates
    every other left state, so only these two count as hub contact.
    """
    if side == "right":
        rows = np.zeros((2, basis.dim), dtype=complex)
        i, j = basis.attachment_edges
        rows[0, i] = rows[1, j] = 1.0
        return rows
    if side == "left":
        return np.vstack([basis.out_vector(), basis.in_vector()]).conj()
    return np.vstack([hub_projector(basis, "left"), hub_projector(basis, "right")])


# --------------------------------------------------------------------------- operations

def compute_spectrum(U: WalkUnitary) -> list[Eigenpair]:
    """All eigenpairs of a unitary, with an orthonormal basis in every degenerate eigenspace.

    If the operator is exactly block-diagonal across the two sides, each block
    is diagonalized on its own, so shared eigenvalues never produce
    left/right mixtures.
    """
    basis = U.basis
    m = U.matrix
    if U.cross_block_max() == 0.0:
        blocks = [basis.indices(Side.LEFT), basis.indices(Side.RIGHT)]
    else:
        blocks = [np.arange(basis.dim)]

    pairs: list[Eigenpair] = []
    for idx in blocks:
        if len(idx) == 0:
            continue
        vals, Z = _schur_eig(m[np.ix_(idx, idx)])
        for k in range(len(vals)):
            v = np.zeros(basis.dim, dtype=complex)
            v[idx] = Z[:, k]
            v /= np.linalg.norm(v)
            pairs.append(Eigenpair(value=complex(vals[k]), vector=fix_global_phase(v),
                                   side=_side_label(v, basis)))
    side_rank = {"left": 0, "right": 1, "mixed": 2}
    pairs.sort(key=lambda p: (side_rank[p.side], round(float(np.angle(p.value)), 9)))
    return pairs


def _rotate_eigenspace(vectors: np.ndarray, H: np.ndarray, tol: float):
    """Rotate an orthonormal eigenspace basis so hub contact is carried by as few vectors as possible."""
    A = H @ vectors                                   # hub amplitudes, one column per vector
    _, s, Vh = np.linalg.svd(A)
    rotated = vectors @ Vh.conj().T
    amps = np.zeros(vectors.shape[1])
    amps[: len(s)] = s
    return rotated, amps


def classify_spectrum(eigenpairs: list[Eigenpair], basis: EdgeBasis, U: WalkUnitary | None = None,
                      activity_tol: float = ACTIVITY_TOL, *, phi: float | None = None,
                      lambda0: complex | None = None, require_match: bool = True,
                      matching_tol: float = MATCHING_TOL,
                      degeneracy_tol: float = DEGENERACY_TOL) -> SpectralClassification:
    """Label the spectrum of U0 and extract lambda0, L0, R0, delta, gamma and c.

    ``U`` is the finite-eps operator used to confirm that bound vectors stay
    eigenvectors.  ``phi`` defaults to ``U.phase``.  With
    ``require_match=False`` the absence of a left/right match is reported as
    ``matched_lambda0 = None`` instead of raising :class:`NoMatch`.
    """
    if phi is None:
        if U is None:
            raise ValueError("need phi or a step operator to read it from")
        phi = U.phase

    labelled: list[Eigenpair] = []
    for side in ("left", "right", "mixed"):
        group = [p for p in eigenpairs if p.side == side]
        if not group:
            continue
        H = hub_projector(basis, side)
        values = np.array([p.value for p in group])
        for cl in _clusters(values):
            vecs = np.column_stack([group[i].vector for i in cl])
            lam = complex(np.mean(values[cl]))
            rotated, amps = _rotate_eigenspace(vecs, H, activity_tol)
            for k in range(rotated.shape[1]):
                v = rotated[:, k] / np.linalg.norm(rotated[:, k])
                act = Activity.ACTIVE if amps[k] >= activity_tol else Activity.BOUND
                labelled.append(Eigenpair(value=lam if len(cl) > 1 else group[cl[0]].value,
                                          vector=fix_global_phase(v), side=side, activity=act,
                                          hub_amplitude=float(amps[k])))

    cls = SpectralClassification(eigenpairs=labelled, phase=float(phi))

    if U is not None:
        res = [np.linalg.norm(U.matrix @ p.vector - p.value * p.vector)
               for p in labelled if p.activity is Activity.BOUND]
        cls.bound_residual = float(max(res)) if res else 0.0

    right_active = cls.select("right", Activity.ACTIVE)
    left_active = cls.select("left", Activity.ACTIVE)

    bad = [p.value for p in right_active if abs(np.exp(1j * phi) + p.value ** 2) <= degeneracy_tol]
    if bad:
        raise PhaseDegeneracy(
            f"exp(i phi) + lambda0^2 = 0 for right eigenvalue(s) {_fmt(bad)} at phi={phi:.6g}; "
            "this case is excluded", lambdas=bad)

    matches = _distinct([r.value for r in right_active
                         if any(abs(r.value - l.value) < matching_tol for l in left_active)])
    cls.candidates = matches
    if not matches:
        if require_match:
            raise NoMatch(
                f"no right eigenvalue equals +-exp(i phi/2) at phi={phi:.6g}; retune phi",
                right_eigenvalues=cls.right_active_values(),
                suggestions=[{"lambda0": [z.real, z.imag],
                              "phi": [{"phi": c.phi, "branch": c.branch.value} for c in tune_phase(z)]}
                             for z in cls.right_active_values()])
        return cls
    if lambda0 is not None:
        chosen = min(matches, key=lambda z: abs(z - lambda0))
        if abs(chosen - lambda0) > 1e-6:
            raise NoMatch(f"requested lambda0={lambda0} is not among the matches {_fmt(matches)}",
                          right_eigenvalues=cls.right_active_values())
    elif len(matches) > 1:
        raise AmbiguousMatch(f"several shared eigenvalues {_fmt(matches)}; choose one with lambda0",
                             candidates=matches)
    else:
        chosen = matches[0]

    L0 = next(p for p in left_active if abs(p.value - chosen) < matching_tol).vector
    R0 = next(p for p in right_active if abs(p.value - chosen) < matching_tol).vector
    i, j = basis.attachment_edges
    cls.matched_lambda0 = chosen
    cls.L0 = L0
    cls.R0 = R0
    cls.delta = complex(R0[i])
    cls.gamma = complex(R0[j])
    cls.c = float(np.sqrt(2.0) * abs(cls.gamma))
    return cls


def _fmt(values) -> str:
    return "[" + ", ".join(f"{z.real:+.6f}{z.imag:+.6f}j" for z in values) + "]"


def analyze(graph: StarGraph, basis: EdgeBasis, phi: float | None = None, *,
            lambda0: complex | None = None, require_match: bool = True) -> SpectralClassification:
    """Build U and U0, diagonalize U0 and classify."""
    from .operators import build_limit_operator

    U = build_step_operator(graph, basis, phi=phi)
    U0 = build_limit_operator(graph, basis, phi=phi)
    return classify_spectrum(compute_spectrum(U0), basis, U, lambda0=lambda0, require_match=require_match)


def tune_phase(lambda0_right: complex) -> list[PhaseCandidate]:
    """Leaf phases in [0, 4 pi) for which +exp(i phi/2) or -exp(i phi/2) equals lambda0."""
    lam = complex(lambda0_right)
    if abs(abs(lam) - 1.0) > 1e-9:
        raise ValueError(f"|lambda0| must be 1, got {abs(lam)}")
    four_pi = 4.0 * np.pi
    base = float(np.angle(lam))
    plus = (2.0 * base) % four_pi
    minus = (2.0 * (base - np.pi)) % four_pi
    out = []
    for phi, branch in ((plus, Branch.PLUS), (minus, Branch.MINUS)):
        # snap values that land a rounding error below 4 pi back to 0
        if four_pi - phi < 1e-12:
            phi = 0.0
        out.append(PhaseCandidate(phi=phi, branch=branch))
    return out


def _reembed(graph: StarGraph, src: EdgeBasis, vector: np.ndarray, dst: EdgeBasis) -> np.ndarray:
    """Move a vector living in span{|in>, |out>} + right side into another basis of the same graph."""
    out = np.zeros(dst.dim, dtype=complex)
    a_out = np.vdot(src.out_vector(), vector)
    a_in = np.vdot(src.in_vector(), vector)
    out += a_out * dst.out_vector() + a_in * dst.in_vector()
    for k in src.indices(Side.RIGHT):
        out[dst.index_of[src.directed_edges[k]]] += vector[k]
    return out


def coupling_constant_limit(graph: StarGraph, phi: float, L0: np.ndarray, R0: np.ndarray,
                            eps_list, basis: EdgeBasis | None = None) -> CouplingEstimate:
    """Estimate c as the eps -> 0 limit of |<R0|U(eps)|L0>| / sqrt(eps).

    Each eps must be 1/N for an integer N.  The star is rebuilt at that N in
    the collective basis.  The estimates are then extrapolated to eps = 0 by a
    straight-line fit in sqrt(eps).
    """
    eps = np.asarray(list(eps_list), dtype=float)
    if len(eps) < 2 or np.any(np.diff(eps) >= 0) or eps.min() <= 0 or eps.max() > 0.5:
        raise ValueError("eps_list must be strictly decreasing values in (0, 1/2], at least two")
    if basis is None:
        basis = build_graph(graph.spec, collective=L0.shape[0] != 2 * (graph.n + len(graph.anomaly_edges())))[1]

    values = []
    for e in eps:
        n = int(round(1.0 / e))
        if abs(n * e - 1.0) > 1e-9:
            raise ValueError(f"eps={e} is not 1/N for an integer N")
        g, b = build_graph(graph.spec.with_n(n), collective=True)
        U = build_step_operator(g, b, phi=phi)
        l0 = _reembed(graph, basis, L0, b)
        r0 = _reembed(graph, basis, R0, b)
        values.append(abs(np.vdot(r0, U.matrix @ l0)) / np.sqrt(e))
    values = np.array(values)
    if values.max() < 1e-8:
        raise FitDivergence("L0 and R0 are not coupled through the hub; check the classification")

    A = np.column_stack([np.ones_like(eps), np.sqrt(eps)])
    coef, *_ = np.linalg.lstsq(A, values, rcond=None)
    resid = float(np.max(np.abs(A @ coef - values)))
    c = float(coef[0])
    if not np.isfinite(c) or c <= 0 or resid > 1e-2 * max(c, 1e-12):
        raise FitDivergence(f"estimates {values} do not extrapolate cleanly (residual {resid:.2e})")
    return CouplingEstimate(c=c, residual=resid, epsilons=tuple(eps), values=tuple(values))


def perturbative_pair_prediction(L0: np.ndarray, R0: np.ndarray, lambda0: complex, delta: complex,
                                 epsilon: float) -> PairPrediction:
    """Degenerate perturbation theory for the pair split off lambda0."""
    if abs(delta) < ACTIVITY_TOL:
        raise ZeroDelta("delta = <0,a|R0> vanishes; R0 has no hub contact")
    if not 0 < epsilon <= 0.5:
        raise ValueError(f"epsilon must be in (0, 1/2], got {epsilon}")
    u = 1j * abs(delta) / delta
    v_plus = (-u * R0 + L0) / np.sqrt(2.0)
    v_minus = (u * R0 + L0) / np.sqrt(2.0)
    split = float(np.sqrt(2.0) * abs(delta) * np.sqrt(epsilon))
    return PairPrediction(
        lambda_plus=complex(lambda0 * (1 + 1j * split)),
        lambda_minus=complex(lambda0 * (1 - 1j * split)),
        v_plus=v_plus / np.linalg.norm(v_plus),
        v_minus=v_minus / np.linalg.norm(v_minus),
        split_magnitude=split,
    )

