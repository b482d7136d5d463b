"""Command-line front end: build, analyze, run, scan, verify.

Exit codes: 0 success, 1 input error, 2 no (unique) match, 3 phase degeneracy,
4 search failure or a scan/verify report that misses its thresholds.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import experiments as ex
from .errors import AmbiguousMatch, GraphError, NoMatch, PhaseDegeneracy, QWalkError, TrialsExhausted
from .graph_model import AnomalyGraphSpec, build_graph, parse_graph_file
from .operators import build_limit_operator, build_step_operator, write_matrix_csv
from .spectral import Activity, Branch, analyze, classify_spectrum, compute_spectrum, tune_phase
from .walk import (
    evolve,
    initial_state,
    optimal_step_count,
    prepare_search,
    search_until_found,
    write_trajectory_csv,
)

SNAP_TOL = 1e-4
EXIT_OK, EXIT_INPUT, EXIT_NO_MATCH, EXIT_DEGENERATE, EXIT_SEARCH = 0, 1, 2, 3, 4


@dataclass
class RunConfig:
    graph_path: Path
    phi: float | str | None = None       # radians, "auto", or None for the file's leaf_phase
    branch: Branch | None = None
    n_override: int | None = None
    lambda0: complex | None = None
    steps: int | None = None
    seed: int = 0
    output: Path | None = None
    fmt: str = "json"


def _parse_phi(text: str):
    if text == "auto":
        return "auto"
    t = text.strip().lower().replace(" ", "")
    if t.endswith("pi"):
        head = t[:-2].rstrip("*")
        return (float(head) if head not in ("", "+") else (-1.0 if head == "-" else 1.0)) * np.pi
    return float(t)


def _parse_complex(text: str) -> complex:
    t = text.replace(" ", "")
    if "," in t:
        re, im = t.split(",")
        return complex(float(re), float(im))
    return complex(t.replace("i", "j"))


def _dump(payload, cfg: RunConfig, csv_text: str | None = None, suffix: str = "") -> None:
    if cfg.fmt == "csv" and csv_text is not None:
        text = csv_text
    else:
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.output is None:
        sys.stdout.write(text)
    else:
        Path(str(cfg.output) + suffix).write_text(text)


def load_spec(cfg: RunConfig) -> AnomalyGraphSpec:
    spec = parse_graph_file(cfg.graph_path)
    if cfg.n_override is not None:
        spec = spec.with_n(cfg.n_override)
        build_graph(spec)
    return spec


def resolve_phase(spec: AnomalyGraphSpec, cfg: RunConfig) -> tuple[float, Branch | None, list[str]]:
    """Turn --phi into a number.  "auto" tunes a left eigenvalue onto the right active spectrum."""
    notes: list[str] = []
    if cfg.phi is None:
        return spec.leaf_phase, cfg.branch, notes
    g, b = build_graph(spec, collective=True)
    if cfg.phi != "auto":
        return _snap(g, b, float(cfg.phi), notes), cfg.branch, notes
    if g.flags:
        notes.append("anomaly has dead ends reflecting with phi; auto-tuning used the file's leaf_phase "
                     "for the right spectrum")
    eig = compute_spectrum(build_limit_operator(g, b, spec.leaf_phase))
    probe = classify_spectrum(eig, b, None, phi=spec.leaf_phase, require_match=False,
                              degeneracy_tol=-1.0)
    values = probe.right_active_values()
    if not values:
        raise NoMatch("right side has no active eigenvector; nothing to tune onto", right_eigenvalues=[])
    if cfg.lambda0 is not None:
        target = min(values, key=lambda z: abs(z - cfg.lambda0))
        if abs(target - cfg.lambda0) > 1e-6:
            raise NoMatch(f"--lambda0 {cfg.lambda0} is not a right active eigenvalue", right_eigenvalues=values)
    elif len(values) > 1:
        raise AmbiguousMatch("several right eigenvalues could be matched; pass --lambda0", candidates=values)
    else:
        target = values[0]
    want = cfg.branch or Branch.PLUS
    cand = next(c for c in tune_phase(target) if c.branch is want)
    return cand.phi, want, notes


def _snap(g, b, phi: float, notes: list[str]) -> float:
    """A phase typed to a few decimals (6.2832) means the tuned value it rounds to."""
    eig = compute_spectrum(build_limit_operator(g, b, phi))
    probe = classify_spectrum(eig, b, None, phi=phi, require_match=False, degeneracy_tol=-1.0)
    if probe.candidates:
        return phi
    four_pi = 4 * np.pi
    for z in probe.right_active_values():
        for cand in tune_phase(z):
            gap = (cand.phi - phi + 2 * np.pi) % four_pi - 2 * np.pi
            if 0 < abs(gap) <= SNAP_TOL:
                notes.append(f"phi {phi!r} snapped to tuned value {phi + gap!r}")
                return phi + gap
    return phi


def _analysis_report(spec, phi, branch, cls, notes) -> dict:
    g, _ = build_graph(spec)
    d = cls.to_dict()
    m = optimal_step_count(cls.c, g.n) if cls.c else None
    d.update({
        "n_spokes": g.n,
        "recommended_phi": phi,
        "recommended_branch": (branch or cls.branch).value if (branch or cls.branch) else None,
        "recommended_steps": m,
        "p_target": d["p_target"],
        "flags": list(g.flags) + notes,
    })
    return d


def cmd_build(cfg: RunConfig) -> int:
    spec = load_spec(cfg)
    g, b = build_graph(spec)
    phi, _, _ = resolve_phase(spec, cfg) if cfg.phi is not None else (spec.leaf_phase, None, [])
    U = build_step_operator(g, b, phi=phi)
    U0 = build_limit_operator(g, b, phi=phi)
    payload = {"n_spokes": g.n, "dim": b.dim, "phi": phi,
               "directed_edges": ["->".join(e) for e in b.directed_edges],
               "sides": [s.value for s in b.side_of],
               "unitarity_error": U.unitarity_error, "limit_unitarity_error": U0.unitarity_error,
               "limit_cross_block_max": U0.cross_block_max(), "flags": list(g.flags)}
    if cfg.output is not None and cfg.fmt == "csv":
        write_matrix_csv(U, str(cfg.output) + ".U.csv")
        write_matrix_csv(U0, str(cfg.output) + ".U0.csv")
        cfg = RunConfig(**{**cfg.__dict__, "fmt": "json"})
    _dump(payload, cfg, suffix=".json" if cfg.output is not None else "")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig) -> int:
    spec = load_spec(cfg)
    phi, branch, notes = resolve_phase(spec, cfg)
    g, b = build_graph(spec)
    cls = analyze(g, b, phi, lambda0=cfg.lambda0)
    report = _analysis_report(spec, phi, branch, cls, notes)
    rows = ["side,activity,re,im,hub_amplitude"] + [
        f"{p.side},{p.activity.value},{p.value.real!r},{p.value.imag!r},{p.hub_amplitude!r}" for p in cls.eigenpairs]
    _dump(report, cfg, "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_run(cfg: RunConfig, max_trials: int = 50) -> int:
    spec = load_spec(cfg)
    phi, branch, notes = resolve_phase(spec, cfg)
    g, b = build_graph(spec)
    steps = cfg.steps
    if steps is None:
        try:
            cls = analyze(g, b, phi, lambda0=cfg.lambda0)
            steps = optimal_step_count(cls.c, g.n)
            branch = branch or cls.branch
        except (NoMatch, PhaseDegeneracy) as exc:
            steps = optimal_step_count(1.0, g.n)
            notes.append(f"no matched eigenvalue ({type(exc).__name__}); ran {steps} steps as if c = 1")
    branch = branch or Branch.PLUS

    U = build_step_operator(g, b, phi=phi)
    _, rows = evolve(U, initial_state(b, g.n, phi, branch), steps, record=True)
    setup = prepare_search(g, phi, branch, steps)
    payload = {"phi": phi, "branch": branch.value, "n_spokes": g.n, "seed": cfg.seed, "notes": notes}
    code = EXIT_OK
    try:
        outcome = search_until_found(g, phi, branch, cfg.seed, max_trials, setup=setup)
        payload.update(outcome.to_dict())
    except TrialsExhausted as exc:
        payload.update({"found": False, "trials": exc.trials, "steps_per_trial": steps, "error": str(exc)})
        code = EXIT_SEARCH
    if cfg.output is not None:
        write_trajectory_csv(rows, str(cfg.output) + ".trajectory.csv")
        _dump(payload, RunConfig(**{**cfg.__dict__, "fmt": "json"}), suffix=".json")
    else:
        _dump(payload, RunConfig(**{**cfg.__dict__, "fmt": "json"}))
    return code


def cmd_scan(cfg: RunConfig, n_list: list[int]) -> int:
    spec = load_spec(cfg)
    phi, branch, notes = resolve_phase(spec, cfg)
    report = ex.scan_scaling(spec, phi, branch or Branch.PLUS, n_list)
    g, _ = build_graph(spec)
    payload = report.to_dict()
    if report.c is not None and g.has_anomaly:
        checks = {"r_squared": report.r_squared > 0.99}
    else:
        checks = {"null_p_star": all(r.p_star < 5.0 / r.n for r in report.rows)}
    payload["checks"] = checks
    payload["notes"] = notes
    _dump(payload, cfg, report.to_csv())
    return EXIT_OK if all(checks.values()) else EXIT_SEARCH


def cmd_verify(cfg: RunConfig, eps_list, refine: int) -> int:
    spec = load_spec(cfg)
    phi, _, notes = resolve_phase(spec, cfg)
    report = ex.verify_with_refinement(spec, phi, eps_list, max_refinements=refine, lambda0=cfg.lambda0)
    _dump({**report.to_dict(), "notes": notes}, cfg, report.to_csv())
    return EXIT_OK if report.passed else EXIT_SEARCH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--graph", required=True, type=Path, help="graph spec JSON file")
        p.add_argument("--phi", type=_parse_phi, default=None,
                       help="leaf phase in radians (accepts '2pi'), or 'auto'")
        p.add_argument("--lambda0", type=_parse_complex, default=None, help="select a match: 're,im' or '-1+0j'")
        p.add_argument("--branch", type=Branch.parse, default=None, help="'+' or '-'")
        p.add_argument("--n", type=str, default=None, help="number of spokes (comma list for scan)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", type=Path, default=None, help="output path / prefix")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    for name in ("build", "analyze", "run", "scan", "verify"):
        p = sub.add_parser(name)
        common(p)
        if name == "run":
            p.add_argument("--steps", type=int, default=None)
            p.add_argument("--max-trials", type=int, default=50)
        if name == "verify":
            p.add_argument("--eps", type=str, default=None, help="comma list, decreasing; default 4^-3..4^-8")
            p.add_argument("--refine", type=int, default=3, help="finer-grid retries for unresolved families")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    n_values = None
    if args.n is not None:
        try:
            n_values = [int(x) for x in args.n.split(",") if x.strip()]
        except ValueError:
            print(f"error: --n expects integers, got {args.n!r}", file=sys.stderr)
            return EXIT_INPUT
    cfg = RunConfig(graph_path=args.graph, phi=args.phi, branch=args.branch,
                    n_override=n_values[0] if n_values and args.command != "scan" else None,
                    lambda0=args.lambda0, steps=getattr(args, "steps", None), seed=args.seed,
                    output=args.out, fmt=args.format)
    try:
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "analyze":
            return cmd_analyze(cfg)
        if args.command == "run":
            return cmd_run(cfg, args.max_trials)
        if args.command == "scan":
            if not n_values:
                print("error: scan needs --n N1,N2,...", file=sys.stderr)
                return EXIT_INPUT
            return cmd_scan(cfg, n_values)
        eps = ex.DEFAULT_EPS if args.eps is None else tuple(float(x) for x in args.eps.split(","))
        return cmd_verify(cfg, eps, args.refine)
    except (GraphError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PhaseDegeneracy as exc:
        print(f"degenerate phase: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except AmbiguousMatch as exc:
        print(f"ambiguous match: {exc}", file=sys.stderr)
        for z in exc.candidates:
            print(f"  candidate lambda0 = {z.real:+.9f},{z.imag:+.9f}", file=sys.stderr)
        return EXIT_NO_MATCH
    except NoMatch as exc:
        print(f"no match: {exc}", file=sys.stderr)
        for s in exc.suggestions:
            print(f"  right eigenvalue {s['lambda0'][0]:+.9f},{s['lambda0'][1]:+.9f} -> phi "
                  + ", ".join(f"{c['phi']:.9f} ({c['branch']})" for c in s["phi"]), file=sys.stderr)
        return EXIT_NO_MATCH
    except QWalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
