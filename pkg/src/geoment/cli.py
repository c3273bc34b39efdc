"""Batch command-line interface.

Subcommands cover single-state entanglement and quantumness, family scans,
the maximal-entanglement search, sphere arrangements, and scaling fits.
Outputs are CSV/JSON; file outputs get a manifest sidecar for
reproducibility, and the report commands render a PNG next to their data
unless asked not to.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .arrangements import (
    Arrangement,
    arrangement_to_majorana,
    coulomb_energy,
    covering_objective,
    import_arrangement,
    optimize_arrangement,
    tammes_objective,
)
from .entanglement import (
    OptimizerConfig,
    balanced_dicke_asymptotic,
    bures_from_entanglement,
    geometric_entanglement,
    search_max_entangled,
    symmetric_upper_bound,
    verify_extremal_certificates,
)
from .errors import ConvergenceError, ParseError
from .families import (
    ARRANGEMENT_KINDS,
    FAMILY_KINDS,
    FamilySpec,
    build_state,
    linear_phase_asymptotic,
)
from .scaling import MODELS, ScalingDataset, fit_scaling, residual_report
from .states import DickeVector, MajoranaSet, dicke_from_majorana

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_CONVERGENCE = 3
EXIT_CERTIFICATE = 4

SEED_ENV_VAR = "GEOMENT_SEED"


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _add_optimizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid-theta", type=int, default=None,
                        help="colatitude grid size (default 4N+8)")
    parser.add_argument("--grid-phi", type=int, default=None,
                        help="azimuth grid size (default 4N+8)")
    parser.add_argument("--refine-tol", type=float, default=1e-12,
                        help="refinement tolerance on the squared overlap")
    parser.add_argument("--max-refine-steps", type=int, default=200)
    parser.add_argument("--cluster-radius", type=float, default=1e-4,
                        help="maximizer deduplication radius in radians")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default ${SEED_ENV_VAR} or 0)")


def _config_from_args(args) -> OptimizerConfig:
    seed = args.seed if args.seed is not None else _default_seed()
    return OptimizerConfig(
        grid_theta=args.grid_theta,
        grid_phi=args.grid_phi,
        refinement_tolerance=args.refine_tol,
        max_refinement_steps=args.max_refine_steps,
        maximizer_cluster_radius=args.cluster_radius,
        seed=seed,
    )


def _load_state(path: str) -> DickeVector:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return DickeVector.from_json(text)
    return dicke_from_majorana(MajoranaSet.from_text(text))


def _manifest(command: str, params: dict, seed: int | None) -> dict:
    return {
        "command": command,
        "params": params,
        "seed": seed,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }


def _write_output(text: str, out: str | None, manifest: dict) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    path.write_text(text)
    sidecar = path.with_name(path.name + ".manifest.json")
    sidecar.write_text(json.dumps(manifest, indent=2) + "\n")


def _result_payload(n: int, result) -> dict:
    return {
        "n": n,
        "e_g": result.e_g,
        "overlap_sq": result.overlap_sq,
        "bound": symmetric_upper_bound(n),
        "maximizers": [{"theta": p.theta, "phi": p.phi} for p in result.maximizers],
    }


def _cmd_entangle(args) -> int:
    cfg = _config_from_args(args)
    state = _load_state(args.state)
    result = geometric_entanglement(state, cfg)
    payload = _result_payload(state.n_qubits, result)
    manifest = _manifest("entangle", {"state": args.state}, cfg.seed)
    _write_output(json.dumps(payload, indent=2) + "\n", args.out, manifest)
    return EXIT_OK


def _cmd_quantumness(args) -> int:
    cfg = _config_from_args(args)
    state = _load_state(args.state)
    result = geometric_entanglement(state, cfg)
    payload = {
        "n": state.n_qubits,
        "q_b": bures_from_entanglement(result.e_g),
        "e_g": result.e_g,
    }
    manifest = _manifest("quantumness", {"state": args.state}, cfg.seed)
    _write_output(json.dumps(payload, indent=2) + "\n", args.out, manifest)
    return EXIT_OK


def _scan_asymptotic(family: str, n: int) -> float | None:
    if family == "dicke_balanced":
        return balanced_dicke_asymptotic(n)
    if family == "linear_phase":
        return linear_phase_asymptotic(n)
    return None


def _cmd_scan(args) -> int:
    cfg = _config_from_args(args)
    if args.n_min < 1 or args.n_max < args.n_min:
        raise ValueError("need 1 <= n-min <= n-max")
    rows = []
    for n in range(args.n_min, args.n_max + 1):
        spec_kwargs = {"kind": args.family, "n_qubits": n}
        if args.family == "dicke_k":
            spec_kwargs["k"] = args.k
        if args.family in ("quadratic_phase", "linear_phase"):
            spec_kwargs["gamma"] = args.gamma
        state = build_state(FamilySpec(**spec_kwargs), restarts=args.restarts, seed=cfg.seed)
        result = geometric_entanglement(state, cfg)
        rows.append((n, result.e_g, symmetric_upper_bound(n), _scan_asymptotic(args.family, n)))

    lines = ["n,e_g,bound,asymptotic"]
    for n, e_g, bound, asym in rows:
        cell = "" if asym is None else repr(asym)
        lines.append(f"{n},{e_g!r},{bound!r},{cell}")
    csv_text = "\n".join(lines) + "\n"
    params = {
        "family": args.family,
        "gamma": args.gamma,
        "k": args.k,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "restarts": args.restarts,
    }
    _write_output(csv_text, args.out, _manifest("scan", params, cfg.seed))
    if args.out and args.plot:
        from .plots import render_scan

        png = Path(args.out).with_suffix(".png")
        label = args.family if args.gamma is None else f"{args.family} (gamma={args.gamma:g})"
        render_scan(rows, png, label)
    return EXIT_OK


def _cmd_search_max(args) -> int:
    cfg = _config_from_args(args)
    points, result = search_max_entangled(args.n, cfg, restarts=args.restarts)
    payload = _result_payload(args.n, result)
    payload["points"] = [{"theta": p.theta, "phi": p.phi} for p in points.points]
    manifest = _manifest(
        "search-max", {"n": args.n, "restarts": args.restarts}, cfg.seed
    )
    points_text = points.to_text()
    if args.out_points:
        _write_output(points_text, args.out_points, manifest)
    else:
        sys.stdout.write(points_text)
    _write_output(json.dumps(payload, indent=2) + "\n", args.out, manifest)

    if args.n in (4, 5, 6):
        report = verify_extremal_certificates({args.n: (points, result)}, cfg,
                                              restarts=args.restarts)
        relevant = [c for c in report.checks if c.label.startswith(f"n={args.n}")]
        for check in relevant:
            status = "PASS" if check.passed else "FAIL"
            print(f"[{status}] {check.label}: observed {check.observed:.12g}, "
                  f"expected {check.expected:.12g}")
        if not all(c.passed for c in relevant):
            return EXIT_CERTIFICATE
    return EXIT_OK


def _cmd_arrangement(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    if args.import_file:
        arrangement = import_arrangement(
            Path(args.import_file).read_text(), expect_header=not args.no_header
        )
    else:
        if args.kind is None or args.n is None:
            raise ValueError("provide --kind and --n, or --import FILE")
        arrangement = optimize_arrangement(args.n, args.kind, restarts=args.restarts,
                                           seed=seed)
    state = dicke_from_majorana(arrangement_to_majorana(arrangement))
    result = geometric_entanglement(state)
    payload = {
        "kind": arrangement.kind,
        "n": arrangement.n_points,
        "objectives": {
            "coulomb_energy": coulomb_energy(arrangement),
            "min_pair_distance": tammes_objective(arrangement),
            "covering_radius": covering_objective(arrangement),
        },
        "e_g": result.e_g,
        "bound": symmetric_upper_bound(arrangement.n_points),
    }
    params = {
        "kind": args.kind,
        "n": args.n,
        "restarts": args.restarts,
        "import": args.import_file,
    }
    manifest = _manifest("arrangement", params, seed)
    _write_output(arrangement.to_text(), args.out, manifest)
    sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    return EXIT_OK


def _cmd_fit(args) -> int:
    data = ScalingDataset.from_csv(Path(args.infile).read_text())
    fit = fit_scaling(data, args.model)
    residuals = residual_report(data, fit)
    payload = {
        "model": fit.model,
        "constant": fit.constant,
        "rms_residual": fit.rms_residual,
        "rows": len(data.rows),
        "residuals": [{"n": n, "residual": r} for n, r in residuals],
    }
    params = {"infile": args.infile, "model": args.model}
    _write_output(json.dumps(payload, indent=2) + "\n", args.out,
                  _manifest("fit", params, None))
    if args.out and args.plot:
        from .plots import render_fit

        render_fit(data.rows, fit, Path(args.out).with_suffix(".png"))
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoment",
        description="Geometric entanglement of symmetric multiqubit states",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entangle", help="entanglement of one state")
    p.add_argument("state", help="state file: amplitude JSON or sphere-point text")
    p.add_argument("--out", default=None, help="write the result JSON here")
    _add_optimizer_flags(p)
    p.set_defaults(func=_cmd_entangle)

    p = sub.add_parser("quantumness", help="Bures quantumness of one state")
    p.add_argument("state")
    p.add_argument("--out", default=None)
    _add_optimizer_flags(p)
    p.set_defaults(func=_cmd_quantumness)

    p = sub.add_parser("scan", help="entanglement of a family over a range of N")
    p.add_argument("--family", required=True, choices=FAMILY_KINDS)
    p.add_argument("--gamma", type=float, default=None, help="phase coefficient")
    p.add_argument("--k", type=int, default=None, help="excitation number for dicke_k")
    p.add_argument("--n-min", type=int, required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--restarts", type=int, default=None,
                   help="restarts for arrangement-backed families")
    p.add_argument("--out", default=None, help="write CSV here (PNG rendered alongside)")
    p.add_argument("--no-plot", dest="plot", action="store_false")
    _add_optimizer_flags(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("search-max", help="search the most entangled configuration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--out", default=None, help="write the result JSON here")
    p.add_argument("--out-points", default=None, help="write the point list here")
    _add_optimizer_flags(p)
    p.set_defaults(func=_cmd_search_max)

    p = sub.add_parser("arrangement", help="optimize or import a sphere arrangement")
    p.add_argument("--kind", choices=ARRANGEMENT_KINDS, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--import", dest="import_file", default=None, metavar="FILE")
    p.add_argument("--no-header", action="store_true",
                   help="imported file has no count line")
    p.add_argument("--out", default=None, help="write the arrangement text here")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=_cmd_arrangement)

    p = sub.add_parser("fit", help="fit a scaling law to n,e_g CSV data")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--model", required=True, choices=MODELS)
    p.add_argument("--out", default=None, help="write the fit JSON here")
    p.add_argument("--no-plot", dest="plot", action="store_false")
    p.set_defaults(func=_cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"geoment: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FileNotFoundError as exc:
        print(f"geoment: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ConvergenceError as exc:
        print(f"geoment: optimizer did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except ValueError as exc:
        print(f"geoment: invalid input: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
