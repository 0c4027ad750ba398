"""Command line front end.

Every public library operation is reachable from exactly one subcommand:

    validate            section invariants and component decomposition
    gen                 emit a section in the graph file format
    cap                 equilibrium potential and capacity of a vertex
    cap-profile         capacity along an exhaustion, with extrapolation
    classify            transient / recurrent verdict from the profile
    gamma               energy metric between two vertices
    gamma-o             anchored energy metric (pin vertex o)
    resistance          free effective resistance (mask ignored)
    ut-report           uniform transience verdict with certificates
    dirichlet           solve the Dirichlet problem for mask data
    decompose           split f into mask-vanishing + harmonic parts
    maxcheck            maximum principle report for a harmonic f
    hbempty             harmonic boundary emptiness probe
    truncate-harmonic   clamp a harmonic f and redecompose
    liouville           oscillation trend of receding boundary data
    spectrum            Dirichlet eigenvalues
    bounds              capacity lower bounds on eigenvalues
    heat                apply the heat semigroup (optional sup-norm check)
    trace               heat trace over a time grid
    gapcheck            spectral gap criterion
    walk                random-walk escape probability

Graph sources: exactly one of --graph FILE or --generator SPEC, where
SPEC is family:key=value,... e.g. lattice:d=3,r=8 or tree:k=3,depth=5
(lattice keys: d, r, c0, c; tree keys: k, depth, c0, c). Commands that
scan exhaustions require --generator. Level lists are "8:128" (doubling),
"4:20:2" (arithmetic) or "3,5,9" (explicit).

Output is JSON on stdout (--output csv for tabular commands). Domain
errors print a machine-readable record and exit 1; usage errors exit 2.
The ROYDEN_VERTEX_CAP environment variable caps constructible sizes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import harmonic, potential, spectral, walker
from .errors import RoydenError
from .graph import (
    ExhaustionGenerator,
    Section,
    format_label,
    lattice_generator,
    parse_graph_file,
    parse_label,
    parse_vertex_fn,
    serialize_graph_file,
    serialize_vertex_fn,
    tree_generator,
)


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def parse_generator_spec(spec: str) -> tuple:
    """Return (generator, level or None) from family:key=value,..."""
    family, _, rest = spec.partition(":")
    params = {}
    if rest:
        for piece in rest.split(","):
            key, eq, value = piece.partition("=")
            if not eq or not key:
                raise UsageError(f"bad generator parameter {piece!r}")
            try:
                params[key] = float(value) if "." in value or "e" in value else int(value)
            except ValueError:
                raise UsageError(f"bad generator value {piece!r}")
    try:
        if family == "lattice":
            if "d" not in params:
                raise UsageError("lattice generator needs d=<dim>")
            gen = lattice_generator(
                int(params.pop("d")),
                c_origin=float(params.pop("c0", 0.0)),
                c_const=float(params.pop("c", 0.0)),
            )
            level = params.pop("r", None)
        elif family == "tree":
            if "k" not in params:
                raise UsageError("tree generator needs k=<degree>")
            gen = tree_generator(
                int(params.pop("k")),
                c_origin=float(params.pop("c0", 0.0)),
                c_const=float(params.pop("c", 0.0)),
            )
            level = params.pop("depth", None)
        else:
            raise UsageError(f"unknown generator family {family!r}")
    except RoydenError as exc:
        raise UsageError(str(exc))
    if params:
        raise UsageError(f"unknown generator keys {sorted(params)}")
    if level is not None:
        level = int(level)
        if level < 1:
            raise UsageError(f"level must be >= 1, got {level}")
    return gen, level


def parse_levels(spec: str) -> tuple:
    spec = spec.strip()
    try:
        if "," in spec:
            return tuple(int(p) for p in spec.split(","))
        if ":" in spec:
            parts = [int(p) for p in spec.split(":")]
            if len(parts) == 2:
                a, b = parts
                out = []
                while a <= b:
                    out.append(a)
                    a *= 2
                return tuple(out)
            if len(parts) == 3:
                a, b, step = parts
                if step < 1:
                    raise UsageError("level step must be >= 1")
                return tuple(range(a, b + 1, step))
            raise UsageError(f"bad level range {spec!r}")
        return (int(spec),)
    except ValueError:
        raise UsageError(f"bad level list {spec!r}")


def _load_source(args) -> tuple:
    """(section or None, generator or None, level or None)."""
    if bool(args.graph) == bool(args.generator):
        raise UsageError("exactly one of --graph or --generator is required")
    if args.graph:
        try:
            with open(args.graph) as fh:
                text = fh.read()
        except OSError as exc:
            raise UsageError(f"cannot read {args.graph}: {exc}")
        return parse_graph_file(text), None, None
    gen, level = parse_generator_spec(args.generator)
    return None, gen, level


def need_section(args) -> Section:
    sec, gen, level = _load_source(args)
    if sec is not None:
        return sec
    if level is None:
        raise UsageError("this command needs a fixed level: add r=/depth= to the generator spec")
    return gen.section(level)


def need_generator(args) -> ExhaustionGenerator:
    sec, gen, _ = _load_source(args)
    if gen is None:
        raise UsageError("this command scans an exhaustion; it needs --generator")
    return gen


def load_fn(s: Section, path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    return parse_vertex_fn(text, s)


def _clean(obj):
    """Make a payload json-safe: tuples to lists, numpy to python,
    non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def emit(args, payload: dict, csv_rows=None, csv_header=None) -> None:
    if args.output == "csv":
        if csv_rows is None:
            raise UsageError("this command has no CSV form; use --output json")
        out = [",".join(csv_header)]
        for row in csv_rows:
            out.append(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
        print("\n".join(out))
    else:
        print(json.dumps(_clean(payload), indent=2, allow_nan=False))


def _profile_payload(profile) -> dict:
    ex = profile.extrapolation
    return {
        "vertex": format_label(profile.x),
        "levels": list(profile.levels),
        "values": list(profile.values),
        "model": ex.model,
        "limit": ex.limit,
        "plateau_value": ex.plateau_value,
        "decay_coefficient": ex.decay_coefficient,
        "plateau_sse": ex.plateau_sse,
        "decay_sse": ex.decay_sse,
    }


def _profile_csv(profile):
    header = ["level", "cap", "plateau_residual", "decay_residual"]
    return profile.residual_rows(), header


# ---------------------------------------------------------------------------
# command handlers


def cmd_validate(args):
    s = need_section(args)
    rep = s.validate()
    comps = [
        {"size": sz, "grounded": g}
        for sz, g in zip(rep.interior_component_sizes, rep.interior_component_grounded)
    ]
    emit(args, {
        "command": "validate",
        "ok": rep.ok,
        "n": rep.n,
        "edges": rep.edge_count,
        "interior": rep.interior_count,
        "mask": rep.mask_count,
        "full_components": rep.full_component_count,
        "interior_components": comps,
        "issues": list(rep.issues),
    })


def cmd_gen(args):
    s = need_section(args)
    sys.stdout.write(serialize_graph_file(s))


def cmd_cap(args):
    sec, gen, level = _load_source(args)
    if sec is None:
        if level is None:
            raise UsageError("add r=/depth= to the generator spec")
        sec = gen.section(level)
    res = potential.equilibrium_potential(sec, parse_label(args.vertex), rel_tol=args.tol_solver)
    if args.potential_out:
        with open(args.potential_out, "w") as fh:
            fh.write(serialize_vertex_fn(res.u))
    emit(args, {
        "command": "cap",
        "vertex": args.vertex,
        "cap": res.cap,
        "degenerate": res.degenerate,
        "level": level,
    })


def cmd_cap_profile(args):
    gen = need_generator(args)
    levels = parse_levels(args.levels) if args.levels else None
    prof = potential.capacity_profile(
        gen,
        parse_label(args.vertex) if args.vertex else None,
        levels,
        threads=args.threads,
    )
    rows, header = _profile_csv(prof)
    emit(args, {"command": "cap-profile", **_profile_payload(prof)}, rows, header)


def cmd_classify(args):
    gen = need_generator(args)
    levels = parse_levels(args.levels) if args.levels else None
    verdict = potential.classify_transience(
        gen,
        parse_label(args.vertex) if args.vertex else None,
        tol=args.tol,
        levels=levels,
        threads=args.threads,
    )
    emit(args, {
        "command": "classify",
        "verdict": verdict.verdict,
        "reason": verdict.reason,
        "tol": verdict.tol,
        "profile": _profile_payload(verdict.profile),
    })


def cmd_gamma(args):
    s = need_section(args)
    g = potential.gamma(s, parse_label(args.x), parse_label(args.y), rel_tol=args.tol_solver)
    emit(args, {
        "command": "gamma",
        "x": args.x,
        "y": args.y,
        "value": g.value,
        "infinite": not math.isfinite(g.value),
        "regime": g.regime,
    })


def cmd_gamma_o(args):
    s = need_section(args)
    value = potential.gamma_o(
        s, parse_label(args.pin), parse_label(args.x), parse_label(args.y),
        rel_tol=args.tol_solver,
    )
    emit(args, {
        "command": "gamma-o",
        "pin": args.pin,
        "x": args.x,
        "y": args.y,
        "value": value,
    })


def cmd_resistance(args):
    s = need_section(args)
    value = potential.free_resistance(
        s, parse_label(args.x), parse_label(args.y), rel_tol=args.tol_solver
    )
    emit(args, {"command": "resistance", "x": args.x, "y": args.y, "value": value})


def cmd_ut_report(args):
    gen = need_generator(args)
    rep = potential.uniform_transience_report(
        gen,
        window_level=args.window,
        tol=args.tol,
        profile_levels=parse_levels(args.levels) if args.levels else None,
        gap_levels=parse_levels(args.gap_levels) if args.gap_levels else None,
        threads=args.threads,
    )
    emit(args, {
        "command": "ut-report",
        "verdict": rep.verdict,
        "evidence": rep.evidence,
        "inf_cap_estimate": rep.inf_cap_estimate,
        "C": rep.C,
        "gamma_diameter_bound": rep.gamma_diameter_bound,
        "window_inf_cap": rep.window_inf_cap,
        "details": rep.details,
    })


def cmd_dirichlet(args):
    s = need_section(args)
    data = load_fn(s, args.boundary)
    f = harmonic.solve_dirichlet(
        s, {s.labels[v]: float(data.values[v]) for v in s.mask}, rel_tol=args.tol_solver
    )
    if args.solution_out:
        with open(args.solution_out, "w") as fh:
            fh.write(serialize_vertex_fn(f))
    emit(args, {"command": "dirichlet", "n": s.n, "values": list(f.values)})


def cmd_decompose(args):
    s = need_section(args)
    f = load_fn(s, args.fn)
    from .energy import energy

    dec = harmonic.royden_decompose(s, f, rel_tol=args.tol_solver)
    emit(args, {
        "command": "decompose",
        "f0": list(dec.f0.values),
        "fh": list(dec.fh.values),
        "orthogonality_residual": dec.orthogonality_residual,
        "bounds_preserved": dec.bounds_preserved,
        "energy": energy(s, f).value,
        "energy_f0": energy(s, dec.f0).value,
        "energy_fh": energy(s, dec.fh).value,
    })


def cmd_maxcheck(args):
    s = need_section(args)
    f = load_fn(s, args.fn)
    rep = harmonic.max_principle_check(s, f)
    emit(args, {
        "command": "maxcheck",
        "max_abs_all": rep.max_abs_all,
        "max_abs_mask": rep.max_abs_mask,
        "gap": rep.gap,
        "passed": rep.passed,
        "strict_ok": rep.strict_ok,
        "constant": rep.constant,
    })


def cmd_hbempty(args):
    gen = need_generator(args)
    rep = harmonic.harmonic_boundary_empty(
        gen,
        tol=args.tol,
        levels=parse_levels(args.levels) if args.levels else None,
        threads=args.threads,
    )
    emit(args, {
        "command": "hbempty",
        "status": rep.status,
        "c_tail": rep.c_tail,
        "c_partial_sums": list(rep.c_partial_sums),
        "zero_c_verdict": rep.zero_c.verdict if rep.zero_c else None,
        "levels": list(rep.levels),
        "tol": rep.tol,
    })


def cmd_truncate_harmonic(args):
    s = need_section(args)
    f = load_fn(s, args.fn)
    res = harmonic.truncate_harmonic(s, f, args.bound, rel_tol=args.tol_solver)
    emit(args, {
        "command": "truncate-harmonic",
        "bound": args.bound,
        "fh_nonconstant": res.fh_nonconstant,
        "energy_input": res.energy_input,
        "energy_truncated": res.energy_truncated,
        "fn": list(res.fn.values),
        "f0": list(res.decomposition.f0.values),
        "fh": list(res.decomposition.fh.values),
    })


def cmd_liouville(args):
    gen = need_generator(args)
    rep = harmonic.liouville_probe(gen, parse_levels(args.levels), seed=args.seed)
    note = None
    if args.ut_window:
        ut = potential.uniform_transience_report(
            gen, window_level=args.ut_window, tol=args.tol, threads=args.threads
        )
        note = harmonic.one_point_summary(rep, ut)
    emit(args, {
        "command": "liouville",
        "trend": rep.trend,
        "levels": list(rep.levels),
        "oscillations": list(rep.oscillations),
        "seed": rep.seed,
        "note": note,
    })


def cmd_spectrum(args):
    s = need_section(args)
    spec = spectral.spectrum(s, k=args.k)
    rows = [(i, float(v)) for i, v in enumerate(spec.eigenvalues)]
    emit(args, {
        "command": "spectrum",
        "eigenvalues": [float(v) for v in spec.eigenvalues],
        "interior": int(len(spec.interior)),
        "measure_total": spec.measure_total,
        "method": spec.method,
    }, rows, ["index", "eigenvalue"])


def cmd_bounds(args):
    s = need_section(args)
    enumeration = args.enumeration
    if enumeration != "measure-decreasing":
        enumeration = [parse_label(tok) for tok in enumeration.split(",")]
    rep = spectral.eigenvalue_bounds_check(s, enumeration, threads=args.threads)
    rows = [(r.n, r.bound, r.eigenvalue, r.slack) for r in rep.rows]
    emit(args, {
        "command": "bounds",
        "passed": rep.passed,
        "C": rep.C,
        "min_cap": rep.min_cap,
        "enumeration": [format_label(v) for v in rep.enumeration],
        "rows": [
            {
                "n": r.n,
                "remaining_mass": r.remaining_mass,
                "bound": r.bound,
                "eigenvalue": r.eigenvalue,
                "slack": r.slack,
            }
            for r in rep.rows
        ],
    }, rows, ["n", "bound", "eigenvalue", "slack"])


def cmd_heat(args):
    s = need_section(args)
    f = load_fn(s, args.fn)
    out = spectral.heat_apply(s, args.t, f)
    ultra = None
    if args.check:
        if args.seed is None:
            raise UsageError("--check needs --seed")
        rep = spectral.ultracontractivity_check(
            s, args.t, trials=args.trials, seed=args.seed
        )
        ultra = {
            "C": rep.C,
            "prefactor": rep.prefactor,
            "max_ratio": rep.max_ratio,
            "passed": rep.passed,
            "trials": rep.trials,
            "seed": rep.seed,
        }
    if args.solution_out:
        with open(args.solution_out, "w") as fh:
            fh.write(serialize_vertex_fn(out))
    emit(args, {"command": "heat", "t": args.t, "values": list(out.values), "ultra": ultra})


def cmd_trace(args):
    s = need_section(args)
    try:
        times = [float(tok) for tok in args.times.split(",")]
    except ValueError:
        raise UsageError(f"bad time grid {args.times!r}")
    points = [{"t": t, "trace": spectral.heat_trace(s, t)} for t in times]
    rows = [(p["t"], p["trace"]) for p in points]
    emit(args, {"command": "trace", "points": points}, rows, ["t", "trace"])


def cmd_gapcheck(args):
    s = need_section(args)
    rep = spectral.spectral_gap_criterion(s, trials=args.trials, seed=args.seed)
    emit(args, {
        "command": "gapcheck",
        "applicable": rep.applicable,
        "lambda0": rep.lambda0,
        "delta": rep.delta,
        "sup_bound_constant": rep.sup_bound_constant,
        "cap_lower_bound": rep.cap_lower_bound,
        "verified": rep.verified,
        "max_ratio": rep.max_ratio,
        "trials": rep.trials,
        "seed": rep.seed,
    })


def cmd_walk(args):
    s = need_section(args)
    lab = parse_label(args.vertex)
    est = walker.escape_probability(
        s, lab, trials=args.trials, seed=args.seed, threads=args.threads
    )
    pi = float(s.weighted_degree[s.index_of(lab)])
    emit(args, {
        "command": "walk",
        "vertex": args.vertex,
        "estimate": est.estimate,
        "stderr": est.stderr,
        "successes": est.successes,
        "trials": est.trials,
        "seed": est.seed,
        "pi": pi,
        "cap_estimate": pi * est.estimate,
    })


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="royden",
        description="Potential theory on finite sections of weighted graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--graph", metavar="FILE", help="graph file source")
    shared.add_argument(
        "--generator", metavar="SPEC", help="generator source, family:key=value,..."
    )
    shared.add_argument("--output", choices=("json", "csv"), default="json")
    shared.add_argument("--tol", type=float, default=1e-3, help="classification tolerance")
    shared.add_argument(
        "--tol-solver", type=float, default=1e-10, help="linear solver relative tolerance"
    )
    shared.add_argument("--threads", type=int, default=1, help="parallel sweep width")

    def add(name, fn, help_, **extra):
        p = sub.add_parser(name, parents=[shared], help=help_, description=help_)
        p.set_defaults(handler=fn)
        return p

    add("validate", cmd_validate, "check section invariants, list components")
    add("gen", cmd_gen, "emit the section in the graph file format")

    p = add("cap", cmd_cap, "capacity of a vertex (least energy pinned at 1 there)")
    p.add_argument("--vertex", required=True, help="vertex index or label")
    p.add_argument("--potential-out", metavar="FILE", help="write the minimizer")

    p = add("cap-profile", cmd_cap_profile, "capacity along an exhaustion")
    p.add_argument("--vertex", help="tracked label (default: generator origin)")
    p.add_argument("--levels", help="levels, e.g. 8:128 or 4:20:2 or 3,5,9")

    p = add("classify", cmd_classify, "transient / recurrent from the capacity profile")
    p.add_argument("--vertex", help="tracked label (default: generator origin)")
    p.add_argument("--levels", help="levels override")

    p = add("gamma", cmd_gamma, "energy metric between two vertices")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = add("gamma-o", cmd_gamma_o, "energy metric anchored at a pin vertex")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--pin", required=True, help="anchor vertex o")

    p = add("resistance", cmd_resistance, "free effective resistance, mask ignored")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)

    p = add("ut-report", cmd_ut_report, "uniform transience verdict with certificates")
    p.add_argument("--window", type=int, default=2, help="window scan level")
    p.add_argument("--levels", help="profile levels override")
    p.add_argument("--gap-levels", help="spectral gap scan levels override")

    p = add("dirichlet", cmd_dirichlet, "solve the Dirichlet problem for mask data")
    p.add_argument("--boundary", required=True, metavar="FILE", help="mask values file")
    p.add_argument("--solution-out", metavar="FILE")

    p = add("decompose", cmd_decompose, "energy-orthogonal mask-vanishing + harmonic split")
    p.add_argument("--fn", required=True, metavar="FILE", help="vertex function file")

    p = add("maxcheck", cmd_maxcheck, "maximum principle report for a harmonic function")
    p.add_argument("--fn", required=True, metavar="FILE")

    p = add("hbempty", cmd_hbempty, "harmonic boundary emptiness probe")
    p.add_argument("--levels", help="levels override")

    p = add("truncate-harmonic", cmd_truncate_harmonic, "clamp a harmonic f, redecompose")
    p.add_argument("--fn", required=True, metavar="FILE")
    p.add_argument("--bound", required=True, type=float)

    p = add("liouville", cmd_liouville, "oscillation trend of receding sector data")
    p.add_argument("--levels", required=True)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--ut-window", type=int, help="also run ut-report and combine")

    p = add("spectrum", cmd_spectrum, "Dirichlet eigenvalues")
    p.add_argument("--k", type=int, help="number of smallest pairs (enables Lanczos)")

    p = add("bounds", cmd_bounds, "capacity lower bounds on eigenvalues")
    p.add_argument(
        "--enumeration",
        default="measure-decreasing",
        help='"measure-decreasing" or a comma list of interior vertices',
    )

    p = add("heat", cmd_heat, "apply the heat semigroup to a function")
    p.add_argument("--t", required=True, type=float)
    p.add_argument("--fn", required=True, metavar="FILE")
    p.add_argument("--check", action="store_true", help="also verify the sup-norm bound")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int)
    p.add_argument("--solution-out", metavar="FILE")

    p = add("trace", cmd_trace, "heat trace over a time grid")
    p.add_argument("--times", required=True, help="comma list, e.g. 0.1,1,10")

    p = add("gapcheck", cmd_gapcheck, "spectral gap criterion")
    p.add_argument("--trials", type=int, default=32)
    p.add_argument("--seed", required=True, type=int)

    p = add("walk", cmd_walk, "random-walk escape probability from a vertex")
    p.add_argument("--vertex", required=True)
    p.add_argument("--trials", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.handler(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except RoydenError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}, indent=2))
        return 1
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
