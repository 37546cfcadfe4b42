"""Command line front end.

Four subcommands are provided:

* ``eval``      evaluate one kernel or density at a point;
* ``scan``      dump kernel / comparator ratios over a grid as CSV;
* ``simulate``  run the path-space sampler and optionally compare the
  histogram against the matching analytic density;
* ``verify``    run the structural checks (identities, inequalities,
  semigroup property, limit forms) and print one PASS/FAIL line each.

Exit status: 0 on success, 1 when a requested check fails or the
computation has to be refused (conditioning floor, iteration cap), 2 for
unusable parameters.  All output is deterministic for fixed arguments, so
reruns are byte identical.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .errors import (
    BesselHeatError,
    ConfigurationError,
    DomainError,
    IllConditionedError,
    IterationError,
)
from .kernels import (
    comparator_free,
    comparator_killed,
    comparator_main,
    comparator_reflected,
    eigen_series_kernel,
    free_density,
    hunt_remainder,
    images_dirichlet,
    images_neumann_dirichlet,
    killed_density,
    reflected_density,
)
from .montecarlo import PathEnsembleConfig, compare_histogram, simulate_density
from .verify import (
    asymptotics_check,
    inequality_suite,
    ratio_scan,
    semigroup_check,
    standard_grid,
)

_EVAL_KINDS = (
    "series", "reflected", "killed", "free", "remainder",
    "images-dirichlet", "images-nd",
)


def _print_fields(pairs) -> None:
    width = max(len(name) for name, _ in pairs)
    for name, value in pairs:
        print(f"{name:<{width}} = {value!r}")


def _cmd_eval(args) -> int:
    kind = args.kind
    if kind == "series":
        out = eigen_series_kernel(args.nu, args.t, args.x, args.y, eps=args.eps)
    elif kind == "reflected":
        out = reflected_density(args.nu, args.t, args.x, args.y, eps=args.eps)
    elif kind == "killed":
        out = killed_density(args.nu, args.t, args.x, args.y, eps=args.eps)
    elif kind == "remainder":
        out = hunt_remainder(args.nu, args.t, args.x, args.y, eps=args.eps)
    elif kind == "free":
        out = free_density(args.nu, args.t, args.x, args.y)
    elif kind == "images-dirichlet":
        out = images_dirichlet(args.t, args.x, args.y)
    else:
        out = images_neumann_dirichlet(args.t, args.x, args.y)

    record = {"kind": kind, "nu": args.nu, "t": args.t, "x": args.x, "y": args.y}
    if isinstance(out, float):
        record["value"] = out
    else:
        record["eps"] = args.eps
        record["value"] = out.value
        record["terms_used"] = out.terms_used
        record["tail_bound"] = out.tail_bound
        record["ill_conditioned"] = out.ill_conditioned
    if args.json:
        print(json.dumps(record))
    else:
        _print_fields(list(record.items()))
    return 0


def _cmd_scan(args) -> int:
    xs, ts = standard_grid()
    if args.times:
        ts = np.array(sorted(args.times))
    nu = args.nu
    which = args.which
    if which == "killed" and not nu < 0.0:
        raise DomainError("killed scans need a negative --nu")

    rows = []
    for t in ts:
        for x in xs:
            for y in xs:
                if which == "main":
                    val = eigen_series_kernel(nu, t, x, y)
                    kernel, tail = val.value, val.tail_bound
                    comp = comparator_main(nu, t, x, y)
                elif which == "reflected":
                    val = reflected_density(nu, t, x, y)
                    kernel, tail = val.value, val.tail_bound
                    comp = comparator_reflected(nu, t, x, y)
                elif which == "killed":
                    val = killed_density(nu, t, x, y)
                    kernel, tail = val.value, val.tail_bound
                    comp = comparator_killed(nu, t, x, y)
                else:
                    kernel, tail = free_density(nu, t, x, y), 0.0
                    comp = comparator_free(nu, t, x, y)
                rows.append((nu, t, x, y, kernel, comp, kernel / comp, tail))

    stream = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(
            ["nu", "t", "x", "y", "kernel", "comparator", "ratio", "tail_bound"]
        )
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    finally:
        if args.out:
            stream.close()
    ratios = [r[6] for r in rows]
    print(
        f"scan which={which} nu={nu} points={len(rows)} "
        f"ratio_min={min(ratios):.6g} ratio_max={max(ratios):.6g}",
        file=sys.stderr,
    )
    return 0


def _analytic_for(config: PathEnsembleConfig):
    pair = (config.boundary_at_zero, config.boundary_at_one)
    if pair == ("reflect", "absorb"):
        return lambda y: reflected_density(
            config.nu, config.horizon_t, config.start_x, y
        ).value
    if pair == ("kill", "absorb"):
        return lambda y: killed_density(
            config.nu, config.horizon_t, config.start_x, y
        ).value
    if pair == ("reflect", "none"):
        return lambda y: free_density(
            config.nu, config.horizon_t, config.start_x, y
        )
    return None


def _cmd_simulate(args) -> int:
    config = PathEnsembleConfig(
        nu=args.nu,
        start_x=args.start,
        horizon_t=args.t,
        step_h=args.h,
        paths=args.paths,
        boundary_at_zero=args.boundary_zero,
        boundary_at_one=args.boundary_one,
        seed=args.seed,
    )
    if args.compare and _analytic_for(config) is None:
        raise DomainError(
            "no analytic reference for boundary combination "
            f"({config.boundary_at_zero}, {config.boundary_at_one})"
        )
    hist = simulate_density(config, bins=args.bins, threads=args.threads)

    comparison = None
    if args.compare:
        comparison = compare_histogram(hist, _analytic_for(config))

    if args.json:
        record = {
            "nu": config.nu,
            "start_x": config.start_x,
            "horizon_t": config.horizon_t,
            "step_h": config.step_h,
            "paths": config.paths,
            "boundary_at_zero": config.boundary_at_zero,
            "boundary_at_one": config.boundary_at_one,
            "seed": config.seed,
            "bin_edges": hist.bin_edges.tolist(),
            "estimates": hist.estimates.tolist(),
            "std_errors": hist.std_errors.tolist(),
            "survivors": hist.survivors,
            "killed_at_zero": hist.killed_at_zero,
            "killed_at_one": hist.killed_at_one,
            "overflow": hist.overflow,
        }
        if comparison is not None:
            record["reference"] = comparison.reference.tolist()
            record["z_scores"] = comparison.z_scores.tolist()
            record["max_abs_z"] = comparison.max_abs_z
        print(json.dumps(record))
    else:
        print(
            f"# nu={config.nu} start={config.start_x} t={config.horizon_t} "
            f"h={config.step_h} paths={config.paths} seed={config.seed}"
        )
        print(
            f"# survivors={hist.survivors} killed_at_zero={hist.killed_at_zero} "
            f"killed_at_one={hist.killed_at_one} overflow={hist.overflow}"
        )
        header = f"{'bin_lo':>10} {'bin_hi':>10} {'density':>14} {'std_err':>12}"
        if comparison is not None:
            header += f" {'reference':>14} {'z':>8}"
        print(header)
        for i in range(hist.estimates.size):
            line = (
                f"{hist.bin_edges[i]:>10.6f} {hist.bin_edges[i + 1]:>10.6f} "
                f"{hist.estimates[i]:>14.6e} {hist.std_errors[i]:>12.4e}"
            )
            if comparison is not None:
                z = comparison.z_scores[i]
                line += f" {comparison.reference[i]:>14.6e} {z:>8.2f}"
            print(line)
        if comparison is not None:
            print(f"# max |z| = {comparison.max_abs_z:.3f}")

    if comparison is not None and comparison.max_abs_z > args.z_max:
        print(
            f"FAIL histogram deviates: max |z| = {comparison.max_abs_z:.3f} "
            f"> {args.z_max}",
            file=sys.stderr,
        )
        return 1
    return 0


def _cmd_verify(args) -> int:
    nu = args.nu
    failures = 0
    results = {}

    def emit(name: str, ok: bool, detail: str, payload) -> None:
        nonlocal failures
        if not ok:
            failures += 1
        results[name] = {"pass": ok, "detail": detail, **payload}
        if not args.json:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")

    # boundary-wall identities (order independent of --nu)
    t0, x0, y0 = 0.4, 0.3, 0.6
    lhs = eigen_series_kernel(-0.5, 0.5 * t0, x0, y0).value
    rhs = images_neumann_dirichlet(t0, x0, y0)
    err = abs(lhs - rhs) / abs(rhs)
    emit(
        "identity-neumann",
        err < 1e-10,
        f"series vs image sum rel err {err:.3e}",
        {"rel_err": err},
    )
    lhs = killed_density(-0.5, t0, x0, y0).value
    rhs = images_dirichlet(t0, x0, y0)
    err = abs(lhs - rhs) / abs(rhs)
    emit(
        "identity-dirichlet",
        err < 1e-10,
        f"killed density vs image sum rel err {err:.3e}",
        {"rel_err": err},
    )

    rep = inequality_suite(samples=args.samples, seed=args.seed)
    emit(
        "inequalities",
        rep.total_safe_violations == 0,
        f"{rep.total_safe_violations} violations on the proven subdomains "
        f"({rep.total_violations} on the full stated domains) in "
        f"{rep.samples} samples per family",
        {
            "violations": rep.violations,
            "safe_violations": rep.safe_violations,
            "worst_margins": rep.worst_margins,
            "witnesses": rep.witnesses,
        },
    )

    sg = semigroup_check(nu, 0.1, 0.2, 0.3, 0.7)
    emit(
        "semigroup",
        sg.defect < args.semigroup_tol,
        f"nu={nu} t=0.1 s=0.2 defect {sg.defect:.3e}",
        {"defect": sg.defect, "lhs": sg.lhs, "rhs": sg.rhs},
    )

    ar = asymptotics_check(nu)
    # the infinity-side tolerance is meaningful only once it clears the
    # first neglected correction; otherwise consistency with that
    # correction is the check
    inf_ok = bool(
        np.all(
            ar.infinity_deviations
            <= np.maximum(ar.infinity_tolerances, 1.5 * ar.first_correction)
        )
    )
    zero_ok = bool(np.all(ar.zero_deviations <= ar.zero_tolerances))
    emit(
        "asymptotics",
        zero_ok and inf_ok,
        f"nu={nu} zero dev {ar.zero_deviations.max():.3e} "
        f"infinity dev {ar.infinity_deviations.max():.3e} "
        f"(first correction {ar.first_correction.max():.3e})",
        {
            "zero_deviations": ar.zero_deviations.tolist(),
            "infinity_deviations": ar.infinity_deviations.tolist(),
            "first_correction": ar.first_correction.tolist(),
        },
    )

    families = ["main", "reflected", "free"]
    if nu < 0.0:
        families.append("killed")
    for which in families:
        rep = ratio_scan(nu, which=which)
        ok = np.isfinite(rep.min_ratio) and rep.min_ratio > 0.0
        detail = (
            f"nu={nu} ratio in [{rep.min_ratio:.4g}, {rep.max_ratio:.4g}] "
            f"over {rep.n_points} points"
        )
        if args.ratio_bounds is not None:
            lo, hi = args.ratio_bounds
            ok = ok and lo <= rep.min_ratio and rep.max_ratio <= hi
        emit(
            f"ratio-{which}",
            bool(ok),
            detail,
            {"min_ratio": rep.min_ratio, "max_ratio": rep.max_ratio},
        )

    if args.json:
        print(json.dumps(results))
    elif failures:
        print(f"{failures} check(s) failed")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bessel-heat",
        description="Heat kernels on the unit interval with Bessel-type "
        "generators: evaluation, comparator scans, path sampling, and "
        "structural verification.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a kernel or density at a point")
    p.add_argument("--kind", choices=_EVAL_KINDS, default="series")
    p.add_argument("--nu", type=float, required=True,
                   help="order (the negative index itself for --kind killed; "
                   "ignored by the image sums)")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--x", type=float, required=True)
    p.add_argument("--y", type=float, required=True)
    p.add_argument("--eps", type=float, default=1e-12,
                   help="certified relative tail target (series kinds)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser("scan", help="CSV of kernel/comparator ratios on a grid")
    p.add_argument("--which", choices=("main", "reflected", "killed", "free"),
                   default="main")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--times", type=float, nargs="*",
                   help="override the standard time list")
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.set_defaults(handler=_cmd_scan)

    p = sub.add_parser("simulate", help="sample paths and bin the endpoint")
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--h", type=float, required=True, help="time step")
    p.add_argument("--paths", type=int, required=True)
    p.add_argument("--boundary-zero", choices=("reflect", "kill"),
                   default="reflect")
    p.add_argument("--boundary-one", choices=("absorb", "none"),
                   default="absorb")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bins", type=int, default=30)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default: BESSEL_HEAT_THREADS or 1); "
                   "the result does not depend on this")
    p.add_argument("--compare", action="store_true",
                   help="compare the histogram with the analytic density")
    p.add_argument("--z-max", type=float, default=5.0,
                   help="largest acceptable |z| under --compare")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_simulate)

    p = sub.add_parser("verify", help="run structural checks")
    p.add_argument("--nu", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=500,
                   help="samples per inequality family")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--semigroup-tol", type=float, default=1e-10)
    p.add_argument("--ratio-bounds", type=float, nargs=2, default=None,
                   metavar=("LO", "HI"),
                   help="also require scanned ratios within [LO, HI]")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (DomainError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (IllConditionedError, IterationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BesselHeatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
