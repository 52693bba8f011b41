"""Command line interface.

Subcommands cover simulation (``sim``, ``sweep``), analysis
(``collapse``, ``fit``), consistency checking (``oracle-check``) and the
classical reference models (``rw``, ``classical``, ``wetting``).

Exit codes: 0 success, 1 runtime failure, 2 usage error, 3 oracle
mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .trajectory import InitialState
from . import classical as _classical
from . import ensemble as _ensemble
from . import oracle as _oracle
from . import scaling as _scaling

_OBS_CHOICES = ", ".join(_ensemble.OBSERVABLES)


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _parse_floats(text):
    """Comma list ('0.1,0.2') or inclusive range ('0:0.05:0.5')."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError("range must be start:step:stop")
        start, step, stop = (float(v) for v in parts)
        if step <= 0 or stop < start:
            raise argparse.ArgumentTypeError("range needs step > 0 and stop >= start")
        count = int(np.floor((stop - start) / step + 0.5)) + 1
        return [round(start + k * step, 10) for k in range(count)]
    try:
        return [float(v) for v in text.split(",") if v != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _parse_ints(text):
    try:
        return [int(v) for v in text.split(",") if v != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _parse_range(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected lo:hi")
    lo, hi = float(parts[0]), float(parts[1])
    if hi <= lo:
        raise argparse.ArgumentTypeError("range needs hi > lo")
    return lo, hi


def _init_state(text):
    if text in ("product", "p"):
        return InitialState.PRODUCT
    if text in ("maxent", "maximally_entangled", "m"):
        return InitialState.MAXIMALLY_ENTANGLED
    raise argparse.ArgumentTypeError("initial state must be 'product' or 'maxent'")


def _add_grid_arguments(sub):
    sub.add_argument("--L", type=_parse_ints, required=True,
                     help="system sizes, comma separated")
    sub.add_argument("--p", type=_parse_floats, required=True,
                     help="control rates: comma list or start:step:stop")
    sub.add_argument("--q", type=_parse_floats, required=True,
                     help="measurement rates: comma list or start:step:stop")
    sub.add_argument("--n", type=_positive_int, default=None,
                     help="realizations per cell (default 1000; 10000 for corr)")
    sub.add_argument("--obs", default="s_half",
                     help=f"comma list from: {_OBS_CHOICES}")
    sub.add_argument("--t-max", type=_positive_int, default=None,
                     help="steps per run (default 2*L^2)")
    sub.add_argument("--seed", type=int, default=0, help="grid master seed")
    sub.add_argument("--init", type=_init_state, default=InitialState.PRODUCT,
                     help="initial state: product (default) or maxent")
    sub.add_argument("--schedule", default="default",
                     help="checkpoint times: 'default' or comma list")
    sub.add_argument("--workers", type=_positive_int, default=1,
                     help="process count (never affects the numbers)")
    sub.add_argument("--quarter-anchor", type=int, default=None,
                     help="fixed anchor face for i2/i3 (default: moving decimal)")
    sub.add_argument("--out", required=True, help="output CSV path")
    sub.add_argument("--manifest", default=None, help="manifest JSON path")


def _run_grid_command(args, resume: bool) -> int:
    observables = tuple(s for s in args.obs.split(",") if s)
    for name in observables:
        if name not in _ensemble.OBSERVABLES:
            print(f"error: unknown observable {name!r}", file=sys.stderr)
            return 2
    schedule = None
    if args.schedule != "default":
        times = _parse_ints(args.schedule)
        schedule = _ensemble.CheckpointSchedule(tuple(sorted(times)))

    groups = []
    if args.n is not None:
        groups.append((observables, args.n))
    else:
        plain = tuple(o for o in observables if o != "corr")
        if plain:
            groups.append((plain, _DEFAULT_N))
        if "corr" in observables:
            groups.append((("corr",), _DEFAULT_N_CORR))

    all_failed = []
    for obs, n in groups:
        records, report = _ensemble.run_grid(
            args.L, args.p, args.q, n,
            observables=obs,
            master_seed=args.seed,
            t_max=args.t_max,
            initial_state=args.init,
            schedule=schedule,
            n_workers=args.workers,
            quarter_anchor=args.quarter_anchor,
            csv_path=args.out,
            manifest_path=args.manifest,
            resume=resume,
        )
        print(f"{','.join(obs)}: {report}")
        all_failed.extend(report.failed)
    return 0 if not all_failed else 1


_DEFAULT_N = 1000
_DEFAULT_N_CORR = 10000


def cmd_sim(args) -> int:
    return _run_grid_command(args, resume=False)


def cmd_sweep(args) -> int:
    return _run_grid_command(args, resume=args.resume)


def cmd_collapse(args) -> int:
    records = _ensemble.read_records_csv(args.csv)
    t = args.t if args.t is not None else None
    curves = _scaling.slice_curves(records, args.observable, x=args.x, t=t)
    if args.l_min is not None:
        curves = {L: c for L, c in curves.items() if L >= args.l_min}
    fit = _scaling.collapse_two_param(
        curves, args.x_c_range, args.nu_range,
        n_grid=args.n_grid, bootstrap=args.bootstrap, seed=args.seed,
    )
    print(
        f"x_c = {fit.x_c:.5f} +- {fit.x_c_err:.5f}   "
        f"nu = {fit.nu:.4f} +- {fit.nu_err:.4f}   "
        f"quality = {fit.quality:.4g}   points = {fit.n_points}"
    )
    if args.json:
        with open(args.json, "w") as fh:
            json.dump({"x_c": fit.x_c, "x_c_err": fit.x_c_err, "nu": fit.nu,
                       "nu_err": fit.nu_err, "quality": fit.quality,
                       "n_points": fit.n_points}, fh, indent=1)
            fh.write("\n")
    return 0


def cmd_fit(args) -> int:
    records = _ensemble.read_records_csv(args.csv)
    if args.kind == "loggrowth":
        if args.vs == "L":
            x, y, e = _scaling.size_curve(records, args.observable, t=args.t,
                                          p=args.p, q=args.q)
        else:
            curves = _scaling.time_curves(records, args.observable,
                                          p=args.p, q=args.q)
            L = max(curves) if args.L is None else args.L
            x, y, e = curves[L]
        fit = _scaling.fit_log_growth(x, y, e, window=args.window)
    elif args.kind == "powerlaw":
        x, y, e = _scaling.size_curve(records, args.observable, t=args.t,
                                      p=args.p, q=args.q)
        fit = _scaling.fit_powerlaw(x, y, e)
    elif args.kind == "beta":
        curves = _scaling.slice_curves(records, args.observable, x=args.x,
                                       t=args.t, p=args.p, q=args.q)
        fit = _scaling.fit_beta(curves, args.beta_range,
                                bootstrap=args.bootstrap, seed=args.seed)
    elif args.kind == "zdyn":
        curves = _scaling.time_curves(records, args.observable,
                                      p=args.p, q=args.q)
        fit = _scaling.collapse_dynamic(curves, args.z_range,
                                        bootstrap=args.bootstrap, seed=args.seed)
    else:  # crossing
        curves = _scaling.slice_curves(records, args.observable, x=args.x,
                                       t=args.t, p=args.p, q=args.q)
        report = _scaling.crossing_points(curves)
        for L1, L2, xc in report.pairs:
            print(f"L={L1}/{L2}: crossing at {xc:.5f}")
        print(f"extrapolated x_c = {report.x_c:.5f}  drift = {report.drift:.4g}")
        return 0
    print(f"{fit.name} = {fit.value:.5f} +- {fit.error:.5f}   quality = {fit.quality:.4g}")
    return 0


def cmd_oracle_check(args) -> int:
    report = _oracle.check_equivalence(
        L_values=args.L, t_max=args.t, n_triples=args.trials,
        master_seed=args.seed,
    )
    print(report)
    return 0 if report.ok else 3


def cmd_rw(args) -> int:
    times = _classical.rw_cover_times(args.L, args.p, args.n, master_seed=args.seed)
    mean = float(times.mean())
    stderr = float(times.std(ddof=1) / np.sqrt(len(times))) if len(times) > 1 else 0.0
    print(f"L={args.L} p={args.p}: mean wrap time {mean:.3f} +- {stderr:.3f} (n={args.n})")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("L,p,n,mean,stderr\n")
            fh.write(f"{args.L},{args.p!r},{args.n},{mean!r},{stderr!r}\n")
    return 0


def cmd_classical(args) -> int:
    pc = _classical.classical_pc(args.a, args.d)
    print(f"p_c(a={args.a}, d={args.d}) = {pc!r}")
    if args.p is not None:
        rows = []
        for p in args.p:
            times = _classical.controlled_map_times(
                args.d, args.a, p, args.steps, args.trials,
                master_seed=args.seed, tolerance=args.tolerance,
            )
            controlled = times >= 0
            frac = float(controlled.mean())
            rows.append((p, frac,
                         float(times[controlled].mean()) if controlled.any() else -1.0))
            print(f"p={p}: controlled fraction {frac:.4f}")
        if args.out:
            with open(args.out, "w") as fh:
                fh.write("p,controlled_fraction,mean_time\n")
                for p, frac, mt in rows:
                    fh.write(f"{p!r},{frac!r},{mt!r}\n")
    return 0


def cmd_wetting(args) -> int:
    s_half = np.empty(args.n, dtype=np.int64)
    s_anc = np.empty(args.n, dtype=np.int64)
    for r in range(args.n):
        s_half[r], s_anc[r] = _oracle.wetting_p0(
            args.L, args.q, args.depth, r, master_seed=args.seed,
            initial_state=args.init,
        )
    rows = [("s_half", s_half), ("s_a", s_anc)]
    for name, vals in rows:
        se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
        print(f"{name}: {vals.mean():.4f} +- {se:.4f} (n={args.n})")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("L,q,depth,observable,mean,stderr,n\n")
            for name, vals in rows:
                se = float(vals.std(ddof=1) / np.sqrt(len(vals))) if len(vals) > 1 else 0.0
                fh.write(
                    f"{args.L},{args.q!r},{args.depth},{name},"
                    f"{float(vals.mean())!r},{se!r},{args.n}\n"
                )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mincutmc",
        description="Monte Carlo minimal-cut simulator for stochastically controlled circuits",
    )
    parser.add_argument("--version", action="version", version=f"mincutmc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("sim", help="run one or more parameter cells")
    _add_grid_arguments(sim)
    sim.set_defaults(func=cmd_sim)

    sweep = sub.add_parser("sweep", help="run a parameter grid, resumable by cell")
    _add_grid_arguments(sweep)
    sweep.add_argument("--resume", action="store_true",
                       help="skip cells already present in the output CSV")
    sweep.set_defaults(func=cmd_sweep)

    col = sub.add_parser("collapse", help="two-parameter scaling collapse of a CSV")
    col.add_argument("--csv", required=True)
    col.add_argument("--observable", default="s_a")
    col.add_argument("--x", choices=("p", "q"), default="q")
    col.add_argument("--t", type=int, default=None,
                     help="checkpoint time (default: latest per size)")
    col.add_argument("--x-c-range", type=_parse_range, required=True)
    col.add_argument("--nu-range", type=_parse_range, required=True)
    col.add_argument("--n-grid", type=_positive_int, default=41)
    col.add_argument("--bootstrap", type=int, default=100)
    col.add_argument("--seed", type=int, default=0)
    col.add_argument("--l-min", type=int, default=None,
                     help="drop sizes below this cutoff")
    col.add_argument("--json", default=None, help="also write fit as JSON")
    col.set_defaults(func=cmd_collapse)

    fit = sub.add_parser("fit", help="exponent fits: log growth, power law, beta, z, crossings")
    fit.add_argument("--csv", required=True)
    fit.add_argument("--kind", choices=("loggrowth", "powerlaw", "beta", "zdyn", "crossing"),
                     required=True)
    fit.add_argument("--observable", required=True)
    fit.add_argument("--x", choices=("p", "q"), default="q")
    fit.add_argument("--vs", choices=("L", "t"), default="L",
                     help="loggrowth abscissa (size curve or time curve)")
    fit.add_argument("--t", type=int, default=None)
    fit.add_argument("--L", type=int, default=None)
    fit.add_argument("--p", type=float, default=None)
    fit.add_argument("--q", type=float, default=None)
    fit.add_argument("--window", type=_parse_range, default=None)
    fit.add_argument("--beta-range", type=_parse_range, default=(0.0, 1.5))
    fit.add_argument("--z-range", type=_parse_range, default=(0.3, 3.0))
    fit.add_argument("--bootstrap", type=int, default=100)
    fit.add_argument("--seed", type=int, default=0)
    fit.set_defaults(func=cmd_fit)

    ocheck = sub.add_parser("oracle-check",
                            help="verify fast engines against the explicit lattice")
    ocheck.add_argument("--L", type=_parse_ints, default=[6, 8, 12])
    ocheck.add_argument("--t", type=_positive_int, default=60)
    ocheck.add_argument("--trials", type=_positive_int, default=100)
    ocheck.add_argument("--seed", type=int, default=0)
    ocheck.set_defaults(func=cmd_oracle_check)

    rw = sub.add_parser("rw", help="active-site walk coverage times")
    rw.add_argument("--L", type=_positive_int, required=True)
    rw.add_argument("--p", type=float, required=True)
    rw.add_argument("--n", type=_positive_int, default=1000)
    rw.add_argument("--seed", type=int, default=0)
    rw.add_argument("--out", default=None)
    rw.set_defaults(func=cmd_rw)

    cls = sub.add_parser("classical", help="controlled d-adic map benchmark")
    cls.add_argument("--a", type=float, required=True)
    cls.add_argument("--d", type=int, required=True)
    cls.add_argument("--p", type=_parse_floats, default=None,
                     help="also simulate at these control rates")
    cls.add_argument("--trials", type=_positive_int, default=1000)
    cls.add_argument("--steps", type=_positive_int, default=1000)
    cls.add_argument("--tolerance", type=float, default=1e-12)
    cls.add_argument("--seed", type=int, default=0)
    cls.add_argument("--out", default=None)
    cls.set_defaults(func=cmd_classical)

    wet = sub.add_parser("wetting", help="static gate-only lattice ensemble")
    wet.add_argument("--L", type=_positive_int, required=True)
    wet.add_argument("--q", type=float, required=True)
    wet.add_argument("--depth", type=_positive_int, required=True)
    wet.add_argument("--n", type=_positive_int, default=500)
    wet.add_argument("--seed", type=int, default=0)
    wet.add_argument("--init", type=_init_state,
                     default=InitialState.MAXIMALLY_ENTANGLED)
    wet.add_argument("--out", default=None)
    wet.set_defaults(func=cmd_wetting)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
