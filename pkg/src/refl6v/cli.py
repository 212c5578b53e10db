"""Command-line driver.

Subcommands: weights, enumerate, det, curve, mc, bench, verify.  Angles are
accepted as exact pi-tokens ('pi/4', '-pi/8', '3pi/8') or decimals, parsed
at the working precision so special points do not suffer decimal rounding.
A flat 'key = value' config file can seed any flag; explicit flags win.
Exit codes: 0 ok, 1 domain error, 2 usage.
"""

import argparse
import os
import re
import sys
import time

import mpmath as mp
import numpy as np

from .params import SpectralParams, OutOfRegimeError, CapacityError, build_weights
from .enumeration import (
    enumerate_Z,
    enumerate_correlations,
    enumerate_extended,
)
from .detengine import (
    tsuchiya_Z,
    tau_sequence,
    toda_residuals,
    homogeneous_Z,
    partial_inhom_Z,
    hN_determinant,
    default_dps,
)
from .asymptotics import contact_point, arctic_curve, tangent_family, h_rate
from . import montecarlo as mc
from . import emit

_PI_RE = re.compile(r"^([+-]?)(\d+(?:\.\d+)?)?\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d+)?))?$")


def parse_angle(text, dps=None):
    """'pi/4', '-pi/8', '3pi/8', '0.45' -> mpf at the working precision."""
    s = str(text).strip().lower().replace(" ", "")
    m = _PI_RE.match(s)
    with mp.workdps(dps or mp.mp.dps):
        if m:
            sign = -1 if m.group(1) == "-" else 1
            num = mp.mpf(m.group(2)) if m.group(2) else mp.mpf(1)
            den = mp.mpf(m.group(3)) if m.group(3) else mp.mpf(1)
            return sign * num * mp.pi / den
        try:
            return mp.mpf(s)
        except ValueError:
            raise ValueError(f"cannot parse angle {text!r}")


def read_config(path):
    values = {}
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            k, v = line.split("=", 1)
            values[k.strip().replace("-", "_")] = v.strip()
    return values


def _params_from(args, dps):
    return SpectralParams(
        lam=parse_angle(args.lam, dps),
        mu=parse_angle(args.mu, dps),
        eta=parse_angle(args.eta, dps),
        xi=parse_angle(args.xi, dps),
        omega=parse_angle(args.omega, dps),
    )


def _run_config(args, keys):
    cfg = {"subcommand": args.command}
    for k in keys:
        cfg[k] = getattr(args, k)
    return cfg


def _angle_args(sp):
    sp.add_argument("--lambda", dest="lam", default="pi/4", help="row spectral parameter")
    sp.add_argument("--mu", default="0", help="column spectral parameter")
    sp.add_argument("--eta", default="pi/4", help="crossing parameter")
    sp.add_argument("--xi", default="pi/2", help="boundary parameter")
    sp.add_argument("--omega", default="0", help="inhomogeneity shift of the leftmost column")


def _out(args, name):
    os.makedirs(args.outdir, exist_ok=True)
    return os.path.join(args.outdir, name)


def cmd_weights(args):
    dps = args.precision or 50
    p = _params_from(args, dps)
    with mp.workdps(dps):
        for parity in ("odd", "even"):
            ws = build_weights(p, parity)
            w1, w2, w3 = ws.w1, ws.w2, ws.w3
            print(f"{parity} rows: w1 = {mp.nstr(w1, 15)}  w2 = {mp.nstr(w2, 15)}"
                  f"  w3 = {mp.nstr(w3, 15)}")
        ws = build_weights(p, "even")
        print(f"kappa_+ = {mp.nstr(ws.kappa_plus, 15)}  kappa_- = {mp.nstr(ws.kappa_minus, 15)}")
        print(f"Delta = {mp.nstr(ws.delta, 15)}")
    return 0


def cmd_enumerate(args):
    dps = args.precision or 50
    p = _params_from(args, dps)
    cfg = _run_config(args, ("N", "mode", "lam", "mu", "eta", "xi", "omega", "precision"))
    if args.extended is not None:
        ext = enumerate_extended(args.N, args.extended, p, dps=dps)
        print(f"Z_NL = {mp.nstr(ext.Z_NL, 20)}  (factorized sum {mp.nstr(ext.Z_sum, 20)},"
              f" residual {mp.nstr(ext.residual, 3)})")
        if "json" in args.emit:
            emit.write_json(_out(args, f"extended_N{args.N}_L{args.extended}.json"),
                            ext.to_json_dict(), cfg)
        return 0
    if args.correlations:
        tab = enumerate_correlations(args.N, p, dps=dps)
        print(f"Z_{args.N} = {mp.nstr(tab.Z, 20)}")
        for r in range(1, args.N + 1):
            print(f"r={r}: H = {mp.nstr(tab.H[r-1], 12)}  G = {mp.nstr(tab.G[r-1], 12)}")
        if "csv" in args.emit:
            emit.write_csv(_out(args, f"correlations_N{args.N}.csv"),
                           ["r", "H", "G", "A", "D"], tab.csv_rows(digits=dps), cfg)
        if "json" in args.emit:
            emit.write_json(_out(args, f"correlations_N{args.N}.json"), tab.to_json_dict(dps), cfg)
        return 0
    Z, count = enumerate_Z(args.N, p, mode=args.mode, dps=dps)
    print(f"Z_{args.N} = {mp.nstr(Z, 20)}   configurations: {count}")
    if "json" in args.emit:
        emit.write_json(_out(args, f"Z_N{args.N}.json"),
                        {"Z": mp.nstr(Z, dps), "configurations": str(count)}, cfg)
    return 0


def cmd_det(args):
    dps = args.precision or default_dps(args.N)
    p = _params_from(args, dps)
    cfg = _run_config(args, ("N", "lam", "mu", "eta", "xi", "omega", "precision"))
    with mp.workdps(dps):
        if args.what == "tsuchiya":
            eps = mp.mpf("0.03")
            lams = [p.lam + j * eps for j in range(args.N)]
            mus = [p.mu + k * eps for k in range(args.N)]
            Z = tsuchiya_Z(lams, mus, p, dps=dps)
            print(f"tsuchiya Z_{args.N} (staggered parameters) = {mp.nstr(Z, 20)}")
        elif args.what == "tau":
            om = p.omega if p.omega != 0 else None  # tilde needs a real shift
            seq = tau_sequence(args.N, p.lam, p.mu, p.eta, omega=om, dps=dps)
            rows = []
            for n in range(1, args.N + 1):
                res = ("", "")
                if 2 <= n <= args.N - 1:
                    r1, r2 = toda_residuals(n, p.lam, p.mu, p.eta, omega=om, dps=dps)
                    res = (mp.nstr(r1, 3), mp.nstr(r2, 3))
                rows.append([n, dps, mp.nstr(seq.tau[n - 1], dps),
                             mp.nstr(mp.log(abs(seq.tau[n - 1])), 20), res[0], res[1]])
            print(f"tau_{args.N} = {mp.nstr(seq.tau[args.N - 1], 20)}")
            if "csv" in args.emit:
                emit.write_csv(_out(args, f"tau_N{args.N}.csv"),
                               ["N", "precision", "tau", "log_abs_tau",
                                "toda_residual", "toda_tilde_residual"], rows, cfg)
        elif args.what == "hN":
            h = hN_determinant(args.N, p.lam, p.omega, dps=dps)
            rate = h_rate(p.omega, p.lam)
            print(f"h_{args.N}(gamma({mp.nstr(p.omega, 8)})) = {mp.nstr(h, 20)}")
            print(f"log h / N = {mp.nstr(mp.log(h) / args.N, 15)}   "
                  f"h_rate = {mp.nstr(rate, 15)}")
        elif args.what == "homogeneous":
            Z = homogeneous_Z(args.N, p, dps=dps)
            print(f"Z_{args.N}(lam, mu) = {mp.nstr(Z, 20)}")
        elif args.what == "partial-inhom":
            Z = partial_inhom_Z(args.N, p, dps=dps)
            print(f"Z_{args.N}(lam, mu, omega) = {mp.nstr(Z, 20)}")
    return 0


def cmd_curve(args):
    cfg = _run_config(args, ("lam", "grid", "lines"))
    kappa, theta2 = contact_point(parse_angle(args.lam, 40))
    print(f"contact point kappa = {mp.nstr(kappa, 15)} (saddle curvature {mp.nstr(theta2, 6)})")
    samples = arctic_curve(n_points=args.grid)
    lines = [tangent_family(z) for z in np.linspace(0.06, 0.94, args.lines)]
    if "csv" in args.emit:
        rows = [[mp.nstr(mp.mpf(s.parameter), 12), f"{s.x:.12f}", f"{s.y:.12f}", s.source]
                for s in samples]
        emit.write_csv(_out(args, "arctic_curve.csv"), ["param", "x", "y", "source"], rows, cfg)
    if "svg" in args.emit:
        emit.curve_svg(_out(args, "arctic_curve.svg"), samples, lines, config=cfg)
        print(f"wrote {os.path.join(args.outdir, 'arctic_curve.svg')}")
    return 0


def cmd_mc(args):
    cfg = _run_config(args, ("N", "sweeps", "burn_in", "thinning", "seed", "epsilon",
                             "init", "kernel"))
    chain = mc.mc_init(args.N, seed=args.seed, mode=args.init, kernel=args.kernel)
    field = mc.mc_measure(chain, n_sweeps=args.sweeps, burn_in=args.burn_in,
                          thinning=args.thinning)
    stats = chain.stats.as_dict()
    cont = mc.extract_contour(field, args.epsilon)
    dist = mc.compare_semicircle(cont, x_max=1 - 1.0 / args.N)
    contacts = mc.contour_contacts(cont)
    print(f"kernel: {mc.get_kernel(args.kernel).BACKEND}; sweeps {chain.sweeps}, "
          f"samples {field.n_samples}")
    print(f"acceptance: interior {stats['interior_accepted']}/{stats['interior_proposed']}, "
          f"turn {stats['turn_accepted']}/{stats['turn_proposed']}")
    print(f"contour sup-distance to unit semicircle: {dist:.4f} (epsilon {args.epsilon})")
    for name, c in contacts.items():
        print(f"contact {name}: ({c['point'][0]:.4f}, {c['point'][1]:.4f}) "
              f"dist {c['distance']:.4f}")
    meta = dict(cfg)
    meta.update({f"acceptance_{k}": v for k, v in stats.items()})
    if "csv" in args.emit:
        rows = []
        for i in range(2 * args.N + 1):
            for j in range(args.N):
                rows.append([i, j, f"{field.density[i, j]:.8f}", f"{field.stderr[i, j]:.3e}"])
        emit.write_csv(_out(args, f"density_N{args.N}.csv"),
                       ["i", "j", "density", "stderr"], rows, cfg)
        crows = [[f"{s.parameter:.6f}", f"{s.x:.6f}", f"{s.y:.6f}", s.source] for s in cont]
        emit.write_csv(_out(args, f"contour_N{args.N}.csv"),
                       ["param", "x", "y", "source"], crows, cfg)
    if "svg" in args.emit:
        emit.heatmap_svg(_out(args, f"density_N{args.N}.svg"), field, cfg)
    if "json" in args.emit:
        emit.write_json(_out(args, f"mc_run_N{args.N}.json"),
                        {"metadata": {k: str(v) for k, v in meta.items()},
                         "sup_distance": dist,
                         "contacts": {k: c["distance"] for k, c in contacts.items()}}, cfg)
    return 0


def cmd_bench(args):
    """Compare the compiled and pure sweep kernels on identical runs."""
    results = {}
    for name in mc.available_kernels():
        chain = mc.mc_init(args.N, seed=args.seed, mode="reference", kernel=name)
        t0 = time.time()
        mc.mc_run(chain, args.sweeps)
        dt = time.time() - t0
        results[name] = (dt, chain.state.h.copy(), chain.state.v.copy())
        print(f"{name:>9}: {args.sweeps} sweeps of N={args.N} in {dt:.3f}s "
              f"({args.sweeps / dt:.0f} sweeps/s)")
    if len(results) == 2:
        (d1, h1, v1), (d2, h2, v2) = results["compiled"], results["pure"]
        same = np.array_equal(h1, h2) and np.array_equal(v1, v2)
        print(f"speedup compiled/pure: x{d2 / d1:.1f}; trajectories identical: {same}")
        if not same:
            return 1
    return 0


def cmd_verify(args):
    from .acceptance import run_acceptance

    results = run_acceptance(quick=args.quick)
    n_pass = sum(r.passed for r in results)
    print(f"\n{n_pass}/{len(results)} criteria passed")
    return 0 if n_pass == len(results) else 1


def build_parser():
    ap = argparse.ArgumentParser(prog="refl6v",
                                 description="six-vertex model with a reflecting end")
    ap.add_argument("--config", help="flat key = value file; flags override")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("weights", help="print the Boltzmann weight sets")
    _angle_args(sp)
    sp.add_argument("--precision", type=int, default=None)
    sp.set_defaults(func=cmd_weights)

    sp = sub.add_parser("enumerate", help="exact partition function and correlations")
    _angle_args(sp)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--mode", choices=("transfer", "brute"), default="transfer")
    sp.add_argument("--correlations", action="store_true")
    sp.add_argument("--extended", type=int, default=None, metavar="L")
    sp.add_argument("--precision", type=int, default=None)
    sp.add_argument("--emit", default="", help="comma list: csv,json")
    sp.add_argument("--outdir", default="out")
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("det", help="determinant evaluations")
    _angle_args(sp)
    sp.add_argument("--N", type=int, required=True)
    sp.add_argument("--what", choices=("tsuchiya", "tau", "hN", "homogeneous", "partial-inhom"),
                    default="homogeneous")
    for alias in ("tsuchiya", "tau", "hN", "homogeneous", "partial-inhom"):
        sp.add_argument(f"--{alias}", dest="what", action="store_const", const=alias,
                        help=f"shorthand for --what {alias}")
    sp.add_argument("--precision", type=int, default=None)
    sp.add_argument("--emit", default="", help="comma list: csv")
    sp.add_argument("--outdir", default="out")
    sp.set_defaults(func=cmd_det)

    sp = sub.add_parser("curve", help="contact point, tangent family, arctic curve")
    sp.add_argument("--lambda", dest="lam", default="pi/4")
    sp.add_argument("--grid", type=int, default=200)
    sp.add_argument("--lines", type=int, default=12)
    sp.add_argument("--emit", default="svg", help="comma list: csv,svg")
    sp.add_argument("--outdir", default="out")
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("mc", help="Monte Carlo sampling and contour")
    sp.add_argument("--N", type=int, default=64)
    sp.add_argument("--sweeps", type=int, default=100000)
    sp.add_argument("--burn-in", dest="burn_in", type=int, default=20000)
    sp.add_argument("--thinning", type=int, default=10)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--epsilon", type=float, default=0.05)
    sp.add_argument("--init", choices=("reference", "exact-dp"), default="reference")
    sp.add_argument("--kernel", choices=("auto", "pure", "compiled"), default="auto")
    sp.add_argument("--emit", default="csv,json", help="comma list: csv,svg,json")
    sp.add_argument("--outdir", default="out")
    sp.set_defaults(func=cmd_mc)

    sp = sub.add_parser("bench", help="compare compiled and pure sweep kernels")
    sp.add_argument("--N", type=int, default=32)
    sp.add_argument("--sweeps", type=int, default=2000)
    sp.add_argument("--seed", type=int, default=1)
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("verify", help="run the acceptance suite")
    sp.add_argument("--quick", action="store_true")
    sp.set_defaults(func=cmd_verify)
    return ap, dict(sub.choices)


def main(argv=None):
    ap, subcommands = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if "--config" in argv:
        i = argv.index("--config")
        try:
            config = read_config(argv[i + 1])
        except (IndexError, OSError, ValueError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        # config entries become flags of the chosen subcommand; flags given
        # explicitly keep priority (the config flag is simply not appended)
        command = next(
            (a for j, a in enumerate(argv) if not a.startswith("-") and argv[j - 1] != "--config"),
            None,
        )
        sp = subcommands.get(command)
        if sp is not None:
            for k, v in config.items():
                flag = "--" + k.replace("_", "-")
                if flag in sp._option_string_actions and flag not in argv:
                    argv += [flag, v]
    args = ap.parse_args(argv)
    if hasattr(args, "emit"):
        args.emit = [e for e in str(args.emit).split(",") if e]
    try:
        return args.func(args)
    except (OutOfRegimeError, CapacityError, ValueError, ArithmeticError) as exc:
        msg = str(exc) or type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return 1


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
