"""``prg`` command line: generate, certify, census, diagnose and run the analytic checks.

Exit codes: 0 success, 2 usage or invalid parameters, 3 I/O or corrupt input,
4 exact-computation budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .errors import BudgetExceeded, GraphFormatError, PrgError

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_BUDGET = 0, 2, 3, 4


class CliIOError(Exception):
    pass


def _json_default(o):
    import numpy as np

    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"not serializable: {type(o).__name__}")


def _clean(x):
    """Replace non-finite floats so output stays strict JSON."""
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _config(args) -> dict:
    skip = {"func", "rows"}
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in vars(args).items() if k not in skip}


def _emit(args, result: dict, rows: list[dict] | None = None) -> None:
    header = {"version": __version__, "command": args.command, "config": _config(args), "seed": getattr(args, "seed", None)}
    if getattr(args, "format", "json") == "csv":
        buf = io.StringIO()
        buf.write(f"# version={__version__}\n")
        buf.write(f"# config={json.dumps(_clean(header['config']), default=_json_default)}\n")
        rows = rows if rows is not None else [{"key": k, "value": json.dumps(_clean(v), default=_json_default)} for k, v in result.items()]
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0].keys()), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        text = buf.getvalue()
    else:
        text = json.dumps(_clean({"header": header, "result": result}), default=_json_default, indent=2) + "\n"
    out = getattr(args, "out", None)
    if out:
        try:
            Path(out).write_text(text)
        except OSError as e:
            raise CliIOError(f"cannot write {out}: {e}") from e
    else:
        sys.stdout.write(text)


def _load(path):
    from .graph import read_graph

    try:
        return read_graph(path)
    except (OSError, GraphFormatError) as e:
        raise CliIOError(f"cannot read graph {path}: {e}") from e


# gen ----------------------------------------------------------------------------


def cmd_gen(args) -> int:
    from . import generators as G
    from .graph import write_graph

    fam = args.family
    if fam == "er":
        g = G.gen_er(args.n, args.p, args.seed)
    elif fam == "regular":
        g = G.gen_regular_switch(args.n, args.d, args.switches, args.seed)
    elif fam == "binary":
        g = G.gen_binary(args.k)
    elif fam == "geom":
        g = G.gen_geometric(args.n, args.d, args.p, args.seed)
    elif fam == "ergm":
        g = G.gen_ergm(args.n, args.beta, args.gamma, args.sweeps, args.seed)
    else:
        g = G.plant_clique(_load(args.input), args.r, args.seed)
    try:
        write_graph(g, args.output, args.graph_format)
    except OSError as e:
        raise CliIOError(f"cannot write {args.output}: {e}") from e
    args.format = "json"
    args.out = None
    _emit(args, {"n": g.n, "edges": g.edge_count, "output": str(args.output)})
    return EXIT_OK


# analysis commands ----------------------------------------------------------------------


def cmd_certify(args) -> int:
    from .certifier import certify

    g = _load(args.graph)
    cert = certify(g, p=args.assume_p, C=args.C, C0p=args.C0p, orders=tuple(args.orders), samples=args.samples, seed=args.seed)
    rows = [
        {"order": k, "deviation": cert.deviations[k], "delta_hat": cert.delta_hat[k], "exact": cert.exact[k]}
        for k in sorted(cert.deviations)
    ]
    _emit(args, cert.to_dict(), rows)
    return EXIT_OK


def cmd_census(args) -> int:
    from .motifs import census_report

    g = _load(args.graph)
    rep = census_report(g, args.p, args.s, mode=args.mode, seed=args.seed, samples=args.samples, budget=args.budget)
    d = rep.to_dict()
    _emit(args, d, d["classes"])
    return EXIT_OK


def cmd_diag(args) -> int:
    from .diagnostics import diagnose

    g = _load(args.graph)
    rep = diagnose(g, args.p, r_max=args.r_max, C_star=args.C_star, delta=args.delta, C_tilde=args.C_tilde, budget=args.budget)
    d = rep.to_dict()
    _emit(args, d, d["E_n"])
    return EXIT_OK


def cmd_ergm(args) -> int:
    from .ergm import ErgmModel, concentration_experiment, solve_fixed_point

    m = ErgmModel(args.beta, args.gamma)
    if args.action == "solve":
        fp = solve_fixed_point(m, grid=args.grid, tol=args.tol)
        d = {"beta": m.beta, "gamma": m.gamma, "roots": fp.roots, "slopes": fp.slopes, "p_star": fp.p_star, "regime": fp.regime.value}
        _emit(args, d, [{"root": r, "slope": s} for r, s in zip(fp.roots, fp.slopes)])
    else:
        rep = concentration_experiment(m, args.n, args.sweeps, args.replicas, args.seed)
        d = rep.to_dict()
        _emit(args, d, d["replicas"])
    return EXIT_OK


def cmd_geom(args) -> int:
    from .geometric import dglu_min_constant, threshold_tpd, validation_battery

    if args.action == "check":
        d = validation_battery(seed=args.seed, mc_samples=args.samples, kappa=args.kappa)
        _emit(args, d, [{k: v for k, v in c.items() if k in ("name", "pass")} for c in d["checks"]])
        return EXIT_OK if d["all_pass"] else 1
    spec = threshold_tpd(args.p, args.d)
    d = {"p": spec.p, "d": spec.d, "t": spec.t}
    if args.p < 0.5 and args.d >= 3:
        d["min_constant"] = dglu_min_constant(args.p, args.d)
    _emit(args, d)
    return EXIT_OK


def cmd_clique(args) -> int:
    from .clique import clique_regime, planted_certification_experiment, unimodality_profile, variance_ratio_bound

    if args.action == "regime":
        reg = clique_regime(args.n, args.r)
        vb = variance_ratio_bound(args.n, args.r)
        d = {"n": reg.n, "r": reg.r, "mu_log": reg.mu_log, "tv_bound": reg.tv_bound, "variance_full_log": vb.full_log, "variance_refined_log": vb.refined_log}
        if args.r >= 3 and 4 * args.r <= args.n:
            d["profile"] = unimodality_profile(args.n, args.r).to_dict()
        _emit(args, d)
    else:
        rep = planted_certification_experiment(args.n, args.eps, args.c, args.seeds, delta=args.delta, C=args.C)
        d = rep.to_dict()
        _emit(args, d, d["seeds"])
    return EXIT_OK


# parser -------------------------------------------------------------------------------------


def _common(p, seed=True, out=True):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if out:
        p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="prg", description="Pseudo-random graph certification and motif census.")
    ap.add_argument("--version", action="version", version=f"prg {__version__}")
    ap.add_argument("--threads", type=int, default=None, help="worker threads (falls back to PRG_THREADS)")
    sub = ap.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a graph file")
    gsub = gen.add_subparsers(dest="family", required=True)

    def gen_parser(name, help_):
        p = gsub.add_parser(name, help=help_)
        p.add_argument("-o", "--output", type=Path, required=True)
        p.add_argument("--graph-format", choices=("prgb", "edges"), default=None)
        p.set_defaults(func=cmd_gen)
        return p

    p = gen_parser("er", "Erdős–Rényi G(n, p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p = gen_parser("regular", "random d-regular graph by edge switching")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--switches", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p = gen_parser("binary", "GF(2) binary graph")
    p.add_argument("--k", type=int, required=True)
    p = gen_parser("geom", "spherical geometric graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p = gen_parser("ergm", "edge-triangle ERGM by Glauber dynamics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--sweeps", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p = gen_parser("plant", "plant a clique into an existing graph")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("certify", help="degree / co-degree certificate")
    p.add_argument("graph", type=Path)
    p.add_argument("--assume-p", type=float, default=None)
    p.add_argument("--C", type=float, default=3.0)
    p.add_argument("--C0p", type=float, default=1.0)
    p.add_argument("--orders", type=int, nargs="+", default=[1, 2, 3, 4])
    p.add_argument("--samples", type=int, default=1_000_000)
    _common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("census", help="induced motif census against the G(n, p) baseline")
    p.add_argument("graph", type=Path)
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--budget", type=int, default=20_000_000)
    _common(p)
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("diag", help="error functional, recursion bounds and good fraction")
    p.add_argument("graph", type=Path)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--r-max", type=int, default=4)
    p.add_argument("--C-star", type=float, default=32.0)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--C-tilde", type=float, default=3.0)
    p.add_argument("--budget", type=int, default=20_000_000)
    _common(p, seed=False)
    p.set_defaults(func=cmd_diag)

    p = sub.add_parser("ergm", help="ERGM fixed point or concentration experiment")
    p.add_argument("action", choices=("solve", "experiment"))
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--grid", type=int, default=10_000)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--sweeps", type=int, default=500)
    p.add_argument("--replicas", type=int, default=5)
    _common(p)
    p.set_defaults(func=cmd_ergm)

    p = sub.add_parser("geom", help="geometric-graph numerics")
    p.add_argument("action", choices=("check", "threshold"))
    p.add_argument("--p", type=float, default=0.3)
    p.add_argument("--d", type=int, default=100)
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--kappa", type=float, default=5.0)
    _common(p)
    p.set_defaults(func=cmd_geom)

    p = sub.add_parser("clique", help="clique-count Poisson regime or planted-clique experiment")
    p.add_argument("action", choices=("regime", "experiment"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--eps", type=float, default=0.4)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.62)
    p.add_argument("--C", type=float, default=3.0)
    p.add_argument("--seeds", type=int, nargs="+", default=[0, 1, 2])
    _common(p, seed=False)
    p.set_defaults(func=cmd_clique)
    return ap


def _set_threads(n: int | None) -> None:
    if n is None:
        env = os.environ.get("PRG_THREADS")
        n = int(env) if env and env.isdigit() else None
    if n is None:
        return
    import numba

    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "clique" and args.action == "regime" and args.r is None:
        parser.error("clique regime requires --r")
    try:
        _set_threads(args.threads)
        return args.func(args)
    except CliIOError as e:
        print(f"prg: {e}", file=sys.stderr)
        return EXIT_IO
    except BudgetExceeded as e:
        print(f"prg: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except PrgError as e:
        print(f"prg: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
