"""Command line: ``gwlocal sample | exact | converge | tilt-solve``.

Every file written carries the validated run configuration (JSON ``config``
key, or ``# config:`` lines at the top of CSV files).  The thread count and
the output directory are deliberately left out of it: they change wall time
and location, never the numbers.

Exit codes: 0 success, 2 configuration error, 3 budget exceeded,
4 zero-mass event.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import __version__
from .convergence import (generation_ratio_report, kesten_fidelity, progeny_sampler_check,
                          ratio_sequence,
                          tilt_invariance_check, tv_at_height, tv_reports_csv)
from .errors import (BudgetExceeded, GWError, InconsistentBudget, LatticeMiss,
                     ZeroMassEvent)
from .events import EventSpec, parse_event, parse_family, snap_to_lattice
from .exact import (dwass_pmf, enumerate_trees, geometric_generation_pmf,
                    height_laws)
from .offspring import NotGeneric, OffspringDistribution, TiltedFamily, critical_theta
from .rng import default_threads, make_rng
from .samplers import (SamplerBudget, bfs_key_to_tree, conditioned_restriction_batch,
                       sample_conditioned_batch, sample_gw, sample_kesten,
                       sample_progeny_exact_batch)
from .trees import as_degree_set

EXIT_OK, EXIT_CONFIG, EXIT_BUDGET, EXIT_ZERO_MASS = 0, 2, 3, 4


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    dist: dict
    seed: Optional[int] = None
    event: Optional[dict] = None
    method: Optional[str] = None
    budgets: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    out: Optional[str] = None
    version: str = __version__

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("out")  # where files land is not part of what was computed
        return d

    def header(self) -> str:
        return "config: " + json.dumps(self.to_json(), sort_keys=True)


# distribution parsing ---------------------------------------------------------------

def parse_dist(text: Optional[str]) -> OffspringDistribution:
    """``binary``, ``binary:0.6``, ``geometric:0.5``, ``poisson:0.9``,
    ``power_law:6:0.5``, inline JSON, or a path to a JSON file."""
    if text is None:
        return OffspringDistribution.binary(0.5)
    t = text.strip()
    try:
        if t.startswith("{"):
            return OffspringDistribution.from_spec(json.loads(t))
        if os.path.exists(t):
            with open(t) as fh:
                return OffspringDistribution.from_spec(json.load(fh))
        name, *args = t.split(":")
        vals = [float(a) for a in args]
        if name == "binary":
            return OffspringDistribution.binary(*vals)
        if name in ("geometric", "geometric_mixture"):
            return OffspringDistribution.geometric_mixture(*(vals or [0.5]))
        if name == "poisson":
            return OffspringDistribution.poisson(*(vals or [1.0]))
        if name == "power_law":
            return OffspringDistribution.power_law(*vals)
    except (ValueError, TypeError, KeyError, json.JSONDecodeError) as e:
        raise ConfigError(f"bad distribution {text!r}: {e}") from e
    raise ConfigError(f"unknown distribution {text!r}; try binary, geometric:0.5 or a JSON file")


# output -------------------------------------------------------------------------------

def _write(cfg: RunConfig, stem: str, payload: dict, csv_text: Optional[str]):
    """Write ``stem``.json (and ``stem``.csv) with the config embedded."""
    doc = {"config": cfg.to_json(), **payload}
    text = json.dumps(doc, indent=2, sort_keys=True, default=_jsonable)
    if cfg.out == "-":
        sys.stdout.write(text + "\n")
        if csv_text is not None:
            sys.stdout.write(csv_text)
        return
    base = os.path.join(cfg.out or ".", stem)
    os.makedirs(os.path.dirname(base) or ".", exist_ok=True)
    with open(base + ".json", "w") as fh:
        fh.write(text + "\n")
    written = [base + ".json"]
    if csv_text is not None:
        with open(base + ".csv", "w") as fh:
            fh.write(csv_text)
        written.append(base + ".csv")
    for w in written:
        print(w)


def _jsonable(o):
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "degrees"):
        return list(o.degrees)
    return str(o)


def _budget(args) -> SamplerBudget:
    try:
        return SamplerBudget(args.max_nodes, args.max_rejections)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _event(text):
    try:
        return parse_event(text)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def _threads(args) -> int:
    return args.threads if args.threads is not None else default_threads()


# subcommands ---------------------------------------------------------------------------

def cmd_sample(args) -> int:
    p = parse_dist(args.dist)
    budget = _budget(args)
    event = _event(args.event) if args.event else None
    if args.kesten and event is not None:
        raise ConfigError("--kesten and --event are exclusive")
    if args.exact_cycle and (event is None or event.functional != "card" or event.window != 1):
        raise ConfigError("--exact-cycle needs an event of the form card=N")
    cfg = RunConfig("sample", p.to_spec(), args.seed, event.to_json() if event else None,
                    "kesten" if args.kesten else "exact_cycle" if args.exact_cycle
                    else "rejection" if event else "gw",
                    asdict(budget), {"count": args.n, "height": args.height}, args.out)
    rng = make_rng(args.seed)
    if args.kesten:
        samples = [sample_kesten(p, args.height, rng).to_json() for _ in range(args.n)]
    elif args.exact_cycle:
        trees = sample_progeny_exact_batch(p, event.n, rng, args.n, budget)
        samples = [list(t.degrees) for t in trees]
    elif event is not None and event.functional in ("height", "generation"):
        # not Card-bounded: emit r_h of the conditioned tree, h = --height
        cfg.method = "rejection_generationwise"
        keys, rejected = conditioned_restriction_batch(p, event, args.height, rng, args.n, budget)
        samples = [list(bfs_key_to_tree(k, args.height).degrees) for k in keys]
        cfg.params["rejections"] = rejected
    elif event is not None:
        trees, rejected = sample_conditioned_batch(p, event, rng, args.n, budget)
        samples = [list(t.degrees) for t in trees]
        cfg.params["rejections"] = rejected
    else:
        samples = [list(sample_gw(p, rng, budget).degrees) for _ in range(args.n)]
    _write(cfg, "sample", {"samples": samples}, None)
    return EXIT_OK


def cmd_exact(args) -> int:
    p = parse_dist(args.dist)
    what = args.what
    cfg = RunConfig("exact " + what, p.to_spec(), out=args.out,
                    params={k: getattr(args, k) for k in ("kmax", "nmax", "q", "n", "card_max", "k")})
    header = cfg.header()
    if what == "progeny":
        law = dwass_pmf(p, args.k, args.kmax)
        rows = [(int(i), float(v)) for i, v in zip(law.indices, law.probs)]
        csv_text = _rows_csv(header, ["n", "mass"], rows)
        _write(cfg, "exact_progeny", {"pmf": law.to_json()}, csv_text)
    elif what == "height":
        tail, pmf = height_laws(p, args.nmax)
        rows = [(n, tail[n], pmf[n]) for n in range(args.nmax + 1)]
        csv_text = _rows_csv(header, ["n", "tail", "pmf"], rows)
        _write(cfg, "exact_height", {"tail": tail.to_json(), "pmf": pmf.to_json()}, csv_text)
    elif what == "generation":
        q = args.q if args.q is not None else p.params.get("q")
        if q is None:
            raise ConfigError("exact generation needs --q (geometric mixture parameter)")
        cfg.dist = OffspringDistribution.geometric_mixture(q).to_spec()
        cfg.params["q"] = q
        header = cfg.header()
        rows = [(k, geometric_generation_pmf(q, args.n, k)) for k in range(args.kmax + 1)]
        csv_text = _rows_csv(header, ["k", "probability"], rows)
        _write(cfg, "exact_generation", {"n": args.n, "pmf": [r[1] for r in rows]}, csv_text)
    elif what == "enumerate":
        rows = [(json.dumps(list(t.degrees)), t.card, pr)
                for t, pr in enumerate_trees(p, args.card_max, 1, args.max_trees)]
        csv_text = _rows_csv(header, ["tree", "card", "probability"], rows)
        _write(cfg, "exact_enumerate",
               {"trees": [{"degrees": json.loads(r[0]), "probability": r[2]} for r in rows],
                "mass": math.fsum(r[2] for r in rows)}, csv_text)
    return EXIT_OK


def _rows_csv(header, columns, rows) -> str:
    from .convergence import _csv
    return _csv(header, columns, rows)


def _grid(args):
    lo, hi, step = args.nmin, args.nmax, args.nstep
    if lo < 0 or hi < lo or step < 1:
        raise ConfigError("need 0 <= --nmin <= --nmax and --nstep >= 1")
    return list(range(lo, hi + 1, step))


def cmd_converge(args) -> int:
    p = parse_dist(args.dist)
    what = args.what
    cfg = RunConfig("converge " + what, p.to_spec(), args.seed, out=args.out)
    if what == "ratio":
        fam = _family(args)
        ns = _grid(args)
        cfg.event = fam.to_json()
        cfg.params = {"n": ns[:1] + ns[-1:], "nstep": args.nstep, "tol": args.tol}
        rep = ratio_sequence(p, fam, ns, args.tol)
        _write(cfg, "converge_ratio", {"report": rep.to_json()}, rep.to_csv(cfg.header()))
    elif what == "tv":
        fam = _family(args)
        method = "monte_carlo" if args.mc else "exact"
        cfg.event, cfg.method = fam.to_json(), method
        cfg.params = {"h": args.h, "n": _grid(args), "m": args.m, "card_max": args.card_max,
                      "max_trees": args.max_trees}
        cfg.budgets = asdict(_budget(args))
        reports = []
        seen = set()
        for n in _grid(args):
            ev = fam.with_n(n)
            ev, _ = snap_to_lattice(ev, p.span)
            if ev in seen:
                continue
            seen.add(ev)
            reports.append(tv_at_height(p, ev, args.h, method, args.m, args.seed,
                                        _threads(args), args.card_max, args.max_trees,
                                        _budget(args)))
        _write(cfg, "converge_tv", {"reports": [r.to_json() for r in reports]},
               tv_reports_csv(reports, cfg.header()))
    elif what == "kesten":
        cfg.method = "monte_carlo"
        cfg.params = {"h": args.h, "m": args.m}
        rep = kesten_fidelity(p, args.h, args.m, args.seed, _threads(args))
        _write(cfg, "converge_kesten", {"report": rep.to_json()},
               tv_reports_csv([rep], cfg.header()))
    elif what == "progeny":
        cfg.method = "monte_carlo"
        cfg.params = {"n": args.n, "h": args.h, "m": args.m}
        cfg.budgets = asdict(_budget(args))
        rep = progeny_sampler_check(p, args.n, args.h, args.m, args.seed, _threads(args),
                                    _budget(args))
        rows = [(json.dumps(s["tree"]), s["count"]) for s in rep.to_json()["shapes"]]
        _write(cfg, "converge_progeny", {"report": rep.to_json()},
               _rows_csv(cfg.header(), ["tree", "count"], rows))
    elif what == "tilt":
        a = as_degree_set(args.A)
        thetas = args.theta or [1.0]
        cfg.params = {"A": a.to_json(), "theta": thetas, "n": args.n, "card_max": args.card_max}
        rep = tilt_invariance_check(p, a, thetas, args.n, args.card_max, args.max_trees)
        _write(cfg, "converge_tilt", {"report": rep.to_json()}, rep.to_csv(cfg.header()))
    elif what == "generation":
        q = args.q if args.q is not None else p.params.get("q")
        if q is None:
            raise ConfigError("converge generation needs --q")
        power = args.alpha_power
        cfg.dist = OffspringDistribution.geometric_mixture(q).to_spec()
        cfg.params = {"q": q, "alpha": f"n^{power}", "j": args.j, "n": _grid(args)}
        rep = generation_ratio_report(q, [n for n in _grid(args) if n >= args.j],
                                      lambda n: max(1, n ** power), args.j, args.tol,
                                      f"n^{power}")
        _write(cfg, "converge_generation", {"report": rep.to_json()}, rep.to_csv(cfg.header()))
    return EXIT_OK


def _family(args) -> EventSpec:
    try:
        fam = parse_family(args.event, args.window)
    except ValueError as e:
        raise ConfigError(str(e)) from e
    if args.A is not None and fam.functional == "outdeg":
        fam = EventSpec("outdeg", fam.n, fam.window, as_degree_set(args.A))
    return fam


def cmd_tilt_solve(args) -> int:
    p = parse_dist(args.dist)
    a = as_degree_set(args.A)
    fam = TiltedFamily(p, a)
    cfg = RunConfig("tilt-solve", p.to_spec(), out=args.out,
                    params={"A": a.to_json(), "tol_root": args.tol_root})
    res = critical_theta(fam, args.tol_root)
    lo, hi = fam.interval()
    payload = {"interval": [lo, hi if math.isfinite(hi) else "inf"]}
    if isinstance(res, NotGeneric):
        payload.update({"generic": False, "theta_c": None,
                        "mean_at_edge": res.mean_at_edge, "note": res.note})
        rows = []
    else:
        tilted = fam.tilt(res)
        payload.update({"generic": True, "theta_c": res, "tilted": tilted.to_spec(),
                        "tilted_mean": tilted.mean})
        rows = [(k, v) for k, v in tilted.items()]
    _write(cfg, "tilt_solve", payload, _rows_csv(cfg.header(), ["k", "probability"], rows))
    return EXIT_OK


# parser ---------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gwlocal",
                                 description="Local limits of conditioned Galton-Watson trees.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, seed=False):
        sp.add_argument("--dist", help="binary[:p0], geometric[:q], poisson[:lam], "
                        "power_law:alpha:p0, inline JSON or a JSON file (default binary)")
        sp.add_argument("--out", default=".", help="output directory, or - for stdout")
        if seed:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--threads", type=int, default=None,
                            help="worker threads (default $GWLOCAL_THREADS or 1)")
            sp.add_argument("--max-nodes", type=int, default=1_000_000)
            sp.add_argument("--max-rejections", type=int, default=10_000_000)

    s = sub.add_parser("sample", help="draw trees")
    common(s, seed=True)
    s.add_argument("--n", type=int, default=1, help="number of draws")
    s.add_argument("--kesten", action="store_true", help="draw Kesten prefixes")
    s.add_argument("--height", type=int, default=2, help="prefix height for --kesten")
    s.add_argument("--event", help="condition on e.g. card=5, leaves=3, outdeg[2]=4")
    s.add_argument("--exact-cycle", action="store_true",
                   help="exact cycle-lemma sampler for card=N")
    s.set_defaults(func=cmd_sample)

    e = sub.add_parser("exact", help="exact laws")
    e.add_argument("what", choices=["progeny", "height", "generation", "enumerate"])
    common(e)
    e.add_argument("--kmax", type=int, default=50)
    e.add_argument("--k", type=int, default=1, help="forest size for progeny")
    e.add_argument("--nmax", type=int, default=100)
    e.add_argument("--q", type=float, default=None)
    e.add_argument("--n", type=int, default=10)
    e.add_argument("--card-max", type=int, default=9)
    e.add_argument("--max-trees", type=int, default=20_000)
    e.set_defaults(func=cmd_exact)

    c = sub.add_parser("converge", help="ratio, TV, tilt and generation diagnostics")
    c.add_argument("what", choices=["ratio", "tv", "kesten", "progeny", "tilt", "generation"])
    common(c, seed=True)
    c.add_argument("--event", default="height_ge",
                   help="family: height_ge, height_eq, card, card_ge, leaves, outdeg[..]")
    c.add_argument("--window", type=int, default=None, help="window n0 of the event")
    c.add_argument("--A", default=None, help="degree set, e.g. 0 or 0,2 or N or N*")
    c.add_argument("--nmin", type=int, default=1)
    c.add_argument("--nmax", type=int, default=10)
    c.add_argument("--nstep", type=int, default=1)
    c.add_argument("--h", type=int, default=2)
    c.add_argument("--exact", action="store_true", help="exact TV (default)")
    c.add_argument("--mc", action="store_true", help="Monte Carlo TV")
    c.add_argument("--m", type=int, default=100_000, help="Monte Carlo sample size")
    c.add_argument("--card-max", type=int, default=None)
    c.add_argument("--max-trees", type=int, default=20_000)
    c.add_argument("--theta", type=float, action="append")
    c.add_argument("--n", type=int, default=2, help="L_A value for tilt, Card for progeny")
    c.add_argument("--q", type=float, default=None)
    c.add_argument("--alpha-power", type=int, default=1, help="alpha_n = n^power")
    c.add_argument("--j", type=int, default=1)
    c.add_argument("--tol", type=float, default=0.01)
    c.set_defaults(func=cmd_converge)

    t = sub.add_parser("tilt-solve", help="critical tilt parameter theta_c")
    common(t)
    t.add_argument("--A", default="N")
    t.add_argument("--tol-root", type=float, default=1e-10)
    t.set_defaults(func=cmd_tilt_solve)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "what", None) == "tilt" and args.A is None:
        args.A = "N"
    if getattr(args, "what", None) == "tilt" and args.card_max is None:
        args.card_max = 11
    if getattr(args, "exact", False) and getattr(args, "mc", False):
        print("error: --exact and --mc are exclusive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, InconsistentBudget) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetExceeded as e:
        knob = f" (raise {e.parameter})" if e.parameter else ""
        print(f"budget exceeded: {e}{knob}", file=sys.stderr)
        return EXIT_BUDGET
    except (ZeroMassEvent, LatticeMiss) as e:
        print(f"zero-mass event: {e}", file=sys.stderr)
        return EXIT_ZERO_MASS
    except (GWError, ValueError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
