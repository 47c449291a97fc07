"""Command-line front end.

Every command writes one report (JSON or CSV) that embeds the resolved
configuration and the library version; the same configuration always
produces the same bytes.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import asymptotic_sweep, upper_bound_power
from .ci import LossSpec, duality_check, invert_test, loss_integral_check
from .critical import DEFAULT_CRITICAL_REPS, CriticalValueCache, critical_value
from .model import RawSample, aggregate
from .montecarlo import DEFAULT_SEED, SimConfig
from .power import TestSpec, minimax_power_exact, power_at
from .ci import least_favorable_mu
from .stats import format_norm_order, norm_order
from .treatment import aggregate_treatment, compare_tests_welfare

DIGITS = 10


class UsageError(Exception):
    pass


# -- argument parsing -------------------------------------------------------

def _count(text: str) -> int:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v.is_integer() or v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(v)


def _int_list(text: str) -> list[int]:
    return [_count(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _p_list(text: str) -> list[float]:
    try:
        return [norm_order(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _common(sp: argparse.ArgumentParser, reps: int, alpha: bool = True) -> None:
    if alpha:
        sp.add_argument("--alpha", type=_float_list, default=[0.05],
                        help="test level(s), comma separated (default 0.05)")
    sp.add_argument("--reps", type=_count, default=reps,
                    help=f"Monte Carlo replications; accepts 1e5 notation (default {reps:g})")
    sp.add_argument("--seed", type=int, default=DEFAULT_SEED,
                    help=f"master seed (default {DEFAULT_SEED})")
    sp.add_argument("--block-size", type=_count, default=1 << 15,
                    help="rows per random-number block; part of the reproducibility key")
    sp.add_argument("--threads", type=_count, default=None,
                    help="worker threads (default: all cores); never changes results")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--output", "-o", default="-", help="output path, '-' for stdout")
    sp.add_argument("--dry-run", action="store_true", help="print the resolved config and exit")


def _crit_opts(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--crit-reps", type=_count, default=DEFAULT_CRITICAL_REPS,
                    help=f"replications for Monte Carlo critical values (default {DEFAULT_CRITICAL_REPS:g})")
    sp.add_argument("--cache", default=None, help="JSON cache file for critical values")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="momentineq",
        description="Minimax tests and confidence intervals for Z ~ N(mu, I_k) moment inequalities.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("critval", help="least-favorable critical values")
    sp.add_argument("--k", type=_int_list, required=True, help="number(s) of moments")
    sp.add_argument("--p", type=_p_list, default=[math.inf], help="norm orders, e.g. 1,2,inf")
    sp.add_argument("--cache", default=None, help="JSON cache file for critical values")
    _common(sp, DEFAULT_CRITICAL_REPS)

    sp = sub.add_parser("power-curve", help="exact and simulated minimax power over b")
    sp.add_argument("--k", type=_int_list, required=True)
    sp.add_argument("--p", type=_p_list, default=[1.0, 2.0, math.inf])
    sp.add_argument("--b", type=_float_list, default=[0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4])
    _crit_opts(sp)
    _common(sp, 100_000)

    sp = sub.add_parser("duality", help="test/CI duality and loss-integral checks")
    sp.add_argument("--k", type=_int_list, required=True)
    sp.add_argument("--p", type=_p_list, default=[1.0, 2.0, math.inf])
    sp.add_argument("--b", type=_float_list, default=[0.5, 1, 2, 3, 4])
    sp.add_argument("--loss", default="linear,quadratic",
                    help="losses for the integral check: linear, quadratic or none")
    _crit_opts(sp)
    _common(sp, 100_000)

    sp = sub.add_parser("upper-bound", help="Neyman-Pearson bound and large-k sweep")
    sp.add_argument("--k", type=_int_list, default=[2, 5, 10, 50])
    sp.add_argument("--b", type=_float_list, default=[1, 2, 3])
    sp.add_argument("--epsilon", type=float, default=0.5)
    sp.add_argument("--sweep-k", type=_int_list, default=[],
                    help="k values for the sqrt(log k) sweep (empty: skip)")
    _common(sp, 100_000)

    sp = sub.add_parser("treatment", help="welfare-gain minimax power comparison")
    sp.add_argument("--k", type=_count, required=True)
    sp.add_argument("--p", type=_p_list, default=[1.0, 2.0, math.inf])
    sp.add_argument("--b", type=_float_list, default=[0.25, 0.5, 0.75, 1.0])
    _crit_opts(sp)
    _common(sp, 100_000)

    sp = sub.add_parser("invert", help="upper confidence bound for observed data")
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--z", type=_float_list, help="observed Z vector, comma separated")
    src.add_argument("--csv", help="CSV with header label,value (moments) or x,d,y (treatment)")
    sp.add_argument("--k", type=_count, default=None, help="number of labels in --csv (default: max label)")
    sp.add_argument("--p", type=_p_list, default=[1.0, 2.0, math.inf])
    sp.add_argument("--tol", type=float, default=1e-8)
    _crit_opts(sp)
    _common(sp, DEFAULT_CRITICAL_REPS, alpha=True)
    return ap


# -- output ----------------------------------------------------------------

def _num(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return float(f"{x:.{DIGITS}g}")
    if isinstance(x, dict):
        return {k: _num(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_num(v) for v in x]
    return x


def _cell(x) -> str:
    x = _num(x)
    if isinstance(x, float):
        return f"{x:.{DIGITS}g}"
    return str(x)


def render(command: str, config: dict, rows: list[dict], failures: list[dict], fmt: str,
           extra: dict | None = None) -> str:
    header = {"tool": "momentineq", "version": __version__, "command": command, "config": _num(config)}
    if fmt == "json":
        doc = dict(header)
        doc.update(_num(extra or {}))
        doc["results"] = _num(rows)
        doc["failures"] = failures
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# momentineq {__version__} {command}\n")
    buf.write("# config: " + json.dumps(header["config"], sort_keys=True) + "\n")
    for f in failures:
        buf.write("# failure: " + json.dumps(f, sort_keys=True) + "\n")
    if rows:
        fields = list(rows[0])
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(fields)
        for r in rows:
            w.writerow([_cell(r.get(f)) for f in fields])
    return buf.getvalue()


# -- commands --------------------------------------------------------------

def _sim(args, reps=None) -> SimConfig:
    return SimConfig(reps=reps or args.reps, seed=args.seed, block_size=args.block_size,
                     threads=args.threads)


def _resolved(args) -> dict:
    skip = {"output", "dry_run", "threads", "format", "command", "cache"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        if k == "p":
            v = [format_norm_order(p) for p in v]
        out[k] = v
    return out


class _Critical:
    def __init__(self, args):
        self.cfg = _sim(args, getattr(args, "crit_reps", None) or args.reps)
        self.cache = CriticalValueCache(args.cache) if getattr(args, "cache", None) else None

    def test(self, k: int, p: float, alpha: float) -> TestSpec:
        cv = self.cache.get(k, p, alpha, self.cfg) if self.cache is not None else critical_value(k, alpha, p, self.cfg)
        return TestSpec(p, alpha, cv)

    def close(self):
        if self.cache is not None:
            self.cache.save()


def _grid(points, fn, failures):
    rows = []
    for point in points:
        try:
            rows.extend(fn(*point))
        except (ValueError, ArithmeticError) as exc:
            failures.append({"point": _num(list(point)), "error": f"{type(exc).__name__}: {exc}"})
    return rows


def cmd_critval(args):
    crit = _Critical(args)
    failures = []

    def one(k, p, alpha):
        d = crit.test(k, p, alpha).critical.to_dict()
        return [{"k": d["k"], "p": d["p"], "alpha": d["alpha"], "value": d["value"], "method": d["method"],
                 "reps": d["reps"] or "", "seed": d["seed"] if d["seed"] is not None else "",
                 "mc_std_error": d["mc_std_error"] if d["mc_std_error"] is not None else ""}]

    rows = _grid([(k, p, a) for k in args.k for p in args.p for a in args.alpha], one, failures)
    crit.close()
    return rows, failures, {}


def cmd_power_curve(args):
    crit = _Critical(args)
    cfg = _sim(args)
    failures = []

    def one(k, p, alpha):
        test = crit.test(k, p, alpha)
        out = []
        for b in args.b:
            exact = minimax_power_exact(test, b)
            mc = power_at(test, least_favorable_mu(k, b), 0.0, cfg)
            base = {"k": k, "p": format_norm_order(p), "alpha": alpha, "b": b}
            out.append({**base, "kind": "exact", "estimate": exact, "se": 0.0, "reps": "", "seed": "",
                        "critical_value": test.c})
            out.append({**base, "kind": "monte_carlo", "estimate": mc.estimate, "se": mc.std_error,
                        "reps": mc.reps, "seed": mc.seed, "critical_value": test.c})
        return out

    rows = _grid([(k, p, a) for k in args.k for p in args.p for a in args.alpha], one, failures)
    crit.close()
    return rows, failures, {}


def cmd_duality(args):
    crit = _Critical(args)
    cfg = _sim(args)
    losses = [s.strip() for s in args.loss.split(",") if s.strip() and s.strip() != "none"]
    for name in losses:
        if name not in ("linear", "quadratic"):
            raise UsageError(f"--loss accepts linear, quadratic or none; got {name!r}")
    failures = []

    def one(k, p, alpha):
        test = crit.test(k, p, alpha)
        out = []
        for b in args.b:
            r = duality_check(test, b, cfg)
            out.append({"check": "duality", "k": k, "p": format_norm_order(p), "alpha": alpha, "b": b,
                        "loss": f"zero_one({b:g})", "lhs": r.lhs, "rhs": r.rhs, "gap": r.gap, "se": r.se})
        for name in losses:
            r = loss_integral_check(test, LossSpec(name), cfg)
            out.append({"check": "loss_integral", "k": k, "p": format_norm_order(p), "alpha": alpha,
                        "b": "", "loss": name, "lhs": r.direct, "rhs": r.integrated, "gap": r.gap,
                        "se": r.se})
        return out

    rows = _grid([(k, p, a) for k in args.k for p in args.p for a in args.alpha], one, failures)
    crit.close()
    return rows, failures, {}


def cmd_upper_bound(args):
    cfg = _sim(args)
    failures = []

    def one(k, b, alpha):
        r = upper_bound_power(k, b, alpha, cfg)
        return [{"table": "bound", "k": k, "alpha": alpha, "b": b, "beta_bar": r.beta_bar, "se": r.se,
                 "beta_inf": r.beta_inf, "log_c_tilde": r.log_c_tilde, "reps": r.reps, "seed": r.seed}]

    rows = _grid([(k, b, a) for k in args.k for b in args.b for a in args.alpha], one, failures)
    if args.sweep_k:
        def sweep(alpha):
            return [{"table": "sweep", "k": r.k, "alpha": alpha, "b_minus": r.b_minus,
                     "beta_bar_minus": r.beta_bar_minus, "se": r.se_minus, "b_plus": r.b_plus,
                     "beta_inf_plus": r.beta_inf_plus, "reps": cfg.reps, "seed": cfg.seed}
                    for r in asymptotic_sweep(alpha, args.epsilon, args.sweep_k, cfg)]
        sweep_rows = _grid([(a,) for a in args.alpha], sweep, failures)
        if args.format == "csv" and rows and sweep_rows:
            # one rectangular table: union of columns
            cols = list(dict.fromkeys([*rows[0], *sweep_rows[0]]))
            rows = [{c: r.get(c, "") for c in cols} for r in rows + sweep_rows]
        else:
            rows += sweep_rows
    return rows, failures, {}


def cmd_treatment(args):
    crit = _Critical(args)
    cfg = _sim(args)
    failures = []

    def one(alpha):
        tests = [crit.test(args.k, p, alpha) for p in args.p]
        return [{"k": args.k, "alpha": alpha, **r.to_dict()}
                for r in compare_tests_welfare(tests, args.b, cfg)]

    rows = _grid([(a,) for a in args.alpha], one, failures)
    crit.close()
    return rows, failures, {}


def read_invert_csv(path, k=None):
    """Load ``label,value`` or ``x,d,y`` rows; returns ``(z, kind)``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = [h.strip().lower() for h in next(reader, [])]
        data = [row for row in reader if row and any(c.strip() for c in row)]
    if header == ["label", "value"]:
        x = np.array([float(r[0]) for r in data])
        w = np.array([float(r[1]) for r in data])
        kk = k or int(x.max())
        return aggregate(RawSample(x, w, kk)), "moments"
    if header == ["x", "d", "y"]:
        x = np.array([float(r[0]) for r in data])
        d = np.array([float(r[1]) for r in data])
        y = np.array([float(r[2]) for r in data])
        kk = k or int(x.max())
        return aggregate_treatment(x, d, y, kk), "treatment"
    raise UsageError(f"CSV header must be 'label,value' or 'x,d,y', got {','.join(header)!r}")


def cmd_invert(args):
    if args.csv:
        z, kind = read_invert_csv(args.csv, args.k)
    else:
        z, kind = np.asarray(args.z, dtype=np.float64), "moments"
    crit = _Critical(args)
    failures = []
    k = z.size

    def one(p, alpha):
        test = crit.test(k, p, alpha)
        row = {"k": k, "p": format_norm_order(p), "alpha": alpha, "critical_value": test.c}
        if kind == "moments":
            row["c_hat"] = invert_test(test, z, args.tol).c_hat
        else:
            # lower confidence bound on max_j tau(j): invert the sign-flipped family
            row["tau_lower"] = -invert_test(test, -z, args.tol).c_hat
        return [row]

    rows = _grid([(p, a) for p in args.p for a in args.alpha], one, failures)
    crit.close()
    return rows, failures, {"data": {"kind": kind, "z": z.tolist()}}


COMMANDS = {
    "critval": cmd_critval,
    "power-curve": cmd_power_curve,
    "duality": cmd_duality,
    "upper-bound": cmd_upper_bound,
    "treatment": cmd_treatment,
    "invert": cmd_invert,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _resolved(args)
    if args.dry_run:
        sys.stdout.write(json.dumps({"command": args.command, "version": __version__,
                                     "config": _num(config)}, indent=2) + "\n")
        return 0
    try:
        rows, failures, extra = COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"momentineq: error: {exc}\n")
        return 1
    text = render(args.command, config, rows, failures, args.format, extra)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    if failures:
        for f in failures:
            sys.stderr.write(f"failed at {f['point']}: {f['error']}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
